// SPDX-License-Identifier: Apache-2.0
#include "reference.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace ssnaps::ref {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

Spectrogram stft(std::span<const double> x, const StftConfig& cfg) {
    cfg.validate();
    const std::size_t frames = stft_frame_count(x.size(), cfg);
    const std::size_t bins = cfg.bins();
    const std::vector<double> w = cfg.hann();

    Spectrogram g;
    g.bins = bins;
    g.frames = frames;
    g.z.assign(bins * frames, {0.0, 0.0});
    for (std::size_t f = 0; f < frames; ++f) {
        const std::size_t start = f * cfg.hop;
        for (std::size_t k = 0; k < bins; ++k) {
            std::complex<double> acc{0.0, 0.0};
            for (std::size_t t = 0; t < cfg.window_len; ++t) {
                const std::size_t s = start + t;
                if (s >= x.size()) break;
                const double arg = kTwoPi * static_cast<double>(k) *
                                   static_cast<double>(t) /
                                   static_cast<double>(cfg.fft_size);
                acc += w[t] * x[s] *
                       std::complex<double>{std::cos(arg), -std::sin(arg)};
            }
            g.z[f * bins + k] = acc;
        }
    }
    return g;
}

std::vector<double> stft_adjoint(const Spectrogram& g, std::size_t len,
                                 const StftConfig& cfg) {
    cfg.validate();
    if (g.bins != cfg.bins())
        throw std::invalid_argument("ref::stft_adjoint: bin count mismatch");
    const std::vector<double> w = cfg.hann();
    std::vector<double> out(len, 0.0);
    for (std::size_t f = 0; f < g.frames; ++f) {
        const std::size_t start = f * cfg.hop;
        for (std::size_t k = 0; k < g.bins; ++k) {
            const std::complex<double> zeta = g.z[f * g.bins + k];
            for (std::size_t t = 0; t < cfg.window_len; ++t) {
                const std::size_t s = start + t;
                if (s >= len) break;
                const double arg = kTwoPi * static_cast<double>(k) *
                                   static_cast<double>(t) /
                                   static_cast<double>(cfg.fft_size);
                out[s] += w[t] * (zeta.real() * std::cos(arg) -
                                  zeta.imag() * std::sin(arg));
            }
        }
    }
    return out;
}

std::vector<double> rdft_forward(std::span<const double> x) {
    const std::size_t d = x.size();
    const double sd = std::sqrt(static_cast<double>(d));
    const double sp = std::sqrt(2.0 / static_cast<double>(d));
    std::vector<double> c(d, 0.0);
    const std::size_t kmax = (d % 2 == 0) ? d / 2 - 1 : (d - 1) / 2;
    for (std::size_t t = 0; t < d; ++t) c[0] += x[t] / sd;
    for (std::size_t k = 1; k <= kmax; ++k) {
        for (std::size_t t = 0; t < d; ++t) {
            const double arg =
                kTwoPi * static_cast<double>(k) * static_cast<double>(t) /
                static_cast<double>(d);
            c[2 * k - 1] += sp * std::cos(arg) * x[t];
            c[2 * k] += sp * std::sin(arg) * x[t];
        }
    }
    if (d % 2 == 0)
        for (std::size_t t = 0; t < d; ++t)
            c[d - 1] += (t % 2 == 0 ? 1.0 : -1.0) * x[t] / sd;
    return c;
}

std::vector<double> rdft_inverse(std::span<const double> coeffs) {
    const std::size_t d = coeffs.size();
    const double sd = std::sqrt(static_cast<double>(d));
    const double sp = std::sqrt(2.0 / static_cast<double>(d));
    std::vector<double> x(d, 0.0);
    const std::size_t kmax = (d % 2 == 0) ? d / 2 - 1 : (d - 1) / 2;
    for (std::size_t t = 0; t < d; ++t) {
        double acc = coeffs[0] / sd;
        for (std::size_t k = 1; k <= kmax; ++k) {
            const double arg =
                kTwoPi * static_cast<double>(k) * static_cast<double>(t) /
                static_cast<double>(d);
            acc += sp * (coeffs[2 * k - 1] * std::cos(arg) +
                         coeffs[2 * k] * std::sin(arg));
        }
        if (d % 2 == 0) acc += (t % 2 == 0 ? 1.0 : -1.0) * coeffs[d - 1] / sd;
        x[t] = acc;
    }
    return x;
}

double rec_loss(std::span<const double> y,
                std::span<const std::vector<double>> estimates,
                const StftConfig& cfg) {
    std::vector<double> m(y.size(), 0.0);
    for (const auto& e : estimates) {
        if (e.size() != y.size())
            throw std::invalid_argument("ref::rec_loss: length mismatch");
        for (std::size_t t = 0; t < m.size(); ++t) m[t] += e[t];
    }
    const Spectrogram zy = ref::stft(y, cfg);
    const Spectrogram zm = ref::stft(m, cfg);
    double loss = 0.0;
    for (std::size_t i = 0; i < zy.z.size(); ++i) {
        const auto compress_one = [](std::complex<double> z) {
            const double mag = std::max(std::abs(z), 1e-12);
            return z * std::pow(mag, -1.0 / 3.0);
        };
        const std::complex<double> d = compress_one(zy.z[i]) - compress_one(zm.z[i]);
        loss += std::norm(d);
    }
    return loss;
}

}  // namespace ssnaps::ref
