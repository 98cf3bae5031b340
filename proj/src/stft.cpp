// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/stft.hpp"

#include <cmath>
#include <cstdint>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "fft_plans.hpp"

namespace ssnaps {

void StftConfig::validate() const {
    if (window_len < 2) throw std::invalid_argument("stft: window_len must be >= 2");
    if (hop < 1 || hop >= window_len)
        throw std::invalid_argument("stft: need 1 <= hop < window_len");
    if (fft_size < window_len)
        throw std::invalid_argument("stft: fft_size must be >= window_len");
}

std::vector<double> StftConfig::hann() const {
    std::vector<double> w(window_len);
    const double two_pi = 2.0 * std::numbers::pi;
    for (std::size_t t = 0; t < window_len; ++t)
        w[t] = 0.5 * (1.0 - std::cos(two_pi * static_cast<double>(t) /
                                     static_cast<double>(window_len)));
    return w;
}

std::size_t stft_frame_count(std::size_t len, const StftConfig& cfg) {
    if (len < cfg.window_len)
        throw std::invalid_argument("stft: signal shorter than one window");
    const std::size_t rest = len - cfg.window_len;
    return 1 + (rest + cfg.hop - 1) / cfg.hop;
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

#pragma omp parallel
    {
        std::vector<double> buf(cfg.fft_size);
#pragma omp for schedule(static)
        for (long long fi = 0; fi < static_cast<long long>(frames); ++fi) {
            const std::size_t f = static_cast<std::size_t>(fi);
            const std::size_t start = f * cfg.hop;
            std::fill(buf.begin(), buf.end(), 0.0);
            const std::size_t avail =
                start < x.size() ? std::min(cfg.window_len, x.size() - start) : 0;
            for (std::size_t t = 0; t < avail; ++t) buf[t] = w[t] * x[start + t];
            fft::r2c(cfg.fft_size, buf.data(), &g.z[f * bins]);
        }
    }
    return g;
}

std::vector<double> stft_adjoint(const Spectrogram& g, std::size_t len,
                                 const StftConfig& cfg) {
    cfg.validate();
    if (g.bins != cfg.bins())
        throw std::invalid_argument("stft_adjoint: bin count mismatch");
    const std::size_t n = cfg.fft_size;
    const std::vector<double> w = cfg.hann();
    std::vector<double> out(len, 0.0);

    // Frames closer than window_len/hop apart overlap in the output, so
    // process them in stride classes; frames within a class are disjoint.
    const std::size_t stride = (cfg.window_len + cfg.hop - 1) / cfg.hop;
    const bool nyquist = (n % 2 == 0);
    for (std::size_t cls = 0; cls < stride; ++cls) {
#pragma omp parallel
        {
            std::vector<std::complex<double>> spec(g.bins);
            std::vector<double> frame(n);
#pragma omp for schedule(static)
            for (long long fi = static_cast<long long>(cls);
                 fi < static_cast<long long>(g.frames);
                 fi += static_cast<long long>(stride)) {
                const std::size_t f = static_cast<std::size_t>(fi);
                // Undo the Hermitian doubling the c2r transform applies to
                // the interior bins; DC (and Nyquist for even sizes) enter
                // once and their imaginary parts map to zero rows.
                spec[0] = {g.z[f * g.bins].real(), 0.0};
                for (std::size_t k = 1; k + 1 < g.bins; ++k)
                    spec[k] = 0.5 * g.z[f * g.bins + k];
                if (g.bins >= 2) {
                    const auto& last = g.z[f * g.bins + g.bins - 1];
                    spec[g.bins - 1] = nyquist
                                           ? std::complex<double>{last.real(), 0.0}
                                           : 0.5 * last;
                }
                fft::c2r(n, spec.data(), frame.data());
                const std::size_t start = f * cfg.hop;
                if (start >= len) continue;
                const std::size_t avail = std::min(cfg.window_len, len - start);
                for (std::size_t t = 0; t < avail; ++t)
                    out[start + t] += w[t] * frame[t];
            }
        }
    }
    return out;
}

void dump_spectrogram(const std::filesystem::path& path, const Spectrogram& g) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("dump_spectrogram: cannot open " + path.string());
    const std::uint64_t dims[2] = {g.bins, g.frames};
    os.write(reinterpret_cast<const char*>(dims), sizeof(dims));
    for (const auto& v : g.z) {
        const double pair[2] = {v.real(), v.imag()};
        os.write(reinterpret_cast<const char*>(pair), sizeof(pair));
    }
    if (!os) throw std::runtime_error("dump_spectrogram: write failed");
}

}  // namespace ssnaps
