// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/spectral_loss.hpp"

#include <cmath>
#include <stdexcept>

namespace ssnaps {
namespace {

void check_same_length(std::span<const double> y,
                       std::span<const std::vector<double>> estimates) {
    for (const auto& e : estimates)
        if (e.size() != y.size())
            throw std::invalid_argument("spectral loss: signal length mismatch");
}

// Serial accumulation of per-frame partials keeps the sum bitwise
// reproducible for any thread count.
double sum_partials(const std::vector<double>& partials) {
    double acc = 0.0;
    for (double v : partials) acc += v;
    return acc;
}

}  // namespace

Spectrogram compress(const Spectrogram& z) {
    Spectrogram c;
    c.bins = z.bins;
    c.frames = z.frames;
    c.z.resize(z.z.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(z.z.size()); ++i) {
        const auto& v = z.z[i];
        const double m = std::max(std::abs(v), kMagnitudeFloor);
        c.z[i] = v * std::pow(m, -1.0 / 3.0);
    }
    return c;
}

Spectrogram compressed_spec(std::span<const double> x, const StftConfig& cfg) {
    return compress(stft(x, cfg));
}

double rec_loss_vs_target(const Spectrogram& target_c,
                          std::span<const double> mixture,
                          const StftConfig& cfg) {
    const Spectrogram c = compress(stft(mixture, cfg));
    if (c.bins != target_c.bins || c.frames != target_c.frames)
        throw std::invalid_argument("rec_loss: spectrogram shape mismatch");
    std::vector<double> partials(c.frames, 0.0);
#pragma omp parallel for schedule(static)
    for (long long f = 0; f < static_cast<long long>(c.frames); ++f) {
        double acc = 0.0;
        for (std::size_t k = 0; k < c.bins; ++k) {
            const auto d = c.z[f * c.bins + k] - target_c.z[f * c.bins + k];
            acc += d.real() * d.real() + d.imag() * d.imag();
        }
        partials[f] = acc;
    }
    return sum_partials(partials);
}

std::vector<double> rec_loss_grad_vs_target(const Spectrogram& target_c,
                                            std::span<const double> mixture,
                                            const StftConfig& cfg) {
    const Spectrogram zg = stft(mixture, cfg);
    if (zg.bins != target_c.bins || zg.frames != target_c.frames)
        throw std::invalid_argument("rec_loss_grad: spectrogram shape mismatch");

    // L = sum |g(z) - c_y|^2 with g(z) = z|z|^(-1/3). With e = g(z) - c_y,
    // the cotangent grid is
    //   G = 2 dL/dz̄ = (5/3) e |z|^(-1/3) - (1/3) ē z^2 |z|^(-7/3)
    // and the time-domain gradient is the STFT adjoint of G.
    Spectrogram grid;
    grid.bins = zg.bins;
    grid.frames = zg.frames;
    grid.z.assign(zg.z.size(), {0.0, 0.0});
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(zg.z.size()); ++i) {
        const std::complex<double> z = zg.z[i];
        const double m = std::abs(z);
        if (m <= kMagnitudeFloor) continue;  // defined as zero below the floor
        const double m13 = std::pow(m, -1.0 / 3.0);
        const std::complex<double> c = z * m13;
        const std::complex<double> e = c - target_c.z[i];
        const double m73 = std::pow(m, -7.0 / 3.0);
        grid.z[i] = (5.0 / 3.0) * e * m13 -
                    (1.0 / 3.0) * std::conj(e) * z * z * m73;
    }
    return stft_adjoint(grid, mixture.size(), cfg);
}

std::vector<double> sum_sources(std::span<const std::vector<double>> estimates) {
    if (estimates.empty())
        throw std::invalid_argument("sum_sources: no estimates");
    std::vector<double> m(estimates.front().size(), 0.0);
    for (const auto& e : estimates) {
        if (e.size() != m.size())
            throw std::invalid_argument("sum_sources: length mismatch");
        for (std::size_t t = 0; t < m.size(); ++t) m[t] += e[t];
    }
    return m;
}

double rec_loss(std::span<const double> y,
                std::span<const std::vector<double>> estimates,
                const StftConfig& cfg) {
    check_same_length(y, estimates);
    const Spectrogram target_c = compress(stft(y, cfg));
    return rec_loss_vs_target(target_c, sum_sources(estimates), cfg);
}

std::vector<double> rec_loss_grad(std::span<const double> y,
                                  std::span<const std::vector<double>> estimates,
                                  const StftConfig& cfg) {
    check_same_length(y, estimates);
    const Spectrogram target_c = compress(stft(y, cfg));
    return rec_loss_grad_vs_target(target_c, sum_sources(estimates), cfg);
}

std::vector<double> compressed_magnitude(std::span<const double> x,
                                         const StftConfig& cfg) {
    const Spectrogram c = compress(stft(x, cfg));
    std::vector<double> mag(c.z.size());
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(c.z.size()); ++i)
        mag[i] = std::abs(c.z[i]);
    return mag;
}

double crosstalk_loss_vs_mag(std::span<const double> onscreen,
                             std::span<const double> off_mag,
                             const StftConfig& cfg) {
    const std::vector<double> a = compressed_magnitude(onscreen, cfg);
    if (a.size() != off_mag.size())
        throw std::invalid_argument("crosstalk: magnitude grid size mismatch");
    double dot = 0.0, na2 = 0.0, nb2 = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * off_mag[i];
        na2 += a[i] * a[i];
        nb2 += off_mag[i] * off_mag[i];
    }
    if (na2 == 0.0 || nb2 == 0.0) return 0.0;
    return dot / (std::sqrt(na2) * std::sqrt(nb2));
}

std::vector<double> crosstalk_grad_vs_mag(std::span<const double> onscreen,
                                          std::span<const double> off_mag,
                                          const StftConfig& cfg) {
    const Spectrogram zg = stft(onscreen, cfg);
    const std::size_t n = zg.z.size();
    if (n != off_mag.size())
        throw std::invalid_argument("crosstalk_grad: magnitude grid size mismatch");

    // A = |z|^(2/3) above the floor. With l = <A,B>/(|A||B|), B constant:
    //   dl/dA = B/(|A||B|) - l A/|A|^2
    //   G = 2 dl/dz̄ = (2/3) (dl/dA) z |z|^(-4/3)
    std::vector<double> a(n);
    double na2 = 0.0, nb2 = 0.0, dot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double m = std::abs(zg.z[i]);
        a[i] = m * std::pow(std::max(m, kMagnitudeFloor), -1.0 / 3.0);
        na2 += a[i] * a[i];
        nb2 += off_mag[i] * off_mag[i];
        dot += a[i] * off_mag[i];
    }
    if (na2 == 0.0 || nb2 == 0.0)
        return std::vector<double>(onscreen.size(), 0.0);
    const double na = std::sqrt(na2), nb = std::sqrt(nb2);
    const double l = dot / (na * nb);

    Spectrogram grid;
    grid.bins = zg.bins;
    grid.frames = zg.frames;
    grid.z.assign(n, {0.0, 0.0});
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(n); ++i) {
        const std::complex<double> z = zg.z[i];
        const double m = std::abs(z);
        if (m <= kMagnitudeFloor) continue;
        const double dl_da = off_mag[i] / (na * nb) - l * a[i] / na2;
        grid.z[i] = (2.0 / 3.0) * dl_da * z * std::pow(m, -4.0 / 3.0);
    }
    return stft_adjoint(grid, onscreen.size(), cfg);
}

double crosstalk_loss(std::span<const double> onscreen,
                      std::span<const double> offscreen, const StftConfig& cfg) {
    if (onscreen.size() != offscreen.size())
        throw std::invalid_argument("crosstalk: signal length mismatch");
    return crosstalk_loss_vs_mag(onscreen, compressed_magnitude(offscreen, cfg), cfg);
}

std::vector<double> crosstalk_grad(std::span<const double> onscreen,
                                   std::span<const double> offscreen,
                                   const StftConfig& cfg) {
    if (onscreen.size() != offscreen.size())
        throw std::invalid_argument("crosstalk: signal length mismatch");
    return crosstalk_grad_vs_mag(onscreen, compressed_magnitude(offscreen, cfg), cfg);
}

}  // namespace ssnaps
