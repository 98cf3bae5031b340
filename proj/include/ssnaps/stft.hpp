// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace ssnaps {

// Analysis config. Defaults: periodic Hann of 510 samples, hop 160,
// 510-point transform -> 256 bins.
struct StftConfig {
    std::size_t window_len = 510;
    std::size_t hop = 160;
    std::size_t fft_size = 510;

    std::size_t bins() const { return fft_size / 2 + 1; }
    void validate() const;  // throws std::invalid_argument
    std::vector<double> hann() const;
};

struct Spectrogram {
    std::size_t bins = 0;
    std::size_t frames = 0;
    std::vector<std::complex<double>> z;  // frame-major: z[f*bins + k]

    std::complex<double>& at(std::size_t k, std::size_t f) { return z[f * bins + k]; }
    const std::complex<double>& at(std::size_t k, std::size_t f) const {
        return z[f * bins + k];
    }
};

// Frame f covers samples [f*hop, f*hop + window_len); the final partial
// frame is zero-padded; there is no center padding. Every sample of x is
// covered by at least one frame.
std::size_t stft_frame_count(std::size_t len, const StftConfig& cfg);

// Requires len(x) >= window_len. Linear in x.
Spectrogram stft(std::span<const double> x, const StftConfig& cfg);

// Adjoint of the map x -> stft(x) under the real inner product
// <A, B> = sum Re(A)Re(B) + Im(A)Im(B). Contributions that fall past
// `len` (the zero-padded tail) are dropped.
std::vector<double> stft_adjoint(const Spectrogram& g, std::size_t len,
                                 const StftConfig& cfg);

// Debug dump. Layout: two little-endian uint64 (bins, frames) followed by
// frame-major (bin fastest) float64 pairs re, im.
void dump_spectrogram(const std::filesystem::path& path, const Spectrogram& g);

}  // namespace ssnaps
