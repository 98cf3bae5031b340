// SPDX-License-Identifier: Apache-2.0
#pragma once

// Serial reference implementations, written straight from the definitions
// with no FFT and no threading. They exist to validate the production
// kernels and to feed the kernel benchmark; keep them independent of the
// code paths they check.

#include <complex>
#include <span>
#include <vector>

#include "ssnaps/stft.hpp"

namespace ssnaps::ref {

// O(n^2) DFT per frame, same framing contract as ssnaps::stft.
Spectrogram stft(std::span<const double> x, const StftConfig& cfg);

// Transposed loop nest of the forward map.
std::vector<double> stft_adjoint(const Spectrogram& g, std::size_t len,
                                 const StftConfig& cfg);

// Dense orthonormal real Fourier transform, O(d^2) against explicit
// basis entries.
std::vector<double> rdft_forward(std::span<const double> x);
std::vector<double> rdft_inverse(std::span<const double> coeffs);

// Reconstruction loss recomputed from the definitions on top of the naive
// transform: sum over cells of |S(y) - S(sum estimates)|^2.
double rec_loss(std::span<const double> y,
                std::span<const std::vector<double>> estimates,
                const StftConfig& cfg);

}  // namespace ssnaps::ref
