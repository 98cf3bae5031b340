// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "ssnaps/stft.hpp"

namespace ssnaps {

// Magnitudes below this floor are clamped before the |z|^(-1/3) factor; the
// exact map is not differentiable at z = 0, so gradients are defined as 0
// below the floor.
inline constexpr double kMagnitudeFloor = 1e-12;

// c = z * max(|z|, floor)^(-1/3), i.e. |c| = |z|^(2/3) with phase kept.
Spectrogram compress(const Spectrogram& z);

// Convenience: compress(stft(x)).
Spectrogram compressed_spec(std::span<const double> x, const StftConfig& cfg);

// Squared distance between compressed spectrograms,
// sum over (bin, frame) of |target_c - compress(stft(mixture))|^2.
// target_c must already be compressed.
double rec_loss_vs_target(const Spectrogram& target_c,
                          std::span<const double> mixture,
                          const StftConfig& cfg);

// Gradient of rec_loss_vs_target with respect to the time-domain mixture.
std::vector<double> rec_loss_grad_vs_target(const Spectrogram& target_c,
                                            std::span<const double> mixture,
                                            const StftConfig& cfg);

// sum of the estimates (all must share y's length)
std::vector<double> sum_sources(std::span<const std::vector<double>> estimates);

// ||S(y) - S(sum estimates)||^2. The gradient with respect to every
// estimate is the same vector, since they enter only through the sum.
double rec_loss(std::span<const double> y,
                std::span<const std::vector<double>> estimates,
                const StftConfig& cfg);
std::vector<double> rec_loss_grad(std::span<const double> y,
                                  std::span<const std::vector<double>> estimates,
                                  const StftConfig& cfg);

// Cosine similarity in [0, 1] between the compressed magnitude grids of the
// two signals; 0 if either grid is all-zero. Only the first argument
// carries gradient; the second is treated as a constant.
double crosstalk_loss(std::span<const double> onscreen,
                      std::span<const double> offscreen, const StftConfig& cfg);
std::vector<double> crosstalk_grad(std::span<const double> onscreen,
                                   std::span<const double> offscreen,
                                   const StftConfig& cfg);

// Variants against a precomputed offscreen magnitude grid (reused across
// sources within one Langevin iteration).
std::vector<double> compressed_magnitude(std::span<const double> x,
                                         const StftConfig& cfg);
double crosstalk_loss_vs_mag(std::span<const double> onscreen,
                             std::span<const double> off_mag,
                             const StftConfig& cfg);
std::vector<double> crosstalk_grad_vs_mag(std::span<const double> onscreen,
                                          std::span<const double> off_mag,
                                          const StftConfig& cfg);

}  // namespace ssnaps
