// SPDX-License-Identifier: Apache-2.0
#pragma once

// Independent ground-truth computations used to validate the sampler.
// This code is compiled into its own library and must not call into the
// sampler path it checks.

#include <iosfwd>
#include <span>
#include <vector>

#include "ssnaps/priors.hpp"

namespace ssnaps::oracle {

// Joint Gaussian posterior of independent sources under
// y = sum_s x_s + N(0, sigma_z^2 I). Computed in the shared transform
// domain, where every coefficient is an independent small linear-Gaussian
// problem; the per-coefficient source-by-source covariance blocks are kept.
struct ExactGaussianPosterior {
    std::size_t dim = 0;
    std::size_t n_sources = 0;
    std::vector<std::vector<double>> means;  // per source, signal domain
    std::vector<double> coeff_cov;  // [i*S*S + a*S + b], coefficient domain

    double cov(std::size_t coeff, std::size_t a, std::size_t b) const {
        return coeff_cov[coeff * n_sources * n_sources + a * n_sources + b];
    }
    // Signal-domain marginal variance of source s at sample t.
    double marginal_variance(std::size_t s, std::size_t t) const;
};

ExactGaussianPosterior gaussian_posterior_exact(
    const std::vector<const SpectralGaussianPrior*>& priors,
    std::span<const double> y, double sigma_z);

// Discretized joint posterior density for one or two scalar GMM sources,
// normalized by trapezoidal integration. Requires >= 64 points per axis.
struct GridDensity {
    double lo = 0.0, hi = 0.0;
    std::size_t n_axes = 1;
    std::size_t points = 0;               // per axis
    std::vector<double> values;           // points (1-D) or points^2, row-major
    double cell() const { return (hi - lo) / static_cast<double>(points - 1); }

    // 1-D marginal of the first axis (identity for 1-D grids).
    std::vector<double> marginal_first() const;
};

GridDensity grid_posterior(const std::vector<const DiagonalGmmPrior*>& priors,
                           double y, double sigma_z, double lo, double hi,
                           std::size_t points_per_axis);

// log p(x) and log of the sigma-smoothed density under a scalar-capable
// diagonal GMM; independent of the prior's denoiser path.
double log_gmm_density(const DiagonalGmmPrior& prior, std::span<const double> x,
                       const Condition& c = Condition::null());
double log_gmm_smoothed_density(const DiagonalGmmPrior& prior,
                                std::span<const double> x, double sigma,
                                const Condition& c = Condition::null());

// 1/2 sum |hist - ref| over the cells of the 1-D reference grid; samples
// outside [lo, hi] land in an overflow cell with zero reference mass.
double tv_distance(std::span<const double> samples, const GridDensity& ref);

void write_grid_csv(std::ostream& os, const GridDensity& g);

}  // namespace ssnaps::oracle
