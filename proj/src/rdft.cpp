// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/rdft.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

#include "fft_plans.hpp"

namespace ssnaps {

RealFourierBasis::RealFourierBasis(std::size_t dim) : dim_(dim) {
    if (dim < 2) throw std::invalid_argument("RealFourierBasis: dim must be >= 2");
}

void RealFourierBasis::forward(std::span<const double> x,
                               std::span<double> coeffs) const {
    if (x.size() != dim_ || coeffs.size() != dim_)
        throw std::invalid_argument("RealFourierBasis::forward: size mismatch");
    const std::size_t d = dim_;
    std::vector<std::complex<double>> spec(d / 2 + 1);
    fft::r2c(d, x.data(), spec.data());

    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    const double pair_scale = std::sqrt(2.0 / static_cast<double>(d));
    coeffs[0] = spec[0].real() * inv_sqrt_d;
    const std::size_t kmax = (d % 2 == 0) ? d / 2 - 1 : (d - 1) / 2;
    for (std::size_t k = 1; k <= kmax; ++k) {
        coeffs[2 * k - 1] = pair_scale * spec[k].real();
        coeffs[2 * k] = -pair_scale * spec[k].imag();
    }
    if (d % 2 == 0) coeffs[d - 1] = spec[d / 2].real() * inv_sqrt_d;
}

void RealFourierBasis::inverse(std::span<const double> coeffs,
                               std::span<double> x) const {
    if (x.size() != dim_ || coeffs.size() != dim_)
        throw std::invalid_argument("RealFourierBasis::inverse: size mismatch");
    const std::size_t d = dim_;
    std::vector<std::complex<double>> spec(d / 2 + 1);

    const double inv_sqrt_d = 1.0 / std::sqrt(static_cast<double>(d));
    const double pair_scale = 1.0 / std::sqrt(2.0 * static_cast<double>(d));
    spec[0] = {coeffs[0] * inv_sqrt_d, 0.0};
    const std::size_t kmax = (d % 2 == 0) ? d / 2 - 1 : (d - 1) / 2;
    for (std::size_t k = 1; k <= kmax; ++k)
        spec[k] = {coeffs[2 * k - 1] * pair_scale, -coeffs[2 * k] * pair_scale};
    if (d % 2 == 0) spec[d / 2] = {coeffs[d - 1] * inv_sqrt_d, 0.0};

    fft::c2r(d, spec.data(), x.data());
}

std::vector<double> RealFourierBasis::forward(std::span<const double> x) const {
    std::vector<double> c(dim_);
    forward(x, c);
    return c;
}

std::vector<double> RealFourierBasis::inverse(std::span<const double> coeffs) const {
    std::vector<double> x(dim_);
    inverse(coeffs, x);
    return x;
}

double RealFourierBasis::entry(std::size_t t, std::size_t j) const {
    const double d = static_cast<double>(dim_);
    const double two_pi = 2.0 * std::numbers::pi;
    if (j == 0) return 1.0 / std::sqrt(d);
    if (dim_ % 2 == 0 && j == dim_ - 1)
        return (t % 2 == 0 ? 1.0 : -1.0) / std::sqrt(d);
    const std::size_t k = (j + 1) / 2;
    const double arg = two_pi * static_cast<double>(k) * static_cast<double>(t) / d;
    const double s = std::sqrt(2.0 / d);
    return (j % 2 == 1) ? s * std::cos(arg) : s * std::sin(arg);
}

double RealFourierBasis::orthonormality_defect() const {
    double worst = 0.0;
    for (std::size_t a = 0; a < dim_; ++a) {
        for (std::size_t b = a; b < dim_; ++b) {
            double dot = 0.0;
            for (std::size_t t = 0; t < dim_; ++t) dot += entry(t, a) * entry(t, b);
            const double target = (a == b) ? 1.0 : 0.0;
            worst = std::max(worst, std::abs(dot - target));
        }
    }
    return worst;
}

}  // namespace ssnaps
