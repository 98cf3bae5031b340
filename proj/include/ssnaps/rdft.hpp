// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ssnaps {

// Orthonormal real Fourier basis on R^d.
//
// Coefficient layout (length d):
//   j = 0                DC        u(t) = 1/sqrt(d)
//   j = 2k-1, 2k         cos/sin   sqrt(2/d) * cos(2*pi*k*t/d),
//                                  sqrt(2/d) * sin(2*pi*k*t/d), k = 1..
//   j = d-1 (d even)     Nyquist   (-1)^t / sqrt(d)
//
// forward() computes B^T x, inverse() computes B c; both are FFT-backed.
class RealFourierBasis {
public:
    explicit RealFourierBasis(std::size_t dim);

    std::size_t dim() const { return dim_; }

    void forward(std::span<const double> x, std::span<double> coeffs) const;
    void inverse(std::span<const double> coeffs, std::span<double> x) const;

    std::vector<double> forward(std::span<const double> x) const;
    std::vector<double> inverse(std::span<const double> coeffs) const;

    // Explicit matrix entry B[t][j]; the dense route used by checks.
    double entry(std::size_t t, std::size_t j) const;

    // Max absolute deviation of B^T B from identity, computed densely.
    // Intended for small dims only (O(d^3)).
    double orthonormality_defect() const;

private:
    std::size_t dim_;
};

}  // namespace ssnaps
