// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <cstddef>

// Internal FFTW wrapper. Plan creation is serialized behind a mutex; the
// new-array execute interface is safe to call concurrently. Plans are made
// with FFTW_UNALIGNED so any caller buffer is acceptable.
namespace ssnaps::fft {

// out has n/2 + 1 bins; input is not modified.
void r2c(std::size_t n, const double* in, std::complex<double>* out);

// in has n/2 + 1 bins and IS clobbered; out gets the unnormalized
// Hermitian-symmetric inverse (c2r(r2c(x)) == n * x).
void c2r(std::size_t n, std::complex<double>* in, double* out);

}  // namespace ssnaps::fft
