// SPDX-License-Identifier: Apache-2.0
#include "fft_plans.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <vector>

namespace ssnaps::fft {
namespace {

std::mutex plan_mutex;

fftw_plan get_plan_r2c(std::size_t n) {
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> in(n);
    std::vector<fftw_complex> out(n / 2 + 1);
    fftw_plan p = fftw_plan_dft_r2c_1d(static_cast<int>(n), in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, p);
    return p;
}

fftw_plan get_plan_c2r(std::size_t n) {
    static std::map<std::size_t, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(plan_mutex);
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<fftw_complex> in(n / 2 + 1);
    std::vector<double> out(n);
    fftw_plan p = fftw_plan_dft_c2r_1d(static_cast<int>(n), in.data(), out.data(),
                                       FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache.emplace(n, p);
    return p;
}

}  // namespace

void r2c(std::size_t n, const double* in, std::complex<double>* out) {
    fftw_plan p = get_plan_r2c(n);
    // FFTW's r2c does not modify its input for 1-D out-of-place transforms.
    fftw_execute_dft_r2c(p, const_cast<double*>(in),
                         reinterpret_cast<fftw_complex*>(out));
}

void c2r(std::size_t n, std::complex<double>* in, double* out) {
    fftw_plan p = get_plan_c2r(n);
    fftw_execute_dft_c2r(p, reinterpret_cast<fftw_complex*>(in), out);
}

}  // namespace ssnaps::fft
