// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "reference/reference.hpp"
#include "ssnaps/rdft.hpp"
#include "support/test_util.hpp"

using namespace ssnaps;

TEST_CASE("basis is orthonormal (dense check, even and odd dims)") {
    for (std::size_t d : {2u, 3u, 8u, 17u, 32u}) {
        RealFourierBasis b(d);
        CHECK(b.orthonormality_defect() < 1e-10);
    }
}

TEST_CASE("fft route matches the dense reference transform") {
    std::mt19937 rng(7);
    for (std::size_t d : {4u, 15u, 64u, 510u}) {
        RealFourierBasis b(d);
        const auto x = testutil::random_vec(rng, d);
        const auto c_fft = b.forward(x);
        const auto c_ref = ref::rdft_forward(x);
        for (std::size_t i = 0; i < d; ++i)
            CHECK(std::abs(c_fft[i] - c_ref[i]) < 1e-11);

        const auto x_fft = b.inverse(c_fft);
        const auto x_ref = ref::rdft_inverse(c_ref);
        for (std::size_t i = 0; i < d; ++i) {
            CHECK(std::abs(x_fft[i] - x_ref[i]) < 1e-11);
            CHECK(std::abs(x_fft[i] - x[i]) < 1e-11);  // round trip
        }
    }
}

TEST_CASE("transform preserves the l2 norm") {
    std::mt19937 rng(11);
    RealFourierBasis b(100);
    const auto x = testutil::random_vec(rng, 100);
    const auto c = b.forward(x);
    CHECK(testutil::rel_err(testutil::l2(c), testutil::l2(x)) < 1e-12);
}

TEST_CASE("size mismatches are rejected") {
    RealFourierBasis b(8);
    std::vector<double> x(7), c(8);
    CHECK_THROWS_AS(b.forward(x, c), std::invalid_argument);
    CHECK_THROWS_AS(RealFourierBasis(1), std::invalid_argument);
}
