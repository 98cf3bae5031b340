// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "ssnaps/oracle.hpp"
#include "ssnaps/priors.hpp"
#include "support/test_util.hpp"

using namespace ssnaps;

namespace {

DiagonalGmmPrior two_mode_gmm() {
    std::vector<GmmComponent> comps(2);
    comps[0] = {0.5, {-2.0}, {0.1}};
    comps[1] = {0.5, {2.0}, {0.1}};
    return DiagonalGmmPrior(std::move(comps));
}

}  // namespace

TEST_CASE("conjugate posterior mean for a unit gaussian, checked by quadrature") {
    // scalar route via a one-component mixture
    std::vector<GmmComponent> comps(1);
    comps[0] = {1.0, {0.0}, {1.0}};
    DiagonalGmmPrior p(std::move(comps));
    const double x = 1.0, sigma = 1.0;
    const auto out = p.denoise(std::span{&x, 1}, sigma);
    CHECK(out[0] == doctest::Approx(0.5).epsilon(1e-12));

    // quadrature of E[x0 | x] = int x0 N(x; x0, s^2) N(x0; 0, 1) dx0 / Z
    double num = 0.0, den = 0.0;
    const double h = 1e-3;
    for (double x0 = -10.0; x0 <= 10.0; x0 += h) {
        const double lik = std::exp(-0.5 * (x - x0) * (x - x0) / (sigma * sigma));
        const double pri = std::exp(-0.5 * x0 * x0);
        num += x0 * lik * pri;
        den += lik * pri;
    }
    CHECK(out[0] == doctest::Approx(num / den).epsilon(1e-6));

    // same shrinkage through the transform-domain route
    SpectralGaussianPrior g(std::vector<double>(2, 0.0), std::vector<double>(2, 1.0));
    const std::vector<double> xv{1.0, 0.0};
    const auto out2 = g.denoise(xv, 1.0);
    CHECK(out2[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(out2[1] == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("vanishing noise recovers the input") {
    std::mt19937 rng(3);
    SpectralGaussianPrior g(testutil::random_vec(rng, 8),
                            testutil::random_vec(rng, 8, 0.5, 2.0));
    const auto x = testutil::random_vec(rng, 8);
    const auto out = g.denoise(x, 1e-6);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(testutil::rel_err(out[i], x[i]) < 1e-4);

    auto gmm = two_mode_gmm();
    const double xs = 1.7;
    CHECK(testutil::rel_err(gmm.denoise(std::span{&xs, 1}, 1e-6)[0], xs) < 1e-4);
}

TEST_CASE("symmetric two-mode mixture denoises the origin to itself") {
    auto gmm = two_mode_gmm();
    const double x = 0.0;
    CHECK(gmm.denoise(std::span{&x, 1}, 1.0)[0] == doctest::Approx(0.0));
}

TEST_CASE("score is the tweedie transform of the denoiser") {
    std::vector<GmmComponent> comps(1);
    comps[0] = {1.0, {0.0}, {1.0}};
    DiagonalGmmPrior p(std::move(comps));
    const double x = 1.0;
    // grad log N(0, 2) at 1 is -1/2
    CHECK(p.score(std::span{&x, 1}, 1.0)[0] == doctest::Approx(-0.5).epsilon(1e-12));
}

TEST_CASE("score vanishes at the prior mean") {
    std::mt19937 rng(5);
    const auto mean_c = testutil::random_vec(rng, 16);
    SpectralGaussianPrior g(mean_c, testutil::random_vec(rng, 16, 0.2, 1.5));
    const auto mean_signal = g.basis().inverse(mean_c);
    const auto s = g.score(mean_signal, 0.7);
    for (double v : s) CHECK(std::abs(v) < 1e-10);
}

TEST_CASE("gmm score matches finite differences of the smoothed log density") {
    auto gmm = two_mode_gmm();
    const double sigma = 0.5;
    for (double x : {0.3, -1.1, 2.4}) {
        const double got = gmm.score(std::span{&x, 1}, sigma)[0];
        const auto logp = [&](const std::vector<double>& v) {
            return oracle::log_gmm_smoothed_density(gmm, v, sigma);
        };
        const double fd = testutil::central_diff(logp, {x}, 0, 1e-6);
        CHECK(testutil::rel_err(got, fd) < 1e-4);
    }
}

TEST_CASE("tweedie identity for gaussian priors at random points") {
    std::mt19937 rng(13);
    const std::size_t d = 12;
    const auto mu = testutil::random_vec(rng, d);
    const auto var = testutil::random_vec(rng, d, 0.3, 2.0);
    SpectralGaussianPrior g(mu, var);
    for (int trial = 0; trial < 25; ++trial) {
        const auto x = testutil::random_vec(rng, d, -3.0, 3.0);
        std::uniform_real_distribution<double> us(0.05, 3.0);
        const double sigma = us(rng);
        const auto got = g.score(x, sigma);
        // analytic: grad log N(x; B mu, B (V + s^2) B^T) = -B ((c - mu) ./ (v + s^2))
        auto c = g.basis().forward(x);
        for (std::size_t i = 0; i < d; ++i)
            c[i] = -(c[i] - mu[i]) / (var[i] + sigma * sigma);
        const auto want = g.basis().inverse(c);
        for (std::size_t i = 0; i < d; ++i)
            CHECK(std::abs(got[i] - want[i]) <=
                  1e-10 * std::max(1.0, std::abs(want[i])));
    }
}

TEST_CASE("gaussian denoiser contracts toward the prior mean") {
    std::mt19937 rng(17);
    const std::size_t d = 10;
    const auto mu = testutil::random_vec(rng, d);
    SpectralGaussianPrior g(mu, testutil::random_vec(rng, d, 0.1, 2.0));
    const auto mean_signal = g.basis().inverse(mu);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = testutil::random_vec(rng, d, -2.0, 2.0);
        const auto out = g.denoise(x, 0.8);
        CHECK(testutil::l2_diff(out, mean_signal) <=
              testutil::l2_diff(x, mean_signal) + 1e-12);
    }
}

TEST_CASE("guidance weight collapses and blends") {
    auto base = std::make_shared<DiagonalGmmPrior>(
        std::vector<GmmComponent>{{0.5, {-2.0}, {0.1}}, {0.5, {2.0}, {0.1}}},
        std::map<std::string, std::vector<double>>{{"hi", {0.0, 1.0}}});
    const double x = 0.4, sigma = 0.9;
    const auto d_un = base->denoise(std::span{&x, 1}, sigma);
    const auto d_c = base->denoise(std::span{&x, 1}, sigma, Condition::label("hi"));

    GuidedPrior g0(base, 0.0);
    CHECK(g0.denoise(std::span{&x, 1}, sigma, Condition::label("hi"))[0] ==
          doctest::Approx(d_un[0]).epsilon(1e-15));
    GuidedPrior g1(base, 1.0);
    CHECK(g1.denoise(std::span{&x, 1}, sigma, Condition::label("hi"))[0] ==
          doctest::Approx(d_c[0]).epsilon(1e-15));

    GuidedPrior g08(base, 0.8);
    const double blend = d_un[0] + 0.8 * (d_c[0] - d_un[0]);
    CHECK(g08.denoise(std::span{&x, 1}, sigma, Condition::label("hi"))[0] ==
          doctest::Approx(blend).epsilon(1e-15));

    GuidedPrior go(base, 0.5, GuidanceForm::overshoot);
    const double over = 1.5 * d_c[0] - 0.5 * d_un[0];
    CHECK(go.denoise(std::span{&x, 1}, sigma, Condition::label("hi"))[0] ==
          doctest::Approx(over).epsilon(1e-15));

    // null token passes through exactly
    CHECK(g08.denoise(std::span{&x, 1}, sigma, Condition::null())[0] == d_un[0]);
}

TEST_CASE("evaluation counter: one per plain call, two per guided call") {
    auto base = std::make_shared<DiagonalGmmPrior>(
        std::vector<GmmComponent>{{1.0, {0.0}, {1.0}}},
        std::map<std::string, std::vector<double>>{{"a", {1.0}}});
    const double x = 0.3;
    base->reset_nfe();
    (void)base->denoise(std::span{&x, 1}, 1.0);
    CHECK(base->nfe() == 1);

    GuidedPrior g(base, 0.8);
    g.reset_nfe();
    (void)g.denoise(std::span{&x, 1}, 1.0, Condition::label("a"));
    CHECK(g.nfe() == 2);
    (void)g.denoise(std::span{&x, 1}, 1.0, Condition::null());
    CHECK(g.nfe() == 3);
    CHECK(g.evals_per_call(Condition::label("a")) == 2);
    CHECK(g.evals_per_call(Condition::null()) == 1);
}

TEST_CASE("prior validation errors") {
    CHECK_THROWS_AS(SpectralGaussianPrior({0.0, 0.0}, {1.0, -0.5}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DiagonalGmmPrior({{0.6, {0.0}, {1.0}}, {0.6, {1.0}, {1.0}}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(DiagonalGmmPrior({}), std::invalid_argument);

    // unknown condition token and dimension mismatch
    auto gmm = two_mode_gmm();
    const double x = 0.0;
    CHECK_THROWS_AS((void)gmm.denoise(std::span{&x, 1}, 1.0, Condition::label("no")),
                    std::invalid_argument);
    std::vector<double> wrong(3, 0.0);
    CHECK_THROWS_AS((void)gmm.denoise(wrong, 1.0), std::invalid_argument);
    CHECK_THROWS_AS((void)gmm.denoise(std::span{&x, 1}, 0.0), std::invalid_argument);
}

TEST_CASE("prior documents load, reject, and round-trip") {
    const nlohmann::json good = {{"kind", "spectral_gaussian"},
                                 {"dim", 4},
                                 {"mean", {0.0, 0.0, 0.0, 0.0}},
                                 {"variances", {1.0, 1.0, 1.0, 1.0}}};
    auto p = load_prior(good);
    const std::vector<double> zeros(4, 0.0);
    const auto out = p->denoise(zeros, 1.0);
    for (double v : out) CHECK(v == doctest::Approx(0.0));

    const nlohmann::json bad_w = {
        {"kind", "diag_gmm"},
        {"dim", 1},
        {"components",
         {{{"weight", 0.6}, {"mean", {0.0}}, {"variance", {1.0}}},
          {{"weight", 0.6}, {"mean", {1.0}}, {"variance", {1.0}}}}}};
    CHECK_THROWS_AS(load_prior(bad_w), std::invalid_argument);

    nlohmann::json unknown = good;
    unknown["extra"] = 1;
    CHECK_THROWS_AS(load_prior(unknown), std::invalid_argument);

    nlohmann::json negvar = good;
    negvar["variances"] = {1.0, 1.0, -1.0, 1.0};
    CHECK_THROWS_AS(load_prior(negvar), std::invalid_argument);

    // band form expands against dim
    const nlohmann::json banded = {
        {"kind", "spectral_gaussian"},
        {"dim", 8},
        {"variances",
         {{"fill", 1e-6},
          {"bands", {{{"from", 2}, {"to", 5}, {"value", 1.0}}}}}}};
    auto bp = load_prior(banded);
    const auto* sg = dynamic_cast<const SpectralGaussianPrior*>(bp.get());
    REQUIRE(sg != nullptr);
    CHECK(sg->variances()[1] == doctest::Approx(1e-6));
    CHECK(sg->variances()[2] == doctest::Approx(1.0));
    CHECK(sg->variances()[4] == doctest::Approx(1.0));
    CHECK(sg->variances()[5] == doctest::Approx(1e-6));

    // round trip: serialize, reload, denoise agreement to 1e-12
    std::mt19937 rng(23);
    std::vector<GmmComponent> comps(2);
    comps[0] = {0.3, testutil::random_vec(rng, 3), testutil::random_vec(rng, 3, 0.1, 1.0)};
    comps[1] = {0.7, testutil::random_vec(rng, 3), testutil::random_vec(rng, 3, 0.1, 1.0)};
    DiagonalGmmPrior orig(comps, {{"v", {1.0, 0.0}}}, GmmDomain::spectral);
    auto reloaded = load_prior(save_prior(orig));
    const auto x = testutil::random_vec(rng, 3);
    const auto a = orig.denoise(x, 0.7, Condition::label("v"));
    const auto b = reloaded->denoise(x, 0.7, Condition::label("v"));
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(std::abs(a[i] - b[i]) < 1e-12);
}

TEST_CASE("prior sampling respects conditional views") {
    auto base = std::make_shared<DiagonalGmmPrior>(
        std::vector<GmmComponent>{{0.5, {-2.0}, {0.01}}, {0.5, {2.0}, {0.01}}},
        std::map<std::string, std::vector<double>>{{"left", {1.0, 0.0}},
                                                   {"right", {0.0, 1.0}}});
    GaussianStream g(42);
    std::vector<double> out(1);
    for (int i = 0; i < 20; ++i) {
        base->sample(Condition::label("left"), g, out);
        CHECK(out[0] < 0.0);
        base->sample(Condition::label("right"), g, out);
        CHECK(out[0] > 0.0);
    }
}
