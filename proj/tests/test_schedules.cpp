// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sstream>

#include "ssnaps/schedules.hpp"
#include "support/test_util.hpp"

using namespace ssnaps;

TEST_CASE("karras ladder endpoints are assigned exactly") {
    const auto s = karras_schedule(2.0, 0.01, 300, 10.0);
    CHECK(s.size() == 300);
    CHECK(s.levels.front() == 2.0);   // bit-exact
    CHECK(s.levels.back() == 0.01);  // bit-exact
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
        CHECK(s.levels[i] > s.levels[i + 1]);
        CHECK(s.levels[i] > 0.0);
    }
}

TEST_CASE("karras ladder interior matches an independent evaluation") {
    // value computed with a 50-digit evaluator from the closed form
    const auto s = karras_schedule(2.0, 0.01, 300, 10.0);
    CHECK(testutil::rel_err(s.levels[150], 0.1983343937238663948) < 1e-14);

    const auto s4 = karras_schedule(4.0, 0.01, 300, 10.0);
    CHECK(testutil::rel_err(s4.levels[77], 1.1647445655322602295) < 1e-14);
    const auto s3 = karras_schedule(3.0, 0.01, 400, 10.0);
    CHECK(testutil::rel_err(s3.levels[200], 0.25692451473495186292) < 1e-14);
}

TEST_CASE("rho = 1 gives an affine ladder") {
    const auto s = karras_schedule(1.5, 0.25, 64, 1.0);
    const double step = s.levels[0] - s.levels[1];
    for (std::size_t i = 0; i + 1 < s.size(); ++i)
        CHECK(testutil::rel_err(s.levels[i] - s.levels[i + 1], step) < 1e-12);
}

TEST_CASE("degenerate or invalid ladders are rejected") {
    CHECK_THROWS_AS(karras_schedule(1.0, 1.0, 10, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(karras_schedule(0.5, 1.0, 10, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(karras_schedule(1.0, 0.1, 1, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(karras_schedule(1.0, 0.1, 10, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(karras_schedule(1.0, -0.1, 10, 7.0), std::invalid_argument);
}

TEST_CASE("inner grid spans sigma_start down to tau_min") {
    const auto g = inner_ode_grid(0.5, 2);
    CHECK(g.size() == 3);
    CHECK(g.levels.front() == 0.5);
    CHECK(g.levels.back() == 1e-5);
    CHECK_THROWS_AS(inner_ode_grid(1e-6, 2), std::invalid_argument);
}

TEST_CASE("langevin step size schedule") {
    LangevinConfig cfg;
    cfg.eta0 = 1e-6;
    cfg.delta = 0.01;
    cfg.n_mc = 50;
    cfg.validate();

    CHECK(langevin_step_size(cfg, 0) == doctest::Approx(1e-8).epsilon(1e-12));

    // independent evaluation of the same formula
    LangevinConfig cfg100 = cfg;
    cfg100.n_mc = 100;
    CHECK(testutil::rel_err(langevin_step_size(cfg100, 99), 9.901e-7) < 1e-14);

    CHECK_THROWS_AS(langevin_step_size(cfg, 50), std::out_of_range);

    // nondecreasing, never above eta0
    double prev = 0.0;
    for (std::size_t j = 0; j < cfg.n_mc; ++j) {
        const double e = langevin_step_size(cfg, j);
        CHECK(e >= prev);
        CHECK(e <= cfg.eta0);
        prev = e;
    }
}

TEST_CASE("langevin config validation") {
    LangevinConfig cfg;
    cfg.eta0 = 0.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.delta = 1.5;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.alpha = -1.0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
    cfg = {};
    cfg.n_mc = 0;
    CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("denominator conventions") {
    LangevinConfig cfg;
    cfg.alpha = 2.0;
    CHECK(cfg.anchor_denominator(0.5) == doctest::Approx(0.25));
    CHECK(cfg.data_denominator() == doctest::Approx(4.0));
    cfg.anchor_denom = AnchorDenom::two_r_sq;
    cfg.data_denom = DataDenom::two_alpha_sq;
    CHECK(cfg.anchor_denominator(0.5) == doctest::Approx(0.5));
    CHECK(cfg.data_denominator() == doctest::Approx(8.0));
    cfg.r_scale = 2.0;
    CHECK(cfg.anchor_denominator(0.5) == doctest::Approx(2.0));
}

TEST_CASE("schedule csv serialization") {
    const auto s = karras_schedule(1.0, 0.1, 3, 2.0);
    std::ostringstream os;
    write_schedule_csv(os, s);
    CHECK(os.str().substr(0, 6) == "sigma\n");
    CHECK(os.str().find("\n1\n") != std::string::npos);
}
