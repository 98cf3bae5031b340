// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <fstream>
#include <random>

#include "reference/reference.hpp"
#include "ssnaps/spectral_loss.hpp"
#include "ssnaps/stft.hpp"
#include "support/test_util.hpp"

using namespace ssnaps;

namespace {

const StftConfig kSmall{32, 12, 32};  // fast configs for gradient tests

std::vector<double> tone_plus_noise(std::mt19937& rng, std::size_t n) {
    // strong multi-tone base keeps spectrogram magnitudes well away from
    // the compression floor
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::vector<double> x(n);
    for (std::size_t t = 0; t < n; ++t)
        x[t] = std::sin(0.41 * static_cast<double>(t)) +
               0.8 * std::cos(1.13 * static_cast<double>(t) + 0.3) + u(rng);
    return x;
}

}  // namespace

TEST_CASE("stft framing and trivial inputs") {
    StftConfig cfg;  // 510/160/510 defaults
    CHECK(cfg.bins() == 256);
    CHECK(stft_frame_count(64000, cfg) == 398);
    CHECK(stft_frame_count(510, cfg) == 1);

    std::vector<double> zeros(1200, 0.0);
    const auto g = stft(zeros, cfg);
    for (const auto& v : g.z) CHECK(std::abs(v) == 0.0);

    std::vector<double> short_sig(509, 0.0);
    CHECK_THROWS_AS(stft(short_sig, cfg), std::invalid_argument);
}

TEST_CASE("unit impulse at sample zero fills frame zero with window[0]") {
    StftConfig cfg{64, 16, 64};
    std::vector<double> x(200, 0.0);
    x[0] = 1.0;
    const auto g = stft(x, cfg);
    const double w0 = cfg.hann()[0];
    for (std::size_t k = 0; k < g.bins; ++k) {
        CHECK(g.at(k, 0).real() == doctest::Approx(w0).epsilon(1e-14));
        CHECK(std::abs(g.at(k, 0).imag()) < 1e-14);
    }
}

TEST_CASE("bin-centred sinusoid concentrates energy and matches the naive dft") {
    StftConfig cfg{64, 16, 64};
    const std::size_t k0 = 9;
    std::vector<double> x(400);
    for (std::size_t t = 0; t < x.size(); ++t)
        x[t] = std::sin(2.0 * std::numbers::pi * static_cast<double>(k0) *
                        static_cast<double>(t) / 64.0);
    const auto g = stft(x, cfg);
    const auto r = ref::stft(x, cfg);
    REQUIRE(g.z.size() == r.z.size());
    for (std::size_t i = 0; i < g.z.size(); ++i)
        CHECK(std::abs(g.z[i] - r.z[i]) < 1e-10);

    // complete frames put all energy into k0 and its two neighbours
    for (std::size_t f = 0; f + 1 < g.frames; ++f) {
        double inband = 0.0, total = 0.0;
        for (std::size_t k = 0; k < g.bins; ++k) {
            const double e = std::norm(g.at(k, f));
            total += e;
            if (k + 1 >= k0 && k <= k0 + 1) inband += e;
        }
        CHECK(inband / total > 1.0 - 1e-12);
    }
}

TEST_CASE("stft is linear") {
    std::mt19937 rng(31);
    const auto x = testutil::random_vec(rng, 150);
    const auto w = testutil::random_vec(rng, 150);
    const double a = 1.7, b = -0.4;
    std::vector<double> mix(150);
    for (std::size_t t = 0; t < mix.size(); ++t) mix[t] = a * x[t] + b * w[t];
    const auto gm = stft(mix, kSmall);
    const auto gx = stft(x, kSmall);
    const auto gw = stft(w, kSmall);
    for (std::size_t i = 0; i < gm.z.size(); ++i)
        CHECK(std::abs(gm.z[i] - (a * gx.z[i] + b * gw.z[i])) < 1e-10);
}

TEST_CASE("adjoint identity <stft(x), Z> == <x, adjoint(Z)>") {
    std::mt19937 rng(37);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t len = 100 + 17 * trial;
        const auto x = testutil::random_vec(rng, len);
        const auto gx = stft(x, kSmall);

        Spectrogram zeta;
        zeta.bins = gx.bins;
        zeta.frames = gx.frames;
        zeta.z.resize(gx.z.size());
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (auto& v : zeta.z) v = {u(rng), u(rng)};

        double lhs = 0.0;
        for (std::size_t i = 0; i < gx.z.size(); ++i)
            lhs += gx.z[i].real() * zeta.z[i].real() +
                   gx.z[i].imag() * zeta.z[i].imag();
        const auto adj = stft_adjoint(zeta, len, kSmall);
        double rhs = 0.0;
        for (std::size_t t = 0; t < len; ++t) rhs += x[t] * adj[t];
        CHECK(testutil::rel_err(lhs, rhs) < 1e-10);

        // production adjoint equals the transposed-loop reference
        const auto adj_ref = ref::stft_adjoint(zeta, len, kSmall);
        for (std::size_t t = 0; t < len; ++t)
            CHECK(std::abs(adj[t] - adj_ref[t]) < 1e-10);
    }
}

TEST_CASE("compression magnitudes and phases") {
    Spectrogram z;
    z.bins = 2;
    z.frames = 2;
    z.z = {{1.0, 0.0}, {8.0, 0.0}, {0.0, 0.0}, {0.0, -8.0}};
    const auto c = compress(z);
    CHECK(c.z[0] == std::complex<double>{1.0, 0.0});
    CHECK(c.z[1].real() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(std::abs(c.z[2]) == 0.0);  // floor path maps 0 to 0
    CHECK(c.z[3].real() == doctest::Approx(0.0));
    CHECK(c.z[3].imag() == doctest::Approx(-4.0).epsilon(1e-12));

    // phase preserved wherever |z| is meaningful
    std::mt19937 rng(41);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const std::complex<double> v{u(rng), u(rng)};
        if (std::abs(v) < 1e-6) continue;
        Spectrogram one;
        one.bins = one.frames = 1;
        one.z = {v};
        const auto cv = compress(one).z[0];
        CHECK(std::abs(std::arg(cv) - std::arg(v)) < 1e-12);
        CHECK(testutil::rel_err(std::abs(cv), std::pow(std::abs(v), 2.0 / 3.0)) <
              1e-9);
    }
}

TEST_CASE("reconstruction loss: exact fit, single estimate, brute force") {
    std::mt19937 rng(43);
    const std::size_t len = 140;
    const auto s1 = tone_plus_noise(rng, len);
    const auto s2 = testutil::random_vec(rng, len);
    std::vector<double> y(len);
    for (std::size_t t = 0; t < len; ++t) y[t] = s1[t] + s2[t];

    std::vector<std::vector<double>> exact{s1, s2};
    CHECK(rec_loss(y, exact, kSmall) == doctest::Approx(0.0).epsilon(1e-15));

    // y = 0: loss is the compressed energy sum |STFT(e)|^(4/3)
    std::vector<double> zeros(len, 0.0);
    std::vector<std::vector<double>> single{s1};
    const auto g = stft(s1, kSmall);
    double want = 0.0;
    for (const auto& v : g.z) want += std::pow(std::abs(v), 4.0 / 3.0);
    CHECK(testutil::rel_err(rec_loss(zeros, single, kSmall), want) < 1e-10);

    // randomized case against the reference implementation
    for (int trial = 0; trial < 5; ++trial) {
        const auto yy = tone_plus_noise(rng, len);
        std::vector<std::vector<double>> est{testutil::random_vec(rng, len),
                                             testutil::random_vec(rng, len)};
        CHECK(testutil::rel_err(rec_loss(yy, est, kSmall),
                                ref::rec_loss(yy, est, kSmall)) < 1e-10);
    }

    std::vector<std::vector<double>> bad{std::vector<double>(len - 1, 0.0)};
    CHECK_THROWS_AS(rec_loss(y, bad, kSmall), std::invalid_argument);
}

TEST_CASE("reconstruction gradient: zero at optimum, finite differences") {
    std::mt19937 rng(47);
    const std::size_t len = 120;
    const auto s1 = tone_plus_noise(rng, len);
    const auto s2 = tone_plus_noise(rng, len);
    std::vector<double> y(len);
    for (std::size_t t = 0; t < len; ++t) y[t] = s1[t] + s2[t];
    std::vector<std::vector<double>> exact{s1, s2};
    const auto g0 = rec_loss_grad(y, exact, kSmall);
    for (double v : g0) CHECK(std::abs(v) < 1e-10);

    for (int trial = 0; trial < 5; ++trial) {
        const auto yy = tone_plus_noise(rng, len);
        std::vector<std::vector<double>> est{tone_plus_noise(rng, len),
                                             tone_plus_noise(rng, len)};
        const auto grad = rec_loss_grad(yy, est, kSmall);

        std::uniform_int_distribution<std::size_t> pick(0, len - 1);
        double num2 = 0.0, den2 = 0.0;
        for (int k = 0; k < 12; ++k) {
            const std::size_t i = pick(rng);
            const auto f = [&](const std::vector<double>& v) {
                std::vector<std::vector<double>> e2{v, est[1]};
                return rec_loss(yy, e2, kSmall);
            };
            const double fd = testutil::central_diff(f, est[0], i, 1e-5);
            num2 += (grad[i] - fd) * (grad[i] - fd);
            den2 += fd * fd;
        }
        CHECK(std::sqrt(num2 / den2) < 1e-6);
    }
}

TEST_CASE("crosstalk similarity: bounds, degeneracy, disjoint bands") {
    std::mt19937 rng(53);
    const std::size_t len = 160;
    const auto x = tone_plus_noise(rng, len);
    CHECK(crosstalk_loss(x, x, kSmall) == doctest::Approx(1.0).epsilon(1e-12));

    std::vector<double> zeros(len, 0.0);
    CHECK(crosstalk_loss(x, zeros, kSmall) == 0.0);
    CHECK(crosstalk_loss(zeros, x, kSmall) == 0.0);

    // widely separated bin-centred tones overlap only through window leakage
    std::vector<double> lo(len), hi(len);
    for (std::size_t t = 0; t < len; ++t) {
        lo[t] = std::sin(2.0 * std::numbers::pi * 3.0 * static_cast<double>(t) / 32.0);
        hi[t] = std::sin(2.0 * std::numbers::pi * 13.0 * static_cast<double>(t) / 32.0);
    }
    const double ct = crosstalk_loss(lo, hi, kSmall);
    CHECK(ct >= 0.0);
    CHECK(ct < 0.2);

    // value (not gradient) is symmetric, and always within [0, 1]
    for (int trial = 0; trial < 8; ++trial) {
        const auto a = testutil::random_vec(rng, len);
        const auto b = testutil::random_vec(rng, len);
        const double ab = crosstalk_loss(a, b, kSmall);
        const double ba = crosstalk_loss(b, a, kSmall);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-12));
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
    }
}

TEST_CASE("crosstalk gradient: stop-gradient contract and finite differences") {
    std::mt19937 rng(59);
    const std::size_t len = 130;
    const auto on = tone_plus_noise(rng, len);
    const auto off_a = tone_plus_noise(rng, len);
    auto off_b = off_a;
    for (std::size_t t = 0; t < len; ++t)  // reshape the constant branch
        off_b[t] += 0.5 * std::sin(2.1 * static_cast<double>(t));

    // loss changes with the offscreen signal but the gradient field wrt the
    // onscreen signal never reflects an offscreen perturbation query
    const auto ga = crosstalk_grad(on, off_a, kSmall);
    CHECK(crosstalk_loss(on, off_a, kSmall) !=
          doctest::Approx(crosstalk_loss(on, off_b, kSmall)).epsilon(1e-9));

    for (int trial = 0; trial < 4; ++trial) {
        const auto onv = tone_plus_noise(rng, len);
        const auto offv = tone_plus_noise(rng, len);
        const auto grad = crosstalk_grad(onv, offv, kSmall);
        std::uniform_int_distribution<std::size_t> pick(0, len - 1);
        double num2 = 0.0, den2 = 0.0;
        for (int k = 0; k < 10; ++k) {
            const std::size_t i = pick(rng);
            const auto f = [&](const std::vector<double>& v) {
                return crosstalk_loss(v, offv, kSmall);
            };
            const double fd = testutil::central_diff(f, onv, i, 1e-5);
            num2 += (grad[i] - fd) * (grad[i] - fd);
            den2 += fd * fd;
        }
        CHECK(std::sqrt(num2 / den2) < 1e-5);
    }

    // moving along the gradient raises the similarity
    const auto grad = crosstalk_grad(on, off_a, kSmall);
    const double l0 = crosstalk_loss(on, off_a, kSmall);
    auto moved = on;
    const double step = 1e-6 / std::max(testutil::l2(grad), 1e-12);
    for (std::size_t t = 0; t < len; ++t) moved[t] += step * grad[t];
    CHECK(crosstalk_loss(moved, off_a, kSmall) > l0);
    (void)ga;
}

TEST_CASE("spectrogram dump layout") {
    std::mt19937 rng(61);
    const auto x = testutil::random_vec(rng, 100);
    const auto g = stft(x, kSmall);
    const auto path = std::filesystem::temp_directory_path() / "ssnaps_spec.bin";
    dump_spectrogram(path, g);

    std::ifstream is(path, std::ios::binary);
    std::uint64_t dims[2];
    is.read(reinterpret_cast<char*>(dims), sizeof(dims));
    CHECK(dims[0] == g.bins);
    CHECK(dims[1] == g.frames);
    double pair[2];
    is.read(reinterpret_cast<char*>(pair), sizeof(pair));
    CHECK(pair[0] == g.z[0].real());
    CHECK(pair[1] == g.z[0].imag());
    std::filesystem::remove(path);
}
