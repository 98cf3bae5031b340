// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/oracle.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace ssnaps::oracle {

double ExactGaussianPosterior::marginal_variance(std::size_t s,
                                                 std::size_t t) const {
    // diag(B C B^T) with C diagonal per coefficient: sum_i cov_i(s,s) B[t][i]^2
    RealFourierBasis basis(dim);
    double acc = 0.0;
    for (std::size_t i = 0; i < dim; ++i) {
        const double b = basis.entry(t, i);
        acc += cov(i, s, s) * b * b;
    }
    return acc;
}

ExactGaussianPosterior gaussian_posterior_exact(
    const std::vector<const SpectralGaussianPrior*>& priors,
    std::span<const double> y, double sigma_z) {
    if (priors.empty())
        throw std::invalid_argument("oracle: need at least one prior");
    for (const auto* p : priors)
        if (p == nullptr || p->dim() != y.size())
            throw std::invalid_argument("oracle: prior/observation dim mismatch");
    if (!(sigma_z > 0.0))
        throw std::invalid_argument("oracle: sigma_z must be > 0");

    const std::size_t d = y.size();
    const std::size_t S = priors.size();
    RealFourierBasis basis(d);
    const std::vector<double> yc = basis.forward(y);

    ExactGaussianPosterior post;
    post.dim = d;
    post.n_sources = S;
    post.coeff_cov.assign(d * S * S, 0.0);
    std::vector<std::vector<double>> mean_coeffs(S, std::vector<double>(d));

    const double sz2 = sigma_z * sigma_z;
    for (std::size_t i = 0; i < d; ++i) {
        double vsum = sz2, musum = 0.0;
        for (const auto* p : priors) {
            vsum += p->variances()[i];
            musum += p->mean_coeffs()[i];
        }
        const double resid = yc[i] - musum;
        for (std::size_t a = 0; a < S; ++a) {
            const double va = priors[a]->variances()[i];
            mean_coeffs[a][i] = priors[a]->mean_coeffs()[i] + va * resid / vsum;
            for (std::size_t b = 0; b < S; ++b) {
                const double vb = priors[b]->variances()[i];
                double c = -va * vb / vsum;
                if (a == b) c += va;
                post.coeff_cov[i * S * S + a * S + b] = c;
            }
        }
    }

    // covariance blocks must stay PSD up to round-off
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t a = 0; a < S; ++a)
            if (post.coeff_cov[i * S * S + a * S + a] < -1e-9)
                throw std::logic_error("oracle: posterior covariance not PSD");

    post.means.resize(S);
    for (std::size_t a = 0; a < S; ++a) post.means[a] = basis.inverse(mean_coeffs[a]);
    return post;
}

// ------------------------------------------------------------- GMM densities

double log_gmm_density(const DiagonalGmmPrior& prior, std::span<const double> x,
                       const Condition& c) {
    return log_gmm_smoothed_density(prior, x, 0.0, c);
}

double log_gmm_smoothed_density(const DiagonalGmmPrior& prior,
                                std::span<const double> x, double sigma,
                                const Condition& c) {
    if (prior.domain() != GmmDomain::signal)
        throw std::invalid_argument("oracle: expected a signal-domain GMM");
    if (x.size() != prior.dim())
        throw std::invalid_argument("oracle: dimension mismatch");
    const auto& w = prior.weights_for(c);
    const double s2 = sigma * sigma;
    constexpr double log2pi = 1.8378770664093454836;

    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> logs(prior.components().size(),
                             -std::numeric_limits<double>::infinity());
    for (std::size_t k = 0; k < prior.components().size(); ++k) {
        if (w[k] == 0.0) continue;
        const auto& comp = prior.components()[k];
        double acc = std::log(w[k]);
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double tv = comp.variance[i] + s2;
            if (!(tv > 0.0))
                throw std::invalid_argument("oracle: degenerate component variance");
            const double dlt = x[i] - comp.mean[i];
            acc -= 0.5 * (log2pi + std::log(tv) + dlt * dlt / tv);
        }
        logs[k] = acc;
        best = std::max(best, acc);
    }
    double z = 0.0;
    for (double l : logs) z += std::exp(l - best);
    return best + std::log(z);
}

// --------------------------------------------------------------------- grid

namespace {

double trapezoid_mass_1d(const std::vector<double>& v, double cell) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < v.size(); ++i) acc += 0.5 * (v[i] + v[i + 1]);
    return acc * cell;
}

double trapezoid_mass_2d(const std::vector<double>& v, std::size_t n, double cell) {
    double acc = 0.0;
    for (std::size_t r = 0; r + 1 < n; ++r)
        for (std::size_t c = 0; c + 1 < n; ++c)
            acc += 0.25 * (v[r * n + c] + v[r * n + c + 1] + v[(r + 1) * n + c] +
                           v[(r + 1) * n + c + 1]);
    return acc * cell * cell;
}

}  // namespace

GridDensity grid_posterior(const std::vector<const DiagonalGmmPrior*>& priors,
                           double y, double sigma_z, double lo, double hi,
                           std::size_t points_per_axis) {
    if (priors.empty() || priors.size() > 2)
        throw std::invalid_argument("grid_posterior: supports 1 or 2 sources");
    for (const auto* p : priors)
        if (p == nullptr || p->dim() != 1)
            throw std::invalid_argument("grid_posterior: priors must be scalar");
    if (points_per_axis < 64)
        throw std::invalid_argument("grid_posterior: grid too coarse (< 64 points)");
    if (!(hi > lo)) throw std::invalid_argument("grid_posterior: bad bounds");
    if (!(sigma_z > 0.0))
        throw std::invalid_argument("grid_posterior: sigma_z must be > 0");

    GridDensity g;
    g.lo = lo;
    g.hi = hi;
    g.points = points_per_axis;
    g.n_axes = priors.size();
    const double cell = g.cell();
    const double sz2 = sigma_z * sigma_z;
    const double lognorm = -0.5 * std::log(2.0 * 3.14159265358979323846 * sz2);

    if (priors.size() == 1) {
        g.values.resize(g.points);
        for (std::size_t i = 0; i < g.points; ++i) {
            const double x = lo + cell * static_cast<double>(i);
            const double r = y - x;
            const double loglik = lognorm - 0.5 * r * r / sz2;
            g.values[i] =
                std::exp(log_gmm_density(*priors[0], std::span{&x, 1}) + loglik);
        }
        const double mass = trapezoid_mass_1d(g.values, cell);
        if (!(mass > 0.0))
            throw std::invalid_argument("grid_posterior: zero mass on grid");
        for (double& v : g.values) v /= mass;
    } else {
        g.values.resize(g.points * g.points);
        for (std::size_t r = 0; r < g.points; ++r) {
            const double x1 = lo + cell * static_cast<double>(r);
            const double lp1 = log_gmm_density(*priors[0], std::span{&x1, 1});
            for (std::size_t c = 0; c < g.points; ++c) {
                const double x2 = lo + cell * static_cast<double>(c);
                const double lp2 = log_gmm_density(*priors[1], std::span{&x2, 1});
                const double resid = y - x1 - x2;
                g.values[r * g.points + c] =
                    std::exp(lp1 + lp2 + lognorm - 0.5 * resid * resid / sz2);
            }
        }
        const double mass = trapezoid_mass_2d(g.values, g.points, cell);
        if (!(mass > 0.0))
            throw std::invalid_argument("grid_posterior: zero mass on grid");
        for (double& v : g.values) v /= mass;
    }
    return g;
}

std::vector<double> GridDensity::marginal_first() const {
    if (n_axes == 1) return values;
    std::vector<double> m(points, 0.0);
    const double c = cell();
    for (std::size_t r = 0; r < points; ++r) {
        double acc = 0.0;
        for (std::size_t k = 0; k + 1 < points; ++k)
            acc += 0.5 * (values[r * points + k] + values[r * points + k + 1]);
        m[r] = acc * c;
    }
    return m;
}

double tv_distance(std::span<const double> samples, const GridDensity& ref) {
    if (samples.empty()) throw std::invalid_argument("tv_distance: empty sample set");
    const std::vector<double> marg = ref.marginal_first();
    const std::size_t cells = ref.points - 1;
    const double cell = ref.cell();

    // reference mass per cell (trapezoid), then renormalized
    std::vector<double> ref_mass(cells);
    double total = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        ref_mass[i] = 0.5 * (marg[i] + marg[i + 1]) * cell;
        total += ref_mass[i];
    }
    for (double& m : ref_mass) m /= total;

    std::vector<double> hist(cells + 1, 0.0);  // last = overflow
    const double w = 1.0 / static_cast<double>(samples.size());
    for (double s : samples) {
        if (s < ref.lo || s > ref.hi) {
            hist[cells] += w;
            continue;
        }
        std::size_t idx = static_cast<std::size_t>((s - ref.lo) / cell);
        if (idx >= cells) idx = cells - 1;
        hist[idx] += w;
    }

    double tv = hist[cells];  // overflow cell has zero reference mass
    for (std::size_t i = 0; i < cells; ++i) tv += std::abs(hist[i] - ref_mass[i]);
    return 0.5 * tv;
}

void write_grid_csv(std::ostream& os, const GridDensity& g) {
    os.precision(12);
    const double cell = g.cell();
    if (g.n_axes == 1) {
        os << "x,density\n";
        for (std::size_t i = 0; i < g.points; ++i)
            os << g.lo + cell * static_cast<double>(i) << "," << g.values[i] << "\n";
    } else {
        os << "x1,x2,density\n";
        for (std::size_t r = 0; r < g.points; ++r)
            for (std::size_t c = 0; c < g.points; ++c)
                os << g.lo + cell * static_cast<double>(r) << ","
                   << g.lo + cell * static_cast<double>(c) << ","
                   << g.values[r * g.points + c] << "\n";
    }
}

}  // namespace ssnaps::oracle
