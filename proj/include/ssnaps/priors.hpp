// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssnaps/rdft.hpp"
#include "ssnaps/rng.hpp"

namespace ssnaps {

// A per-source conditioning label. The empty token is the null token and
// selects the unconditional prior.
struct Condition {
    std::string token;

    bool is_null() const { return token.empty(); }
    static Condition null() { return {}; }
    static Condition label(std::string t) { return {std::move(t)}; }
    bool operator==(const Condition&) const = default;
};

// A prior with a closed-form denoiser: denoise(x, sigma) = E[x0 | x] under
// the prior convolved with N(0, sigma^2 I). The score follows by Tweedie's
// identity, (denoise(x) - x) / sigma^2.
//
// Priors are immutable after construction; denoise/score may be called
// concurrently. The evaluation counter is the one mutable member and is
// atomic.
class ScorePrior {
public:
    virtual ~ScorePrior() = default;

    virtual std::size_t dim() const = 0;
    virtual bool knows(const Condition& c) const = 0;

    virtual void denoise(std::span<const double> x, double sigma,
                         const Condition& c, std::span<double> out) const {
        check_args(x, sigma, c, out);
        nfe_.fetch_add(1, std::memory_order_relaxed);
        do_denoise(x, sigma, c, out);
    }
    std::vector<double> denoise(std::span<const double> x, double sigma,
                                const Condition& c = Condition::null()) const;

    void score(std::span<const double> x, double sigma, const Condition& c,
               std::span<double> out) const;
    std::vector<double> score(std::span<const double> x, double sigma,
                              const Condition& c = Condition::null()) const;

    // Draw x0 from the (conditional) prior.
    virtual void sample(const Condition& c, GaussianStream& g,
                        std::span<double> out) const = 0;

    // Denoiser evaluations one denoise() call consumes under this condition.
    virtual std::uint64_t evals_per_call(const Condition&) const { return 1; }

    virtual std::uint64_t nfe() const { return nfe_.load(std::memory_order_relaxed); }
    virtual void reset_nfe() const { nfe_.store(0, std::memory_order_relaxed); }

protected:
    void check_args(std::span<const double> x, double sigma, const Condition& c,
                    std::span<const double> out) const;
    virtual void do_denoise(std::span<const double> x, double sigma,
                            const Condition& c, std::span<double> out) const = 0;
    mutable std::atomic<std::uint64_t> nfe_{0};
};

// Gaussian prior diagonal in the orthonormal real Fourier basis:
// x0 = B(mu + sqrt(v) .* eps). The per-coefficient denoiser is the
// conjugate posterior mean (v*c + sigma^2*mu) / (v + sigma^2).
class SpectralGaussianPrior : public ScorePrior {
public:
    SpectralGaussianPrior(std::vector<double> mean_coeffs,
                          std::vector<double> variances);

    std::size_t dim() const override { return mean_.size(); }
    bool knows(const Condition& c) const override { return c.is_null(); }
    void sample(const Condition& c, GaussianStream& g,
                std::span<double> out) const override;

    const std::vector<double>& mean_coeffs() const { return mean_; }
    const std::vector<double>& variances() const { return var_; }
    const RealFourierBasis& basis() const { return basis_; }

protected:
    void do_denoise(std::span<const double> x, double sigma, const Condition& c,
                    std::span<double> out) const override;

private:
    std::vector<double> mean_;  // coefficient domain
    std::vector<double> var_;
    RealFourierBasis basis_;
};

enum class GmmDomain { signal, spectral };

struct GmmComponent {
    double weight = 0.0;
    std::vector<double> mean;
    std::vector<double> variance;
};

// Mixture of diagonal Gaussians, in the signal domain or (for band-shaped
// priors) diagonal in the shared Fourier basis. Conditional views remap the
// component weights per token; the null token uses the base weights.
class DiagonalGmmPrior : public ScorePrior {
public:
    DiagonalGmmPrior(std::vector<GmmComponent> components,
                     std::map<std::string, std::vector<double>> views = {},
                     GmmDomain domain = GmmDomain::signal);

    std::size_t dim() const override { return dim_; }
    bool knows(const Condition& c) const override {
        return c.is_null() || views_.count(c.token) > 0;
    }
    void sample(const Condition& c, GaussianStream& g,
                std::span<double> out) const override;

    const std::vector<GmmComponent>& components() const { return comps_; }
    const std::map<std::string, std::vector<double>>& views() const { return views_; }
    GmmDomain domain() const { return domain_; }
    const std::vector<double>& weights_for(const Condition& c) const;

protected:
    void do_denoise(std::span<const double> x, double sigma, const Condition& c,
                    std::span<double> out) const override;

private:
    // responsibilities + posterior means in the component domain
    void denoise_coeffs(std::span<const double> u, double sigma,
                        const std::vector<double>& w, std::span<double> out) const;

    std::vector<GmmComponent> comps_;
    std::vector<double> base_weights_;
    std::map<std::string, std::vector<double>> views_;
    GmmDomain domain_;
    std::size_t dim_;
    std::optional<RealFourierBasis> basis_;
};

enum class GuidanceForm {
    interpolate,  // D0 + omega * (Dc - D0)
    overshoot,    // (1 + omega) * Dc - omega * D0
};

// Conditional/unconditional denoiser blend. A conditioned call costs two
// base evaluations; the null token passes through to one. nfe() reports the
// base prior's counter.
class GuidedPrior : public ScorePrior {
public:
    GuidedPrior(std::shared_ptr<const ScorePrior> base, double omega,
                GuidanceForm form = GuidanceForm::interpolate);

    std::size_t dim() const override { return base_->dim(); }
    bool knows(const Condition& c) const override { return base_->knows(c); }

    using ScorePrior::denoise;
    void denoise(std::span<const double> x, double sigma, const Condition& c,
                 std::span<double> out) const override;
    void sample(const Condition& c, GaussianStream& g,
                std::span<double> out) const override {
        base_->sample(c, g, out);
    }

    std::uint64_t evals_per_call(const Condition& c) const override {
        return c.is_null() ? base_->evals_per_call(c)
                           : base_->evals_per_call(Condition::null()) +
                                 base_->evals_per_call(c);
    }

    std::uint64_t nfe() const override { return base_->nfe(); }
    void reset_nfe() const override { base_->reset_nfe(); }

    const ScorePrior& base() const { return *base_; }
    double omega() const { return omega_; }

protected:
    void do_denoise(std::span<const double>, double, const Condition&,
                    std::span<double>) const override;

private:
    std::shared_ptr<const ScorePrior> base_;
    double omega_;
    GuidanceForm form_;
};

// JSON prior documents. kind is "spectral_gaussian" or "diag_gmm"; numeric
// arrays may be given either literally or in the compact band form
//   {"fill": v, "bands": [{"from": i, "to": j, "value": v}, ...]}
// with [from, to) coefficient index ranges. Unknown keys are rejected.
std::unique_ptr<ScorePrior> load_prior(const nlohmann::json& doc);
std::unique_ptr<ScorePrior> load_prior_file(const std::filesystem::path& path);
nlohmann::json save_prior(const ScorePrior& prior);

}  // namespace ssnaps
