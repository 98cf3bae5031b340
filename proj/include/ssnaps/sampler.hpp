// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "ssnaps/likelihood.hpp"
#include "ssnaps/priors.hpp"
#include "ssnaps/schedules.hpp"
#include "ssnaps/stft.hpp"

namespace ssnaps {

// K speech estimates plus one noise estimate, with per-speech conditions.
struct SourceState {
    std::vector<std::vector<double>> speech;
    std::vector<double> noise;
    std::vector<Condition> conditions;  // one per speech source

    std::size_t num_speech() const { return speech.size(); }
    std::size_t num_sources() const { return speech.size() + 1; }
    std::size_t dim() const { return noise.size(); }

    // Source indexing: 0..K-1 speech, K noise.
    std::vector<double>& source(std::size_t s) {
        return s < speech.size() ? speech[s] : noise;
    }
    const std::vector<double>& source(std::size_t s) const {
        return s < speech.size() ? speech[s] : noise;
    }
    const Condition& condition(std::size_t s) const;  // noise -> null

    void validate() const;  // shape + conditions
    // throws DivergenceError naming the offender
    void check_finite(double sigma, std::size_t outer_step) const;
};

// Numerical-divergence abort carrying where it happened. npos marks fields
// without a meaningful value in the failing context.
class DivergenceError : public std::runtime_error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
    DivergenceError(const std::string& what, double sigma, std::size_t outer_step,
                    std::size_t iteration, std::size_t source);
    double sigma;
    std::size_t outer_step, iteration, source;
};

enum class LikelihoodKind { compressed_stft, time_domain };

struct SamplerConfig {
    DiffusionSchedule schedule;
    LangevinConfig langevin;
    std::size_t n_ode = 2;
    double inner_rho = 7.0;
    std::shared_ptr<const ScorePrior> speech_prior;  // typically a GuidedPrior
    std::shared_ptr<const ScorePrior> noise_prior;
    std::vector<Condition> speech_conditions;  // K entries; may be empty
    LikelihoodKind likelihood = LikelihoodKind::compressed_stft;
    StftConfig stft;
    std::uint64_t rng_seed = 0;
    bool collect_trace = false;

    std::size_t num_speech() const { return speech_conditions.size(); }
    void validate(std::size_t signal_len) const;
};

struct OffscreenConfig {
    double g_ctss = 20.0;
    double sigma_os = 0.25;
    void validate() const;
};

struct NfeReport {
    std::uint64_t speech_total = 0;
    std::uint64_t noise_total = 0;
    std::vector<std::uint64_t> per_source;  // K speech entries then noise

    std::uint64_t total() const { return speech_total + noise_total; }
};

struct TraceRow {
    std::size_t step = 0;
    double sigma = 0.0;
    double rec = 0.0;
};

struct RunResult {
    SourceState state;
    NfeReport nfe;
    std::vector<TraceRow> trace;
    std::uint64_t crosstalk_evals = 0;  // off-screen runs only
};

// Crosstalk hook for the off-screen variant: below sigma_os, conditioned
// speech sources get an extra g * crosstalk gradient against a constant
// copy of the unconditioned source's magnitude grid.
struct OffscreenHook {
    double g_ctss = 0.0;
    double sigma_os = 0.0;
    std::size_t offscreen_index = 0;
    StftConfig stft;
    mutable std::uint64_t crosstalk_evals = 0;

    bool active(double sigma) const { return g_ctss > 0.0 && sigma < sigma_os; }
};

// Test instrumentation; callbacks receive per-source gradient copies and are
// meant for small problems.
struct LangevinInstrumentation {
    std::function<void(std::size_t iter,
                       const std::vector<std::vector<double>>& data_grads)>
        on_data_grads;
    std::function<void(std::size_t iter,
                       const std::vector<std::vector<double>>& anchor_grads)>
        on_anchor_grads;
};

// Euler integration of dx = (x - denoise(x, tau)) / tau dtau from
// sigma_start down a curvature-family grid to tau_min = 1e-5.
// Deterministic. `evals` (optional) accumulates denoiser evaluations.
std::vector<double> solve_prior_ode(const ScorePrior& prior,
                                    std::span<const double> x_tau,
                                    double sigma_start, std::size_t n_ode,
                                    const Condition& cond, double inner_rho = 7.0,
                                    std::uint64_t* evals = nullptr);

// n_mc iterations of the decoupled posterior update at one anneal level.
// Every source s moves by
//   -eta_j * 2(s - anchor_s)/anchor_den - eta_j * grad(data)/data_den
//   + sqrt(2 eta_j) * eps
// with the data gradient computed once per iteration at the pre-update
// state and shared across sources. alpha = +inf disables the data term.
SourceState langevin_posterior(const MixtureLikelihood& lik,
                               const SourceState& anchors, SourceState state,
                               double sigma_tau, const LangevinConfig& cfg,
                               std::uint64_t seed, std::size_t outer_step,
                               const OffscreenHook* hook = nullptr,
                               const LangevinInstrumentation* instr = nullptr,
                               double guard_norm =
                                   std::numeric_limits<double>::infinity());

RunResult ssnaps_separate(std::span<const double> y, const SamplerConfig& cfg);

// Same loop with the gated crosstalk term; requires K >= 2 and a null
// condition on the last speech source.
RunResult ssnaps_offscreen(std::span<const double> y, const SamplerConfig& cfg,
                           const OffscreenConfig& off);

}  // namespace ssnaps
