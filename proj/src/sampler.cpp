// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/sampler.hpp"

#include <cmath>
#include <exception>

#include "ssnaps/rng.hpp"
#include "ssnaps/spectral_loss.hpp"

namespace ssnaps {

// ----------------------------------------------------------------- plumbing

const Condition& SourceState::condition(std::size_t s) const {
    static const Condition null_cond{};
    return s < conditions.size() ? conditions[s] : null_cond;
}

void SourceState::validate() const {
    if (conditions.size() != speech.size())
        throw std::invalid_argument("state: one condition per speech source required");
    for (const auto& v : speech)
        if (v.size() != noise.size())
            throw std::invalid_argument("state: source length mismatch");
}

void SourceState::check_finite(double sigma, std::size_t outer_step) const {
    for (std::size_t s = 0; s < num_sources(); ++s)
        for (double v : source(s))
            if (!std::isfinite(v))
                throw DivergenceError("non-finite source state", sigma, outer_step,
                                      DivergenceError::npos, s);
}

DivergenceError::DivergenceError(const std::string& what, double sigma_,
                                 std::size_t outer_step_, std::size_t iteration_,
                                 std::size_t source_)
    : std::runtime_error(what + " (sigma=" + std::to_string(sigma_) +
                         ", outer_step=" + std::to_string(outer_step_) +
                         ", iteration=" +
                         (iteration_ == npos ? std::string("-")
                                             : std::to_string(iteration_)) +
                         ", source=" + std::to_string(source_) + ")"),
      sigma(sigma_),
      outer_step(outer_step_),
      iteration(iteration_),
      source(source_) {}

void SamplerConfig::validate(std::size_t signal_len) const {
    if (schedule.levels.size() < 2)
        throw std::invalid_argument("sampler: schedule needs at least 2 levels");
    for (std::size_t i = 0; i + 1 < schedule.levels.size(); ++i)
        if (!(schedule.levels[i] > schedule.levels[i + 1]) ||
            !(schedule.levels[i + 1] > 0.0))
            throw std::invalid_argument(
                "sampler: schedule must be strictly decreasing and positive");
    langevin.validate();
    if (n_ode < 1) throw std::invalid_argument("sampler: n_ode must be >= 1");
    if (!noise_prior) throw std::invalid_argument("sampler: noise prior required");
    if (noise_prior->dim() != signal_len)
        throw std::invalid_argument("sampler: noise prior dim != signal length");
    if (!speech_conditions.empty()) {
        if (!speech_prior)
            throw std::invalid_argument("sampler: speech prior required");
        if (speech_prior->dim() != signal_len)
            throw std::invalid_argument("sampler: speech prior dim != signal length");
        for (const auto& c : speech_conditions)
            if (!speech_prior->knows(c))
                throw std::invalid_argument("sampler: prior lacks condition token '" +
                                            c.token + "'");
    }
    if (likelihood == LikelihoodKind::compressed_stft) {
        stft.validate();
        if (signal_len < stft.window_len)
            throw std::invalid_argument(
                "sampler: signal shorter than one analysis window");
    }
}

void OffscreenConfig::validate() const {
    if (!(g_ctss >= 0.0))
        throw std::invalid_argument("offscreen: g_ctss must be >= 0");
    if (!(sigma_os > 0.0))
        throw std::invalid_argument("offscreen: sigma_os must be > 0");
}

// ----------------------------------------------------------------- anchors

std::vector<double> solve_prior_ode(const ScorePrior& prior,
                                    std::span<const double> x_tau,
                                    double sigma_start, std::size_t n_ode,
                                    const Condition& cond, double inner_rho,
                                    std::uint64_t* evals) {
    const DiffusionSchedule grid = inner_ode_grid(sigma_start, n_ode, inner_rho);
    std::vector<double> x(x_tau.begin(), x_tau.end());
    std::vector<double> den(x.size());
    for (std::size_t j = 0; j < n_ode; ++j) {
        const double tau = grid[j];
        const double dtau = grid[j + 1] - tau;
        prior.denoise(x, tau, cond, den);
        if (evals) *evals += prior.evals_per_call(cond);
        bool finite = true;
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += dtau / tau * (x[i] - den[i]);
            finite = finite && std::isfinite(x[i]);
        }
        if (!finite)
            throw DivergenceError("non-finite anchor solve", tau,
                                  DivergenceError::npos, j, DivergenceError::npos);
    }
    return x;
}

// ----------------------------------------------------------------- Langevin

SourceState langevin_posterior(const MixtureLikelihood& lik,
                               const SourceState& anchors, SourceState state,
                               double sigma_tau, const LangevinConfig& cfg,
                               std::uint64_t seed, std::size_t outer_step,
                               const OffscreenHook* hook,
                               const LangevinInstrumentation* instr,
                               double guard_norm) {
    cfg.validate();
    state.validate();
    const std::size_t S = state.num_sources();
    const std::size_t K = state.num_speech();
    const std::size_t d = state.dim();
    if (anchors.num_sources() != S || anchors.dim() != d)
        throw std::invalid_argument("langevin: anchor shape mismatch");
    const bool data_on = std::isfinite(cfg.alpha);
    const double a_den = cfg.anchor_denominator(sigma_tau);
    const double d_den = cfg.data_denominator();

    std::vector<double> mixture(d);
    std::vector<std::uint64_t> ct_count(S, 0);

    for (std::size_t j = 0; j < cfg.n_mc; ++j) {
        const double eta = langevin_step_size(cfg, j);
        const double noise_scale = std::sqrt(2.0 * eta);

        for (std::size_t t = 0; t < d; ++t) {
            double acc = state.noise[t];
            for (const auto& sp : state.speech) acc += sp[t];
            mixture[t] = acc;
        }
        std::vector<double> gdata;
        if (data_on) gdata = lik.grad(mixture);

        const bool ct_on = hook != nullptr && hook->active(sigma_tau) && K >= 2;
        std::vector<double> off_mag;
        if (ct_on)
            off_mag =
                compressed_magnitude(state.speech[hook->offscreen_index], hook->stft);

        // Per-source crosstalk gradients are part of the data term; compute
        // before any state moves so all sources see the iteration-j state.
        std::vector<std::vector<double>> extra(S);
        if (ct_on) {
            for (std::size_t s = 0; s < K; ++s) {
                if (s == hook->offscreen_index) continue;
                extra[s] = crosstalk_grad_vs_mag(state.speech[s], off_mag, hook->stft);
                ++ct_count[s];
            }
        }

        if (instr && instr->on_data_grads) {
            std::vector<std::vector<double>> per_source(S);
            for (std::size_t s = 0; s < S; ++s) {
                per_source[s] = data_on ? gdata : std::vector<double>(d, 0.0);
                if (!extra[s].empty())
                    for (std::size_t i = 0; i < d; ++i)
                        per_source[s][i] += hook->g_ctss * extra[s][i];
            }
            instr->on_data_grads(j, per_source);
        }
        if (instr && instr->on_anchor_grads) {
            std::vector<std::vector<double>> per_source(S);
            for (std::size_t s = 0; s < S; ++s) {
                per_source[s].resize(d);
                const auto& v = state.source(s);
                const auto& a = anchors.source(s);
                for (std::size_t i = 0; i < d; ++i)
                    per_source[s][i] = 2.0 * (v[i] - a[i]) / a_den;
            }
            instr->on_anchor_grads(j, per_source);
        }

        std::exception_ptr err;
#pragma omp parallel for schedule(static)
        for (long long si = 0; si < static_cast<long long>(S); ++si) {
            try {
                const std::size_t s = static_cast<std::size_t>(si);
                auto& v = state.source(s);
                const auto& a = anchors.source(s);
                GaussianStream g(
                    substream(seed, StreamTag::langevin, s, outer_step, j));
                double nrm2 = 0.0;
                for (std::size_t i = 0; i < d; ++i) {
                    double grad = 2.0 * (v[i] - a[i]) / a_den;
                    if (data_on) grad += gdata[i] / d_den;
                    if (!extra[s].empty())
                        grad += hook->g_ctss * extra[s][i] / d_den;
                    v[i] += -eta * grad + noise_scale * g.next();
                    nrm2 += v[i] * v[i];
                }
                if (!(std::sqrt(nrm2) <= guard_norm))
                    throw DivergenceError("source norm exceeded divergence guard",
                                          sigma_tau, outer_step, j, s);
            } catch (...) {
#pragma omp critical
                err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);
    }

    if (hook) {
        std::uint64_t total = 0;
        for (auto c : ct_count) total += c;
        hook->crosstalk_evals += total;
    }
    return state;
}

// ----------------------------------------------------------------- full loop

namespace {

RunResult run_engine(std::span<const double> y, const SamplerConfig& cfg,
                     const OffscreenHook* hook) {
    cfg.validate(y.size());
    for (double v : y)
        if (!std::isfinite(v))
            throw std::invalid_argument("sampler: mixture contains non-finite values");

    std::unique_ptr<MixtureLikelihood> lik;
    if (cfg.likelihood == LikelihoodKind::compressed_stft)
        lik = std::make_unique<CompressedStftLikelihood>(y, cfg.stft);
    else
        lik = std::make_unique<TimeDomainLikelihood>(y);

    const std::size_t K = cfg.num_speech();
    const std::size_t S = K + 1;
    const std::size_t d = y.size();
    const auto& lv = cfg.schedule.levels;
    const double guard =
        1e6 * cfg.schedule.sigma_max * std::sqrt(static_cast<double>(d));

    SourceState state;
    state.conditions = cfg.speech_conditions;
    state.speech.assign(K, std::vector<double>(d));
    state.noise.assign(d, 0.0);
    for (std::size_t s = 0; s < S; ++s) {
        GaussianStream g(substream(cfg.rng_seed, StreamTag::init, s));
        for (double& v : state.source(s)) v = cfg.schedule.sigma_max * g.next();
    }

    NfeReport nfe;
    nfe.per_source.assign(S, 0);
    std::vector<TraceRow> trace;

    SourceState anchors = state;
    for (std::size_t t = 0; t < lv.size(); ++t) {
        const double sigma = lv[t];
        state.check_finite(sigma, t);

        std::exception_ptr err;
#pragma omp parallel for schedule(dynamic)
        for (long long si = 0; si < static_cast<long long>(S); ++si) {
            try {
                const std::size_t s = static_cast<std::size_t>(si);
                const ScorePrior& prior =
                    s < K ? *cfg.speech_prior : *cfg.noise_prior;
                std::uint64_t ev = 0;
                anchors.source(s) =
                    solve_prior_ode(prior, state.source(s), sigma, cfg.n_ode,
                                    state.condition(s), cfg.inner_rho, &ev);
                nfe.per_source[s] += ev;
            } catch (...) {
#pragma omp critical
                err = std::current_exception();
            }
        }
        if (err) std::rethrow_exception(err);

        // The chain starts from the anchors themselves.
        state = langevin_posterior(*lik, anchors, anchors, sigma, cfg.langevin,
                                   cfg.rng_seed, t, hook, nullptr, guard);

        if (cfg.collect_trace) {
            std::vector<double> mixture(d, 0.0);
            for (std::size_t s = 0; s < S; ++s) {
                const auto& v = state.source(s);
                for (std::size_t i = 0; i < d; ++i) mixture[i] += v[i];
            }
            trace.push_back({t, sigma, lik->loss(mixture)});
        }

        if (t + 1 < lv.size()) {
            const double next_sigma = lv[t + 1];
            for (std::size_t s = 0; s < S; ++s) {
                GaussianStream g(substream(cfg.rng_seed, StreamTag::renoise, s, t));
                for (double& v : state.source(s)) v += next_sigma * g.next();
            }
        }
    }

    for (std::size_t s = 0; s < K; ++s) nfe.speech_total += nfe.per_source[s];
    nfe.noise_total = nfe.per_source[K];
    return {std::move(state), std::move(nfe), std::move(trace)};
}

}  // namespace

RunResult ssnaps_separate(std::span<const double> y, const SamplerConfig& cfg) {
    return run_engine(y, cfg, nullptr);
}

RunResult ssnaps_offscreen(std::span<const double> y, const SamplerConfig& cfg,
                           const OffscreenConfig& off) {
    off.validate();
    if (cfg.num_speech() < 2)
        throw std::invalid_argument("offscreen: need at least two speech sources");
    if (!cfg.speech_conditions.back().is_null())
        throw std::invalid_argument(
            "offscreen: last speech source must carry the null condition");
    OffscreenHook hook;
    hook.g_ctss = off.g_ctss;
    hook.sigma_os = off.sigma_os;
    hook.offscreen_index = cfg.num_speech() - 1;
    hook.stft = cfg.stft;
    RunResult res = run_engine(y, cfg, &hook);
    res.crosstalk_evals = hook.crosstalk_evals;
    return res;
}

}  // namespace ssnaps
