// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/mixkit.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace ssnaps {

namespace {

double energy(std::span<const double> x) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return acc;
}

double mean_power(std::span<const double> x) {
    return energy(x) / static_cast<double>(x.size());
}

}  // namespace

void DbRange::validate() const {
    if (!(lo <= hi)) throw std::invalid_argument("range: need lo <= hi");
}

double DbRange::draw(GaussianStream& g) const {
    if (lo == hi) return lo;
    return lo + (hi - lo) * g.uniform();
}

void MixSpec::validate() const {
    if (k_speakers < 1) throw std::invalid_argument("mix: k_speakers must be >= 1");
    if (duration < 1) throw std::invalid_argument("mix: duration must be >= 1");
    sir_db.validate();
    snr_db.validate();
    if (sigma_z && !(*sigma_z >= 0.0))
        throw std::invalid_argument("mix: sigma_z must be >= 0");
}

MixResult synth_mixture(const std::vector<std::vector<double>>& sources,
                        const std::vector<double>& noise, const MixSpec& spec) {
    spec.validate();
    if (sources.size() != spec.k_speakers)
        throw std::invalid_argument("mix: source count != k_speakers");
    if (noise.size() != spec.duration)
        throw std::invalid_argument("mix: noise length != duration");
    for (const auto& s : sources)
        if (s.size() != spec.duration)
            throw std::invalid_argument("mix: source length != duration");
    for (const auto& s : sources)
        if (energy(s) == 0.0) throw std::invalid_argument("mix: zero-energy source");
    if (energy(noise) == 0.0) throw std::invalid_argument("mix: zero-energy noise");

    GaussianStream scale_rng(substream(spec.seed, StreamTag::mix_scale));

    MixResult r;
    r.sources.resize(sources.size());
    r.sources[0] = sources[0];  // speaker 0 keeps unit scale
    const double p0 = mean_power(sources[0]);
    for (std::size_t i = 1; i < sources.size(); ++i) {
        const double sir = spec.sir_db.draw(scale_rng);
        const double pi = mean_power(sources[i]);
        const double a = std::sqrt(p0 / (pi * std::pow(10.0, sir / 10.0)));
        r.sources[i] = sources[i];
        for (double& v : r.sources[i]) v *= a;
        r.sir_used.push_back(sir);
    }

    // SNR reference: the lowest-power scaled speaker for K >= 2
    double pref = p0;
    if (spec.k_speakers >= 2)
        for (const auto& s : r.sources) pref = std::min(pref, mean_power(s));

    const double snr = spec.snr_db.draw(scale_rng);
    const double pn = mean_power(noise);
    const double b = std::sqrt(pref / (pn * std::pow(10.0, snr / 10.0)));
    r.noise = noise;
    for (double& v : r.noise) v *= b;
    r.snr_used = snr;

    r.sigma_z_used =
        spec.sigma_z.value_or(1e-3 * std::sqrt(mean_power(sources[0])));

    r.y.assign(spec.duration, 0.0);
    for (const auto& s : r.sources)
        for (std::size_t t = 0; t < spec.duration; ++t) r.y[t] += s[t];
    for (std::size_t t = 0; t < spec.duration; ++t) r.y[t] += r.noise[t];
    if (r.sigma_z_used > 0.0) {
        GaussianStream z_rng(substream(spec.seed, StreamTag::mix_noise));
        for (std::size_t t = 0; t < spec.duration; ++t)
            r.y[t] += r.sigma_z_used * z_rng.next();
    }
    return r;
}

double si_sdr(std::span<const double> estimate, std::span<const double> reference) {
    if (estimate.size() != reference.size())
        throw std::invalid_argument("si_sdr: length mismatch");
    const double rr = energy(reference);
    if (rr == 0.0) throw std::invalid_argument("si_sdr: zero reference");
    double er = 0.0;
    for (std::size_t t = 0; t < estimate.size(); ++t) er += estimate[t] * reference[t];
    const double a = er / rr;
    const double target_e = a * a * rr;
    double resid_e = 0.0;
    for (std::size_t t = 0; t < estimate.size(); ++t) {
        const double d = estimate[t] - a * reference[t];
        resid_e += d * d;
    }
    if (target_e == 0.0) return -kSiSdrCapDb;
    if (resid_e == 0.0) return kSiSdrCapDb;
    const double db = 10.0 * std::log10(target_e / resid_e);
    return std::clamp(db, -kSiSdrCapDb, kSiSdrCapDb);
}

double power_db_ratio(std::span<const double> a, std::span<const double> b) {
    return 10.0 * std::log10(mean_power(a) / mean_power(b));
}

namespace {

// Best assignment of unconditioned estimate slots to their references by
// total SI-SDR; slot sets are tiny, so enumerate permutations.
void pair_unconditioned(const std::vector<std::size_t>& slots,
                        const std::vector<std::vector<double>>& est,
                        const std::vector<std::vector<double>>& refs,
                        std::vector<std::size_t>& pairing) {
    if (slots.size() <= 1) return;  // identity already optimal
    std::vector<std::size_t> perm = slots;
    std::sort(perm.begin(), perm.end());
    std::vector<std::size_t> best = perm;
    double best_score = -std::numeric_limits<double>::infinity();
    do {
        double score = 0.0;
        for (std::size_t i = 0; i < slots.size(); ++i)
            score += si_sdr(est[slots[i]], refs[perm[i]]);
        if (score > best_score) {
            best_score = score;
            best = perm;
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    for (std::size_t i = 0; i < slots.size(); ++i) pairing[slots[i]] = best[i];
}

}  // namespace

BenchReport run_benchmark(const BenchConfig& cfg) {
    cfg.mix.validate();
    if (cfg.seeds.empty()) throw std::invalid_argument("bench: no seeds");
    const std::size_t K = cfg.sampler.num_speech();
    if (K != cfg.mix.k_speakers)
        throw std::invalid_argument("bench: sampler/mix speaker count mismatch");
    const std::vector<Condition>& draw_conds =
        cfg.draw_conditions.empty() ? cfg.sampler.speech_conditions
                                    : cfg.draw_conditions;
    if (draw_conds.size() != K)
        throw std::invalid_argument("bench: draw condition count mismatch");

    BenchReport report;
    report.rows.resize(cfg.seeds.size());

    const int jobs = cfg.jobs > 0 ? static_cast<int>(cfg.jobs) : 0;
    std::exception_ptr err;
#pragma omp parallel for schedule(dynamic) num_threads(jobs > 0 ? jobs : omp_get_max_threads())
    for (long long i = 0; i < static_cast<long long>(cfg.seeds.size()); ++i) {
        try {
            const std::uint64_t seed = cfg.seeds[static_cast<std::size_t>(i)];
            const std::size_t d = cfg.mix.duration;

            std::vector<std::vector<double>> clean(K, std::vector<double>(d));
            for (std::size_t s = 0; s < K; ++s) {
                GaussianStream g(substream(seed, StreamTag::prior_sample, s));
                cfg.sampler.speech_prior->sample(draw_conds[s], g, clean[s]);
            }
            std::vector<double> noise(d);
            GaussianStream gn(substream(seed, StreamTag::prior_sample, K));
            cfg.sampler.noise_prior->sample(Condition::null(), gn, noise);

            MixSpec spec = cfg.mix;
            spec.seed = seed;
            const MixResult mix = synth_mixture(clean, noise, spec);

            SamplerConfig run_cfg = cfg.sampler;
            run_cfg.rng_seed = seed;
            const RunResult res =
                cfg.offscreen ? ssnaps_offscreen(mix.y, run_cfg, *cfg.offscreen)
                              : ssnaps_separate(mix.y, run_cfg);

            // conditioned slots pair with their own reference; unconditioned
            // ones search the leftover set
            std::vector<std::size_t> pairing(K);
            std::iota(pairing.begin(), pairing.end(), 0);
            std::vector<std::size_t> uncond;
            for (std::size_t s = 0; s < K; ++s)
                if (run_cfg.speech_conditions[s].is_null()) uncond.push_back(s);
            pair_unconditioned(uncond, res.state.speech, mix.sources, pairing);

            BenchRow row;
            row.seed = seed;
            double improvement = 0.0;
            for (std::size_t s = 0; s < K; ++s) {
                const auto& ref = mix.sources[pairing[s]];
                row.sdr_mix.push_back(si_sdr(mix.y, ref));
                row.sdr_est.push_back(si_sdr(res.state.speech[s], ref));
                improvement += row.sdr_est.back() - row.sdr_mix.back();
            }
            row.noise_sdr_est = si_sdr(res.state.noise, mix.noise);
            row.improvement_mean = improvement / static_cast<double>(K);
            report.rows[static_cast<std::size_t>(i)] = std::move(row);
        } catch (...) {
#pragma omp critical
            err = std::current_exception();
        }
    }
    if (err) std::rethrow_exception(err);

    std::sort(report.rows.begin(), report.rows.end(),
              [](const BenchRow& a, const BenchRow& b) { return a.seed < b.seed; });

    report.mean_sdr_est.assign(K, 0.0);
    report.mean_sdr_mix.assign(K, 0.0);
    for (const auto& row : report.rows) {
        report.mean_improvement += row.improvement_mean;
        for (std::size_t s = 0; s < K; ++s) {
            report.mean_sdr_est[s] += row.sdr_est[s];
            report.mean_sdr_mix[s] += row.sdr_mix[s];
        }
    }
    const double n = static_cast<double>(report.rows.size());
    report.mean_improvement /= n;
    for (std::size_t s = 0; s < K; ++s) {
        report.mean_sdr_est[s] /= n;
        report.mean_sdr_mix[s] /= n;
    }
    return report;
}

void BenchReport::write_csv(std::ostream& os) const {
    os << "seed";
    const std::size_t K = rows.empty() ? 0 : rows.front().sdr_est.size();
    for (std::size_t s = 0; s < K; ++s) os << ",sdr_mix_" << s;
    for (std::size_t s = 0; s < K; ++s) os << ",sdr_est_" << s;
    os << ",noise_sdr_est,improvement_mean\n";
    os.precision(10);
    for (const auto& r : rows) {
        os << r.seed;
        for (double v : r.sdr_mix) os << "," << v;
        for (double v : r.sdr_est) os << "," << v;
        os << "," << r.noise_sdr_est << "," << r.improvement_mean << "\n";
    }
}

void BenchReport::write_markdown(std::ostream& os) const {
    const std::size_t K = rows.empty() ? 0 : rows.front().sdr_est.size();
    os << "| method | #spk | seeds |";
    for (std::size_t s = 0; s < K; ++s) os << " SI-SDR spk" << s << " |";
    os << " mean improvement |\n";
    os << "|---|---|---|";
    for (std::size_t s = 0; s < K; ++s) os << "---|";
    os << "---|\n";
    os.precision(4);
    os << "| mixture | " << K << " | " << rows.size() << " |";
    for (std::size_t s = 0; s < K; ++s) os << " " << mean_sdr_mix[s] << " |";
    os << " - |\n";
    os << "| separated | " << K << " | " << rows.size() << " |";
    for (std::size_t s = 0; s < K; ++s) os << " " << mean_sdr_est[s] << " |";
    os << " " << mean_improvement << " |\n";
}

}  // namespace ssnaps
