// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

#include "ssnaps/sampler.hpp"

namespace ssnaps {

struct DbRange {
    double lo = 0.0;
    double hi = 0.0;
    void validate() const;
    double draw(GaussianStream& g) const;  // uniform in [lo, hi]
};

struct MixSpec {
    std::size_t k_speakers = 1;
    DbRange sir_db{0.0, 0.0};  // per interferer, relative to speaker 0
    DbRange snr_db{0.0, 0.0};  // vs the lowest-power speaker when K >= 2
    // absolute std of the auxiliary white noise; defaults to 1e-3 of
    // speaker 0's RMS when unset
    std::optional<double> sigma_z;
    std::size_t duration = 64000;
    std::uint64_t seed = 0;

    void validate() const;
};

struct MixResult {
    std::vector<double> y;
    std::vector<std::vector<double>> sources;  // scaled
    std::vector<double> noise;                 // scaled
    std::vector<double> sir_used;              // per interferer, dB
    double snr_used = 0.0;                     // dB
    double sigma_z_used = 0.0;
};

// Speaker 0 keeps unit scale; interferer i is scaled so
// 10*log10(P_0 / P_i) equals its drawn SIR; the noise is scaled so the SNR
// against the reference speaker equals the drawn SNR. The ratios are exact
// on the returned scaled signals. y = sum sources + noise + sigma_z * eps.
MixResult synth_mixture(const std::vector<std::vector<double>>& sources,
                        const std::vector<double>& noise, const MixSpec& spec);

inline constexpr double kSiSdrCapDb = 100.0;

// Scale-invariant SDR in dB, capped at +100.
double si_sdr(std::span<const double> estimate, std::span<const double> reference);

// Energy-ratio helpers (dB); used by tests and reports.
double power_db_ratio(std::span<const double> a, std::span<const double> b);

struct BenchConfig {
    MixSpec mix;
    SamplerConfig sampler;          // template; seed overridden per run
    std::optional<OffscreenConfig> offscreen;
    std::vector<std::uint64_t> seeds;
    unsigned jobs = 0;  // 0 = available parallelism
    // Tokens the clean references are drawn with; defaults to the sampler's
    // run conditions. Lets an off-screen run draw the unconditioned
    // speaker's reference from its own conditional view.
    std::vector<Condition> draw_conditions;
};

struct BenchRow {
    std::uint64_t seed = 0;
    std::vector<double> sdr_mix;  // per speech source, mixture vs reference
    std::vector<double> sdr_est;  // per speech source, estimate vs reference
    double noise_sdr_est = 0.0;
    double improvement_mean = 0.0;  // mean over speech sources
};

struct BenchReport {
    std::vector<BenchRow> rows;  // sorted by seed
    double mean_improvement = 0.0;
    std::vector<double> mean_sdr_est;  // per speech source
    std::vector<double> mean_sdr_mix;

    void write_csv(std::ostream& os) const;
    void write_markdown(std::ostream& os) const;
};

// Per seed: draw clean sources from the priors, synthesize the mixture, run
// the sampler, pair estimates with references (tokens pin conditioned
// sources; the unconditioned one gets its best remaining match), and score
// SI-SDR against the mixture baseline.
BenchReport run_benchmark(const BenchConfig& cfg);

}  // namespace ssnaps
