// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssnaps/mixkit.hpp"
#include "ssnaps/sampler.hpp"

namespace ssnaps {

// One JSON document drives every subcommand. Unknown keys are rejected and
// the schema version is checked; prior paths resolve relative to the
// config file's directory.
struct RunConfig {
    static constexpr int kSchemaVersion = 1;

    nlohmann::json echo;  // the document as loaded, for the manifest

    // sampler
    std::size_t n_anneal = 300;
    std::size_t n_mc = 50;
    std::size_t n_ode = 2;
    double sigma_max = 2.0;
    double sigma_min = 0.01;
    double rho = 10.0;
    double inner_rho = 7.0;
    double eta0 = 1e-6;
    double delta = 0.01;
    double alpha = 5e-4;
    double r_scale = 1.0;
    double omega = 0.8;
    GuidanceForm guidance = GuidanceForm::interpolate;
    AnchorDenom anchor_denom = AnchorDenom::sigma_sq;
    DataDenom data_denom = DataDenom::alpha_sq;
    LikelihoodKind likelihood = LikelihoodKind::compressed_stft;
    StftConfig stft;

    std::filesystem::path speech_prior_path;
    std::filesystem::path noise_prior_path;
    std::vector<std::string> conditions;

    std::optional<OffscreenConfig> offscreen;

    MixSpec mix;
    std::vector<std::string> draw_conditions;  // bench only; defaults to run tokens

    std::uint64_t seed = 0;
    std::size_t bench_seeds = 20;
    std::uint64_t bench_seed0 = 1;
    unsigned jobs = 0;

    static RunConfig load(const std::filesystem::path& path);
    static RunConfig from_json(const nlohmann::json& doc,
                               const std::filesystem::path& base_dir);

    // Builds the sampler config, loading the prior files.
    SamplerConfig make_sampler() const;
    BenchConfig make_bench() const;
};

// Deterministic run manifest: config echo, seed, schema version, per-prior
// evaluation counts and the optional loss trace. Runtime is reported on
// stderr, never here, so identical runs produce identical manifests.
nlohmann::json make_manifest(const RunConfig& cfg, std::uint64_t seed,
                             const NfeReport& nfe,
                             const std::vector<TraceRow>& trace);

}  // namespace ssnaps
