// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/run_config.hpp"

#include <fstream>
#include <stdexcept>

namespace ssnaps {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                    const std::string& where) {
    if (!obj.is_object())
        throw std::invalid_argument("config: " + where + " must be an object");
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + it.key() + "' in " +
                                        where);
    }
}

DbRange parse_range(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), v.get<double>()};
    if (v.is_array() && v.size() == 2)
        return {v[0].get<double>(), v[1].get<double>()};
    throw std::invalid_argument("config: " + where +
                                " must be a number or [lo, hi]");
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::invalid_argument("config: cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config: " + std::string(e.what()));
    }
    return from_json(doc, path.parent_path());
}

RunConfig RunConfig::from_json(const json& doc,
                               const std::filesystem::path& base_dir) {
    reject_unknown(doc,
                   {"schema_version", "sampler", "speech_prior", "noise_prior",
                    "conditions", "offscreen", "mix", "bench", "seed"},
                   "document");
    RunConfig cfg;
    cfg.echo = doc;

    if (!doc.contains("schema_version"))
        throw std::invalid_argument("config: missing schema_version");
    if (doc.at("schema_version").get<int>() != kSchemaVersion)
        throw std::invalid_argument("config: unsupported schema_version (want " +
                                    std::to_string(kSchemaVersion) + ")");

    if (doc.contains("sampler")) {
        const json& s = doc.at("sampler");
        reject_unknown(s,
                       {"n_anneal", "n_mc", "n_ode", "sigma_max", "sigma_min", "rho",
                        "inner_rho", "eta0", "delta", "alpha", "r_scale", "omega",
                        "guidance", "anchor_denom", "data_denom", "likelihood",
                        "stft"},
                       "sampler");
        cfg.n_anneal = s.value("n_anneal", cfg.n_anneal);
        cfg.n_mc = s.value("n_mc", cfg.n_mc);
        cfg.n_ode = s.value("n_ode", cfg.n_ode);
        cfg.sigma_max = s.value("sigma_max", cfg.sigma_max);
        cfg.sigma_min = s.value("sigma_min", cfg.sigma_min);
        cfg.rho = s.value("rho", cfg.rho);
        cfg.inner_rho = s.value("inner_rho", cfg.inner_rho);
        cfg.eta0 = s.value("eta0", cfg.eta0);
        cfg.delta = s.value("delta", cfg.delta);
        cfg.alpha = s.value("alpha", cfg.alpha);
        cfg.r_scale = s.value("r_scale", cfg.r_scale);
        cfg.omega = s.value("omega", cfg.omega);
        if (s.contains("guidance")) {
            const std::string g = s.at("guidance").get<std::string>();
            if (g == "interpolate")
                cfg.guidance = GuidanceForm::interpolate;
            else if (g == "overshoot")
                cfg.guidance = GuidanceForm::overshoot;
            else
                throw std::invalid_argument("config: bad guidance '" + g + "'");
        }
        if (s.contains("anchor_denom")) {
            const std::string a = s.at("anchor_denom").get<std::string>();
            if (a == "sigma_sq")
                cfg.anchor_denom = AnchorDenom::sigma_sq;
            else if (a == "two_r_sq")
                cfg.anchor_denom = AnchorDenom::two_r_sq;
            else
                throw std::invalid_argument("config: bad anchor_denom '" + a + "'");
        }
        if (s.contains("data_denom")) {
            const std::string a = s.at("data_denom").get<std::string>();
            if (a == "alpha_sq")
                cfg.data_denom = DataDenom::alpha_sq;
            else if (a == "two_alpha_sq")
                cfg.data_denom = DataDenom::two_alpha_sq;
            else
                throw std::invalid_argument("config: bad data_denom '" + a + "'");
        }
        if (s.contains("likelihood")) {
            const std::string l = s.at("likelihood").get<std::string>();
            if (l == "compressed_stft")
                cfg.likelihood = LikelihoodKind::compressed_stft;
            else if (l == "time_domain")
                cfg.likelihood = LikelihoodKind::time_domain;
            else
                throw std::invalid_argument("config: bad likelihood '" + l + "'");
        }
        if (s.contains("stft")) {
            const json& f = s.at("stft");
            reject_unknown(f, {"window", "hop", "fft"}, "stft");
            cfg.stft.window_len = f.value("window", cfg.stft.window_len);
            cfg.stft.hop = f.value("hop", cfg.stft.hop);
            cfg.stft.fft_size = f.value("fft", cfg.stft.fft_size);
        }
    }

    if (doc.contains("speech_prior"))
        cfg.speech_prior_path =
            base_dir / doc.at("speech_prior").get<std::string>();
    if (doc.contains("noise_prior"))
        cfg.noise_prior_path = base_dir / doc.at("noise_prior").get<std::string>();
    if (doc.contains("conditions"))
        cfg.conditions = doc.at("conditions").get<std::vector<std::string>>();

    if (doc.contains("offscreen")) {
        const json& o = doc.at("offscreen");
        reject_unknown(o, {"g_ctss", "sigma_os"}, "offscreen");
        OffscreenConfig off;
        off.g_ctss = o.value("g_ctss", off.g_ctss);
        off.sigma_os = o.value("sigma_os", off.sigma_os);
        cfg.offscreen = off;
    }

    if (doc.contains("mix")) {
        const json& m = doc.at("mix");
        reject_unknown(m,
                       {"k_speakers", "sir_db", "snr_db", "sigma_z", "duration",
                        "draw_conditions"},
                       "mix");
        cfg.mix.k_speakers = m.value("k_speakers", cfg.mix.k_speakers);
        if (m.contains("sir_db")) cfg.mix.sir_db = parse_range(m.at("sir_db"), "sir_db");
        if (m.contains("snr_db")) cfg.mix.snr_db = parse_range(m.at("snr_db"), "snr_db");
        if (m.contains("sigma_z") && !m.at("sigma_z").is_null())
            cfg.mix.sigma_z = m.at("sigma_z").get<double>();
        cfg.mix.duration = m.value("duration", cfg.mix.duration);
        if (m.contains("draw_conditions"))
            cfg.draw_conditions =
                m.at("draw_conditions").get<std::vector<std::string>>();
    }

    if (doc.contains("bench")) {
        const json& b = doc.at("bench");
        reject_unknown(b, {"seeds", "seed0", "jobs"}, "bench");
        cfg.bench_seeds = b.value("seeds", cfg.bench_seeds);
        cfg.bench_seed0 = b.value("seed0", cfg.bench_seed0);
        cfg.jobs = b.value("jobs", cfg.jobs);
    }

    cfg.seed = doc.value("seed", cfg.seed);
    return cfg;
}

SamplerConfig RunConfig::make_sampler() const {
    SamplerConfig s;
    s.schedule = karras_schedule(sigma_max, sigma_min, n_anneal, rho);
    s.langevin.eta0 = eta0;
    s.langevin.delta = delta;
    s.langevin.n_mc = n_mc;
    s.langevin.alpha = alpha;
    s.langevin.r_scale = r_scale;
    s.langevin.anchor_denom = anchor_denom;
    s.langevin.data_denom = data_denom;
    s.n_ode = n_ode;
    s.inner_rho = inner_rho;
    s.likelihood = likelihood;
    s.stft = stft;
    s.rng_seed = seed;

    if (noise_prior_path.empty())
        throw std::invalid_argument("config: noise_prior is required");
    s.noise_prior = load_prior_file(noise_prior_path);
    if (!conditions.empty()) {
        if (speech_prior_path.empty())
            throw std::invalid_argument("config: speech_prior is required");
        std::shared_ptr<const ScorePrior> base = load_prior_file(speech_prior_path);
        s.speech_prior = std::make_shared<GuidedPrior>(base, omega, guidance);
        for (const auto& c : conditions)
            s.speech_conditions.push_back(
                c.empty() ? Condition::null() : Condition::label(c));
    }
    return s;
}

BenchConfig RunConfig::make_bench() const {
    BenchConfig b;
    b.mix = mix;
    b.sampler = make_sampler();
    b.offscreen = offscreen;
    b.jobs = jobs;
    for (std::size_t i = 0; i < bench_seeds; ++i)
        b.seeds.push_back(bench_seed0 + i);
    for (const auto& c : draw_conditions)
        b.draw_conditions.push_back(c.empty() ? Condition::null()
                                              : Condition::label(c));
    return b;
}

nlohmann::json make_manifest(const RunConfig& cfg, std::uint64_t seed,
                             const NfeReport& nfe,
                             const std::vector<TraceRow>& trace) {
    nlohmann::json m;
    m["schema_version"] = RunConfig::kSchemaVersion;
    m["seed"] = seed;
    m["config"] = cfg.echo;
    m["nfe"] = {{"speech_total", nfe.speech_total},
                {"noise_total", nfe.noise_total},
                {"per_source", nfe.per_source}};
    if (!trace.empty()) {
        nlohmann::json t = nlohmann::json::array();
        for (const auto& row : trace)
            t.push_back({{"step", row.step}, {"sigma", row.sigma}, {"rec", row.rec}});
        m["trace"] = t;
    }
    return m;
}

}  // namespace ssnaps
