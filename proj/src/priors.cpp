// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/priors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

namespace ssnaps {

namespace {
constexpr double kWeightTol = 1e-9;
constexpr double kOrthoCheckMaxDim = 48;  // dense check is O(d^3)
}  // namespace

// ---------------------------------------------------------------- ScorePrior

void ScorePrior::check_args(std::span<const double> x, double sigma,
                            const Condition& c,
                            std::span<const double> out) const {
    if (x.size() != dim() || out.size() != dim())
        throw std::invalid_argument("prior: dimension mismatch");
    if (!(sigma > 0.0)) throw std::invalid_argument("prior: sigma must be > 0");
    if (!knows(c))
        throw std::invalid_argument("prior: unknown condition token '" + c.token + "'");
}

std::vector<double> ScorePrior::denoise(std::span<const double> x, double sigma,
                                        const Condition& c) const {
    std::vector<double> out(dim());
    denoise(x, sigma, c, out);
    return out;
}

void ScorePrior::score(std::span<const double> x, double sigma,
                       const Condition& c, std::span<double> out) const {
    denoise(x, sigma, c, out);
    const double inv = 1.0 / (sigma * sigma);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (out[i] - x[i]) * inv;
}

std::vector<double> ScorePrior::score(std::span<const double> x, double sigma,
                                      const Condition& c) const {
    std::vector<double> out(dim());
    score(x, sigma, c, out);
    return out;
}

// ------------------------------------------------------ SpectralGaussianPrior

SpectralGaussianPrior::SpectralGaussianPrior(std::vector<double> mean_coeffs,
                                             std::vector<double> variances)
    : mean_(std::move(mean_coeffs)),
      var_(std::move(variances)),
      basis_(mean_.size()) {
    if (mean_.size() != var_.size())
        throw std::invalid_argument("spectral_gaussian: mean/variance size mismatch");
    for (double v : var_)
        if (!(v >= 0.0))
            throw std::invalid_argument("spectral_gaussian: negative variance");
    if (dim() <= kOrthoCheckMaxDim && basis_.orthonormality_defect() > 1e-10)
        throw std::logic_error("spectral_gaussian: basis failed orthonormality check");
}

void SpectralGaussianPrior::do_denoise(std::span<const double> x, double sigma,
                                       const Condition&,
                                       std::span<double> out) const {
    std::vector<double> c = basis_.forward(x);
    const double s2 = sigma * sigma;
    for (std::size_t i = 0; i < c.size(); ++i)
        c[i] = (var_[i] * c[i] + s2 * mean_[i]) / (var_[i] + s2);
    basis_.inverse(c, out);
}

void SpectralGaussianPrior::sample(const Condition& c, GaussianStream& g,
                                   std::span<double> out) const {
    if (!knows(c))
        throw std::invalid_argument("prior: unknown condition token '" + c.token + "'");
    if (out.size() != dim())
        throw std::invalid_argument("prior: dimension mismatch");
    std::vector<double> coeffs(dim());
    for (std::size_t i = 0; i < coeffs.size(); ++i)
        coeffs[i] = mean_[i] + std::sqrt(var_[i]) * g.next();
    basis_.inverse(coeffs, out);
}

// ---------------------------------------------------------- DiagonalGmmPrior

DiagonalGmmPrior::DiagonalGmmPrior(
    std::vector<GmmComponent> components,
    std::map<std::string, std::vector<double>> views, GmmDomain domain)
    : comps_(std::move(components)), views_(std::move(views)), domain_(domain) {
    if (comps_.empty())
        throw std::invalid_argument("diag_gmm: need at least one component");
    dim_ = comps_.front().mean.size();
    if (dim_ == 0) throw std::invalid_argument("diag_gmm: zero-dimensional component");

    double wsum = 0.0;
    base_weights_.reserve(comps_.size());
    for (const auto& c : comps_) {
        if (c.mean.size() != dim_ || c.variance.size() != dim_)
            throw std::invalid_argument("diag_gmm: component size mismatch");
        if (!(c.weight >= 0.0))
            throw std::invalid_argument("diag_gmm: negative component weight");
        for (double v : c.variance)
            if (!(v >= 0.0)) throw std::invalid_argument("diag_gmm: negative variance");
        wsum += c.weight;
        base_weights_.push_back(c.weight);
    }
    if (std::abs(wsum - 1.0) > kWeightTol)
        throw std::invalid_argument("diag_gmm: component weights must sum to 1");

    for (const auto& [token, w] : views_) {
        if (token.empty())
            throw std::invalid_argument("diag_gmm: view token must be non-empty");
        if (w.size() != comps_.size())
            throw std::invalid_argument("diag_gmm: view weight count mismatch");
        double s = 0.0;
        for (double wi : w) {
            if (!(wi >= 0.0))
                throw std::invalid_argument("diag_gmm: negative view weight");
            s += wi;
        }
        if (std::abs(s - 1.0) > kWeightTol)
            throw std::invalid_argument("diag_gmm: view weights must sum to 1");
    }
    if (domain_ == GmmDomain::spectral) basis_.emplace(dim_);
}

const std::vector<double>& DiagonalGmmPrior::weights_for(const Condition& c) const {
    if (c.is_null()) return base_weights_;
    auto it = views_.find(c.token);
    if (it == views_.end())
        throw std::invalid_argument("prior: unknown condition token '" + c.token + "'");
    return it->second;
}

void DiagonalGmmPrior::denoise_coeffs(std::span<const double> u, double sigma,
                                      const std::vector<double>& w,
                                      std::span<double> out) const {
    const double s2 = sigma * sigma;
    const std::size_t n = comps_.size();

    // log responsibilities with max subtraction
    std::vector<double> logr(n, -std::numeric_limits<double>::infinity());
    constexpr double log2pi = 1.8378770664093454836;
    for (std::size_t c = 0; c < n; ++c) {
        if (w[c] == 0.0) continue;
        double acc = std::log(w[c]);
        const auto& comp = comps_[c];
        for (std::size_t i = 0; i < dim_; ++i) {
            const double tv = comp.variance[i] + s2;
            const double d = u[i] - comp.mean[i];
            acc -= 0.5 * (log2pi + std::log(tv) + d * d / tv);
        }
        logr[c] = acc;
    }
    const double m = *std::max_element(logr.begin(), logr.end());
    if (!std::isfinite(m))
        throw std::invalid_argument("diag_gmm: no component has positive weight");
    double z = 0.0;
    std::vector<double> r(n);
    for (std::size_t c = 0; c < n; ++c) {
        r[c] = std::exp(logr[c] - m);
        z += r[c];
    }

    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        if (r[c] == 0.0) continue;
        const double g = r[c] / z;
        const auto& comp = comps_[c];
        for (std::size_t i = 0; i < dim_; ++i) {
            const double tv = comp.variance[i] + s2;
            out[i] += g * (comp.variance[i] * u[i] + s2 * comp.mean[i]) / tv;
        }
    }
}

void DiagonalGmmPrior::do_denoise(std::span<const double> x, double sigma,
                                  const Condition& c,
                                  std::span<double> out) const {
    const std::vector<double>& w = weights_for(c);
    if (domain_ == GmmDomain::signal) {
        denoise_coeffs(x, sigma, w, out);
        return;
    }
    std::vector<double> u = basis_->forward(x);
    std::vector<double> v(dim_);
    denoise_coeffs(u, sigma, w, v);
    basis_->inverse(v, out);
}

void DiagonalGmmPrior::sample(const Condition& c, GaussianStream& g,
                              std::span<double> out) const {
    if (out.size() != dim())
        throw std::invalid_argument("prior: dimension mismatch");
    const std::vector<double>& w = weights_for(c);
    const double u = g.uniform();
    std::size_t pick = w.size() - 1;
    double acc = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        acc += w[i];
        if (u <= acc) {
            pick = i;
            break;
        }
    }
    const auto& comp = comps_[pick];
    std::vector<double> v(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
        v[i] = comp.mean[i] + std::sqrt(comp.variance[i]) * g.next();
    if (domain_ == GmmDomain::signal)
        std::copy(v.begin(), v.end(), out.begin());
    else
        basis_->inverse(v, out);
}

// --------------------------------------------------------------- GuidedPrior

GuidedPrior::GuidedPrior(std::shared_ptr<const ScorePrior> base, double omega,
                         GuidanceForm form)
    : base_(std::move(base)), omega_(omega), form_(form) {
    if (!base_) throw std::invalid_argument("guided: null base prior");
}

void GuidedPrior::denoise(std::span<const double> x, double sigma,
                          const Condition& c, std::span<double> out) const {
    check_args(x, sigma, c, out);
    if (c.is_null()) {
        base_->denoise(x, sigma, c, out);
        return;
    }
    std::vector<double> un(dim());
    base_->denoise(x, sigma, Condition::null(), un);
    base_->denoise(x, sigma, c, out);
    if (form_ == GuidanceForm::interpolate) {
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = un[i] + omega_ * (out[i] - un[i]);
    } else {
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = (1.0 + omega_) * out[i] - omega_ * un[i];
    }
}

void GuidedPrior::do_denoise(std::span<const double> x, double sigma,
                             const Condition& c, std::span<double> out) const {
    denoise(x, sigma, c, out);  // unreachable via the public surface
}

// ----------------------------------------------------------------- documents

namespace {

using nlohmann::json;

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool ok = false;
        for (const char* k : allowed)
            if (it.key() == k) ok = true;
        if (!ok)
            throw std::invalid_argument("prior document: unknown key '" + it.key() +
                                        "' in " + where);
    }
}

std::vector<double> parse_array(const json& v, std::size_t dim, double fill_default,
                                const std::string& where) {
    if (v.is_array()) {
        std::vector<double> out = v.get<std::vector<double>>();
        if (out.size() != dim)
            throw std::invalid_argument("prior document: " + where + " has length " +
                                        std::to_string(out.size()) + ", expected " +
                                        std::to_string(dim));
        return out;
    }
    if (v.is_object()) {
        reject_unknown_keys(v, {"fill", "bands"}, where);
        std::vector<double> out(dim, v.value("fill", fill_default));
        if (v.contains("bands")) {
            for (const auto& b : v.at("bands")) {
                reject_unknown_keys(b, {"from", "to", "value"}, where + ".bands");
                const std::size_t from = b.at("from").get<std::size_t>();
                const std::size_t to = b.at("to").get<std::size_t>();
                if (from >= to || to > dim)
                    throw std::invalid_argument("prior document: bad band range in " +
                                                where);
                const double val = b.at("value").get<double>();
                for (std::size_t i = from; i < to; ++i) out[i] = val;
            }
        }
        return out;
    }
    throw std::invalid_argument("prior document: " + where +
                                " must be an array or a band object");
}

}  // namespace

std::unique_ptr<ScorePrior> load_prior(const json& doc) {
    if (!doc.is_object())
        throw std::invalid_argument("prior document: expected a JSON object");
    const std::string kind = doc.value("kind", "");
    const std::size_t dim = doc.value("dim", std::size_t{0});
    if (dim == 0) throw std::invalid_argument("prior document: missing or zero dim");

    if (kind == "spectral_gaussian") {
        reject_unknown_keys(doc, {"kind", "dim", "mean", "variances"}, "document");
        std::vector<double> mean(dim, 0.0);
        if (doc.contains("mean")) mean = parse_array(doc.at("mean"), dim, 0.0, "mean");
        if (!doc.contains("variances"))
            throw std::invalid_argument("prior document: missing variances");
        auto var = parse_array(doc.at("variances"), dim, 0.0, "variances");
        return std::make_unique<SpectralGaussianPrior>(std::move(mean), std::move(var));
    }
    if (kind == "diag_gmm") {
        reject_unknown_keys(doc, {"kind", "dim", "domain", "components",
                                  "conditional_views"},
                            "document");
        GmmDomain domain = GmmDomain::signal;
        if (doc.contains("domain")) {
            const std::string d = doc.at("domain").get<std::string>();
            if (d == "signal")
                domain = GmmDomain::signal;
            else if (d == "spectral")
                domain = GmmDomain::spectral;
            else
                throw std::invalid_argument("prior document: bad domain '" + d + "'");
        }
        if (!doc.contains("components"))
            throw std::invalid_argument("prior document: missing components");
        std::vector<GmmComponent> comps;
        for (const auto& c : doc.at("components")) {
            reject_unknown_keys(c, {"weight", "mean", "variance"}, "component");
            GmmComponent comp;
            comp.weight = c.at("weight").get<double>();
            comp.mean = c.contains("mean") ? parse_array(c.at("mean"), dim, 0.0, "mean")
                                           : std::vector<double>(dim, 0.0);
            comp.variance = parse_array(c.at("variance"), dim, 0.0, "variance");
            comps.push_back(std::move(comp));
        }
        std::map<std::string, std::vector<double>> views;
        if (doc.contains("conditional_views")) {
            for (auto it = doc.at("conditional_views").begin();
                 it != doc.at("conditional_views").end(); ++it)
                views[it.key()] = it.value().get<std::vector<double>>();
        }
        return std::make_unique<DiagonalGmmPrior>(std::move(comps), std::move(views),
                                                  domain);
    }
    throw std::invalid_argument("prior document: unknown kind '" + kind + "'");
}

std::unique_ptr<ScorePrior> load_prior_file(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open prior file " + path.string());
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("prior document: " + std::string(e.what()));
    }
    return load_prior(doc);
}

nlohmann::json save_prior(const ScorePrior& prior) {
    if (const auto* g = dynamic_cast<const SpectralGaussianPrior*>(&prior)) {
        return json{{"kind", "spectral_gaussian"},
                    {"dim", g->dim()},
                    {"mean", g->mean_coeffs()},
                    {"variances", g->variances()}};
    }
    if (const auto* g = dynamic_cast<const DiagonalGmmPrior*>(&prior)) {
        json comps = json::array();
        for (const auto& c : g->components())
            comps.push_back({{"weight", c.weight},
                             {"mean", c.mean},
                             {"variance", c.variance}});
        json doc{{"kind", "diag_gmm"},
                 {"dim", g->dim()},
                 {"domain", g->domain() == GmmDomain::signal ? "signal" : "spectral"},
                 {"components", comps}};
        if (!g->views().empty()) {
            json views = json::object();
            for (const auto& [tok, w] : g->views()) views[tok] = w;
            doc["conditional_views"] = views;
        }
        return doc;
    }
    throw std::invalid_argument("save_prior: unsupported prior type");
}

}  // namespace ssnaps
