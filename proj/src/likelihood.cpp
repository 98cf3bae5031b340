// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/likelihood.hpp"

#include <stdexcept>

namespace ssnaps {

CompressedStftLikelihood::CompressedStftLikelihood(std::span<const double> y,
                                                   const StftConfig& cfg)
    : cfg_(cfg), target_c_(compress(stft(y, cfg))), len_(y.size()) {}

double CompressedStftLikelihood::loss(std::span<const double> mixture) const {
    if (mixture.size() != len_)
        throw std::invalid_argument("likelihood: mixture length mismatch");
    return rec_loss_vs_target(target_c_, mixture, cfg_);
}

std::vector<double> CompressedStftLikelihood::grad(
    std::span<const double> mixture) const {
    if (mixture.size() != len_)
        throw std::invalid_argument("likelihood: mixture length mismatch");
    return rec_loss_grad_vs_target(target_c_, mixture, cfg_);
}

double TimeDomainLikelihood::loss(std::span<const double> mixture) const {
    if (mixture.size() != y_.size())
        throw std::invalid_argument("likelihood: mixture length mismatch");
    double acc = 0.0;
    for (std::size_t t = 0; t < y_.size(); ++t) {
        const double d = mixture[t] - y_[t];
        acc += d * d;
    }
    return acc;
}

std::vector<double> TimeDomainLikelihood::grad(
    std::span<const double> mixture) const {
    if (mixture.size() != y_.size())
        throw std::invalid_argument("likelihood: mixture length mismatch");
    std::vector<double> g(y_.size());
    for (std::size_t t = 0; t < y_.size(); ++t) g[t] = 2.0 * (mixture[t] - y_[t]);
    return g;
}

}  // namespace ssnaps
