// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ssnaps/spectral_loss.hpp"
#include "ssnaps/stft.hpp"

namespace ssnaps {

// Data-fit term of the posterior, as a function of the summed sources.
// The gradient with respect to each individual source equals the gradient
// with respect to the sum, so one evaluation serves all of them.
class MixtureLikelihood {
public:
    virtual ~MixtureLikelihood() = default;
    virtual std::size_t length() const = 0;
    virtual double loss(std::span<const double> mixture) const = 0;
    virtual std::vector<double> grad(std::span<const double> mixture) const = 0;
};

// || S(y) - S(mixture) ||^2 on compressed spectrograms; the observed side
// is compressed once at construction.
class CompressedStftLikelihood : public MixtureLikelihood {
public:
    CompressedStftLikelihood(std::span<const double> y, const StftConfig& cfg);
    std::size_t length() const override { return len_; }
    double loss(std::span<const double> mixture) const override;
    std::vector<double> grad(std::span<const double> mixture) const override;

private:
    StftConfig cfg_;
    Spectrogram target_c_;
    std::size_t len_;
};

// || y - mixture ||^2 in the time domain. Used for signals shorter than one
// analysis window and wherever an exactly Gaussian data term is required
// (the closed-form posterior oracles assume it).
class TimeDomainLikelihood : public MixtureLikelihood {
public:
    explicit TimeDomainLikelihood(std::span<const double> y)
        : y_(y.begin(), y.end()) {}
    std::size_t length() const override { return y_.size(); }
    double loss(std::span<const double> mixture) const override;
    std::vector<double> grad(std::span<const double> mixture) const override;

private:
    std::vector<double> y_;
};

}  // namespace ssnaps
