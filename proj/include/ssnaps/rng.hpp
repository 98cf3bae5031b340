// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <span>

namespace ssnaps {

// SplitMix64 finalizer; used to derive independent sub-stream seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Sub-stream tags. Every random draw in a run is keyed by
// (master seed, tag, indices...), so draws are reproducible regardless of
// evaluation order or parallelism.
enum class StreamTag : std::uint64_t {
    init = 1,          // (source)            initial state at sigma_max
    renoise = 2,       // (source, step)      perturbation between anneal levels
    langevin = 3,      // (source, step, j)   Langevin noise
    mix_scale = 4,     // ()                  SIR/SNR draws in mixture synthesis
    mix_noise = 5,     // ()                  auxiliary white noise in synthesis
    prior_sample = 6,  // (source)            clean-source draws in the benchmark
};

inline std::uint64_t substream(std::uint64_t seed, StreamTag tag,
                               std::uint64_t a = 0, std::uint64_t b = 0,
                               std::uint64_t c = 0) {
    std::uint64_t s = splitmix64(seed ^ (static_cast<std::uint64_t>(tag) << 56));
    s = splitmix64(s ^ a);
    s = splitmix64(s ^ b);
    s = splitmix64(s ^ c);
    return s;
}

// Standard-normal stream over mt19937_64 with an explicit Box-Muller
// transform, so the draw sequence is pinned by this code alone.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t stream_seed) : gen_(stream_seed) {}

    double uniform() {  // in (0, 1]
        return 1.0 - static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double th = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(th);
        have_spare_ = true;
        return r * std::cos(th);
    }

    void fill(std::span<double> out) {
        for (double& v : out) v = next();
    }

private:
    std::mt19937_64 gen_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace ssnaps
