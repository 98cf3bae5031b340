// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <vector>

namespace ssnaps {

class WavError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class WavFormat { pcm16, float32 };

struct WavData {
    std::vector<double> samples;  // pcm16 stored as value/32768
    std::uint32_t sample_rate = 16000;
    WavFormat format = WavFormat::pcm16;
};

// Mono PCM 16-bit or IEEE float 32-bit only; the declared rate is taken
// as-is. 16-bit data round-trips bit-exactly through the double
// representation.
WavData read_wav(const std::filesystem::path& path);
void write_wav(const std::filesystem::path& path, const std::vector<double>& samples,
               std::uint32_t sample_rate, WavFormat format = WavFormat::pcm16);

}  // namespace ssnaps
