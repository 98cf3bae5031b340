// SPDX-License-Identifier: Apache-2.0
#include "ssnaps/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace ssnaps {

namespace {

struct Reader {
    std::ifstream is;
    explicit Reader(const std::filesystem::path& p)
        : is(p, std::ios::binary) {
        if (!is) throw WavError("cannot open " + p.string());
    }
    void bytes(void* dst, std::size_t n) {
        is.read(reinterpret_cast<char*>(dst), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(is.gcount()) != n)
            throw WavError("malformed wav: truncated file");
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        bytes(b, 4);
        return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
               (static_cast<std::uint32_t>(b[2]) << 16) |
               (static_cast<std::uint32_t>(b[3]) << 24);
    }
    std::uint16_t u16() {
        std::uint8_t b[2];
        bytes(b, 2);
        return static_cast<std::uint16_t>(b[0] | (b[1] << 8));
    }
    void tag(char out[4]) { bytes(out, 4); }
    void skip(std::uint32_t n) {
        is.seekg(n, std::ios::cur);
        if (!is) throw WavError("malformed wav: truncated chunk");
    }
};

void put_u32(std::ofstream& os, std::uint32_t v) {
    const std::uint8_t b[4] = {static_cast<std::uint8_t>(v & 0xff),
                               static_cast<std::uint8_t>((v >> 8) & 0xff),
                               static_cast<std::uint8_t>((v >> 16) & 0xff),
                               static_cast<std::uint8_t>((v >> 24) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 4);
}

void put_u16(std::ofstream& os, std::uint16_t v) {
    const std::uint8_t b[2] = {static_cast<std::uint8_t>(v & 0xff),
                               static_cast<std::uint8_t>((v >> 8) & 0xff)};
    os.write(reinterpret_cast<const char*>(b), 2);
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
    Reader r(path);
    char tag[4];
    r.tag(tag);
    if (std::memcmp(tag, "RIFF", 4) != 0) throw WavError("malformed wav: no RIFF tag");
    r.u32();  // riff size, unchecked
    r.tag(tag);
    if (std::memcmp(tag, "WAVE", 4) != 0) throw WavError("malformed wav: no WAVE tag");

    bool have_fmt = false;
    std::uint16_t codec = 0, channels = 0, bits = 0;
    std::uint32_t rate = 0;

    while (true) {
        r.tag(tag);
        const std::uint32_t size = r.u32();
        if (std::memcmp(tag, "fmt ", 4) == 0) {
            if (size < 16) throw WavError("malformed wav: short fmt chunk");
            codec = r.u16();
            channels = r.u16();
            rate = r.u32();
            r.u32();  // byte rate
            r.u16();  // block align
            bits = r.u16();
            if (size > 16) r.skip(size - 16);
            have_fmt = true;
            continue;
        }
        if (std::memcmp(tag, "data", 4) == 0) {
            if (!have_fmt) throw WavError("malformed wav: data before fmt");
            if (channels != 1) throw WavError("unsupported wav: not mono");
            WavData out;
            out.sample_rate = rate;
            if (codec == 1 && bits == 16) {
                out.format = WavFormat::pcm16;
                const std::size_t n = size / 2;
                out.samples.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const std::uint16_t raw = r.u16();
                    const std::int16_t s = static_cast<std::int16_t>(raw);
                    out.samples[i] = static_cast<double>(s) / 32768.0;
                }
            } else if (codec == 3 && bits == 32) {
                out.format = WavFormat::float32;
                const std::size_t n = size / 4;
                out.samples.resize(n);
                for (std::size_t i = 0; i < n; ++i) {
                    const std::uint32_t raw = r.u32();
                    float f;
                    std::memcpy(&f, &raw, 4);
                    out.samples[i] = static_cast<double>(f);
                }
            } else {
                throw WavError("unsupported wav codec (want PCM16 or float32 mono)");
            }
            return out;
        }
        r.skip(size + (size % 2));  // chunks are word-aligned
    }
}

void write_wav(const std::filesystem::path& path, const std::vector<double>& samples,
               std::uint32_t sample_rate, WavFormat format) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw WavError("cannot open " + path.string() + " for writing");

    const std::uint16_t bits = format == WavFormat::pcm16 ? 16 : 32;
    const std::uint32_t data_size =
        static_cast<std::uint32_t>(samples.size()) * (bits / 8);

    os.write("RIFF", 4);
    put_u32(os, 36 + data_size);
    os.write("WAVE", 4);
    os.write("fmt ", 4);
    put_u32(os, 16);
    put_u16(os, format == WavFormat::pcm16 ? 1 : 3);
    put_u16(os, 1);  // mono
    put_u32(os, sample_rate);
    put_u32(os, sample_rate * (bits / 8));
    put_u16(os, bits / 8);
    put_u16(os, bits);
    os.write("data", 4);
    put_u32(os, data_size);

    if (format == WavFormat::pcm16) {
        for (double v : samples) {
            const double scaled = std::round(v * 32768.0);
            const std::int16_t s = static_cast<std::int16_t>(
                std::clamp(scaled, -32768.0, 32767.0));
            put_u16(os, static_cast<std::uint16_t>(s));
        }
    } else {
        for (double v : samples) {
            const float f = static_cast<float>(v);
            std::uint32_t raw;
            std::memcpy(&raw, &f, 4);
            put_u32(os, raw);
        }
    }
    if (!os) throw WavError("write failed: " + path.string());
}

}  // namespace ssnaps
