#include "sonicprint/wav.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "sonicprint/error.hpp"

namespace sonicprint {

namespace {

constexpr double kScale = 32767.0;

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>((v >> (8 * i)) & 0xff));
}

void put_u16(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_tag(std::vector<unsigned char>& out, const char* tag) { out.insert(out.end(), tag, tag + 4); }

std::uint32_t get_u32(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t get_u16(const unsigned char* p) {
    return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace

void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path) {
    if (buffer.sample_rate <= 0) throw Error("invalid sample rate");
    const auto data_bytes = static_cast<std::uint32_t>(buffer.samples.size() * 2);

    std::vector<unsigned char> out;
    out.reserve(44 + data_bytes);
    put_tag(out, "RIFF");
    put_u32(out, 36 + data_bytes);
    put_tag(out, "WAVE");
    put_tag(out, "fmt ");
    put_u32(out, 16);
    put_u16(out, 1);  // PCM
    put_u16(out, 1);  // mono
    put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate));
    put_u32(out, static_cast<std::uint32_t>(buffer.sample_rate) * 2);
    put_u16(out, 2);
    put_u16(out, 16);
    put_tag(out, "data");
    put_u32(out, data_bytes);
    for (double x : buffer.samples) {
        const double clamped = std::clamp(x, -1.0, 1.0);
        const auto q = static_cast<std::int16_t>(std::lround(clamped * kScale));
        put_u16(out, static_cast<std::uint16_t>(q));
    }

    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "' for writing");
    f.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
    if (!f) throw Error("failed writing '" + path.string() + "'");
}

AudioBuffer read_wav(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open '" + path.string() + "'");
    const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
        throw Error("malformed WAV header in '" + path.string() + "'");

    bool have_fmt = false;
    AudioBuffer out;
    std::size_t pos = 12;
    while (pos + 8 <= bytes.size()) {
        const unsigned char* chunk = bytes.data() + pos;
        const std::uint32_t size = get_u32(chunk + 4);
        const std::size_t body = pos + 8;
        if (body + size > bytes.size()) throw Error("truncated chunk in '" + path.string() + "'");

        if (std::memcmp(chunk, "fmt ", 4) == 0) {
            if (size < 16) throw Error("malformed fmt chunk");
            const std::uint16_t format = get_u16(bytes.data() + body);
            const std::uint16_t channels = get_u16(bytes.data() + body + 2);
            const std::uint32_t rate = get_u32(bytes.data() + body + 4);
            const std::uint16_t bits = get_u16(bytes.data() + body + 14);
            if (format != 1) throw Error("unsupported WAV encoding (PCM required)");
            if (channels != 1) throw Error("unsupported channel count " + std::to_string(channels) + " (mono required)");
            if (bits != 16) throw Error("unsupported bit depth " + std::to_string(bits) + " (16-bit required)");
            if (rate == 0) throw Error("zero sample rate");
            out.sample_rate = static_cast<int>(rate);
            have_fmt = true;
        } else if (std::memcmp(chunk, "data", 4) == 0) {
            if (!have_fmt) throw Error("data chunk precedes fmt chunk");
            const std::size_t n = size / 2;
            out.samples.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                const auto q = static_cast<std::int16_t>(get_u16(bytes.data() + body + 2 * i));
                out.samples[i] = std::max(-1.0, static_cast<double>(q) / kScale);
            }
            return out;
        }
        pos = body + size + (size & 1);
    }
    throw Error("no data chunk in '" + path.string() + "'");
}

}  // namespace sonicprint
