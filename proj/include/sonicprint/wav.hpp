#pragma once

#include <filesystem>

#include "sonicprint/stimulus.hpp"

namespace sonicprint {

// Mono 16-bit little-endian PCM only. Samples are clamped to [-1, 1] and
// quantized with a 32767 scale, so a round trip is exact to half an LSB.
void write_wav(const AudioBuffer& buffer, const std::filesystem::path& path);
AudioBuffer read_wav(const std::filesystem::path& path);

}  // namespace sonicprint
