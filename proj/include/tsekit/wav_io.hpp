#pragma once

#include <filesystem>
#include <string>

#include "tsekit/waveform.hpp"

namespace tsekit {

enum class WavCodec { pcm16, float32 };

// Reads a mono RIFF/WAVE file. Accepts PCM-16 and IEEE float-32 payloads,
// rejects anything else with a Kind describing what was wrong. Unknown
// chunks before/after the data chunk are skipped. PCM-16 samples map to
// [-1, 1) via division by 32768; float-32 samples pass through bit-exact.
Waveform read_wav(const std::filesystem::path& path);

// Writes a mono WAV. pcm16 scales by 32768, rounds to nearest and clamps to
// [-32768, 32767]; float32 stores the doubles narrowed to float bit-exactly.
void write_wav(const std::filesystem::path& path, const Waveform& w,
               WavCodec codec = WavCodec::float32);

}  // namespace tsekit
