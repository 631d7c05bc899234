#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fluency/core/types.hpp"

namespace fluency::audio {

/// Decodes a RIFF/WAVE file holding 16-bit PCM mono. Anything else (stereo,
/// float, 8/24-bit, compressed) is rejected with Error(BadAudio) and a detail
/// such as "channels=2" or "bits_per_sample=24".
AudioClip decode_wav(std::span<const std::uint8_t> bytes);
AudioClip decode_wav(const std::string& bytes);

/// Canonical 44-byte-header PCM16 mono WAV.
std::string encode_wav(std::span<const std::int16_t> samples,
                       int sample_rate_hz);

}  // namespace fluency::audio
