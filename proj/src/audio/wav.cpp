#include "fluency/audio/wav.hpp"

#include <algorithm>
#include <cstring>

#include "fluency/core/error.hpp"

namespace fluency::audio {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>((v >> 8) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

[[noreturn]] void bad(std::string detail) {
  throw Error(ErrorCode::BadAudio, std::move(detail));
}

}  // namespace

AudioClip decode_wav(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    bad("not a RIFF/WAVE file");
  }
  bool have_fmt = false;
  std::uint16_t channels = 0;
  std::uint16_t bits = 0;
  std::uint32_t rate = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* hdr = bytes.data() + pos;
    std::uint32_t size = read_u32(hdr + 4);
    std::size_t body = pos + 8;
    if (std::memcmp(hdr, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) bad("truncated fmt chunk");
      std::uint16_t format = read_u16(bytes.data() + body);
      channels = read_u16(bytes.data() + body + 2);
      rate = read_u32(bytes.data() + body + 4);
      bits = read_u16(bytes.data() + body + 14);
      if (format == kFormatExtensible && size >= 26) {
        format = read_u16(bytes.data() + body + 24);  // sub-format GUID head
      }
      if (format != kFormatPcm) bad("format=" + std::to_string(format) + " (PCM required)");
      if (channels != 1) bad("channels=" + std::to_string(channels));
      if (bits != 16) bad("bits_per_sample=" + std::to_string(bits));
      if (rate == 0) bad("sample_rate=0");
      have_fmt = true;
    } else if (std::memcmp(hdr, "data", 4) == 0) {
      if (!have_fmt) bad("data chunk before fmt chunk");
      std::size_t avail = std::min<std::size_t>(size, bytes.size() - body);
      AudioClip clip;
      clip.sample_rate_hz = static_cast<int>(rate);
      clip.samples.resize(avail / 2);
      for (std::size_t i = 0; i < clip.samples.size(); ++i) {
        clip.samples[i] =
            static_cast<std::int16_t>(read_u16(bytes.data() + body + 2 * i));
      }
      return clip;
    }
    pos = body + size + (size & 1);
  }
  bad(have_fmt ? "missing data chunk" : "missing fmt chunk");
}

AudioClip decode_wav(const std::string& bytes) {
  return decode_wav(std::span(
      reinterpret_cast<const std::uint8_t*>(bytes.data()), bytes.size()));
}

std::string encode_wav(std::span<const std::int16_t> samples,
                       int sample_rate_hz) {
  const auto data_size = static_cast<std::uint32_t>(samples.size() * 2);
  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put_u32(out, 36 + data_size);
  out += "WAVEfmt ";
  put_u32(out, 16);
  put_u16(out, kFormatPcm);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(sample_rate_hz));
  put_u32(out, static_cast<std::uint32_t>(sample_rate_hz) * 2);
  put_u16(out, 2);
  put_u16(out, 16);
  out += "data";
  put_u32(out, data_size);
  for (auto s : samples) put_u16(out, static_cast<std::uint16_t>(s));
  return out;
}

}  // namespace fluency::audio
