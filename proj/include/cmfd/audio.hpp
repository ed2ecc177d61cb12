#pragma once

// WAV ingestion, canonical-rate conversion and pre-emphasis.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <span>
#include <string>
#include <vector>

#include "cmfd/error.hpp"

namespace cmfd {

/// Mono sample stream at a fixed rate. Samples are nominally in [-1, 1].
struct AudioBuffer {
  std::vector<double> samples;
  int sample_rate_hz = 0;
  std::string source_path;

  std::size_t size() const noexcept { return samples.size(); }
  bool empty() const noexcept { return samples.empty(); }
  double duration_s() const noexcept {
    return sample_rate_hz > 0 ? static_cast<double>(samples.size()) / sample_rate_hz : 0.0;
  }
};

inline constexpr int kDefaultSampleRate = 16000;
inline constexpr double kDefaultPreEmphasis = 0.97;

namespace detail {

static_assert(std::endian::native == std::endian::little, "RIFF decoding assumes a little-endian host");

inline std::uint16_t read_u16(const std::uint8_t* p) {
  std::uint16_t v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline std::uint32_t read_u32(const std::uint8_t* p) {
  std::uint32_t v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof v);
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  const auto* p = reinterpret_cast<const std::uint8_t*>(&v);
  out.insert(out.end(), p, p + sizeof v);
}

inline void put_tag(std::vector<std::uint8_t>& out, const char (&tag)[5]) {
  out.insert(out.end(), tag, tag + 4);
}

constexpr std::uint16_t kFormatPcm = 0x0001;
constexpr std::uint16_t kFormatFloat = 0x0003;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

}  // namespace detail

/// Linear-interpolation rate conversion. An input of N samples maps to
/// floor((N-1) * to / from) + 1 output samples; output sample i sits at
/// input position i * from / to.
inline std::vector<double> resample_linear(std::span<const double> in, int from_hz, int to_hz) {
  if (from_hz <= 0 || to_hz <= 0) throw Error(ErrorCode::parameter, "sample rates must be positive");
  if (in.empty() || from_hz == to_hz) return {in.begin(), in.end()};
  const auto n = static_cast<std::int64_t>(in.size());
  const std::int64_t out_len = (n - 1) * to_hz / from_hz + 1;
  std::vector<double> out(static_cast<std::size_t>(out_len));
  for (std::int64_t i = 0; i < out_len; ++i) {
    // Exact integer position avoids drift on long files.
    const std::int64_t num = i * from_hz;
    const std::int64_t idx = num / to_hz;
    const double frac = static_cast<double>(num % to_hz) / to_hz;
    if (idx + 1 < n) {
      out[i] = in[idx] + frac * (in[idx + 1] - in[idx]);
    } else {
      out[i] = in[n - 1];
    }
  }
  return out;
}

/// Decodes a RIFF/WAVE file holding 16-bit PCM or 32-bit float samples in one
/// or two channels. Stereo is averaged to mono and the result is brought to
/// `target_rate_hz`.
inline AudioBuffer load_wav(const std::string& path, int target_rate_hz = kDefaultSampleRate) {
  if (target_rate_hz <= 0) throw Error(ErrorCode::parameter, "target rate must be positive");
  std::ifstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::io, "cannot open '" + path + "'");
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>()};

  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw Error(ErrorCode::format, "'" + path + "' is not a RIFF/WAVE file");

  bool have_fmt = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const std::uint8_t* data = nullptr;
  std::size_t data_size = 0;

  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::size_t size = detail::read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t avail = std::min(size, bytes.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (avail < 16) throw Error(ErrorCode::format, "truncated fmt chunk");
      format = detail::read_u16(chunk + 8);
      channels = detail::read_u16(chunk + 10);
      rate = detail::read_u32(chunk + 12);
      bits = detail::read_u16(chunk + 22);
      if (format == detail::kFormatExtensible) {
        if (avail < 26) throw Error(ErrorCode::format, "truncated extensible fmt chunk");
        // First two bytes of the sub-format GUID carry the actual codec tag.
        format = detail::read_u16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = avail;
      break;
    }
    pos = body + size + (size & 1u);
  }

  if (!have_fmt) throw Error(ErrorCode::format, "missing fmt chunk");
  if (data == nullptr) throw Error(ErrorCode::format, "missing data chunk");
  const bool pcm16 = format == detail::kFormatPcm && bits == 16;
  const bool f32 = format == detail::kFormatFloat && bits == 32;
  if (!pcm16 && !f32)
    throw Error(ErrorCode::unsupported_format,
                "codec tag " + std::to_string(format) + " with " + std::to_string(bits) + " bits");
  if (channels < 1 || channels > 2)
    throw Error(ErrorCode::unsupported_format, std::to_string(channels) + " channels");
  if (rate == 0) throw Error(ErrorCode::format, "zero sample rate");

  const std::size_t frame_bytes = static_cast<std::size_t>(channels) * (bits / 8);
  const std::size_t frames = data_size / frame_bytes;
  if (frames == 0) throw Error(ErrorCode::empty_input, "'" + path + "' has no samples");

  std::vector<double> mono(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    double acc = 0.0;
    for (std::size_t c = 0; c < channels; ++c) {
      const std::uint8_t* p = data + i * frame_bytes + c * (bits / 8);
      if (pcm16) {
        acc += static_cast<std::int16_t>(detail::read_u16(p)) / 32768.0;
      } else {
        float v;
        std::memcpy(&v, p, sizeof v);
        acc += v;
      }
    }
    mono[i] = acc / channels;
  }

  AudioBuffer buf;
  buf.samples = resample_linear(mono, static_cast<int>(rate), target_rate_hz);
  buf.sample_rate_hz = target_rate_hz;
  buf.source_path = path;
  return buf;
}

enum class WavEncoding { pcm16, float32 };

/// Writes a mono WAV. PCM16 output is clipped to [-1, 1).
inline void save_wav(const std::string& path, const AudioBuffer& buf, WavEncoding enc = WavEncoding::float32) {
  const std::uint16_t bits = enc == WavEncoding::pcm16 ? 16 : 32;
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(buf.size() * (bits / 8));
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  detail::put_tag(out, "RIFF");
  detail::put_u32(out, 36 + data_bytes);
  detail::put_tag(out, "WAVE");
  detail::put_tag(out, "fmt ");
  detail::put_u32(out, 16);
  detail::put_u16(out, enc == WavEncoding::pcm16 ? detail::kFormatPcm : detail::kFormatFloat);
  detail::put_u16(out, 1);
  detail::put_u32(out, static_cast<std::uint32_t>(buf.sample_rate_hz));
  detail::put_u32(out, static_cast<std::uint32_t>(buf.sample_rate_hz) * (bits / 8));
  detail::put_u16(out, bits / 8);
  detail::put_u16(out, bits);
  detail::put_tag(out, "data");
  detail::put_u32(out, data_bytes);
  for (double s : buf.samples) {
    if (enc == WavEncoding::pcm16) {
      const double scaled = std::round(std::clamp(s, -1.0, 1.0) * 32768.0);
      detail::put_u16(out, static_cast<std::uint16_t>(static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0))));
    } else {
      const float v = static_cast<float>(s);
      std::uint32_t u;
      std::memcpy(&u, &v, sizeof u);
      detail::put_u32(out, u);
    }
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) throw Error(ErrorCode::io, "cannot write '" + path + "'");
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw Error(ErrorCode::io, "short write to '" + path + "'");
}

/// First-order pre-emphasis y(n) = x(n) - alpha * x(n-1), with y(0) = x(0).
inline AudioBuffer pre_emphasize(const AudioBuffer& buf, double alpha = kDefaultPreEmphasis) {
  if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorCode::parameter, "pre-emphasis alpha must lie in [0, 1)");
  if (buf.empty()) throw Error(ErrorCode::empty_input, "pre-emphasis of an empty buffer");
  AudioBuffer out{std::vector<double>(buf.size()), buf.sample_rate_hz, buf.source_path};
  out.samples[0] = buf.samples[0];
  for (std::size_t n = 1; n < buf.size(); ++n) out.samples[n] = buf.samples[n] - alpha * buf.samples[n - 1];
  return out;
}

}  // namespace cmfd
