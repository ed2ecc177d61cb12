#pragma once

// Ground-truth copy-move forgeries, post-processing attacks and peak
// survival measurement.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "cmfd/audio.hpp"
#include "cmfd/detector.hpp"
#include "cmfd/error.hpp"

namespace cmfd {

struct ForgerySpec {
  double src_start_s = 0.0;
  double duration_s = 0.0;
  double dst_start_s = 0.0;
  double crossfade_ms = 5.0;
};

/// Exact sample positions of a forgery.
struct GroundTruth {
  std::size_t src_start = 0;
  std::size_t dst_start = 0;
  std::size_t length = 0;
  int sample_rate_hz = 0;

  double offset_s() const { return (static_cast<double>(dst_start) - static_cast<double>(src_start)) / sample_rate_hz; }
  double src_start_s() const { return static_cast<double>(src_start) / sample_rate_hz; }
  double dst_start_s() const { return static_cast<double>(dst_start) / sample_rate_hz; }
  double length_s() const { return static_cast<double>(length) / sample_rate_hz; }
};

struct Forgery {
  AudioBuffer audio;
  GroundTruth truth;
};

/// Overwrites the destination region with a copy of the source region, with a
/// linear crossfade of `crossfade_ms` inside both ends of the destination.
inline Forgery make_forgery(const AudioBuffer& buf, const ForgerySpec& spec) {
  const double rate = buf.sample_rate_hz;
  if (!(spec.duration_s > 0.0) || spec.src_start_s < 0.0 || spec.dst_start_s < 0.0 || spec.crossfade_ms < 0.0)
    throw Error(ErrorCode::spec, "forgery times must be non-negative with positive duration");
  const auto src = static_cast<std::size_t>(std::llround(spec.src_start_s * rate));
  const auto dst = static_cast<std::size_t>(std::llround(spec.dst_start_s * rate));
  const auto len = static_cast<std::size_t>(std::llround(spec.duration_s * rate));
  if (src + len > buf.size() || dst + len > buf.size()) throw Error(ErrorCode::spec, "forgery region exceeds the audio");
  if (src < dst + len && dst < src + len) throw Error(ErrorCode::spec, "source and destination regions overlap");
  const auto fade = std::min(len / 2, static_cast<std::size_t>(std::llround(spec.crossfade_ms * rate / 1000.0)));

  Forgery out{buf, {src, dst, len, buf.sample_rate_hz}};
  auto& y = out.audio.samples;
  for (std::size_t i = 0; i < len; ++i) {
    double w = 1.0;
    if (i < fade) w = (static_cast<double>(i) + 0.5) / static_cast<double>(fade);
    if (len - 1 - i < fade) w = std::min(w, (static_cast<double>(len - 1 - i) + 0.5) / static_cast<double>(fade));
    y[dst + i] = w == 1.0 ? buf.samples[src + i] : (1.0 - w) * buf.samples[dst + i] + w * buf.samples[src + i];
  }
  return out;
}

enum class AttackKind { white_noise, pink_noise, speech_mix, music_mix, resample, lowpass, jitter, crop };

inline const char* to_string(AttackKind k) {
  switch (k) {
    case AttackKind::white_noise: return "white";
    case AttackKind::pink_noise: return "pink";
    case AttackKind::speech_mix: return "speech";
    case AttackKind::music_mix: return "music";
    case AttackKind::resample: return "resample";
    case AttackKind::lowpass: return "lowpass";
    case AttackKind::jitter: return "jitter";
    case AttackKind::crop: return "crop";
  }
  return "unknown";
}

inline AttackKind parse_attack_kind(const std::string& s) {
  for (auto k : {AttackKind::white_noise, AttackKind::pink_noise, AttackKind::speech_mix, AttackKind::music_mix,
                 AttackKind::resample, AttackKind::lowpass, AttackKind::jitter, AttackKind::crop})
    if (s == to_string(k)) return k;
  throw Error(ErrorCode::parameter, "unknown attack kind '" + s + "'");
}

struct AttackSpec {
  AttackKind kind = AttackKind::white_noise;
  double snr_db = 20.0;
  double resample_ratio = 0.9;
  double cutoff_hz = 3400.0;
  int jitter_max_samples = 4;
  double crop_start_s = 0.0;
  double crop_end_s = 0.0;
  const AudioBuffer* interference = nullptr;  // speech/music mixes

  /// The parameter that characterises this attack, for reporting.
  double parameter() const {
    switch (kind) {
      case AttackKind::resample: return resample_ratio;
      case AttackKind::lowpass: return cutoff_hz;
      case AttackKind::jitter: return jitter_max_samples;
      case AttackKind::crop: return crop_end_s - crop_start_s;
      default: return snr_db;
    }
  }
};

inline double mean_power(std::span<const double> x) {
  double p = 0.0;
  for (double v : x) p += v * v;
  return x.empty() ? 0.0 : p / static_cast<double>(x.size());
}

/// 10 log10(P(clean) / P(attacked - clean)) over equal-length buffers.
inline double measure_snr_db(const AudioBuffer& clean, const AudioBuffer& attacked) {
  if (clean.size() != attacked.size()) throw Error(ErrorCode::parameter, "SNR needs equal-length buffers");
  double noise = 0.0;
  for (std::size_t i = 0; i < clean.size(); ++i) noise += (attacked.samples[i] - clean.samples[i]) * (attacked.samples[i] - clean.samples[i]);
  noise /= static_cast<double>(clean.size());
  return 10.0 * std::log10(mean_power(clean.samples) / noise);
}

namespace detail {

inline std::vector<double> pink_noise(std::size_t n, std::mt19937_64& rng) {
  // Voss-McCartney: row r is redrawn every 2^r samples.
  constexpr int rows = 16;
  std::normal_distribution<double> gauss(0.0, 1.0);
  double values[rows];
  double sum = 0.0;
  for (auto& v : values) sum += (v = gauss(rng));
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t counter = i + 1;
    const int r = std::min(rows - 1, std::countr_zero(counter));
    sum -= values[r];
    sum += (values[r] = gauss(rng));
    out[i] = sum + gauss(rng);
  }
  return out;
}

inline AudioBuffer add_scaled(const AudioBuffer& buf, std::vector<double> noise, double snr_db) {
  const double ps = mean_power(buf.samples);
  const double pn = mean_power(noise);
  if (!(pn > 0.0)) throw Error(ErrorCode::input, "interference has zero power");
  const double gain = std::sqrt(ps / (pn * std::pow(10.0, snr_db / 10.0)));
  AudioBuffer out = buf;
  for (std::size_t i = 0; i < out.size(); ++i) out.samples[i] += gain * noise[i];
  return out;
}

inline std::vector<double> lowpass_taps(double cutoff_hz, int rate, int taps = 63) {
  const double fc = cutoff_hz / rate;
  const int mid = taps / 2;
  std::vector<double> h(taps);
  double sum = 0.0;
  for (int i = 0; i < taps; ++i) {
    const int n = i - mid;
    const double sinc = n == 0 ? 2.0 * fc : std::sin(2.0 * std::numbers::pi * fc * n) / (std::numbers::pi * n);
    const double hamming = 0.54 - 0.46 * std::cos(2.0 * std::numbers::pi * i / (taps - 1));
    sum += (h[i] = sinc * hamming);
  }
  for (auto& v : h) v /= sum;
  return h;
}

}  // namespace detail

/// Applies one post-processing attack. Noise attacks are scaled so that the
/// whole-file SNR equals `snr_db`; the lowpass is a centred (zero-delay)
/// 63-tap windowed sinc; jitter drops or duplicates up to
/// `jitter_max_samples` samples in every 1024-sample block.
inline AudioBuffer apply_attack(const AudioBuffer& buf, const AttackSpec& atk, std::uint64_t seed) {
  if (buf.empty()) throw Error(ErrorCode::empty_input, "attack on an empty buffer");
  std::mt19937_64 rng(seed);
  switch (atk.kind) {
    case AttackKind::white_noise: {
      std::normal_distribution<double> gauss(0.0, 1.0);
      std::vector<double> noise(buf.size());
      for (auto& v : noise) v = gauss(rng);
      return detail::add_scaled(buf, std::move(noise), atk.snr_db);
    }
    case AttackKind::pink_noise:
      return detail::add_scaled(buf, detail::pink_noise(buf.size(), rng), atk.snr_db);
    case AttackKind::speech_mix:
    case AttackKind::music_mix: {
      if (atk.interference == nullptr || atk.interference->empty())
        throw Error(ErrorCode::input, std::string(to_string(atk.kind)) + " mix needs an interference recording");
      const auto& src = atk.interference->samples;
      std::vector<double> noise(buf.size());
      for (std::size_t i = 0; i < noise.size(); ++i) noise[i] = src[i % src.size()];
      return detail::add_scaled(buf, std::move(noise), atk.snr_db);
    }
    case AttackKind::resample: {
      if (!(atk.resample_ratio > 0.0)) throw Error(ErrorCode::parameter, "resample ratio must be positive");
      const int rate = buf.sample_rate_hz;
      const int mid = static_cast<int>(std::lround(rate * atk.resample_ratio));
      if (mid <= 0) throw Error(ErrorCode::parameter, "resample ratio too small");
      AudioBuffer out = buf;
      out.samples = resample_linear(resample_linear(buf.samples, rate, mid), mid, rate);
      out.samples.resize(buf.size(), out.samples.empty() ? 0.0 : out.samples.back());
      return out;
    }
    case AttackKind::lowpass: {
      if (!(atk.cutoff_hz > 0.0 && atk.cutoff_hz < buf.sample_rate_hz / 2.0))
        throw Error(ErrorCode::parameter, "cutoff must lie in (0, Nyquist)");
      const auto h = detail::lowpass_taps(atk.cutoff_hz, buf.sample_rate_hz);
      const auto mid = static_cast<std::ptrdiff_t>(h.size() / 2);
      const auto n = static_cast<std::ptrdiff_t>(buf.size());
      AudioBuffer out = buf;
      for (std::ptrdiff_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::ptrdiff_t j = 0; j < static_cast<std::ptrdiff_t>(h.size()); ++j) {
          const std::ptrdiff_t idx = i + j - mid;
          if (idx >= 0 && idx < n) acc += h[j] * buf.samples[idx];
        }
        out.samples[i] = acc;
      }
      return out;
    }
    case AttackKind::jitter: {
      if (atk.jitter_max_samples < 0) throw Error(ErrorCode::parameter, "jitter must be non-negative");
      constexpr std::size_t block = 1024;
      std::uniform_int_distribution<int> amount(-atk.jitter_max_samples, atk.jitter_max_samples);
      AudioBuffer out = buf;
      out.samples.clear();
      out.samples.reserve(buf.size() + buf.size() / block * atk.jitter_max_samples);
      for (std::size_t start = 0; start < buf.size(); start += block) {
        const std::size_t end = std::min(buf.size(), start + block);
        const int r = amount(rng);
        const std::size_t at = start + std::uniform_int_distribution<std::size_t>(0, end - start - 1)(rng);
        for (std::size_t i = start; i < end; ++i) {
          if (r < 0 && i >= at && i < at + static_cast<std::size_t>(-r)) continue;  // dropped
          out.samples.push_back(buf.samples[i]);
          if (r > 0 && i == at)
            for (int d = 0; d < r; ++d) out.samples.push_back(buf.samples[i]);
        }
      }
      if (out.samples.empty()) throw Error(ErrorCode::empty_input, "jitter removed every sample");
      return out;
    }
    case AttackKind::crop: {
      const auto a = static_cast<std::size_t>(std::llround(std::max(0.0, atk.crop_start_s) * buf.sample_rate_hz));
      const auto b = std::min(buf.size(), static_cast<std::size_t>(std::llround(atk.crop_end_s * buf.sample_rate_hz)));
      if (a >= b) throw Error(ErrorCode::parameter, "crop bounds are empty");
      AudioBuffer out = buf;
      out.samples.assign(buf.samples.begin() + static_cast<std::ptrdiff_t>(a),
                         buf.samples.begin() + static_cast<std::ptrdiff_t>(b));
      return out;
    }
  }
  throw Error(ErrorCode::parameter, "unhandled attack");
}

/// Fraction of clean-signal peaks that reappear in the attacked signal within
/// +-1 frame and +-1 bin.
inline double measure_survival(const AudioBuffer& clean, const AudioBuffer& attacked, const DetectorConfig& cfg = {}) {
  const auto ref = analyze(clean, cfg).peaks;
  if (ref.peaks.empty()) throw Error(ErrorCode::undefined_survival, "clean signal has no peaks");
  const auto att = analyze(attacked, cfg).peaks;
  std::unordered_set<std::uint64_t> present;
  present.reserve(att.peaks.size() * 2);
  auto key = [](int frame, int bin) { return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(frame)) << 32) | static_cast<std::uint32_t>(bin); };
  for (const auto& p : att.peaks) present.insert(key(p.frame, p.bin));
  std::size_t hits = 0;
  for (const auto& p : ref.peaks) {
    bool found = false;
    for (int df = -1; df <= 1 && !found; ++df)
      for (int db = -1; db <= 1 && !found; ++db) found = present.count(key(p.frame + df, p.bin + db)) > 0;
    hits += found;
  }
  return static_cast<double>(hits) / static_cast<double>(ref.peaks.size());
}

}  // namespace cmfd
