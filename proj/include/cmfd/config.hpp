#pragma once

// Flat key = value run configuration covering every stage parameter, with
// file loading, per-key overrides, whole-config validation and a printer
// that lists every key with its current value.

#include <charconv>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "cmfd/audio.hpp"
#include "cmfd/detector.hpp"
#include "cmfd/error.hpp"
#include "cmfd/forgery_lab.hpp"

namespace cmfd {

struct Config {
  int sample_rate = kDefaultSampleRate;
  DetectorConfig detector;
  std::optional<int> zone_bins;  // unset: fft_size / 2, i.e. the whole band
  std::uint64_t seed = 1;
  double crossfade_ms = 5.0;
  AttackKind attack = AttackKind::white_noise;
  double snr_db = 20.0;
  double resample_ratio = 0.9;
  double cutoff_hz = 3400.0;
  int jitter_max_samples = 4;
  std::string interference;  // WAV for speech/music mixes

  /// Detector settings with derived defaults resolved.
  DetectorConfig resolved_detector() const {
    DetectorConfig d = detector;
    d.zone.zone_bins = zone_bins ? *zone_bins : d.stft.fft_size / 2;
    return d;
  }

  AttackSpec attack_spec() const {
    AttackSpec a;
    a.kind = attack;
    a.snr_db = snr_db;
    a.resample_ratio = resample_ratio;
    a.cutoff_hz = cutoff_hz;
    a.jitter_max_samples = jitter_max_samples;
    return a;
  }

  void set(std::string_view key, std::string_view value);
  std::vector<std::pair<std::string, std::string>> entries() const;
  void validate() const;
  void load_file(const std::string& path);
  void print(std::ostream& os) const {
    for (const auto& [k, v] : entries()) os << k << " = " << v << '\n';
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
  T v{};
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc{} || ptr != end || text.empty())
    throw Error(ErrorCode::parameter, std::string(key) + ": cannot parse '" + std::string(text) + "'");
  return v;
}

template <typename T>
std::string format_number(T v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

inline void require(bool ok, const char* key, const std::string& what) {
  if (!ok) throw Error(ErrorCode::parameter, std::string(key) + ": " + what);
}

}  // namespace detail

inline std::vector<std::pair<std::string, std::string>> Config::entries() const {
  using detail::format_number;
  const DetectorConfig d = resolved_detector();
  return {
      {"sample_rate", format_number(sample_rate)},
      {"alpha", format_number(d.alpha)},
      {"fft_size", format_number(d.stft.fft_size)},
      {"hop", format_number(d.stft.hop)},
      {"window", to_string(d.stft.window)},
      {"floor_db", format_number(d.stft.floor_db)},
      {"patch_frames", format_number(d.peaks.patch_frames)},
      {"patch_bins", format_number(d.peaks.patch_bins)},
      {"min_db", format_number(d.peaks.min_db)},
      {"zone_frames", format_number(d.zone.zone_frames)},
      {"zone_bins", format_number(d.zone.zone_bins)},
      {"fan_out", format_number(d.zone.fan_out)},
      {"k", format_number(d.match.k)},
      {"theta", format_number(d.match.theta)},
      {"slice_width", format_number(d.match.slice_width)},
      {"min_cluster_size", format_number(d.match.min_cluster_size)},
      {"offset_tolerance", format_number(d.match.offset_tolerance)},
      {"extent_threshold", format_number(d.match.extent_threshold)},
      {"extent_gap", format_number(d.match.extent_gap)},
      {"extent_level_db", format_number(d.match.extent_level_db)},
      {"seed", format_number(seed)},
      {"crossfade_ms", format_number(crossfade_ms)},
      {"attack", to_string(attack)},
      {"snr_db", format_number(snr_db)},
      {"resample_ratio", format_number(resample_ratio)},
      {"cutoff_hz", format_number(cutoff_hz)},
      {"jitter_max_samples", format_number(jitter_max_samples)},
      {"interference", interference},
  };
}

inline void Config::set(std::string_view key, std::string_view value) {
  using detail::parse_number;
  value = detail::trim(value);
  auto& d = detector;
  if (key == "sample_rate") sample_rate = parse_number<int>(key, value);
  else if (key == "alpha") d.alpha = parse_number<double>(key, value);
  else if (key == "fft_size") d.stft.fft_size = parse_number<int>(key, value);
  else if (key == "hop") d.stft.hop = parse_number<int>(key, value);
  else if (key == "window") {
    if (value == "hann") d.stft.window = WindowKind::hann;
    else if (value == "rectangular") d.stft.window = WindowKind::rectangular;
    else throw Error(ErrorCode::parameter, "window: expected hann or rectangular, got '" + std::string(value) + "'");
  }
  else if (key == "floor_db") d.stft.floor_db = parse_number<double>(key, value);
  else if (key == "patch_frames") d.peaks.patch_frames = parse_number<int>(key, value);
  else if (key == "patch_bins") d.peaks.patch_bins = parse_number<int>(key, value);
  else if (key == "min_db") d.peaks.min_db = parse_number<double>(key, value);
  else if (key == "zone_frames") d.zone.zone_frames = parse_number<int>(key, value);
  else if (key == "zone_bins") zone_bins = parse_number<int>(key, value);
  else if (key == "fan_out") d.zone.fan_out = parse_number<int>(key, value);
  else if (key == "k") d.match.k = parse_number<int>(key, value);
  else if (key == "theta") d.match.theta = parse_number<double>(key, value);
  else if (key == "slice_width") d.match.slice_width = parse_number<int>(key, value);
  else if (key == "min_cluster_size") d.match.min_cluster_size = parse_number<int>(key, value);
  else if (key == "offset_tolerance") d.match.offset_tolerance = parse_number<int>(key, value);
  else if (key == "extent_threshold") d.match.extent_threshold = parse_number<double>(key, value);
  else if (key == "extent_gap") d.match.extent_gap = parse_number<int>(key, value);
  else if (key == "extent_level_db") d.match.extent_level_db = parse_number<double>(key, value);
  else if (key == "seed") seed = parse_number<std::uint64_t>(key, value);
  else if (key == "crossfade_ms") crossfade_ms = parse_number<double>(key, value);
  else if (key == "attack") {
    try {
      attack = parse_attack_kind(std::string(value));
    } catch (const Error& e) {
      throw Error(ErrorCode::parameter, "attack: " + e.detail());
    }
  }
  else if (key == "snr_db") snr_db = parse_number<double>(key, value);
  else if (key == "resample_ratio") resample_ratio = parse_number<double>(key, value);
  else if (key == "cutoff_hz") cutoff_hz = parse_number<double>(key, value);
  else if (key == "jitter_max_samples") jitter_max_samples = parse_number<int>(key, value);
  else if (key == "interference") interference = std::string(value);
  else throw Error(ErrorCode::parameter, "unknown config key '" + std::string(key) + "'");
}

inline void Config::validate() const {
  using detail::require;
  const DetectorConfig d = resolved_detector();
  require(sample_rate > 0, "sample_rate", "must be positive");
  require(d.alpha >= 0.0 && d.alpha < 1.0, "alpha", "must lie in [0, 1)");
  require(d.stft.fft_size >= 2 && is_power_of_two(static_cast<std::size_t>(d.stft.fft_size)), "fft_size",
          "must be a power of two >= 2");
  require(d.stft.hop >= 1 && d.stft.hop <= d.stft.fft_size, "hop", "must lie in [1, fft_size]");
  require(d.stft.floor_db < 0.0, "floor_db", "must be negative");
  require(d.peaks.patch_frames > 0 && d.peaks.patch_frames % 2 == 1, "patch_frames", "must be odd and positive");
  require(d.peaks.patch_bins > 0 && d.peaks.patch_bins % 2 == 1, "patch_bins", "must be odd and positive");
  require(d.zone.zone_frames >= 1, "zone_frames", "must be >= 1");
  require(d.zone.zone_bins >= 1, "zone_bins", "must be >= 1");
  require(d.zone.fan_out >= 1, "fan_out", "must be >= 1");
  require(d.match.k >= 1, "k", "must be >= 1");
  require(d.match.k < d.zone.fan_out, "k", "must be smaller than fan_out, otherwise no pair can exceed it");
  require(d.match.theta > 0.0 && d.match.theta < 1.0, "theta", "must lie in (0, 1)");
  require(d.match.slice_width >= 2 && d.match.slice_width % 2 == 0, "slice_width", "must be even and >= 2");
  require(d.match.min_cluster_size >= 1, "min_cluster_size", "must be >= 1");
  require(d.match.offset_tolerance >= 0, "offset_tolerance", "must be >= 0");
  require(d.match.extent_threshold > 0.0 && d.match.extent_threshold <= 1.0, "extent_threshold", "must lie in (0, 1]");
  require(d.match.extent_gap >= 0, "extent_gap", "must be >= 0");
  require(d.match.extent_level_db > 0.0, "extent_level_db", "must be positive");
  require(crossfade_ms >= 0.0, "crossfade_ms", "must be non-negative");
  require(resample_ratio > 0.0, "resample_ratio", "must be positive");
  require(cutoff_hz > 0.0 && cutoff_hz < sample_rate / 2.0, "cutoff_hz", "must lie in (0, sample_rate / 2)");
  require(jitter_max_samples >= 0, "jitter_max_samples", "must be non-negative");
}

/// Reads `key = value` lines; `#` starts a comment.
inline void Config::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::io, "cannot open config file " + path);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    std::string_view v = line;
    if (const auto hash = v.find('#'); hash != std::string_view::npos) v = v.substr(0, hash);
    v = detail::trim(v);
    if (v.empty()) continue;
    const auto eq = v.find('=');
    if (eq == std::string_view::npos)
      throw Error(ErrorCode::parameter, path + ":" + std::to_string(number) + ": expected key = value");
    try {
      set(detail::trim(v.substr(0, eq)), v.substr(eq + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::parameter, path + ":" + std::to_string(number) + ": " + e.detail());
    }
  }
}

}  // namespace cmfd
