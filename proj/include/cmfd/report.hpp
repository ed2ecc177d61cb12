#pragma once

// JSON and plain-text rendering of a ForgeryReport. Field order and number
// formatting are fixed so equal reports serialize to equal bytes.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "cmfd/detector.hpp"
#include "cmfd/matcher.hpp"

namespace cmfd {

namespace detail {

inline double round_to(double x, int decimals) {
  const double s = std::pow(10.0, decimals);
  const double r = std::round(x * s) / s;
  return r == 0.0 ? 0.0 : r;  // no "-0.0"
}

}  // namespace detail

inline nlohmann::ordered_json params_json(const DetectorConfig& c, int sample_rate_hz) {
  nlohmann::ordered_json j;
  j["sample_rate"] = sample_rate_hz;
  j["alpha"] = c.alpha;
  j["fft_size"] = c.stft.fft_size;
  j["hop"] = c.stft.hop;
  j["window"] = to_string(c.stft.window);
  j["floor_db"] = c.stft.floor_db;
  j["patch_frames"] = c.peaks.patch_frames;
  j["patch_bins"] = c.peaks.patch_bins;
  j["min_db"] = c.peaks.min_db;
  j["zone_frames"] = c.zone.zone_frames;
  j["zone_bins"] = c.zone.zone_bins;
  j["fan_out"] = c.zone.fan_out;
  j["k"] = c.match.k;
  j["theta"] = c.match.theta;
  j["slice_width"] = c.match.slice_width;
  j["min_cluster_size"] = c.match.min_cluster_size;
  j["offset_tolerance"] = c.match.offset_tolerance;
  j["extent_threshold"] = c.match.extent_threshold;
  j["extent_gap"] = c.match.extent_gap;
  j["extent_level_db"] = c.match.extent_level_db;
  return j;
}

inline nlohmann::ordered_json to_json(const ForgeryReport& r, const DetectorConfig& cfg, int sample_rate_hz) {
  using detail::round_to;
  nlohmann::ordered_json j;
  j["verdict"] = r.verdict;
  auto& segs = j["segments"] = nlohmann::ordered_json::array();
  for (const auto& s : r.segments) {
    nlohmann::ordered_json o;
    o["src_start_s"] = round_to(s.src_start_s, 4);
    o["src_end_s"] = round_to(s.src_end_s, 4);
    o["dst_start_s"] = round_to(s.dst_start_s, 4);
    o["dst_end_s"] = round_to(s.dst_end_s, 4);
    o["offset_s"] = round_to(s.offset_s, 4);
    o["offset_frames"] = s.offset_frames;
    o["pair_count"] = s.pair_count;
    o["mean_rho"] = round_to(s.mean_rho, 6);
    segs.push_back(std::move(o));
  }
  auto& pairs = j["pairs"] = nlohmann::ordered_json::array();
  for (const auto& p : r.pairs) {
    nlohmann::ordered_json o;
    o["m"] = p.m;
    o["n"] = p.n;
    o["t_m"] = p.t_m;
    o["t_n"] = p.t_n;
    o["source_m"] = p.source_m;
    o["source_n"] = p.source_n;
    o["f_anchor"] = p.f_anchor;
    o["overlap"] = p.overlap;
    o["rho"] = round_to(p.rho, 6);
    pairs.push_back(std::move(o));
  }
  j["params"] = params_json(cfg, sample_rate_hz);
  const auto& d = r.diagnostics;
  j["diagnostics"] = {{"peak_count", d.peak_count},
                      {"landmark_count", d.landmark_count},
                      {"surviving_landmarks", d.surviving_landmarks},
                      {"tensor_count", d.tensor_count},
                      {"candidate_pairs", d.candidate_pairs},
                      {"confirmed_pairs", d.confirmed_pairs},
                      {"rejected_pairs", d.rejected_pairs},
                      {"undefined_correlations", d.undefined_correlations}};
  j["notes"] = r.notes;
  j["sources"] = r.sources;
  return j;
}

inline void write_json(std::ostream& os, const ForgeryReport& r, const DetectorConfig& cfg, int sample_rate_hz) {
  os << to_json(r, cfg, sample_rate_hz).dump(2) << '\n';
}

/// Human-readable verdict and segment table.
inline void write_summary(std::ostream& os, const ForgeryReport& r) {
  os << "verdict: " << (r.verdict ? "forgery" : "clean") << '\n';
  for (const auto& n : r.notes) os << "note: " << n << '\n';
  if (r.segments.empty()) return;
  char line[160];
  std::snprintf(line, sizeof line, "%-4s %10s %10s %10s %10s %10s %6s %8s\n", "#", "src_start", "src_end", "dst_start",
                "dst_end", "offset", "pairs", "rho");
  os << line;
  int i = 0;
  for (const auto& s : r.segments) {
    std::snprintf(line, sizeof line, "%-4d %10.4f %10.4f %10.4f %10.4f %10.4f %6d %8.4f\n", i++, s.src_start_s,
                  s.src_end_s, s.dst_start_s, s.dst_end_s, s.offset_s, s.pair_count, s.mean_rho);
    os << line;
  }
}

}  // namespace cmfd
