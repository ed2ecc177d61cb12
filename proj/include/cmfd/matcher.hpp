#pragma once

// Tensor matching along the anchor frequency, spectrogram-slice correlation
// confirmation and clustering of confirmed pairs into tampered segments.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cmfd/audio.hpp"
#include "cmfd/constellation.hpp"
#include "cmfd/error.hpp"
#include "cmfd/spectrogram.hpp"
#include "cmfd/tensors.hpp"

namespace cmfd {

struct MatchConfig {
  int k = 3;               // admit a pair when |T_m ∩ T_n| > k
  double theta = 0.9;      // correlation threshold
  int slice_width = 8;     // D, frames
  int min_cluster_size = 1;
  int offset_tolerance = 2;  // frames
  double extent_threshold = 0.9;  // row correlation needed to grow a segment
  int extent_gap = 3;             // failing rows tolerated in a row while growing
  double extent_level_db = 6.0;   // max row-peak level difference while growing

  void validate() const {
    if (k < 1) throw Error(ErrorCode::parameter, "k must be >= 1");
    if (!(theta > 0.0 && theta < 1.0)) throw Error(ErrorCode::parameter, "theta must lie in (0, 1)");
    if (slice_width < 2 || slice_width % 2 != 0) throw Error(ErrorCode::parameter, "slice_width must be even and >= 2");
    if (min_cluster_size < 1) throw Error(ErrorCode::parameter, "min_cluster_size must be >= 1");
    if (offset_tolerance < 0) throw Error(ErrorCode::parameter, "offset_tolerance must be >= 0");
    if (!(extent_threshold > 0.0 && extent_threshold <= 1.0))
      throw Error(ErrorCode::parameter, "extent_threshold must lie in (0, 1]");
    if (extent_gap < 0) throw Error(ErrorCode::parameter, "extent_gap must be >= 0");
    if (!(extent_level_db > 0.0)) throw Error(ErrorCode::parameter, "extent_level_db must be positive");
  }
};

struct MatchPair {
  int m = 0;
  int n = 0;
  int t_m = 0;
  int t_n = 0;
  int f_anchor = 0;
  int overlap = 0;
  double rho = 0.0;
  int source_m = 0;
  int source_n = 0;

  int offset() const noexcept { return t_n - t_m; }
  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

/// Which tensor pairs are eligible: same-recording pairs at least
/// `min_separation` frames apart, or cross-recording pairs only.
struct MatchScope {
  bool cross_source = false;
  int min_separation = 0;
};

namespace detail {

inline bool pair_order(const MatchPair& a, const MatchPair& b) {
  return std::tie(a.source_m, a.t_m, a.source_n, a.t_n, a.f_anchor) <
         std::tie(b.source_m, b.t_m, b.source_n, b.t_n, b.f_anchor);
}

inline bool eligible(const FeatureTensor& a, const FeatureTensor& b, const MatchScope& scope) {
  if (scope.cross_source) return a.source != b.source;
  return a.source == b.source && std::abs(a.t_anchor - b.t_anchor) >= scope.min_separation;
}

inline MatchPair orient(const FeatureTensor& a, const FeatureTensor& b, int overlap) {
  const bool swap = std::tie(a.source, a.t_anchor) > std::tie(b.source, b.t_anchor);
  const FeatureTensor& lo = swap ? b : a;
  const FeatureTensor& hi = swap ? a : b;
  return {lo.anchor_id, hi.anchor_id, lo.t_anchor, hi.t_anchor, lo.f_anchor, overlap, 0.0, lo.source, hi.source};
}

}  // namespace detail

/// Admits (m, n) when both tensors share the anchor bin and more than k of
/// their (f_sat, dt) members. Members are indexed by full landmark key, so
/// only tensors that actually share a member are ever compared; each frequency
/// bucket is handled without enumerating all of its pairs.
inline std::vector<MatchPair> binwise_match(const std::vector<FeatureTensor>& tensors, const MatchConfig& cfg,
                                            const MatchScope& scope = {}) {
  // (f_anchor, f_sat, dt) -> tensors holding that landmark
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> index;
  for (std::uint32_t i = 0; i < tensors.size(); ++i) {
    const auto& t = tensors[i];
    for (const auto& mem : t.members) {
      const std::uint64_t key = (static_cast<std::uint64_t>(t.f_anchor) << 42) |
                                (static_cast<std::uint64_t>(mem.f_sat) << 21) | static_cast<std::uint64_t>(mem.dt);
      index[key].push_back(i);
    }
  }

  std::unordered_map<std::uint64_t, int> shared;
  for (const auto& [key, holders] : index) {
    for (std::size_t a = 0; a < holders.size(); ++a)
      for (std::size_t b = a + 1; b < holders.size(); ++b) {
        const auto i = std::min(holders[a], holders[b]);
        const auto j = std::max(holders[a], holders[b]);
        if (detail::eligible(tensors[i], tensors[j], scope)) ++shared[(static_cast<std::uint64_t>(i) << 32) | j];
      }
  }

  std::vector<MatchPair> out;
  for (const auto& [key, count] : shared) {
    if (count <= cfg.k) continue;
    out.push_back(detail::orient(tensors[key >> 32], tensors[key & 0xffffffffu], count));
  }
  std::sort(out.begin(), out.end(), detail::pair_order);
  return out;
}

/// Normalised trace inner product of two spectrogram slices centred on the
/// given frames, computed on dB values raised by -floor_db so both slices are
/// non-negative. Slices span [t - D/2, t + D/2), clipped so both have the same
/// extent around their anchors.
inline double correlate(const Spectrogram& spec_a, int t_a, const Spectrogram& spec_b, int t_b, int slice_width) {
  if (spec_a.bins() != spec_b.bins()) throw Error(ErrorCode::parameter, "spectrogram bin counts differ");
  if (t_a < 0 || t_a >= spec_a.frames() || t_b < 0 || t_b >= spec_b.frames())
    throw Error(ErrorCode::parameter, "anchor frame outside the spectrogram");
  const int half = slice_width / 2;
  const int before = std::min({half, t_a, t_b});
  const int after = std::min({half, spec_a.frames() - t_a, spec_b.frames() - t_b});
  const double shift_a = -spec_a.config.floor_db;
  const double shift_b = -spec_b.config.floor_db;

  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (int d = -before; d < after; ++d) {
    const auto ra = spec_a.values.row(t_a + d);
    const auto rb = spec_b.values.row(t_b + d);
    for (std::size_t k = 0; k < ra.size(); ++k) {
      const double x = ra[k] + shift_a;
      const double y = rb[k] + shift_b;
      ab += x * y;
      aa += x * x;
      bb += y * y;
    }
  }
  if (aa <= 0.0 || bb <= 0.0) throw Error(ErrorCode::undefined_correlation, "zero-energy spectrogram slice");
  return ab / std::sqrt(aa * bb);
}

inline double correlate(const Spectrogram& spec, const MatchPair& pair, int slice_width) {
  return correlate(spec, pair.t_m, spec, pair.t_n, slice_width);
}

struct Confirmation {
  std::vector<MatchPair> pairs;  // rho > theta, rho filled in
  int rejected = 0;              // rho <= theta
  int undefined = 0;             // zero-energy slices
};

/// Keeps pairs whose slice correlation exceeds theta. `spec_n` is the
/// spectrogram of the recording holding the n side (the same one for
/// single-recording detection).
inline Confirmation confirm(const std::vector<MatchPair>& pairs, const Spectrogram& spec_m, const Spectrogram& spec_n,
                            const MatchConfig& cfg) {
  Confirmation out;
  for (auto pair : pairs) {
    try {
      pair.rho = correlate(spec_m, pair.t_m, spec_n, pair.t_n, cfg.slice_width);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::undefined_correlation) throw;
      ++out.undefined;
      continue;
    }
    if (pair.rho > cfg.theta) {
      out.pairs.push_back(pair);
    } else {
      ++out.rejected;
    }
  }
  return out;
}

inline Confirmation confirm(const std::vector<MatchPair>& pairs, const Spectrogram& spec, const MatchConfig& cfg) {
  return confirm(pairs, spec, spec, cfg);
}

struct Segment {
  int src_first_frame = 0;
  int src_last_frame = 0;
  int offset_frames = 0;
  double src_start_s = 0.0;
  double src_end_s = 0.0;
  double dst_start_s = 0.0;
  double dst_end_s = 0.0;
  double offset_s = 0.0;
  int pair_count = 0;
  double mean_rho = 0.0;

  int dst_first_frame() const noexcept { return src_first_frame + offset_frames; }
  int dst_last_frame() const noexcept { return src_last_frame + offset_frames; }
};

/// Seconds are frame start times; the end of a segment additionally covers
/// `frame_span_s` (one analysis window once extents are frame-accurate).
inline void update_seconds(Segment& s, double frame_rate, double frame_span_s) {
  s.src_start_s = s.src_first_frame / frame_rate;
  s.src_end_s = s.src_last_frame / frame_rate + frame_span_s;
  s.offset_s = s.offset_frames / frame_rate;
  s.dst_start_s = s.src_start_s + s.offset_s;
  s.dst_end_s = s.src_end_s + s.offset_s;
}

struct Diagnostics {
  int peak_count = 0;
  int landmark_count = 0;
  int surviving_landmarks = 0;
  int tensor_count = 0;
  int candidate_pairs = 0;
  int confirmed_pairs = 0;
  int rejected_pairs = 0;
  int undefined_correlations = 0;
};

struct ForgeryReport {
  bool verdict = false;
  std::vector<Segment> segments;
  std::vector<MatchPair> pairs;
  Diagnostics diagnostics;
  std::vector<std::string> notes;
  std::vector<std::string> sources;  // input labels; segments run from sources.front() to sources.back()
};

/// Greedy offset clustering: repeatedly takes the offset whose
/// +-offset_tolerance window holds the most pairs (smallest offset on ties),
/// emits a segment when that window has at least min_cluster_size pairs, and
/// removes its pairs. Source extents are the anchor frames of the cluster.
inline ForgeryReport localize(const std::vector<MatchPair>& pairs, const MatchConfig& cfg, double frame_rate,
                              double frame_span_s = 0.0) {
  if (!(frame_rate > 0.0)) throw Error(ErrorCode::parameter, "frame rate must be positive");
  ForgeryReport report;
  report.pairs = pairs;

  std::vector<MatchPair> remaining = pairs;
  std::sort(remaining.begin(), remaining.end(),
            [](const MatchPair& a, const MatchPair& b) { return a.offset() < b.offset(); });
  while (!remaining.empty()) {
    std::size_t best_lo = 0, best_hi = 0, lo = 0, hi = 0;
    for (std::size_t c = 0; c < remaining.size(); ++c) {
      const int centre = remaining[c].offset();
      while (remaining[lo].offset() < centre - cfg.offset_tolerance) ++lo;
      while (hi < remaining.size() && remaining[hi].offset() <= centre + cfg.offset_tolerance) ++hi;
      if (hi - lo > best_hi - best_lo) {
        best_lo = lo;
        best_hi = hi;
      }
    }
    const std::size_t count = best_hi - best_lo;
    if (count < static_cast<std::size_t>(cfg.min_cluster_size)) break;

    Segment seg;
    seg.pair_count = static_cast<int>(count);
    seg.offset_frames = remaining[best_lo + (count - 1) / 2].offset();  // lower median
    seg.src_first_frame = remaining[best_lo].t_m;
    seg.src_last_frame = remaining[best_lo].t_m;
    double rho_sum = 0.0;
    for (std::size_t i = best_lo; i < best_hi; ++i) {
      seg.src_first_frame = std::min(seg.src_first_frame, remaining[i].t_m);
      seg.src_last_frame = std::max(seg.src_last_frame, remaining[i].t_m);
      rho_sum += remaining[i].rho;
    }
    seg.mean_rho = rho_sum / static_cast<double>(count);
    update_seconds(seg, frame_rate, frame_span_s);
    report.segments.push_back(seg);
    remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(best_lo),
                    remaining.begin() + static_cast<std::ptrdiff_t>(best_hi));
  }
  std::sort(report.segments.begin(), report.segments.end(),
            [](const Segment& a, const Segment& b) { return a.src_first_frame < b.src_first_frame; });
  report.verdict = !report.segments.empty();
  return report;
}

namespace detail {

// Pearson correlation of two spectrogram rows; 0 when either row is flat.
inline double row_correlation(std::span<const double> a, std::span<const double> b) {
  const auto n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ma += a[k];
    mb += b[k];
  }
  ma /= n;
  mb /= n;
  double ab = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    ab += (a[k] - ma) * (b[k] - mb);
    aa += (a[k] - ma) * (a[k] - ma);
    bb += (b[k] - mb) * (b[k] - mb);
  }
  return aa > 0.0 && bb > 0.0 ? ab / std::sqrt(aa * bb) : 0.0;
}

}  // namespace detail

/// Grows each segment frame by frame while the source row and its offset
/// image stay correlated above `extent_threshold` and their peak levels agree
/// within `extent_level_db`; up to `extent_gap`
/// consecutive failing rows are bridged. Rows that are quiet on
/// both sides (maximum below `quiet_db`) carry no evidence either way: growth
/// passes through them, and the extent ends at the last matching row that
/// carries signal. Within a single recording the source never grows into its
/// own destination.
inline void refine_extents(ForgeryReport& report, const Spectrogram& spec_src, const Spectrogram& spec_dst,
                           const MatchConfig& cfg, bool same_recording, double quiet_db = -80.0) {
  const double frame_rate = spec_src.frame_rate_hz();
  const double span = static_cast<double>(spec_src.config.fft_size) / spec_src.sample_rate_hz;
  auto row_max = [](std::span<const double> r) { return *std::max_element(r.begin(), r.end()); };
  for (auto& seg : report.segments) {
    const int d = seg.offset_frames;
    auto inside = [&](int t) {
      if (t < 0 || t >= spec_src.frames() || t + d < 0 || t + d >= spec_dst.frames()) return false;
      return !same_recording || (d > 0 ? t < seg.src_first_frame + d : t + d > seg.src_last_frame);
    };
    auto grow = [&](int from, int step) {
      int last = from;
      int misses = 0;
      for (int t = from + step; inside(t) && misses <= cfg.extent_gap; t += step) {
        const auto a = spec_src.values.row(t);
        const auto b = spec_dst.values.row(t + d);
        if (row_max(a) < quiet_db && row_max(b) < quiet_db) continue;
        if (detail::row_correlation(a, b) < cfg.extent_threshold ||
            std::abs(row_max(a) - row_max(b)) > cfg.extent_level_db) {
          ++misses;
        } else {
          misses = 0;
          last = t;
        }
      }
      return last;
    };
    seg.src_first_frame = grow(seg.src_first_frame, -1);
    seg.src_last_frame = grow(seg.src_last_frame, +1);
    update_seconds(seg, frame_rate, span);
  }
}

}  // namespace cmfd
