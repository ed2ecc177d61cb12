#pragma once

// Spectrogram peak constellation: cells that strictly dominate their
// P x Q neighbourhood.

#include <algorithm>
#include <cstdio>
#include <ostream>
#include <vector>

#include "cmfd/error.hpp"
#include "cmfd/spectrogram.hpp"

namespace cmfd {

struct NeighborhoodConfig {
  int patch_frames = 13;  // P
  int patch_bins = 13;    // Q
  double min_db = -80.0;

  void validate() const {
    if (patch_frames <= 0 || patch_frames % 2 == 0) throw Error(ErrorCode::parameter, "patch_frames must be odd and positive");
    if (patch_bins <= 0 || patch_bins % 2 == 0) throw Error(ErrorCode::parameter, "patch_bins must be odd and positive");
  }
};

struct Peak {
  int frame = 0;
  int bin = 0;
  double level_db = 0.0;

  friend bool operator==(const Peak&, const Peak&) = default;
};

struct PeakMap {
  std::vector<Peak> peaks;  // sorted by (frame, bin)
  int source_frames = 0;
  int source_bins = 0;
};

namespace detail {

// Max over a centred window of half-width `half`, clipped at the ends.
inline void sliding_max(const double* in, std::ptrdiff_t stride, int n, int half, double* out, std::ptrdiff_t out_stride) {
  for (int i = 0; i < n; ++i) {
    const int lo = std::max(0, i - half);
    const int hi = std::min(n - 1, i + half);
    double m = in[lo * stride];
    for (int j = lo + 1; j <= hi; ++j) m = std::max(m, in[j * stride]);
    out[i * out_stride] = m;
  }
}

}  // namespace detail

/// (i, j) is a peak iff Y(i, j) >= min_db and Y(i, j) is strictly greater than
/// every other cell of the P x Q window centred on it (window clipped at the
/// matrix edges). Plateaus therefore produce no peaks.
inline PeakMap find_peaks(const Spectrogram& spec, const NeighborhoodConfig& cfg = {}) {
  cfg.validate();
  const int frames = spec.frames();
  const int bins = spec.bins();
  PeakMap pm{{}, frames, bins};
  if (frames == 0 || bins == 0) return pm;

  const int hp = cfg.patch_frames / 2;
  const int hq = cfg.patch_bins / 2;
  const auto& y = spec.values;

  Matrix along_bins(frames, bins);
  for (int m = 0; m < frames; ++m) detail::sliding_max(y.ptr(m, 0), 1, bins, hq, along_bins.ptr(m, 0), 1);
  Matrix window_max(frames, bins);
  for (int k = 0; k < bins; ++k) detail::sliding_max(along_bins.ptr(0, k), bins, frames, hp, window_max.ptr(0, k), bins);

  for (int m = 0; m < frames; ++m) {
    for (int k = 0; k < bins; ++k) {
      const double v = y(m, k);
      if (v < cfg.min_db || v != window_max(m, k)) continue;
      // v is a window maximum; reject ties.
      bool unique = true;
      for (int i = std::max(0, m - hp); unique && i <= std::min(frames - 1, m + hp); ++i)
        for (int j = std::max(0, k - hq); j <= std::min(bins - 1, k + hq); ++j)
          if ((i != m || j != k) && y(i, j) >= v) {
            unique = false;
            break;
          }
      if (unique) pm.peaks.push_back({m, k, v});
    }
  }
  return pm;
}

/// Peaks per second of analysed audio.
inline double peak_density(const PeakMap& pm, const Spectrogram& spec) {
  const double duration = spec.frames() > 0 && spec.sample_rate_hz > 0 ? spec.duration_s() : 0.0;
  if (!(duration > 0.0)) throw Error(ErrorCode::undefined_density, "zero-duration spectrogram");
  return static_cast<double>(pm.peaks.size()) / duration;
}

inline void write_csv(std::ostream& os, const PeakMap& pm) {
  os << "frame,bin,level_db\n";
  char buf[32];
  for (const auto& p : pm.peaks) {
    std::snprintf(buf, sizeof buf, "%.6g", p.level_db);
    os << p.frame << ',' << p.bin << ',' << buf << '\n';
  }
}

}  // namespace cmfd
