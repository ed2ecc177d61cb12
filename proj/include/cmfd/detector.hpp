#pragma once

// End-to-end copy-move search: pre-emphasis, spectrogram, constellation,
// feature tensors, bin-wise matching, correlation confirmation, localization.

#include <string>
#include <vector>

#include "cmfd/audio.hpp"
#include "cmfd/constellation.hpp"
#include "cmfd/error.hpp"
#include "cmfd/matcher.hpp"
#include "cmfd/spectrogram.hpp"
#include "cmfd/tensors.hpp"

namespace cmfd {

struct DetectorConfig {
  double alpha = kDefaultPreEmphasis;
  StftConfig stft;
  NeighborhoodConfig peaks;
  TargetZoneConfig zone;
  MatchConfig match;

  void validate() const {
    if (!(alpha >= 0.0 && alpha < 1.0)) throw Error(ErrorCode::parameter, "alpha must lie in [0, 1)");
    stft.validate();
    peaks.validate();
    zone.validate();
    match.validate();
  }
};

/// Intermediate products of one recording, kept for dumps and the lab.
struct Analysis {
  Spectrogram spectrogram;
  PeakMap peaks;
  std::vector<LandmarkVector> landmarks;
};

inline Analysis analyze(const AudioBuffer& buf, const DetectorConfig& cfg, int source = 0) {
  Analysis a;
  a.spectrogram = stft(pre_emphasize(buf, cfg.alpha), cfg.stft);
  a.peaks = find_peaks(a.spectrogram, cfg.peaks);
  a.landmarks = pair_landmarks(a.peaks, cfg.zone, source);
  return a;
}

namespace detail {

inline ForgeryReport match_and_localize(const std::vector<LandmarkVector>& landmarks, const Spectrogram& spec_m,
                                        const Spectrogram& spec_n, const DetectorConfig& cfg, const MatchScope& scope,
                                        int peak_count) {
  const KeyCodec codec(cfg.stft.fft_size, cfg.zone.zone_frames);
  const auto survivors = eliminate_singletons(encode_all(landmarks, codec));
  const auto tensors = group_tensors(survivors);
  const auto candidates = binwise_match(tensors, cfg.match, scope);
  const auto confirmed = confirm(candidates, spec_m, spec_n, cfg.match);

  ForgeryReport report = localize(confirmed.pairs, cfg.match, spec_m.frame_rate_hz());
  refine_extents(report, spec_m, spec_n, cfg.match, !scope.cross_source, cfg.peaks.min_db);
  report.diagnostics = {peak_count,
                        static_cast<int>(landmarks.size()),
                        static_cast<int>(survivors.size()),
                        static_cast<int>(tensors.size()),
                        static_cast<int>(candidates.size()),
                        static_cast<int>(confirmed.pairs.size()),
                        confirmed.rejected,
                        confirmed.undefined};
  return report;
}

}  // namespace detail

/// Searches one recording for regions duplicated elsewhere in it.
inline ForgeryReport detect(const AudioBuffer& buf, const DetectorConfig& cfg = {}) {
  cfg.validate();
  const Analysis a = analyze(buf, cfg);
  auto report = detail::match_and_localize(a.landmarks, a.spectrogram, a.spectrogram, cfg,
                                           {false, cfg.zone.zone_frames}, static_cast<int>(a.peaks.peaks.size()));
  report.sources = {buf.source_path};
  return report;
}

/// Searches for material shared between two recordings. Segments run from
/// `a` (source) to `b` (destination); offsets may be negative.
inline ForgeryReport compare(const AudioBuffer& a, const AudioBuffer& b, const DetectorConfig& cfg = {}) {
  cfg.validate();
  if (a.sample_rate_hz != b.sample_rate_hz) throw Error(ErrorCode::parameter, "inputs have different sample rates");
  const Analysis an_a = analyze(a, cfg, 0);
  const Analysis an_b = analyze(b, cfg, 1);
  std::vector<LandmarkVector> pooled = an_a.landmarks;
  pooled.insert(pooled.end(), an_b.landmarks.begin(), an_b.landmarks.end());
  auto report = detail::match_and_localize(pooled, an_a.spectrogram, an_b.spectrogram, cfg, {true, 0},
                                           static_cast<int>(an_a.peaks.peaks.size() + an_b.peaks.peaks.size()));
  report.sources = {a.source_path, b.source_path};
  if (a.samples == b.samples) {
    // every anchor trivially matches itself at zero offset
    report.notes.push_back("identical input");
    report.segments.clear();
    report.pairs.clear();
    report.verdict = false;
  }
  return report;
}

}  // namespace cmfd
