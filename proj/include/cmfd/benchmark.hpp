#pragma once

// Corpus benchmark: for every WAV in a directory, plant seeded copy-move
// forgeries, apply each attack of a grid, run detection and tabulate verdicts
// against ground truth.

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cmfd/audio.hpp"
#include "cmfd/detector.hpp"
#include "cmfd/error.hpp"
#include "cmfd/forgery_lab.hpp"
#include "cmfd/probability.hpp"

namespace cmfd {

struct BenchmarkGrid {
  DetectorConfig detector;
  int sample_rate_hz = kDefaultSampleRate;
  int forgeries_per_file = 1;
  double duration_s = 0.5;
  double crossfade_ms = 5.0;
  std::vector<std::optional<AttackSpec>> attacks{std::nullopt};  // nullopt: unattacked
  bool include_pristine = true;
  bool include_runtime = true;
  std::uint64_t seed = 1;
};

struct BenchmarkSummary {
  int files = 0;
  int failed_files = 0;
  int forged_rows = 0;
  int detected = 0;
  int localized = 0;  // detected with offset within one frame
  int pristine_rows = 0;
  int flagged = 0;

  double tpr() const { return forged_rows ? static_cast<double>(detected) / forged_rows : 0.0; }
  double fpr() const { return pristine_rows ? static_cast<double>(flagged) / pristine_rows : 0.0; }
};

inline std::vector<std::filesystem::path> list_wavs(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::io, "not a directory: " + dir.string());
  std::vector<std::filesystem::path> out;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    if (!e.is_regular_file()) continue;
    std::string ext = e.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    if (ext == ".wav") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end());
  return out;
}

namespace detail {

struct RowScore {
  std::optional<int> offset_err_frames;
  double iou = 0.0;
};

inline double interval_iou(double a0, double a1, double b0, double b1) {
  const double inter = std::max(0.0, std::min(a1, b1) - std::max(a0, b0));
  const double uni = std::max(a1, b1) - std::min(a0, b0);
  return uni > 0.0 ? inter / uni : 0.0;
}

// Best segment by destination overlap; the offset error is taken from the
// segment whose offset is closest to the truth.
inline RowScore score(const ForgeryReport& r, const GroundTruth& t, double frame_rate) {
  RowScore s;
  const double truth_offset = t.offset_s() * frame_rate;
  for (const auto& seg : r.segments) {
    const int err = static_cast<int>(std::lround(seg.offset_frames - truth_offset));
    if (!s.offset_err_frames || std::abs(err) < std::abs(*s.offset_err_frames)) s.offset_err_frames = err;
    s.iou = std::max(s.iou, interval_iou(seg.dst_start_s, seg.dst_end_s, t.dst_start_s(),
                                         t.dst_start_s() + t.length_s()));
  }
  return s;
}

inline std::optional<ForgerySpec> place_forgery(double total_s, double len_s, double crossfade_ms, std::uint64_t seed) {
  const double half = total_s / 2.0;
  if (half < len_s + 0.01) return std::nullopt;
  std::mt19937_64 rng(seed);
  const double src = std::uniform_real_distribution<double>(0.0, half - len_s)(rng);
  const double dst = std::uniform_real_distribution<double>(half, total_s - len_s - 0.001)(rng);
  return ForgerySpec{src, len_s, dst, crossfade_ms};
}

}  // namespace detail

/// Writes one CSV row per (file, forgery or pristine, attack) and '#' summary
/// lines. Unreadable files are reported on `log` and skipped.
inline BenchmarkSummary run_benchmark(const std::filesystem::path& corpus, const BenchmarkGrid& grid, std::ostream& csv,
                                      std::ostream& log) {
  grid.detector.validate();
  const auto files = list_wavs(corpus);
  BenchmarkSummary sum;
  sum.files = static_cast<int>(files.size());
  csv << "file,forgery_spec,attack_kind,attack_param,verdict,truth,offset_err_frames,segment_iou";
  csv << (grid.include_runtime ? ",runtime_ms\n" : "\n");
  const double frame_rate = static_cast<double>(grid.sample_rate_hz) / grid.detector.stft.hop;
  char buf[256];

  for (std::size_t fi = 0; fi < files.size(); ++fi) {
    const std::string name = files[fi].filename().string();
    AudioBuffer clean;
    try {
      clean = load_wav(files[fi].string(), grid.sample_rate_hz);
    } catch (const Error& e) {
      log << "skip " << name << ": " << e.what() << '\n';
      ++sum.failed_files;
      continue;
    }

    struct Case {
      std::string label;
      AudioBuffer audio;
      std::optional<GroundTruth> truth;
    };
    std::vector<Case> cases;
    if (grid.include_pristine) cases.push_back({"none", clean, std::nullopt});
    for (int i = 0; i < grid.forgeries_per_file; ++i) {
      const auto spec = detail::place_forgery(clean.duration_s(), grid.duration_s, grid.crossfade_ms,
                                              detail::splitmix64(grid.seed ^ (fi << 20) ^ static_cast<std::uint64_t>(i)));
      if (!spec) {
        log << "skip forgery " << i << " of " << name << ": recording too short\n";
        continue;
      }
      auto f = make_forgery(clean, *spec);
      std::snprintf(buf, sizeof buf, "src=%.4f;dst=%.4f;len=%.4f", f.truth.src_start_s(), f.truth.dst_start_s(),
                    f.truth.length_s());
      cases.push_back({buf, std::move(f.audio), f.truth});
    }

    for (std::size_t ai = 0; ai < grid.attacks.size(); ++ai) {
      const auto& atk = grid.attacks[ai];
      for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const auto& c = cases[ci];
        try {
          const AudioBuffer input =
              atk ? apply_attack(c.audio, *atk, detail::splitmix64(grid.seed + 7919 * fi + 104729 * ai + ci)) : c.audio;
          const auto t0 = std::chrono::steady_clock::now();
          const auto report = detect(input, grid.detector);
          const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

          std::string err, iou;
          if (c.truth) {
            ++sum.forged_rows;
            sum.detected += report.verdict;
            const auto s = detail::score(report, *c.truth, frame_rate);
            if (s.offset_err_frames) err = std::to_string(*s.offset_err_frames);
            if (report.verdict && s.offset_err_frames && std::abs(*s.offset_err_frames) <= 1) ++sum.localized;
            std::snprintf(buf, sizeof buf, "%.4f", s.iou);
            iou = buf;
          } else {
            ++sum.pristine_rows;
            sum.flagged += report.verdict;
          }
          std::snprintf(buf, sizeof buf, "%.6g", atk ? atk->parameter() : 0.0);
          csv << name << ',' << c.label << ',' << (atk ? to_string(atk->kind) : "none") << ',' << (atk ? buf : "")
              << ',' << report.verdict << ',' << c.truth.has_value() << ',' << err << ',' << iou;
          if (grid.include_runtime) {
            std::snprintf(buf, sizeof buf, "%.3f", ms);
            csv << ',' << buf;
          }
          csv << '\n';
        } catch (const Error& e) {
          log << "skip " << name << " (" << c.label << "): " << e.what() << '\n';
        }
      }
    }
  }

  csv << "# files=" << sum.files << " failed=" << sum.failed_files << '\n';
  if (sum.forged_rows) {
    std::snprintf(buf, sizeof buf, "# forged=%d detected=%d localized=%d TPR=%.4f\n", sum.forged_rows, sum.detected,
                  sum.localized, sum.tpr());
    csv << buf;
  } else {
    csv << "# forged=0 TPR=n/a\n";
  }
  if (sum.pristine_rows) {
    std::snprintf(buf, sizeof buf, "# pristine=%d flagged=%d FPR=%.4f\n", sum.pristine_rows, sum.flagged, sum.fpr());
    csv << buf;
  } else {
    csv << "# pristine=0 FPR=n/a\n";
  }
  return sum;
}

}  // namespace cmfd
