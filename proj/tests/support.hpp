#pragma once

// Shared helpers for the test programs.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <set>
#include <tuple>
#include <vector>

#include "cmfd/cmfd.hpp"

namespace testing_support {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("cmfd_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

// Little-endian RIFF writer for hand-made headers.
struct RiffBuilder {
  std::vector<std::uint8_t> bytes;

  void tag(const char* t) { bytes.insert(bytes.end(), t, t + 4); }
  void u16(std::uint16_t v) {
    bytes.push_back(v & 0xff);
    bytes.push_back(v >> 8);
  }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) bytes.push_back((v >> (8 * i)) & 0xff);
  }
  void i16(std::int16_t v) { u16(static_cast<std::uint16_t>(v)); }

  // Canonical header with a 16-byte fmt chunk, data chunk of `data_bytes`.
  static RiffBuilder header(std::uint16_t format, std::uint16_t channels, std::uint32_t rate, std::uint16_t bits,
                            std::uint32_t data_bytes) {
    RiffBuilder b;
    b.tag("RIFF");
    b.u32(36 + data_bytes);
    b.tag("WAVE");
    b.tag("fmt ");
    b.u32(16);
    b.u16(format);
    b.u16(channels);
    b.u32(rate);
    b.u32(rate * channels * bits / 8);
    b.u16(channels * bits / 8);
    b.u16(bits);
    b.tag("data");
    b.u32(data_bytes);
    return b;
  }

  void write(const std::filesystem::path& p) const {
    std::ofstream f(p, std::ios::binary);
    f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  }
};

// Speech-like recording with one copy-move of `len_s` seconds at arbitrary
// (not hop-aligned) positions: source in the first half, destination in
// the second.
struct ForgedFixture {
  cmfd::AudioBuffer clean;
  cmfd::Forgery forged;
};

inline ForgedFixture forged_fixture(std::uint64_t seed, double len_s = 0.5, double min_s = 10.0,
                                    double max_s = 30.0) {
  std::mt19937_64 rng(seed);
  const double dur = std::uniform_real_distribution<double>(min_s, max_s)(rng);
  auto clean = cmfd::synth_speech(dur, seed);
  const double src = std::uniform_real_distribution<double>(0.5, dur / 2 - len_s - 0.5)(rng);
  const double dst = std::uniform_real_distribution<double>(dur / 2, dur - len_s - 0.5)(rng);
  auto forged = cmfd::make_forgery(clean, {src, len_s, dst, 5.0});
  return {std::move(clean), std::move(forged)};
}

// True when some segment's offset is within `tol_s` of the ground truth.
inline bool offset_found(const cmfd::ForgeryReport& r, const cmfd::GroundTruth& t, double tol_s) {
  for (const auto& s : r.segments)
    if (std::abs(s.offset_s - t.offset_s()) <= tol_s + 1e-9) return true;
  return false;
}

inline std::vector<double> random_signal(std::size_t n, std::uint64_t seed, double amp = 0.5) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amp, amp);
  std::vector<double> x(n);
  for (auto& v : x) v = u(rng);
  return x;
}

inline cmfd::FeatureTensor tensor(int id, int t, int f, std::vector<cmfd::Member> members, int source = 0) {
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return {id, t, f, source, std::move(members)};
}

inline std::vector<cmfd::FeatureTensor> random_tensors(std::mt19937_64& rng, int count) {
  std::uniform_int_distribution<int> f(0, 5), fs(0, 6), dt(1, 4), size(1, 12), t(0, 400), src(0, 1);
  std::vector<cmfd::FeatureTensor> out;
  std::set<std::tuple<int, int, int>> anchors;  // (source, t, f) is unique, as from group_tensors
  for (int i = 0; i < count;) {
    const int tt = t(rng), ff = f(rng), ss = src(rng);
    if (!anchors.insert({ss, tt, ff}).second) continue;
    std::vector<cmfd::Member> m;
    const int n = size(rng);
    for (int j = 0; j < n; ++j) m.push_back({fs(rng), dt(rng)});
    out.push_back(tensor(i++, tt, ff, m, ss));
  }
  return out;
}

// All-pairs matcher, no frequency buckets.
inline std::vector<cmfd::MatchPair> brute_force_match(const std::vector<cmfd::FeatureTensor>& ts, int k,
                                                     const cmfd::MatchScope& scope) {
  std::vector<cmfd::MatchPair> out;
  for (std::size_t i = 0; i < ts.size(); ++i)
    for (std::size_t j = i + 1; j < ts.size(); ++j) {
      const auto& a = ts[i];
      const auto& b = ts[j];
      if (a.f_anchor != b.f_anchor) continue;
      const bool ok = scope.cross_source
                          ? a.source != b.source
                          : a.source == b.source && std::abs(a.t_anchor - b.t_anchor) >= scope.min_separation;
      if (!ok) continue;
      int common = 0;
      for (const auto& m : a.members) common += std::count(b.members.begin(), b.members.end(), m) > 0;
      if (common <= k) continue;
      const bool swap = std::tie(a.source, a.t_anchor) > std::tie(b.source, b.t_anchor);
      const auto& lo = swap ? b : a;
      const auto& hi = swap ? a : b;
      out.push_back({lo.anchor_id, hi.anchor_id, lo.t_anchor, hi.t_anchor, lo.f_anchor, common, 0.0, lo.source, hi.source});
    }
  std::sort(out.begin(), out.end(), [](const cmfd::MatchPair& x, const cmfd::MatchPair& y) {
    return std::tie(x.source_m, x.t_m, x.source_n, x.t_n, x.f_anchor) <
           std::tie(y.source_m, y.t_m, y.source_n, y.t_n, y.f_anchor);
  });
  return out;
}

}  // namespace testing_support
