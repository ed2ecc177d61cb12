#pragma once

// Anchor/satellite landmark vectors, their lossless integer keys, duplicate
// filtering and grouping into per-anchor local feature tensors.

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "cmfd/constellation.hpp"
#include "cmfd/error.hpp"

namespace cmfd {

struct TargetZoneConfig {
  int zone_frames = 64;  // N_mx, maximum anchor-to-satellite frame offset
  int zone_bins = 256;   // maximum |bin difference|; L/2 covers the whole band
  int fan_out = 20;      // F

  void validate() const {
    if (zone_frames < 1) throw Error(ErrorCode::parameter, "zone_frames must be >= 1");
    if (zone_bins < 0) throw Error(ErrorCode::parameter, "zone_bins must be >= 0");
    if (fan_out < 1) throw Error(ErrorCode::parameter, "fan_out must be >= 1");
  }
};

struct LandmarkVector {
  int f_anchor = 0;
  int f_sat = 0;
  int dt = 0;
  int t_anchor = 0;
  int source = 0;  // recording tag when several inputs are pooled

  friend bool operator==(const LandmarkVector&, const LandmarkVector&) = default;
};

struct EncodedLandmark {
  std::uint64_t z = 0;
  LandmarkVector vec;
};

/// Satellite part of a tensor member: the translation-invariant (f_sat, dt).
struct Member {
  int f_sat = 0;
  int dt = 0;

  friend auto operator<=>(const Member&, const Member&) = default;
};

struct FeatureTensor {
  int anchor_id = 0;  // index into the compacted anchor set
  int t_anchor = 0;
  int f_anchor = 0;
  int source = 0;
  std::vector<Member> members;  // sorted, distinct
};

namespace detail {

constexpr int ceil_log2(std::uint64_t n) {
  int b = 0;
  while ((std::uint64_t{1} << b) < n) ++b;
  return b;
}

}  // namespace detail

/// Bit-packing of (f_anchor, f_sat, dt) into
///   z = f_anchor * 2^(b_f + b_t) + f_sat * 2^b_t + dt
/// with b_t = ceil(log2(N_mx)) and b_f = ceil(log2(L/2)). Because dt >= 1,
/// z - 1 splits into disjoint bit fields, so decoding is exact even when
/// dt == 2^b_t.
class KeyCodec {
 public:
  KeyCodec(int fft_size, int zone_frames)
      : half_(fft_size / 2),
        zone_frames_(zone_frames),
        bin_bits_(detail::ceil_log2(static_cast<std::uint64_t>(fft_size / 2))),
        dt_bits_(detail::ceil_log2(static_cast<std::uint64_t>(zone_frames))) {
    if (fft_size < 2) throw Error(ErrorCode::parameter, "fft_size must be >= 2");
    if (zone_frames < 1) throw Error(ErrorCode::parameter, "zone_frames must be >= 1");
  }

  int bin_bits() const noexcept { return bin_bits_; }
  int dt_bits() const noexcept { return dt_bits_; }

  std::uint64_t encode(int f_anchor, int f_sat, int dt) const {
    if (f_anchor < 0 || f_anchor >= half_ || f_sat < 0 || f_sat >= half_ || dt < 1 || dt > zone_frames_)
      throw Error(ErrorCode::encoding, "landmark (" + std::to_string(f_anchor) + ", " + std::to_string(f_sat) + ", " +
                                           std::to_string(dt) + ") outside the key ranges");
    return (static_cast<std::uint64_t>(f_anchor) << (bin_bits_ + dt_bits_)) +
           (static_cast<std::uint64_t>(f_sat) << dt_bits_) + static_cast<std::uint64_t>(dt);
  }

  EncodedLandmark encode(const LandmarkVector& v) const { return {encode(v.f_anchor, v.f_sat, v.dt), v}; }

  /// Inverse of encode; t_anchor and source are not part of the key.
  LandmarkVector decode(std::uint64_t z) const {
    if (z == 0) throw Error(ErrorCode::encoding, "zero is not a valid key");
    const std::uint64_t r = z - 1;
    LandmarkVector v;
    v.dt = static_cast<int>(r & ((std::uint64_t{1} << dt_bits_) - 1)) + 1;
    const std::uint64_t rest = r >> dt_bits_;
    v.f_sat = static_cast<int>(rest & ((std::uint64_t{1} << bin_bits_) - 1));
    v.f_anchor = static_cast<int>(rest >> bin_bits_);
    return v;
  }

 private:
  int half_;
  int zone_frames_;
  int bin_bits_;
  int dt_bits_;
};

inline EncodedLandmark encode(const LandmarkVector& v, int fft_size, int zone_frames) {
  return KeyCodec(fft_size, zone_frames).encode(v);
}

inline LandmarkVector decode(std::uint64_t z, int fft_size, int zone_frames) {
  return KeyCodec(fft_size, zone_frames).decode(z);
}

/// Pairs every anchor peak with up to F later peaks inside its target zone
/// (1 <= dt <= N_mx, |bin difference| <= zone_bins), nearest first by
/// (dt, |bin difference|, bin). The Nyquist bin is never used so that every
/// frequency fits the key's bin field.
inline std::vector<LandmarkVector> pair_landmarks(const PeakMap& pm, const TargetZoneConfig& zone = {}, int source = 0) {
  zone.validate();
  const int usable_bins = pm.source_bins - 1;  // bins 0..L/2-1
  std::vector<LandmarkVector> out;
  struct Candidate {
    int dt, dbin, bin;
    auto operator<=>(const Candidate&) const = default;
  };
  std::vector<Candidate> cands;
  const auto& peaks = pm.peaks;
  for (std::size_t a = 0; a < peaks.size(); ++a) {
    const Peak& anchor = peaks[a];
    if (anchor.bin >= usable_bins) continue;
    cands.clear();
    for (std::size_t s = a + 1; s < peaks.size(); ++s) {
      const int dt = peaks[s].frame - anchor.frame;
      if (dt > zone.zone_frames) break;
      if (dt < 1 || peaks[s].bin >= usable_bins) continue;
      const int dbin = std::abs(peaks[s].bin - anchor.bin);
      if (dbin <= zone.zone_bins) cands.push_back({dt, dbin, peaks[s].bin});
    }
    const std::size_t keep = std::min(cands.size(), static_cast<std::size_t>(zone.fan_out));
    std::partial_sort(cands.begin(), cands.begin() + static_cast<std::ptrdiff_t>(keep), cands.end());
    for (std::size_t i = 0; i < keep; ++i)
      out.push_back({anchor.bin, cands[i].bin, cands[i].dt, anchor.frame, source});
  }
  return out;
}

inline std::vector<EncodedLandmark> encode_all(const std::vector<LandmarkVector>& vs, const KeyCodec& codec) {
  std::vector<EncodedLandmark> out;
  out.reserve(vs.size());
  for (const auto& v : vs) out.push_back(codec.encode(v));
  return out;
}

/// Keeps, in input order, exactly the landmarks whose key occurs at least
/// twice. One counting pass plus one filtering pass.
inline std::vector<EncodedLandmark> eliminate_singletons(const std::vector<EncodedLandmark>& landmarks) {
  std::unordered_map<std::uint64_t, std::uint32_t> counts;
  counts.reserve(landmarks.size());
  for (const auto& l : landmarks) ++counts[l.z];
  std::vector<EncodedLandmark> out;
  for (const auto& l : landmarks)
    if (counts[l.z] >= 2) out.push_back(l);
  return out;
}

/// Groups surviving landmarks by anchor (source, t_anchor, f_anchor). Anchor
/// ids enumerate the compacted anchor set in ascending key order.
inline std::vector<FeatureTensor> group_tensors(const std::vector<EncodedLandmark>& u) {
  std::map<std::tuple<int, int, int>, std::vector<Member>> groups;
  for (const auto& l : u) groups[{l.vec.source, l.vec.t_anchor, l.vec.f_anchor}].push_back({l.vec.f_sat, l.vec.dt});
  std::vector<FeatureTensor> out;
  out.reserve(groups.size());
  int id = 0;
  for (auto& [key, members] : groups) {
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    out.push_back({id++, std::get<1>(key), std::get<2>(key), std::get<0>(key), std::move(members)});
  }
  return out;
}

inline void write_csv(std::ostream& os, const std::vector<EncodedLandmark>& landmarks) {
  os << "t_anchor,f_anchor,f_sat,dt,z\n";
  for (const auto& l : landmarks)
    os << l.vec.t_anchor << ',' << l.vec.f_anchor << ',' << l.vec.f_sat << ',' << l.vec.dt << ',' << l.z << '\n';
}

}  // namespace cmfd
