#pragma once

// Seeded speech-like test material: voiced syllables built from gliding
// harmonic series under moving formant envelopes, fricative noise bursts and
// pauses over a very low noise floor. No two syllables share a pitch or
// formant trajectory, so a pristine fixture contains no duplicated material.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "cmfd/audio.hpp"
#include "cmfd/error.hpp"

namespace cmfd {

struct SpeechSynthConfig {
  int sample_rate_hz = kDefaultSampleRate;
  double peak_amplitude = 0.3;
  double floor_rms = 1e-6;
  double max_harmonic_hz = 3800.0;
  double fricative_probability = 0.3;
  double modulation_db = 4.0;
};

namespace detail {

inline double formant_gain(double f, const double (&centres)[3], const double (&levels)[3]) {
  constexpr double bandwidths[3] = {90.0, 130.0, 200.0};
  constexpr double weights[3] = {1.0, 0.6, 0.3};
  double g = 0.02;
  for (int i = 0; i < 3; ++i) {
    const double x = (f - centres[i]) / bandwidths[i];
    g += levels[i] * weights[i] / (1.0 + x * x);
  }
  return g / std::sqrt(1.0 + f / 500.0);
}

}  // namespace detail

inline AudioBuffer synth_speech(double duration_s, std::uint64_t seed, const SpeechSynthConfig& cfg = {}) {
  if (!(duration_s > 0.0)) throw Error(ErrorCode::parameter, "duration must be positive");
  const int rate = cfg.sample_rate_hz;
  const auto total = static_cast<std::size_t>(std::llround(duration_s * rate));
  std::vector<double> x(total, 0.0);
  std::mt19937_64 rng(seed);
  auto uni = [&](double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); };
  std::normal_distribution<double> gauss(0.0, 1.0);

  std::size_t pos = static_cast<std::size_t>(uni(0.05, 0.2) * rate);
  while (pos < total) {
    if (uni(0.0, 1.0) < cfg.fricative_probability) {
      const auto len = static_cast<std::size_t>(uni(0.04, 0.12) * rate);
      const double amp = uni(0.01, 0.04);
      double prev = 0.0;
      for (std::size_t i = 0; i < len && pos + i < total; ++i) {
        const double env = std::sin(std::numbers::pi * static_cast<double>(i) / static_cast<double>(len));
        const double w = gauss(rng);
        x[pos + i] += amp * env * (w - 0.9 * prev);  // high-tilted noise
        prev = w;
      }
      pos += len;
    }

    const auto len = static_cast<std::size_t>(uni(0.10, 0.35) * rate);
    const double f0_start = uni(85.0, 230.0);
    const double f0_end = f0_start * uni(0.75, 1.3);
    const double vib_rate = uni(4.0, 7.0), vib_depth = uni(0.005, 0.02), vib_phase = uni(0.0, 6.283);
    const double formants_a[3] = {uni(300, 850), uni(900, 2300), uni(2400, 3300)};
    const double formants_b[3] = {uni(300, 850), uni(900, 2300), uni(2400, 3300)};
    const double amp = uni(0.5, 1.0);
    // Slow independent level changes per formant region (+-modulation_db).
    double mod_freq[3][3], mod_phase[3][3];
    for (auto& row : mod_freq)
      for (auto& f : row) f = uni(5.0, 20.0);
    for (auto& row : mod_phase)
      for (auto& p : row) p = uni(0.0, 2.0 * std::numbers::pi);
    const double mod_depth = cfg.modulation_db / 20.0 * std::numbers::ln10;
    const int harmonics = static_cast<int>(cfg.max_harmonic_hz / std::min(f0_start, f0_end));
    std::vector<double> phase(harmonics + 1);
    for (auto& p : phase) p = uni(0.0, 2.0 * std::numbers::pi);
    std::vector<double> gains(harmonics + 1, 0.0), next(harmonics + 1, 0.0);

    // Formant gains are evaluated every `block` samples and interpolated in
    // between so the envelope carries no stepping sidebands.
    const std::size_t block = static_cast<std::size_t>(rate / 1000);
    auto evaluate = [&](std::size_t i, std::vector<double>& out) {
      const double u = std::min(1.0, static_cast<double>(i) / static_cast<double>(len));
      const double f0 = f0_start + (f0_end - f0_start) * u;
      const double t = static_cast<double>(i) / rate;
      double centres[3], levels[3];
      for (int j = 0; j < 3; ++j) {
        centres[j] = formants_a[j] + (formants_b[j] - formants_a[j]) * u;
        double m = 0.0;
        for (int r = 0; r < 3; ++r) m += std::sin(2.0 * std::numbers::pi * mod_freq[j][r] * t + mod_phase[j][r]);
        levels[j] = std::exp(mod_depth * m / std::sqrt(3.0));
      }
      for (int h = 1; h <= harmonics; ++h) {
        const double f = h * f0;
        out[h] = f < cfg.max_harmonic_hz ? detail::formant_gain(f, centres, levels) : 0.0;
      }
    };
    evaluate(0, next);
    const double ramp = 0.010 * rate;
    for (std::size_t i = 0; i < len && pos + i < total; ++i) {
      const double u = static_cast<double>(i) / static_cast<double>(len);
      const double f0 = (f0_start + (f0_end - f0_start) * u) *
                        (1.0 + vib_depth * std::sin(2.0 * std::numbers::pi * vib_rate * i / rate + vib_phase));
      if (i % block == 0) {
        gains.swap(next);
        evaluate(i + block, next);
      }
      const double frac = static_cast<double>(i % block) / static_cast<double>(block);
      const double edge = std::min(static_cast<double>(i), static_cast<double>(len - 1 - i));
      const double env = std::sin(std::numbers::pi * u) *
                         (edge < ramp ? 0.5 - 0.5 * std::cos(std::numbers::pi * edge / ramp) : 1.0);
      double s = 0.0;
      for (int h = 1; h <= harmonics; ++h) {
        phase[h] += 2.0 * std::numbers::pi * h * f0 / rate;
        const double g = gains[h] + (next[h] - gains[h]) * frac;
        if (g > 0.0) s += g * std::sin(phase[h]);
      }
      x[pos + i] += amp * env * s;
    }
    pos += len + static_cast<std::size_t>(uni(0.03, 0.25) * rate);
  }

  double peak = 0.0;
  for (double v : x) peak = std::max(peak, std::abs(v));
  const double scale = peak > 0.0 ? cfg.peak_amplitude / peak : 1.0;
  for (auto& v : x) v = v * scale + cfg.floor_rms * gauss(rng);
  return {std::move(x), rate, "synth:" + std::to_string(seed)};
}

/// Stationary Gaussian white noise, the pristine-noise counterpart.
inline AudioBuffer synth_white_noise(double duration_s, std::uint64_t seed, double rms = 0.1,
                                     int rate = kDefaultSampleRate) {
  const auto total = static_cast<std::size_t>(std::llround(duration_s * rate));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, rms);
  std::vector<double> x(total);
  for (auto& v : x) v = gauss(rng);
  return {std::move(x), rate, "noise:" + std::to_string(seed)};
}

}  // namespace cmfd
