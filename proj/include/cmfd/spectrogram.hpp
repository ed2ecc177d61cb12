#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "cmfd/audio.hpp"
#include "cmfd/error.hpp"
#include "cmfd/fft.hpp"

namespace cmfd {

enum class WindowKind { hann, rectangular };

inline const char* to_string(WindowKind w) { return w == WindowKind::hann ? "hann" : "rectangular"; }

struct StftConfig {
  int fft_size = 512;
  int hop = 128;
  WindowKind window = WindowKind::hann;
  double floor_db = -120.0;

  int bins() const noexcept { return fft_size / 2 + 1; }

  void validate() const {
    if (fft_size <= 0 || !is_power_of_two(static_cast<std::size_t>(fft_size)))
      throw Error(ErrorCode::parameter, "fft_size must be a positive power of two");
    if (hop <= 0 || hop > fft_size) throw Error(ErrorCode::parameter, "hop must lie in [1, fft_size]");
    if (!(floor_db < 0.0)) throw Error(ErrorCode::parameter, "floor_db must be negative");
  }
};

/// Row-major dense matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  const double* ptr(std::size_t r, std::size_t c) const { return data_.data() + r * cols_ + c; }
  double* ptr(std::size_t r, std::size_t c) { return data_.data() + r * cols_ + c; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }
  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  const std::vector<double>& data() const noexcept { return data_; }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Log-magnitude spectrogram Y(frame, bin) in dB, bins 0..L/2.
struct Spectrogram {
  Matrix values;
  StftConfig config;
  int sample_rate_hz = 0;

  int frames() const noexcept { return static_cast<int>(values.rows()); }
  int bins() const noexcept { return static_cast<int>(values.cols()); }
  double frame_rate_hz() const noexcept { return static_cast<double>(sample_rate_hz) / config.hop; }
  double duration_s() const noexcept { return frames() / frame_rate_hz(); }
  double operator()(int frame, int bin) const { return values(frame, bin); }
};

inline int frame_count(std::size_t num_samples, const StftConfig& cfg) {
  if (num_samples < static_cast<std::size_t>(cfg.fft_size)) return 0;
  return 1 + static_cast<int>((num_samples - cfg.fft_size) / cfg.hop);
}

inline std::vector<double> make_window(WindowKind kind, int n) {
  std::vector<double> w(n, 1.0);
  if (kind == WindowKind::hann)
    for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

/// Short-time Fourier transform followed by 20*log10|X|, clamped at floor_db.
/// The partial tail frame is dropped.
inline Spectrogram stft(const AudioBuffer& buf, const StftConfig& cfg = {}) {
  cfg.validate();
  if (buf.size() < static_cast<std::size_t>(cfg.fft_size))
    throw Error(ErrorCode::insufficient_input, "buffer of " + std::to_string(buf.size()) +
                                                   " samples is shorter than one frame of " +
                                                   std::to_string(cfg.fft_size));
  const int frames = frame_count(buf.size(), cfg);
  const int bins = cfg.bins();
  const auto window = make_window(cfg.window, cfg.fft_size);
  const double floor_mag = std::pow(10.0, cfg.floor_db / 20.0);
  const Fft fft(static_cast<std::size_t>(cfg.fft_size));

  Spectrogram out{Matrix(frames, bins), cfg, buf.sample_rate_hz};
  std::vector<std::complex<double>> scratch(cfg.fft_size);
  for (int m = 0; m < frames; ++m) {
    const double* x = buf.samples.data() + static_cast<std::size_t>(m) * cfg.hop;
    for (int n = 0; n < cfg.fft_size; ++n) scratch[n] = {x[n] * window[n], 0.0};
    fft.forward(scratch);
    auto row = out.values.row(m);
    for (int k = 0; k < bins; ++k) row[k] = 20.0 * std::log10(std::max(std::abs(scratch[k]), floor_mag));
  }
  return out;
}

/// Frames x bins CSV with 6 significant digits.
inline void write_csv(std::ostream& os, const Spectrogram& spec) {
  char buf[32];
  for (int m = 0; m < spec.frames(); ++m) {
    for (int k = 0; k < spec.bins(); ++k) {
      std::snprintf(buf, sizeof buf, "%.6g", spec(m, k));
      if (k) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace cmfd
