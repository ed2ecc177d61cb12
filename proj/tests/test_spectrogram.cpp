#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "support.hpp"

using namespace cmfd;

TEST(Fft, MatchesNaiveDft) {
  for (std::size_t n : {1u, 2u, 8u, 64u, 512u}) {
    const auto re = testing_support::random_signal(n, n);
    const auto im = testing_support::random_signal(n, n + 1);
    std::vector<std::complex<double>> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = {re[i], im[i]};
    auto y = x;
    Fft(n).forward(y);
    for (std::size_t k = 0; k < n; ++k) {
      std::complex<double> acc = 0.0;
      for (std::size_t t = 0; t < n; ++t)
        acc += x[t] * std::polar(1.0, -2.0 * std::numbers::pi * static_cast<double>(k * t % n) / static_cast<double>(n));
      ASSERT_NEAR(std::abs(y[k] - acc), 0.0, 1e-9 * static_cast<double>(n)) << "n=" << n << " k=" << k;
    }
  }
  EXPECT_THROW(Fft(12), Error);
}

TEST(Stft, FrameCountForOneSecond) {
  const auto noise = synth_white_noise(1.0, 3);
  ASSERT_EQ(noise.size(), 16000u);
  const auto s = stft(noise);
  EXPECT_EQ(s.frames(), 122);
  EXPECT_EQ(s.bins(), 257);
  // Brute-force framing: the last frame must fit, the next one must not.
  const int last_start = (s.frames() - 1) * 128;
  EXPECT_LE(last_start + 512, 16000);
  EXPECT_GT(last_start + 128 + 512, 16000);
  EXPECT_DOUBLE_EQ(s.frame_rate_hz(), 125.0);
}

TEST(Stft, ZerosHitTheFloor) {
  AudioBuffer z{std::vector<double>(4000, 0.0), 16000, ""};
  const auto s = stft(z);
  for (double v : s.values.data()) ASSERT_EQ(v, -120.0);
}

TEST(Stft, BinCentredSinePeaksAtItsBin) {
  StftConfig cfg;
  cfg.window = WindowKind::rectangular;
  for (int k0 : {1, 17, 64, 200, 255}) {
    AudioBuffer x{std::vector<double>(4096), 16000, ""};
    for (std::size_t n = 0; n < x.size(); ++n) x.samples[n] = 0.5 * std::sin(2.0 * std::numbers::pi * k0 * n / 512.0);
    const auto s = stft(x, cfg);
    for (int m = 0; m < s.frames(); ++m) {
      const auto row = s.values.row(m);
      ASSERT_EQ(std::max_element(row.begin(), row.end()) - row.begin(), k0);
    }
  }
}

TEST(Stft, ShiftCovariance) {
  const auto base = testing_support::random_signal(12000, 7);
  for (int j : {1, 3, 10}) {
    AudioBuffer a{base, 16000, ""};
    AudioBuffer b{std::vector<double>(base.begin() + j * 128, base.end()), 16000, ""};
    const auto sa = stft(a);
    const auto sb = stft(b);
    ASSERT_EQ(sb.frames(), sa.frames() - j);
    for (int m = 0; m < sb.frames(); ++m)
      for (int k = 0; k < sb.bins(); ++k) ASSERT_EQ(sb(m, k), sa(m + j, k));
  }
}

TEST(Stft, ScalingAddsGainInDb) {
  AudioBuffer a{testing_support::random_signal(6000, 8), 16000, ""};
  AudioBuffer b = a;
  const double g = 3.7;
  for (auto& v : b.samples) v *= g;
  const auto sa = stft(a);
  const auto sb = stft(b);
  const double shift = 20.0 * std::log10(g);
  for (int m = 0; m < sa.frames(); ++m)
    for (int k = 0; k < sa.bins(); ++k)
      if (sa(m, k) > -120.0) { ASSERT_NEAR(sb(m, k), sa(m, k) + shift, 1e-9); }
}

TEST(Stft, DeterministicAndFinite) {
  const auto x = synth_speech(2.0, 11);
  const auto a = stft(x);
  const auto b = stft(x);
  EXPECT_TRUE(a.values == b.values);
  for (double v : a.values.data()) {
    ASSERT_TRUE(std::isfinite(v));
    ASSERT_GE(v, -120.0);
  }
}

TEST(Stft, Errors) {
  AudioBuffer shortbuf{std::vector<double>(511, 0.1), 16000, ""};
  try {
    stft(shortbuf);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::insufficient_input);
  }
  AudioBuffer ok{std::vector<double>(2048, 0.1), 16000, ""};
  StftConfig bad;
  bad.fft_size = 500;
  EXPECT_THROW(stft(ok, bad), Error);
  bad = {};
  bad.hop = 1024;
  EXPECT_THROW(stft(ok, bad), Error);
  bad = {};
  bad.floor_db = 0.0;
  EXPECT_THROW(stft(ok, bad), Error);
}
