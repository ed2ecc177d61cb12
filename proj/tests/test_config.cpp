#include <gtest/gtest.h>

#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "support.hpp"

using namespace cmfd;

namespace {

std::map<std::string, std::string> as_map(const Config& c) {
  std::map<std::string, std::string> m;
  for (const auto& [k, v] : c.entries()) m[k] = v;
  return m;
}

std::string error_text(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST(Config, DefaultsMatchDocumentedValues) {
  const auto m = as_map(Config{});
  const std::map<std::string, std::string> expected{
      {"sample_rate", "16000"}, {"alpha", "0.97"},         {"fft_size", "512"},       {"hop", "128"},
      {"window", "hann"},       {"floor_db", "-120"},      {"patch_frames", "13"},    {"patch_bins", "13"},
      {"min_db", "-80"},        {"zone_frames", "64"},     {"zone_bins", "256"},      {"fan_out", "20"},
      {"k", "3"},               {"theta", "0.9"},          {"slice_width", "8"},      {"min_cluster_size", "1"},
      {"offset_tolerance", "2"}, {"extent_threshold", "0.9"}, {"extent_gap", "3"}, {"extent_level_db", "6"}, {"seed", "1"},
      {"crossfade_ms", "5"},    {"attack", "white"},       {"snr_db", "20"},          {"resample_ratio", "0.9"},
      {"cutoff_hz", "3400"},    {"jitter_max_samples", "4"}, {"interference", ""}};
  EXPECT_EQ(m, expected);
  EXPECT_NO_THROW(Config{}.validate());
}

TEST(Config, ZoneBinsFollowsFftSizeUnlessSet) {
  Config c;
  c.set("fft_size", "1024");
  EXPECT_EQ(c.resolved_detector().zone.zone_bins, 512);
  c.set("zone_bins", "64");
  EXPECT_EQ(c.resolved_detector().zone.zone_bins, 64);
  c.set("fft_size", "256");
  EXPECT_EQ(c.resolved_detector().zone.zone_bins, 64);
}

TEST(Config, SetParsesEveryKeyItPrints) {
  Config c;
  for (const auto& [k, v] : Config{}.entries()) EXPECT_NO_THROW(c.set(k, v)) << k;
  EXPECT_EQ(as_map(c), as_map(Config{}));
  c.set("theta", " 0.85 ");
  EXPECT_EQ(c.detector.match.theta, 0.85);
  c.set("attack", "lowpass");
  EXPECT_EQ(c.attack, AttackKind::lowpass);
  c.set("window", "rectangular");
  EXPECT_EQ(c.detector.stft.window, WindowKind::rectangular);
}

TEST(Config, ErrorsNameTheOffendingField) {
  Config c;
  EXPECT_NE(error_text([&] { c.set("bogus", "1"); }).find("bogus"), std::string::npos);
  EXPECT_NE(error_text([&] { c.set("k", "three"); }).find("k: cannot parse"), std::string::npos);
  EXPECT_NE(error_text([&] { c.set("attack", "mp3"); }).find("attack:"), std::string::npos);

  auto invalid = [](const char* key, const char* value) {
    Config c;
    c.set(key, value);
    return error_text([&] { c.validate(); });
  };
  EXPECT_NE(invalid("fft_size", "500").find("fft_size"), std::string::npos);
  EXPECT_NE(invalid("hop", "1024").find("hop"), std::string::npos);
  EXPECT_NE(invalid("patch_frames", "12").find("patch_frames"), std::string::npos);
  EXPECT_NE(invalid("theta", "1.5").find("theta"), std::string::npos);
  EXPECT_NE(invalid("k", "0").find("k:"), std::string::npos);
  EXPECT_NE(invalid("k", "20").find("k:"), std::string::npos);
  EXPECT_NE(invalid("slice_width", "7").find("slice_width"), std::string::npos);
  EXPECT_NE(invalid("alpha", "1").find("alpha"), std::string::npos);
  EXPECT_NE(invalid("cutoff_hz", "9000").find("cutoff_hz"), std::string::npos);
  EXPECT_NE(invalid("extent_gap", "-1").find("extent_gap"), std::string::npos);
  EXPECT_NE(invalid("extent_level_db", "0").find("extent_level_db"), std::string::npos);
}

TEST(Config, LoadFile) {
  const auto dir = testing_support::scratch_dir("config");
  const auto path = (dir / "run.conf").string();
  {
    std::ofstream f(path);
    f << "# detector\n\nk = 4\n  theta=0.8   # inline comment\nfan_out = 16\nattack = jitter\n";
  }
  Config c;
  c.load_file(path);
  EXPECT_EQ(c.detector.match.k, 4);
  EXPECT_EQ(c.detector.match.theta, 0.8);
  EXPECT_EQ(c.detector.zone.fan_out, 16);
  EXPECT_EQ(c.attack, AttackKind::jitter);

  {
    std::ofstream f(path);
    f << "k = 4\nnot a pair\n";
  }
  EXPECT_NE(error_text([&] { Config().load_file(path); }).find("run.conf:2"), std::string::npos);
  {
    std::ofstream f(path);
    f << "hop = x\n";
  }
  const auto msg = error_text([&] { Config().load_file(path); });
  EXPECT_NE(msg.find("run.conf:1: hop: cannot parse"), std::string::npos) << msg;
  EXPECT_THROW(Config().load_file((dir / "none.conf").string()), Error);
}

TEST(Config, PrintListsEveryKey) {
  std::ostringstream os;
  Config{}.print(os);
  const auto text = os.str();
  for (const auto& [k, v] : Config{}.entries()) EXPECT_NE(text.find(k + " = " + v + "\n"), std::string::npos) << k;
}
