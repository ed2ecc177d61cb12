// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Fixture seeds are disjoint from the ones used while tuning.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace cmfd;
namespace ts = testing_support;
using Clock = std::chrono::steady_clock;

namespace {

constexpr int kFixtures = 20;
constexpr double kHopS = 128.0 / 16000.0;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

const std::vector<ts::ForgedFixture>& forged_fixtures() {
  static const auto v = [] {
    std::vector<ts::ForgedFixture> out;
    for (int i = 0; i < kFixtures; ++i) out.push_back(ts::forged_fixture(5000 + i, 0.5, 10.0, 30.0));
    return out;
  }();
  return v;
}

struct Tally {
  int hits = 0;
  std::vector<int> misses;
  std::string str() const {
    std::string s = std::to_string(hits) + "/" + std::to_string(kFixtures);
    if (!misses.empty()) {
      s += " (missed";
      for (int m : misses) s += " #" + std::to_string(m);
      s += ")";
    }
    return s;
  }
};

// Detected with an offset within one hop of the truth.
Tally detection_rate(const std::function<AudioBuffer(const ts::ForgedFixture&, int)>& input) {
  Tally t;
  const auto& fx = forged_fixtures();
  for (int i = 0; i < kFixtures; ++i) {
    const auto r = detect(input(fx[i], i));
    if (r.verdict && ts::offset_found(r, fx[i].forged.truth, kHopS))
      ++t.hits;
    else
      t.misses.push_back(i);
  }
  return t;
}

AudioBuffer attacked(const ts::ForgedFixture& f, int i, AttackSpec a) {
  return apply_attack(f.forged.audio, a, detail::splitmix64(9000 + i));
}

struct Outcome {
  bool pass;
  std::string detail;
};

Outcome criterion1() {
  Tally t;
  double worst = 0.0, total = 0.0;
  const auto& fx = forged_fixtures();
  for (int i = 0; i < kFixtures; ++i) {
    const auto t0 = Clock::now();
    const auto r = detect(fx[i].forged.audio);
    const double s = seconds_since(t0);
    worst = std::max(worst, s);
    total += s;
    if (r.verdict && ts::offset_found(r, fx[i].forged.truth, kHopS))
      ++t.hits;
    else
      t.misses.push_back(i);
  }
  char buf[160];
  std::snprintf(buf, sizeof buf, "TPR %s, offsets within 1 hop; runtime mean %.3f s, max %.3f s per file",
                t.str().c_str(), total / kFixtures, worst);
  return {t.hits == kFixtures && worst < 1.0, buf};
}

Outcome criterion2() {
  int flagged = 0;
  std::mt19937_64 rng(6000);
  for (int i = 0; i < kFixtures; ++i) {
    const double dur = std::uniform_real_distribution<double>(10.0, 30.0)(rng);
    flagged += detect(synth_speech(dur, 6000 + i)).verdict;
  }
  return {flagged == 0, std::to_string(flagged) + "/" + std::to_string(kFixtures) + " pristine fixtures flagged"};
}

Outcome criterion3() {
  AttackSpec a;
  a.snr_db = 10.0;
  const auto t10 = detection_rate([&](const auto& f, int i) { return attacked(f, i, a); });
  a.snr_db = 20.0;
  const auto t20 = detection_rate([&](const auto& f, int i) { return attacked(f, i, a); });
  return {t10.hits >= 18 && t20.hits == kFixtures,
          "10 dB: " + t10.str() + " (need 18); 20 dB: " + t20.str() + " (need 20)"};
}

Outcome criterion4() {
  AttackSpec rs, lp, jt;
  rs.kind = AttackKind::resample;
  rs.resample_ratio = 0.9;
  lp.kind = AttackKind::lowpass;
  lp.cutoff_hz = 3400.0;
  jt.kind = AttackKind::jitter;
  jt.jitter_max_samples = 4;
  const auto a = detection_rate([&](const auto& f, int i) { return attacked(f, i, rs); });
  const auto b = detection_rate([&](const auto& f, int i) { return attacked(f, i, lp); });
  const auto c = detection_rate([&](const auto& f, int i) { return attacked(f, i, jt); });
  return {a.hits >= 16 && b.hits >= 16 && c.hits >= 16,
          "resample 0.9: " + a.str() + "; lowpass 3.4 kHz: " + b.str() + "; jitter 4: " + c.str() + " (need 16 each)"};
}

Outcome criterion5() {
  int agree = 0;
  std::size_t pairs = 0;
  for (int seed = 0; seed < 100; ++seed) {
    std::mt19937_64 rng(detail::splitmix64(5500 + seed));
    const auto tensors = ts::random_tensors(rng, 200);
    MatchConfig cfg;
    cfg.k = 1 + seed % 4;
    const MatchScope scope{seed % 3 == 0, seed % 3 == 1 ? 64 : 0};
    const auto got = binwise_match(tensors, cfg, scope);
    pairs += got.size();
    agree += got == ts::brute_force_match(tensors, cfg.k, scope);
  }
  return {agree == 100, std::to_string(agree) + "/100 seeds identical to the all-pairs matcher (" +
                            std::to_string(pairs) + " pairs in total)"};
}

Outcome criterion6() {
  const auto t0 = Clock::now();
  int n = 0, outside = 0;
  double worst_z = 0.0;
  for (Scenario s : {Scenario::both_attacked, Scenario::one_attacked})
    for (int F : {10, 20})
      for (int k : {1, 2, 3, 5})
        for (int i = 1; i <= 9; ++i) {
          const SurvivalModel m{i / 10.0, F, k, 30.0, 0.5};
          const double q = pair_match_prob(m, s);
          const double est = monte_carlo_pair_match(m, s, 1000000, detail::splitmix64(20261015u ^ n));
          ++n;
          const double sigma = std::sqrt(q * (1.0 - q) / 1e6);
          const double z = sigma > 0.0 ? std::abs(est - q) / sigma : (est == q ? 0.0 : 1e9);
          worst_z = std::max(worst_z, z);
          outside += z > 3.0;
        }
  double worst_sum = 0.0;
  for (int i = 0; i <= 10000; ++i) {
    const auto st = pair_state_probs(i / 10000.0);
    worst_sum = std::max(worst_sum, std::abs(st.matched + st.one_lost + st.both_lost - 1.0));
  }
  const double spot = pair_match_prob_one_attacked({0.5, 20, 3, 30.0, 0.5});
  const double spot_err = std::abs(spot - 0.5 * (1.0 - 211.0 / 1048576.0));
  const double elapsed = seconds_since(t0);
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%d/%d grid points within 3 sigma (max |z| %.2f); state sum error %.1e; spot error %.1e; %.1f s",
                n - outside, n, worst_z, worst_sum, spot_err, elapsed);
  return {outside == 0 && worst_sum <= 1e-12 && spot_err <= 1e-12 && elapsed < 60.0, buf};
}

Outcome criterion7() {
  const double snrs[] = {-5, 0, 5, 10, 20, 40};
  bool ok = true;
  std::string detail;
  for (int f = 0; f < 5; ++f) {
    const auto clean = synth_speech(15.0, 7000 + f);
    double prev = -1.0;
    detail += (f ? "; " : "") + std::string("fixture ") + std::to_string(f) + ":";
    for (double snr : snrs) {
      AttackSpec a;
      a.snr_db = snr;
      const double q = measure_survival(clean, apply_attack(clean, a, detail::splitmix64(7100 + f)));
      char buf[16];
      std::snprintf(buf, sizeof buf, " %.2f", q);
      detail += buf;
      if (q < prev - 0.03) ok = false;
      prev = std::max(prev, q);
    }
  }
  return {ok, "q at -5/0/5/10/20/40 dB, " + detail};
}

Outcome criterion8() {
  auto time_detect = [](double dur) {
    const auto buf = synth_speech(dur, 8000 + static_cast<int>(dur));
    double best = 1e9;
    for (int rep = 0; rep < 2; ++rep) {
      const auto t0 = Clock::now();
      detect(buf);
      best = std::min(best, seconds_since(t0));
    }
    return best;
  };
  const double t30 = time_detect(30), t60 = time_detect(60), t120 = time_detect(120), t240 = time_detect(240);
  const double r1 = t60 / t30, r2 = t120 / t60, r3 = t240 / t120;
  char buf[200];
  std::snprintf(buf, sizeof buf, "times 30/60/120/240 s: %.3f %.3f %.3f %.3f s; ratios %.2f %.2f %.2f (limit 2.5)",
                t30, t60, t120, t240, r1, r2, r3);
  return {r1 <= 2.5 && r2 <= 2.5 && r3 <= 2.5, buf};
}

Outcome criterion9() {
  const KeyCodec codec(512, 64);
  std::mt19937_64 rng(9900);
  std::uniform_int_distribution<int> bin(0, 255), dt(1, 64);
  std::map<std::uint64_t, std::tuple<int, int, int>> seen;
  int mismatches = 0, collisions = 0;
  for (int i = 0; i < 100000; ++i) {
    const auto v = std::make_tuple(bin(rng), bin(rng), dt(rng));
    const auto z = codec.encode(std::get<0>(v), std::get<1>(v), std::get<2>(v));
    const auto back = codec.decode(z);
    mismatches += std::make_tuple(back.f_anchor, back.f_sat, back.dt) != v;
    const auto [it, fresh] = seen.emplace(z, v);
    collisions += !fresh && it->second != v;
  }
  return {mismatches == 0 && collisions == 0, "100000 vectors, " + std::to_string(seen.size()) + " distinct, " +
                                                   std::to_string(mismatches) + " round-trip mismatches, " +
                                                   std::to_string(collisions) + " collisions"};
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(CMFD_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

Outcome criterion10() {
  const auto dir = ts::scratch_dir("acceptance_json");
  std::vector<std::filesystem::path> wavs;
  const auto& fx = forged_fixtures();
  for (int i = 0; i < kFixtures; ++i) {
    wavs.push_back(dir / ("forged_" + std::to_string(i) + ".wav"));
    save_wav(wavs.back().string(), fx[i].forged.audio);
  }
  for (int i = 0; i < 5; ++i) {
    wavs.push_back(dir / ("pristine_" + std::to_string(i) + ".wav"));
    save_wav(wavs.back().string(), synth_speech(12.0, 6100 + i));
  }
  int identical = 0, failed = 0;
  for (const auto& w : wavs) {
    const auto a = dir / "run_a.json", b = dir / "run_b.json";
    const int ca = run_cli("detect " + w.string() + " --seed 1 --json " + a.string());
    const int cb = run_cli("detect " + w.string() + " --seed 1 --json " + b.string());
    if ((ca != 0 && ca != 10) || ca != cb) {
      ++failed;
      continue;
    }
    const auto ja = slurp(a);
    identical += !ja.empty() && ja == slurp(b);
  }
  const int total = static_cast<int>(wavs.size());
  return {identical == total && failed == 0,
          std::to_string(identical) + "/" + std::to_string(total) + " fixtures byte-identical across two CLI runs"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"clean detection", criterion1},        {"false positives", criterion2},
      {"noise robustness", criterion3},       {"attack robustness", criterion4},
      {"matcher oracle equivalence", criterion5}, {"probability model", criterion6},
      {"survival curve shape", criterion7},   {"complexity", criterion8},
      {"encoding round trip", criterion9},    {"determinism", criterion10},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    const auto t0 = Clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("criterion %2zu %-28s %s  %s [%.1f s]\n", i + 1, criteria[i].first, o.pass ? "PASS" : "FAIL",
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
