#pragma once

// Detection-probability model for duplicated feature tensors: peak-state
// probabilities, the binomial-tail pair match probability for one or both
// copies attacked, the probability that at least one matching pair exists,
// and a Monte-Carlo simulator of the same survival process.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "cmfd/error.hpp"

namespace cmfd {

enum class Scenario { both_attacked, one_attacked };

inline const char* to_string(Scenario s) { return s == Scenario::both_attacked ? "both" : "one"; }

inline Scenario parse_scenario(const std::string& s) {
  if (s == "both") return Scenario::both_attacked;
  if (s == "one") return Scenario::one_attacked;
  throw Error(ErrorCode::parameter, "unknown scenario '" + s + "' (expected both or one)");
}

struct SurvivalModel {
  double p = 0.5;  // survival probability of a single peak
  int F = 20;      // fan-out
  int k = 3;       // at least k surviving satellite pairs
  double K = 30.0; // peaks per second
  double T = 0.5;  // duplicate duration, seconds

  void validate() const {
    if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::parameter, "p must lie in [0, 1]");
    if (F < 1 || F > 64) throw Error(ErrorCode::parameter, "F must lie in [1, 64]");
    if (k < 0 || k > F) throw Error(ErrorCode::parameter, "k must lie in [0, F]");
    if (!(K >= 0.0)) throw Error(ErrorCode::parameter, "K must be non-negative");
    if (!(T >= 0.0)) throw Error(ErrorCode::parameter, "T must be non-negative");
  }
};

struct PairStates {
  double matched;       // both peaks survive
  double one_lost;      // exactly one survives
  double both_lost;
};

inline PairStates pair_state_probs(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::parameter, "p must lie in [0, 1]");
  const double q = 1.0 - p;
  return {p * p, 2.0 * p * q, q * q};
}

/// P(X >= k) for X ~ Binomial(n, s). Terms are summed directly (all
/// non-negative) in extended precision.
inline double binomial_tail(int n, int k, double s) {
  if (n < 0 || n > 64) throw Error(ErrorCode::parameter, "binomial n must lie in [0, 64]");
  if (!(s >= 0.0 && s <= 1.0)) throw Error(ErrorCode::parameter, "success probability must lie in [0, 1]");
  if (k <= 0) return 1.0;
  if (k > n) return 0.0;
  const long double ps = s;
  const long double qs = 1.0L - ps;
  long double c = 1.0L;  // C(n, j), exact below 2^64
  for (int j = 1; j <= k; ++j) c = c * (n - j + 1) / j;
  long double sum = 0.0L;
  for (int j = k; j <= n; ++j) {
    sum += c * std::pow(ps, j) * std::pow(qs, n - j);
    c = c * (n - j) / (j + 1);
  }
  return static_cast<double>(std::min(sum, 1.0L));
}

/// Both copies attacked: anchors must both survive (p^2) and at least k of
/// the F satellite pairs must survive on both sides (each p^2).
inline double pair_match_prob_both_attacked(const SurvivalModel& m) {
  m.validate();
  const double p2 = m.p * m.p;
  return p2 * binomial_tail(m.F, m.k, p2);
}

/// Only the duplicate is attacked: one anchor and each satellite survive
/// with probability p.
inline double pair_match_prob_one_attacked(const SurvivalModel& m) {
  m.validate();
  return m.p * binomial_tail(m.F, m.k, m.p);
}

inline double pair_match_prob(const SurvivalModel& m, Scenario s) {
  return s == Scenario::both_attacked ? pair_match_prob_both_attacked(m) : pair_match_prob_one_attacked(m);
}

/// Expected number of anchor pairs inside the duplicated region.
inline double expected_pairs(const SurvivalModel& m, Scenario s) {
  m.validate();
  return (s == Scenario::both_attacked ? m.p * m.p : m.p) * m.K * m.T;
}

/// 1 - (1 - p_pair)^E(M).
inline double exist_prob(const SurvivalModel& m, double p_pair, Scenario s) {
  if (!(p_pair >= 0.0 && p_pair <= 1.0)) throw Error(ErrorCode::parameter, "p_pair must lie in [0, 1]");
  const double e = expected_pairs(m, s);
  if (e == 0.0 || p_pair == 0.0) return 0.0;
  if (p_pair == 1.0) return 1.0;
  return -std::expm1(e * std::log1p(-p_pair));
}

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Bernoulli(p) from one raw 64-bit draw: success iff draw < p * 2^64.
class Coin {
 public:
  explicit Coin(double p)
      : always_(p >= 1.0),
        threshold_(p <= 0.0 || p >= 1.0 ? 0 : static_cast<std::uint64_t>(std::ldexp(p, 64))) {}
  bool operator()(std::mt19937_64& rng) const { return always_ || rng() < threshold_; }

 private:
  bool always_;
  std::uint64_t threshold_;
};

}  // namespace detail

/// Fraction of simulated anchor pairs whose anchors survive and that keep at
/// least k of F satellite pairs. Every endpoint is an independent draw;
/// in the one-attacked scenario only the attacked side is drawn.
inline double monte_carlo_pair_match(const SurvivalModel& m, Scenario s, std::uint64_t trials, std::uint64_t seed) {
  m.validate();
  if (trials < 1) throw Error(ErrorCode::parameter, "trials must be >= 1");
  std::mt19937_64 rng(seed);
  const detail::Coin coin(m.p);
  const bool both = s == Scenario::both_attacked;
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    const bool anchors = both ? coin(rng) && coin(rng) : coin(rng);
    if (!anchors) continue;
    int surviving = 0;
    for (int i = 0; i < m.F && surviving < m.k && surviving + (m.F - i) >= m.k; ++i) {
      const bool pair = both ? coin(rng) && coin(rng) : coin(rng);
      surviving += pair;
    }
    hits += surviving >= m.k;
  }
  return static_cast<double>(hits) / static_cast<double>(trials);
}

/// Parameter sweep for the curves table. Every combination is emitted in
/// nested order scenario, F, k, K, T, p.
struct CurveGrid {
  std::vector<Scenario> scenarios{Scenario::both_attacked, Scenario::one_attacked};
  std::vector<double> ps;
  std::vector<int> Fs{20};
  std::vector<int> ks{2, 3};
  std::vector<double> Ks{30.0};
  std::vector<double> Ts{0.25, 0.5, 1.0, 2.0};
  std::uint64_t mc_trials = 10000;  // 0 disables the simulated column
  std::uint64_t seed = 1;

  CurveGrid() {
    for (int i = 0; i <= 20; ++i) ps.push_back(i / 20.0);
  }
};

inline void write_curves_csv(std::ostream& os, const CurveGrid& g) {
  os << "scenario,p,F,k,K,T,p_pair_analytic,p_pair_mc,p_exist\n";
  char line[256];
  std::uint64_t index = 0;
  for (Scenario s : g.scenarios)
    for (int F : g.Fs)
      for (int k : g.ks)
        for (double K : g.Ks)
          for (double T : g.Ts)
            for (double p : g.ps) {
              const SurvivalModel m{p, F, k, K, T};
              const double analytic = pair_match_prob(m, s);
              char mc[32] = "";
              if (g.mc_trials)
                std::snprintf(mc, sizeof mc, "%.10g",
                              monte_carlo_pair_match(m, s, g.mc_trials, detail::splitmix64(g.seed ^ index)));
              ++index;
              std::snprintf(line, sizeof line, "%s,%.6g,%d,%d,%.6g,%.6g,%.10g,%s,%.10g\n", to_string(s), p, F, k, K, T,
                            analytic, mc, exist_prob(m, analytic, s));
              os << line;
            }
}

}  // namespace cmfd
