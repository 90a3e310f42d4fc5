#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "martapprox/log_real.hpp"

namespace martapprox {

// Process f = sum_k p_k [rho_k e_k - (1 + rho_k) U^{-phi(k)} e_k], where e_k
// takes the values -q_k, 0, +q_k with probabilities 1/(2q_k^2),
// 1 - 1/q_k^2, 1/(2q_k^2). The construction gives ||S_n(f - m')|| <= 1
// for every n under one filtration, and ||S_n(f - m*)|| >= b_n sqrt(n) at
// n = phi(j) under the natural one. Upper bounds a_n are normalized to 1;
// a general non-decreasing a_n is reached by scaling every p_k by a_1.

/// Target lower-bound sequence b_n, evaluable at any n >= 1.
using BoundSequence = std::function<double(std::int64_t)>;

/// b_n = 1 / sqrt(ln(n + 3)).
BoundSequence inv_sqrt_log_bound();
/// b_n = 1 / ln(n + 3).
BoundSequence inv_log_bound();

/// Level-indexed vectors hold level k at index k - 1.
struct Prop3Params {
  int K = 0;
  std::vector<double> p;             // 1/k
  std::vector<double> rho;           // 1/sqrt(8 phi(k))
  std::vector<std::int64_t> phi;     // strictly increasing, phi(1) >= 13
  std::vector<double> log_q;         // ln q_k, q_1 = 1
  std::vector<double> log_r;         // ln r_n, r_n = 3 sum_{k<=n} p_k q_k
  std::vector<double> log_s;         // ln s_n, s_n = 10 r_{n-1} / rho_n; s_1 = 0
  BoundSequence b;
  double a_norm = 1.0;
  std::int64_t phi_search_cap = 1'000'000;

  LogReal q(int k) const { return LogReal::from_log(log_q.at(k - 1)); }
  /// r_0 = 0.
  LogReal r(int n) const { return n == 0 ? LogReal{} : LogReal::from_log(log_r.at(n - 1)); }
  LogReal s(int n) const { return LogReal::from_log(log_s.at(n - 1), n == 1 ? 0 : 1); }
};

/// sum_{k>j} 1/k^2.
double inverse_square_tail(int j);

/// Builds the parameters for levels 1..K. phi(j) is the smallest integer
/// above phi(j-1) (phi(0) = 12) with 2 sum_{k>j} p_k^2 > b(phi(j))^2.
/// Throws std::invalid_argument for K < 2 or a non-positive b, and
/// std::runtime_error if the search passes `phi_search_cap`.
Prop3Params synthesize_params(const BoundSequence& b, int K, std::int64_t phi_search_cap = 1'000'000);

/// Throws InvariantViolation naming the first parameter invariant that fails.
void check_params(const Prop3Params& params);

struct NormBreakdown {
  double first_sum = 0.0;   // 2 sum_{phi(k)<=n, k<=K} (...) phi(k)
  double second_sum = 0.0;  // 2n sum_{phi(k)>n, k<=K} (...)
  double tail_lower = 0.0;  // bounds on the levels k > K
  double tail_upper = 0.0;
  double total = 0.0;
};

/// ||S_n(f - m')||^2 with m' = -sum p_k U^{-phi(k)} e_k. `total` adds the
/// upper tail bound, so it bounds the infinite-level value from above.
NormBreakdown norm_m_prime_sq(const Prop3Params& params, std::int64_t n);

/// ||S_n(f - m*)||^2 with m* = -sum p_k e_k. `total` adds the lower tail
/// bound, so it bounds the infinite-level value from below.
NormBreakdown norm_m_star_sq(const Prop3Params& params, std::int64_t n);

/// Level-k contribution 2 p_k^2 rho_k^2 min(phi(k), n) to norm_m_prime_sq.
double m_prime_level_term(const Prop3Params& params, int k, std::int64_t n);

/// One level's outcome as multiples of q_k: x for e_k, y for U^{-phi(k)} e_k.
struct LevelOutcome {
  int x = 0;
  int y = 0;
  friend bool operator==(const LevelOutcome&, const LevelOutcome&) = default;
};

/// The nine intervals (center - half_width, center + half_width) that
/// identify the level's outcome from f_level. For level n >= 2 the centers
/// are {s, -10r, -s-20r, s+10r, 0, -s-10r, s+20r, 10r, -s} with s = s_n,
/// r = r_{n-1}, listed for (x, y) in lexicographic order over {-1, 0, 1}^2,
/// and half_width = r_{n-1}. Level 1 uses the centers
/// rho_1 x - (1 + rho_1) y with half-width rho_1 / 2.
struct DecodingTable {
  int level = 0;
  std::array<LogReal, 9> centers;
  std::array<LevelOutcome, 9> outcomes;
  LogReal half_width;
};

/// Verifies pairwise disjointness and center = p (rho x - (1+rho) y) q
/// (relative 1e-12); throws InvariantViolation otherwise.
DecodingTable decoding_table(const Prop3Params& params, int level);

/// One draw of every level's pair; index k - 1 holds level k.
using SparseSample = std::vector<LevelOutcome>;

enum class DecodeStatus { recovered, boundary_hit, no_interval };

struct DecodeResult {
  DecodeStatus status = DecodeStatus::no_interval;
  SparseSample outcomes;
  bool extended_precision = false;
};

/// f_K for the sample in double precision.
double encode_value(const Prop3Params& params, const SparseSample& sample);

/// Top-down interval decoding of a double value.
DecodeResult decode_value(const Prop3Params& params, double value);

/// True when encoding and decoding the sample in double precision keeps the
/// accumulated rounding below a quarter of the level-1 half-width.
bool resolvable_in_double(const Prop3Params& params, const SparseSample& sample);

/// Encodes f_K and decodes it, in double when resolvable_in_double holds and
/// otherwise in 256-digit binary floating point. Throws std::range_error if
/// even that does not cover the dynamic range.
DecodeResult decode_sample(const Prop3Params& params, const SparseSample& sample);

enum class OccupancyLaw {
  natural,  // the three-point law of e_k
  uniform,  // every (x, y) in {-1, 0, 1}^2 equally likely: stresses the decoder
};

struct DecodeReport {
  std::int64_t samples = 0;
  std::int64_t recovered = 0;
  std::int64_t failures = 0;
  std::int64_t boundary_hits = 0;
  std::int64_t decoded_in_double = 0;
  std::int64_t decoded_extended = 0;
  std::vector<std::int64_t> top_level_counts;  // index k: highest nonzero level k (0 = all zero)
  std::vector<int> silent_levels;              // levels whose log-probability is below -40
  double truncation_error = 0.0;               // P(some silent level fires)
};

/// Sample i draws from substream derive_seed(seed, i).
DecodeReport simulate_and_decode(const Prop3Params& params, std::int64_t samples, std::uint64_t seed,
                                 OccupancyLaw law = OccupancyLaw::natural);

/// Sample variance of S_n(f - m') over `replicates` paths of the level-1-only
/// truncation, built from an explicit e_1 stream (q_1 = 1, so e_1 = +-1).
double level1_gap_variance_mc(const Prop3Params& params, std::int64_t n, int replicates, std::uint64_t seed);

}  // namespace martapprox
