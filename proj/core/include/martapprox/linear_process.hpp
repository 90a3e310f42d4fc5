#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "martapprox/series.hpp"

namespace martapprox {

// X_k = sum_{i>=0} a_i e_{k-i} with orthonormal innovations e. Every exact
// quantity below is a function of the stored coefficients only; coefficients
// beyond the truncation order are treated as zero and that choice is
// surfaced through GapReport::horizon_exceeds_order.

enum class Innovation { normal, rademacher };

struct LinearProcessSpec {
  CoefficientSeries series;
  Innovation innovation = Innovation::normal;
  std::uint64_t seed = 0;

  /// Rejects a series with zero stored mass.
  LinearProcessSpec(CoefficientSeries s, Innovation kind = Innovation::normal, std::uint64_t seed = 0);
};

/// Coefficient of e_u in S_n(X) = X_0 + ... + X_{n-1}, for u = -N..n-1,
/// returned in that order (index 0 is u = -N).
std::vector<double> sum_coefficients(const CoefficientSeries& series, std::int64_t n);

/// ||S_n(X)||_2^2. Throws std::invalid_argument for n <= 0.
double exact_sn_norm_sq(const CoefficientSeries& series, std::int64_t n);

/// Where GapReport takes ||S_n(X)||^2 from. `coefficients` uses the stored
/// (truncated) series. `orthonormal` uses n, the exact value for a process
/// whose full series has autocorrelation delta_{k0} (inner functions); the
/// truncated series is not orthonormal once n^2 is comparable to N.
enum class SnNorm { coefficients, orthonormal };

struct GapReport {
  std::int64_t n = 0;
  double c = 0.0;
  SnNorm source = SnNorm::coefficients;
  double sn_norm_sq = 0.0;    // ||S_n(X)||^2 per `source`
  double truncated_sn_norm_sq = 0.0;  // always from the stored coefficients
  double cross = 0.0;         // E[S_n(X) S_n(e)] = sum_{k<n} A_k
  double gap_sq = 0.0;        // ||S_n(X - c e)||^2 / n
  double c_star = 0.0;        // cross / n
  double min_gap_sq = 0.0;    // sn_norm_sq/n - c_star^2
  bool horizon_exceeds_order = false;  // n - 1 > N: truncation deficit present
};

/// Normalized squared distance of S_n(X) from S_n(c e). The orthonormal
/// source requires n - 1 <= N so that the cross term is exact.
GapReport gap(const CoefficientSeries& series, double c, std::int64_t n, SnNorm source = SnNorm::coefficients);

/// gap() at the minimizing scalar c_star.
GapReport best_scalar_gap(const CoefficientSeries& series, std::int64_t n, SnNorm source = SnNorm::coefficients);

struct SamplePath {
  std::vector<double> values;  // X_0..X_{n-1}
  bool short_burn_in = false;  // burn_in < order: early values miss terms
};

/// Draws innovations e_{-burn_in}..e_{n-1} from a stream seeded by
/// derive_seed(spec.seed, replicate) and convolves them with the series.
SamplePath simulate_path(const LinearProcessSpec& spec, std::int64_t n, std::int64_t burn_in,
                         std::uint64_t replicate = 0);

/// Biased estimator (1/n) sum_{t<n-k} (x_t - mean)(x_{t+k} - mean).
double empirical_autocovariance(std::span<const double> path, std::int64_t lag);

/// Mean of S_n^2 / n over `replicates` independent paths; replicate r uses
/// substream r. Uses burn_in = series order.
double monte_carlo_sn_variance(const LinearProcessSpec& spec, std::int64_t n, int replicates);

}  // namespace martapprox
