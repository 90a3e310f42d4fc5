#include "martapprox/linear_process.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>

#include "martapprox/rng.hpp"

namespace martapprox {

LinearProcessSpec::LinearProcessSpec(CoefficientSeries s, Innovation kind, std::uint64_t sd)
    : series(std::move(s)), innovation(kind), seed(sd) {
  if (!(series.mass() > 0.0)) throw std::invalid_argument("LinearProcessSpec: degenerate series (zero mass)");
}

namespace {

void require_horizon(std::int64_t n, const char* what) {
  if (n <= 0) throw std::invalid_argument(std::string(what) + ": horizon must be >= 1");
}

std::vector<double> partial_sums(const CoefficientSeries& s) {
  const auto a = s.coeffs();
  std::vector<double> A(a.size());
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) A[j] = (acc += a[j]);
  return A;
}

}  // namespace

std::vector<double> sum_coefficients(const CoefficientSeries& series, std::int64_t n) {
  require_horizon(n, "sum_coefficients");
  const std::vector<double> A = partial_sums(series);
  const std::int64_t N = series.order();
  auto capped = [&](std::int64_t m) { return A[static_cast<std::size_t>(std::min(m, N))]; };

  std::vector<double> b(static_cast<std::size_t>(N + n));
  for (std::int64_t u = -N; u <= n - 1; ++u) {
    double v = capped(n - 1 - u);
    if (u < 0) v -= capped(-u - 1);
    b[static_cast<std::size_t>(u + N)] = v;
  }
  return b;
}

double exact_sn_norm_sq(const CoefficientSeries& series, std::int64_t n) {
  require_horizon(n, "exact_sn_norm_sq");
  double sum = 0.0;
  for (double b : sum_coefficients(series, n)) sum += b * b;
  return sum;
}

GapReport gap(const CoefficientSeries& series, double c, std::int64_t n, SnNorm source) {
  require_horizon(n, "gap");
  const std::vector<double> A = partial_sums(series);
  const std::int64_t N = series.order();
  if (source == SnNorm::orthonormal && n - 1 > N)
    throw std::invalid_argument("gap: orthonormal source needs n - 1 <= order");

  GapReport rep;
  rep.n = n;
  rep.c = c;
  rep.source = source;
  rep.truncated_sn_norm_sq = exact_sn_norm_sq(series, n);
  rep.sn_norm_sq = source == SnNorm::orthonormal ? static_cast<double>(n) : rep.truncated_sn_norm_sq;
  double cross = 0.0;
  for (std::int64_t k = 0; k < n; ++k) cross += A[static_cast<std::size_t>(std::min(k, N))];
  rep.cross = cross;

  const double nd = static_cast<double>(n);
  rep.c_star = cross / nd;
  rep.gap_sq = rep.sn_norm_sq / nd + c * c - 2.0 * c * cross / nd;
  rep.min_gap_sq = rep.sn_norm_sq / nd - rep.c_star * rep.c_star;
  rep.horizon_exceeds_order = n - 1 > N;
  return rep;
}

GapReport best_scalar_gap(const CoefficientSeries& series, std::int64_t n, SnNorm source) {
  GapReport probe = gap(series, 0.0, n, source);
  return gap(series, probe.c_star, n, source);
}

SamplePath simulate_path(const LinearProcessSpec& spec, std::int64_t n, std::int64_t burn_in,
                         std::uint64_t replicate) {
  require_horizon(n, "simulate_path");
  if (burn_in < 0) throw std::invalid_argument("simulate_path: negative burn-in");

  Engine eng = make_engine(spec.seed, replicate);
  std::vector<double> e(static_cast<std::size_t>(burn_in + n));
  if (spec.innovation == Innovation::normal) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : e) v = normal(eng);
  } else {
    for (double& v : e) v = rademacher(eng);
  }

  const auto a = spec.series.coeffs();
  const std::int64_t N = spec.series.order();
  SamplePath path;
  path.short_burn_in = burn_in < N;
  path.values.resize(static_cast<std::size_t>(n));
  for (std::int64_t k = 0; k < n; ++k) {
    const std::int64_t pos = k + burn_in;  // index of e_k in the stream
    const std::int64_t terms = std::min(N, pos);
    double x = 0.0;
    for (std::int64_t i = 0; i <= terms; ++i)
      x += a[static_cast<std::size_t>(i)] * e[static_cast<std::size_t>(pos - i)];
    path.values[static_cast<std::size_t>(k)] = x;
  }
  return path;
}

double empirical_autocovariance(std::span<const double> path, std::int64_t lag) {
  const auto n = static_cast<std::int64_t>(path.size());
  if (lag < 0 || lag >= n) throw std::invalid_argument("empirical_autocovariance: lag outside [0, length)");
  double mean = 0.0;
  for (double x : path) mean += x;
  mean /= static_cast<double>(n);
  double acc = 0.0;
  for (std::int64_t t = 0; t + lag < n; ++t)
    acc += (path[static_cast<std::size_t>(t)] - mean) * (path[static_cast<std::size_t>(t + lag)] - mean);
  return acc / static_cast<double>(n);
}

double monte_carlo_sn_variance(const LinearProcessSpec& spec, std::int64_t n, int replicates) {
  if (replicates < 1) throw std::invalid_argument("monte_carlo_sn_variance: need at least one replicate");
  double acc = 0.0;
  for (int r = 0; r < replicates; ++r) {
    const SamplePath p = simulate_path(spec, n, spec.series.order(), static_cast<std::uint64_t>(r));
    double s = 0.0;
    for (double x : p.values) s += x;
    acc += s * s / static_cast<double>(n);
  }
  return acc / replicates;
}

}  // namespace martapprox
