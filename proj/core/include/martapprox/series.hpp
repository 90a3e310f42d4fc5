#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace martapprox {

/// Truncated real Taylor coefficients a_0..a_N of an analytic function.
///
/// The truncation order N is always explicit: coefficients beyond N are
/// unknown, never implicitly zero. `tail_mass_bound`, when set, is an upper
/// bound on the discarded mass sum_{j>N} a_j^2 supplied by whoever produced
/// the series.
class CoefficientSeries {
 public:
  /// Throws std::invalid_argument on an empty vector, a non-finite entry,
  /// or a negative / non-finite tail bound.
  explicit CoefficientSeries(std::vector<double> coeffs,
                             std::optional<double> tail_mass_bound = std::nullopt);

  /// (1, 0, ..., 0) with the given order.
  static CoefficientSeries delta(int order);

  int order() const noexcept { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const double> coeffs() const noexcept { return coeffs_; }
  double operator[](std::size_t j) const { return coeffs_[j]; }
  std::optional<double> tail_mass_bound() const noexcept { return tail_mass_bound_; }

  /// sum_{j<=N} a_j^2.
  double mass() const noexcept;

  /// Same coefficients with a different tail annotation.
  CoefficientSeries with_tail_mass_bound(std::optional<double> bound) const;

 private:
  std::vector<double> coeffs_;
  std::optional<double> tail_mass_bound_;
};

/// Partial sums A_n = a_0 + ... + a_n and Cesaro means
/// M_n = (A_0 + ... + A_{n-1}) / n.
struct CesaroProfile {
  std::vector<double> partial_sums;  // A_0..A_N
  std::vector<double> cesaro_means;  // M_1..M_N stored at index n-1

  /// M_n for 1 <= n <= N.
  double mean(std::size_t n) const { return cesaro_means.at(n - 1); }
};

/// c_k = sum_{j<=k} a_j b_{k-j} for k <= n. Requires 0 <= n <= min order.
CoefficientSeries cauchy_product(const CoefficientSeries& lhs, const CoefficientSeries& rhs, int n);

CesaroProfile cesaro_profile(const CoefficientSeries& s);

/// sum_{j=0}^{N-k} a_j a_{j+k}. Requires 0 <= k <= order.
double autocorrelation(const CoefficientSeries& s, int lag);

/// Coefficients of exp(g) up to degree n via n f_n = sum_{k=1}^n k g_k f_{n-k}.
/// Requires 0 <= n <= g.order(); throws std::range_error if exp(g_0)
/// overflows.
CoefficientSeries exp_series(const CoefficientSeries& g, int n);

}  // namespace martapprox
