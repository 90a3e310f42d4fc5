#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "martapprox/series.hpp"

namespace martapprox {

/// Receives resolution warnings (non-fatal). The default writes to stderr.
using WarningSink = std::function<void(std::string_view)>;

WarningSink stderr_warnings();

// ---------------------------------------------------------------------------
// Singular inner function exp(-a (1+z)/(1-z))
// ---------------------------------------------------------------------------

/// Taylor coefficients a_0..a_n of exp(-a(1+z)/(1-z)), a > 0.
///
/// The partial sums are A_k = e^{-a} L_k(2a), generated with the Laguerre
/// three-term recurrence on the pre-scaled values; a_k are their first
/// differences. The tail bound is the larger of the envelope estimate
/// (sqrt(2a)/pi) * 2/sqrt(n) and the inner-function deficit 1 - sum a_j^2.
CoefficientSeries singular_inner_coeffs(double a, int n);

/// Explicit coefficients of -a(1+z)/(1-z): (-a, -2a, -2a, ...).
CoefficientSeries singular_exponent_coeffs(double a, int n);

/// pi^{-1/2} (2a)^{1/4} n^{-3/4} cos(2 sqrt(2an) + pi/4), the leading term of
/// the coefficient asymptotics of the singular inner function.
double singular_coeff_main_term(double a, double n);

// ---------------------------------------------------------------------------
// Blaschke products with real zeros
// ---------------------------------------------------------------------------

struct BlaschkeSpec {
  std::vector<double> zeros;
  std::string rule;  // "dyadic", "power(alpha)" or empty for explicit zeros

  /// Validates 0 <= z < 1 for every zero; throws std::invalid_argument.
  explicit BlaschkeSpec(std::vector<double> zeros, std::string rule = {});

  /// z_k = 1 - 2^{-k}, k = 1..count.
  static BlaschkeSpec dyadic(int count);
  /// z_k = 1 - k^{-alpha}, k = 1..count (so z_1 = 0).
  static BlaschkeSpec power(double alpha, int count);
};

/// (z0 - z)/(1 - z0 z) = z0 - sum_{k>=1} (1 - z0^2) z0^{k-1} z^k, truncated.
/// The tail bound is the exact geometric remainder (1 - z0^2) z0^{2n}.
CoefficientSeries blaschke_factor_coeffs(double z0, int n);

/// Taylor coefficients of the finite product over spec.zeros, truncated at n.
/// Each factor is applied as the recurrence y_k - z0 y_{k-1} = z0 x_k - x_{k-1},
/// which equals the Cauchy product with blaschke_factor_coeffs. Emits a warning
/// through `warn` when max(z)^n > 1e-8, i.e. the order does not resolve the
/// slowest geometric tail.
CoefficientSeries blaschke_product_coeffs(const BlaschkeSpec& spec, int n,
                                          const WarningSink& warn = stderr_warnings());

/// True when max(z)^n <= 1e-8.
bool blaschke_order_resolves(const BlaschkeSpec& spec, int n);

/// prod (z_k - r)/(1 - z_k r) evaluated directly, |r| < 1.
double blaschke_eval_radial(const BlaschkeSpec& spec, double r);

/// Factor-group bounds at r = (z_n + z_{n+1})/2 for the dyadic zeros.
struct Prop6Report {
  int n = 0;
  int k_max = 0;
  double r = 0.0;
  double p1 = 0.0;  // prod_{j<n}
  double p2 = 0.0;  // factor j = n
  double p3 = 0.0;  // factor j = n+1
  double p4 = 0.0;  // prod_{n+1<j<=k_max}
  double product = 0.0;         // |B(r)| evaluated directly
  double c_bound = 0.0;         // prod_{k=1}^{60} (1-2^{-k})/(1+2^{-k})
  double value_at_zero = 0.0;   // |B(z_n)|
};

/// prod_{k=1}^{60} (1 - 2^{-k})/(1 + 2^{-k}).
double dyadic_product_constant();

/// Builds the report and verifies product = p1 p2 p3 p4 (1e-10 relative),
/// p2, p3 >= 1/8, p1, p4 >= c_bound, product >= c_bound^2/64 and
/// |B(z_n)| = 0. Throws InvariantViolation on any failure and
/// std::invalid_argument unless 1 <= n <= k_max - 1.
Prop6Report prop6_check(int n, int k_max);

struct DecayDiagnostics {
  double sup = 0.0;  // max_{1<=n<=N} n |a_n|
  int argmax = 0;    // 0 when N == 0
};

DecayDiagnostics coefficient_decay_diagnostics(const CoefficientSeries& s);

/// sum_{j<=N} a_j r^j by Horner.
double horner_eval(const CoefficientSeries& s, double r);

}  // namespace martapprox
