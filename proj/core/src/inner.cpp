#include "martapprox/inner.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "martapprox/errors.hpp"

namespace martapprox {

WarningSink stderr_warnings() {
  return [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
}

CoefficientSeries singular_inner_coeffs(double a, int n) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument("singular_inner_coeffs: a must be positive");
  if (n < 0) throw std::invalid_argument("singular_inner_coeffs: negative truncation order");

  const double x = 2.0 * a;
  const auto len = static_cast<std::size_t>(n) + 1;
  std::vector<double> coeffs(len);

  // A_k = e^{-a} L_k(2a); the scale is folded into the initial values.
  double prev = 0.0;
  double cur = std::exp(-a);
  coeffs[0] = cur;
  for (std::size_t k = 0; k + 1 < len; ++k) {
    const double kd = static_cast<double>(k);
    const double next = ((2.0 * kd + 1.0 - x) * cur - kd * prev) / (kd + 1.0);
    coeffs[k + 1] = next - cur;
    prev = cur;
    cur = next;
  }

  CoefficientSeries s(std::move(coeffs));
  const double deficit = std::max(0.0, 1.0 - s.mass());
  double tail = deficit;
  if (n >= 1) {
    const double envelope = std::sqrt(2.0 * a) / std::numbers::pi * 2.0 / std::sqrt(static_cast<double>(n));
    tail = std::max(tail, envelope);
  }
  return s.with_tail_mass_bound(std::min(tail, 1.0));
}

CoefficientSeries singular_exponent_coeffs(double a, int n) {
  if (n < 0) throw std::invalid_argument("singular_exponent_coeffs: negative truncation order");
  std::vector<double> g(static_cast<std::size_t>(n) + 1, -2.0 * a);
  g[0] = -a;
  return CoefficientSeries(std::move(g));
}

double singular_coeff_main_term(double a, double n) {
  using std::numbers::pi;
  return std::pow(pi, -0.5) * std::pow(2.0 * a, 0.25) * std::pow(n, -0.75) *
         std::cos(2.0 * std::sqrt(2.0 * a * n) + pi / 4.0);
}

BlaschkeSpec::BlaschkeSpec(std::vector<double> z, std::string r) : zeros(std::move(z)), rule(std::move(r)) {
  for (double v : zeros) {
    if (!(v >= 0.0 && v < 1.0)) {
      std::ostringstream os;
      os << "BlaschkeSpec: zero " << v << " outside [0, 1)";
      throw std::invalid_argument(os.str());
    }
  }
}

BlaschkeSpec BlaschkeSpec::dyadic(int count) {
  if (count < 1) throw std::invalid_argument("BlaschkeSpec::dyadic: count must be >= 1");
  std::vector<double> z;
  z.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) z.push_back(1.0 - std::ldexp(1.0, -k));
  return BlaschkeSpec(std::move(z), "dyadic");
}

BlaschkeSpec BlaschkeSpec::power(double alpha, int count) {
  if (count < 1) throw std::invalid_argument("BlaschkeSpec::power: count must be >= 1");
  if (!(alpha > 1.0)) throw std::invalid_argument("BlaschkeSpec::power: alpha must exceed 1");
  std::vector<double> z;
  z.reserve(static_cast<std::size_t>(count));
  for (int k = 1; k <= count; ++k) z.push_back(1.0 - std::pow(static_cast<double>(k), -alpha));
  std::ostringstream name;
  name << "power(" << alpha << ")";
  return BlaschkeSpec(std::move(z), name.str());
}

CoefficientSeries blaschke_factor_coeffs(double z0, int n) {
  if (!(z0 >= 0.0 && z0 < 1.0)) throw std::invalid_argument("blaschke_factor_coeffs: z0 outside [0, 1)");
  if (n < 0) throw std::invalid_argument("blaschke_factor_coeffs: negative truncation order");
  std::vector<double> c(static_cast<std::size_t>(n) + 1);
  c[0] = z0;
  const double scale = 1.0 - z0 * z0;
  double power = 1.0;  // z0^{k-1}
  for (std::size_t k = 1; k < c.size(); ++k) {
    c[k] = -scale * power;
    power *= z0;
  }
  // power == z0^n here.
  return CoefficientSeries(std::move(c), scale * power * power);
}

bool blaschke_order_resolves(const BlaschkeSpec& spec, int n) {
  if (spec.zeros.empty()) return true;
  const double zmax = *std::max_element(spec.zeros.begin(), spec.zeros.end());
  return std::pow(zmax, static_cast<double>(n)) <= 1e-8;
}

CoefficientSeries blaschke_product_coeffs(const BlaschkeSpec& spec, int n, const WarningSink& warn) {
  if (spec.zeros.empty()) throw std::invalid_argument("blaschke_product_coeffs: no zeros");
  if (n < 0) throw std::invalid_argument("blaschke_product_coeffs: negative truncation order");
  if (!blaschke_order_resolves(spec, n) && warn) {
    std::ostringstream os;
    os << "blaschke_product_coeffs: order " << n << " leaves max(z)^n > 1e-8; "
       << "the slowest factor tail is not resolved";
    warn(os.str());
  }

  std::vector<double> y(static_cast<std::size_t>(n) + 1, 0.0);
  y[0] = 1.0;
  std::vector<double> x(y.size());
  for (double z0 : spec.zeros) {
    x.swap(y);
    // y = x * (z0 - z)/(1 - z0 z)  <=>  y_k - z0 y_{k-1} = z0 x_k - x_{k-1}
    y[0] = z0 * x[0];
    for (std::size_t k = 1; k < y.size(); ++k) y[k] = z0 * y[k - 1] + z0 * x[k] - x[k - 1];
  }
  CoefficientSeries s(std::move(y));
  return s.with_tail_mass_bound(std::max(0.0, 1.0 - s.mass()));
}

double blaschke_eval_radial(const BlaschkeSpec& spec, double r) {
  if (!(std::abs(r) < 1.0)) throw std::invalid_argument("blaschke_eval_radial: |r| must be < 1");
  double value = 1.0;
  for (double z : spec.zeros) value *= (z - r) / (1.0 - z * r);
  return value;
}

double dyadic_product_constant() {
  double c = 1.0;
  for (int k = 1; k <= 60; ++k) {
    const double t = std::ldexp(1.0, -k);
    c *= (1.0 - t) / (1.0 + t);
  }
  return c;
}

Prop6Report prop6_check(int n, int k_max) {
  if (n < 1 || n > k_max - 1)
    throw std::invalid_argument("prop6_check: need 1 <= n <= k_max - 1");

  const BlaschkeSpec spec = BlaschkeSpec::dyadic(k_max);
  const auto& z = spec.zeros;  // z[j-1] = z_j
  auto zero = [&](int j) { return z[static_cast<std::size_t>(j - 1)]; };

  Prop6Report rep;
  rep.n = n;
  rep.k_max = k_max;
  rep.r = 0.5 * (zero(n) + zero(n + 1));
  const double r = rep.r;

  rep.p1 = 1.0;
  for (int j = 1; j < n; ++j) rep.p1 *= (r - zero(j)) / (1.0 - zero(j) * r);
  rep.p2 = (r - zero(n)) / (1.0 - zero(n) * r);
  rep.p3 = (zero(n + 1) - r) / (1.0 - zero(n + 1) * r);
  rep.p4 = 1.0;
  for (int j = n + 2; j <= k_max; ++j) rep.p4 *= (zero(j) - r) / (1.0 - zero(j) * r);
  rep.product = std::abs(blaschke_eval_radial(spec, r));
  rep.c_bound = dyadic_product_constant();
  rep.value_at_zero = std::abs(blaschke_eval_radial(spec, zero(n)));

  auto fail = [&](const std::string& inv, double lhs, double rhs) {
    std::ostringstream os;
    os.precision(17);
    os << "n=" << n << ": " << lhs << " vs " << rhs;
    throw InvariantViolation("inner_functions", inv, os.str());
  };
  const double factored = rep.p1 * rep.p2 * rep.p3 * rep.p4;
  if (std::abs(rep.product - factored) > 1e-10 * std::abs(rep.product))
    fail("product = p1 p2 p3 p4", rep.product, factored);
  if (!(rep.p2 >= 0.125)) fail("p2 >= 1/8", rep.p2, 0.125);
  if (!(rep.p3 >= 0.125)) fail("p3 >= 1/8", rep.p3, 0.125);
  if (!(rep.p1 >= rep.c_bound)) fail("p1 >= c", rep.p1, rep.c_bound);
  if (!(rep.p4 >= rep.c_bound)) fail("p4 >= c", rep.p4, rep.c_bound);
  if (!(rep.product >= rep.c_bound * rep.c_bound / 64.0))
    fail("|B(r)| >= c^2/64", rep.product, rep.c_bound * rep.c_bound / 64.0);
  if (rep.value_at_zero != 0.0) fail("|B(z_n)| = 0", rep.value_at_zero, 0.0);
  return rep;
}

DecayDiagnostics coefficient_decay_diagnostics(const CoefficientSeries& s) {
  DecayDiagnostics d;
  const auto a = s.coeffs();
  for (std::size_t n = 1; n < a.size(); ++n) {
    const double v = static_cast<double>(n) * std::abs(a[n]);
    if (v > d.sup) {
      d.sup = v;
      d.argmax = static_cast<int>(n);
    }
  }
  return d;
}

double horner_eval(const CoefficientSeries& s, double r) {
  const auto a = s.coeffs();
  double acc = 0.0;
  for (auto it = a.rbegin(); it != a.rend(); ++it) acc = acc * r + *it;
  return acc;
}

}  // namespace martapprox
