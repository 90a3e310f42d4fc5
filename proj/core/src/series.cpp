#include "martapprox/series.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace martapprox {

namespace {

void require_order(int n, const char* what) {
  if (n < 0) throw std::invalid_argument(std::string(what) + ": negative truncation order");
}

}  // namespace

CoefficientSeries::CoefficientSeries(std::vector<double> coeffs, std::optional<double> tail_mass_bound)
    : coeffs_(std::move(coeffs)), tail_mass_bound_(tail_mass_bound) {
  if (coeffs_.empty()) throw std::invalid_argument("CoefficientSeries: at least a_0 is required");
  for (std::size_t j = 0; j < coeffs_.size(); ++j) {
    if (!std::isfinite(coeffs_[j]))
      throw std::invalid_argument("CoefficientSeries: non-finite coefficient at index " + std::to_string(j));
  }
  if (tail_mass_bound_ && !(std::isfinite(*tail_mass_bound_) && *tail_mass_bound_ >= 0.0))
    throw std::invalid_argument("CoefficientSeries: tail_mass_bound must be finite and >= 0");
}

CoefficientSeries CoefficientSeries::delta(int order) {
  require_order(order, "delta");
  std::vector<double> c(static_cast<std::size_t>(order) + 1, 0.0);
  c[0] = 1.0;
  return CoefficientSeries(std::move(c), 0.0);
}

double CoefficientSeries::mass() const noexcept {
  double sum = 0.0;
  for (double a : coeffs_) sum += a * a;
  return sum;
}

CoefficientSeries CoefficientSeries::with_tail_mass_bound(std::optional<double> bound) const {
  return CoefficientSeries(coeffs_, bound);
}

CoefficientSeries cauchy_product(const CoefficientSeries& lhs, const CoefficientSeries& rhs, int n) {
  require_order(n, "cauchy_product");
  if (n > std::min(lhs.order(), rhs.order()))
    throw std::invalid_argument("cauchy_product: order " + std::to_string(n) +
                                " exceeds the stored order of an operand");
  const auto a = lhs.coeffs();
  const auto b = rhs.coeffs();
  std::vector<double> c(static_cast<std::size_t>(n) + 1, 0.0);
  for (std::size_t k = 0; k < c.size(); ++k) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= k; ++j) acc += a[j] * b[k - j];
    c[k] = acc;
  }
  return CoefficientSeries(std::move(c));
}

CesaroProfile cesaro_profile(const CoefficientSeries& s) {
  const auto a = s.coeffs();
  CesaroProfile out;
  out.partial_sums.resize(a.size());
  out.cesaro_means.resize(a.size() - 1);

  // Neumaier-compensated running sums; N can reach 10^5 and A_n drifts to 0.
  double sum = 0.0, comp = 0.0;
  auto add = [](double& s, double& c, double x) {
    const double t = s + x;
    if (std::abs(s) >= std::abs(x))
      c += (s - t) + x;
    else
      c += (x - t) + s;
    s = t;
  };
  for (std::size_t n = 0; n < a.size(); ++n) {
    add(sum, comp, a[n]);
    out.partial_sums[n] = sum + comp;
  }
  double acc = 0.0, acc_comp = 0.0;
  for (std::size_t n = 1; n < a.size(); ++n) {
    add(acc, acc_comp, out.partial_sums[n - 1]);
    out.cesaro_means[n - 1] = (acc + acc_comp) / static_cast<double>(n);
  }
  return out;
}

double autocorrelation(const CoefficientSeries& s, int lag) {
  if (lag < 0 || lag > s.order())
    throw std::invalid_argument("autocorrelation: lag " + std::to_string(lag) + " outside [0, order]");
  const auto a = s.coeffs();
  const std::size_t k = static_cast<std::size_t>(lag);
  double sum = 0.0;
  for (std::size_t j = 0; j + k < a.size(); ++j) sum += a[j] * a[j + k];
  return sum;
}

CoefficientSeries exp_series(const CoefficientSeries& g, int n) {
  require_order(n, "exp_series");
  if (n > g.order())
    throw std::invalid_argument("exp_series: order " + std::to_string(n) + " exceeds the stored order of g");
  const auto gc = g.coeffs();
  const double f0 = std::exp(gc[0]);
  if (!std::isfinite(f0)) throw std::range_error("exp_series: exp(g_0) overflows");

  std::vector<double> f(static_cast<std::size_t>(n) + 1, 0.0);
  f[0] = f0;
  for (std::size_t m = 1; m < f.size(); ++m) {
    double acc = 0.0;
    for (std::size_t k = 1; k <= m; ++k) acc += static_cast<double>(k) * gc[k] * f[m - k];
    f[m] = acc / static_cast<double>(m);
    if (!std::isfinite(f[m])) throw std::range_error("exp_series: coefficient overflow at degree " + std::to_string(m));
  }
  return CoefficientSeries(std::move(f));
}

}  // namespace martapprox
