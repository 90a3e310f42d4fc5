#include "martapprox/log_real.hpp"

#include <stdexcept>
#include <utility>

namespace martapprox {

LogReal operator/(const LogReal& a, const LogReal& b) {
  if (b.sign_ == 0) throw std::domain_error("LogReal: division by zero");
  if (a.sign_ == 0) return {};
  return LogReal(a.sign_ * b.sign_, a.log_mag_ - b.log_mag_);
}

LogReal operator+(const LogReal& a, const LogReal& b) {
  if (a.sign_ == 0) return b;
  if (b.sign_ == 0) return a;
  const LogReal& big = a.log_mag_ >= b.log_mag_ ? a : b;
  const LogReal& small = a.log_mag_ >= b.log_mag_ ? b : a;
  const double ratio = std::exp(small.log_mag_ - big.log_mag_);  // in (0, 1]
  if (big.sign_ == small.sign_) return LogReal(big.sign_, big.log_mag_ + std::log1p(ratio));
  if (ratio == 1.0) return {};
  return LogReal(big.sign_, big.log_mag_ + std::log1p(-ratio));
}

std::partial_ordering operator<=>(const LogReal& a, const LogReal& b) {
  if (a.sign_ != b.sign_) return a.sign_ <=> b.sign_;
  if (a.sign_ == 0) return std::partial_ordering::equivalent;
  const auto mag = a.log_mag_ <=> b.log_mag_;
  return a.sign_ > 0 ? mag : 0 <=> mag;
}

}  // namespace martapprox
