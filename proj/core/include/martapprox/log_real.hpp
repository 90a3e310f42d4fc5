#pragma once

#include <cmath>
#include <compare>
#include <limits>

namespace martapprox {

/// A real number stored as sign * exp(log_mag). Holds magnitudes far outside
/// the double range; arithmetic is exact up to rounding of the logarithms.
class LogReal {
 public:
  constexpr LogReal() = default;

  static LogReal from_log(double log_mag, int sign = 1) {
    return sign == 0 ? LogReal{} : LogReal(sign > 0 ? 1 : -1, log_mag);
  }
  static LogReal from_double(double x) {
    if (x == 0.0) return {};
    return LogReal(x > 0.0 ? 1 : -1, std::log(std::abs(x)));
  }

  int sign() const noexcept { return sign_; }
  /// -inf for zero.
  double log_mag() const noexcept { return sign_ == 0 ? -std::numeric_limits<double>::infinity() : log_mag_; }
  /// May overflow to +-inf or underflow to 0.
  double to_double() const noexcept { return sign_ == 0 ? 0.0 : sign_ * std::exp(log_mag_); }

  LogReal operator-() const noexcept { return sign_ == 0 ? *this : LogReal(-sign_, log_mag_); }
  LogReal abs() const noexcept { return sign_ == 0 ? *this : LogReal(1, log_mag_); }

  friend LogReal operator*(const LogReal& a, const LogReal& b) {
    if (a.sign_ == 0 || b.sign_ == 0) return {};
    return LogReal(a.sign_ * b.sign_, a.log_mag_ + b.log_mag_);
  }
  friend LogReal operator/(const LogReal& a, const LogReal& b);
  friend LogReal operator+(const LogReal& a, const LogReal& b);
  friend LogReal operator-(const LogReal& a, const LogReal& b) { return a + (-b); }

  friend std::partial_ordering operator<=>(const LogReal& a, const LogReal& b);
  friend bool operator==(const LogReal& a, const LogReal& b) { return (a <=> b) == 0; }

 private:
  constexpr LogReal(int sign, double log_mag) : sign_(sign), log_mag_(log_mag) {}

  int sign_ = 0;
  double log_mag_ = 0.0;
};

}  // namespace martapprox
