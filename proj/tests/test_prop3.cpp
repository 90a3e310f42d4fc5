#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include "martapprox/errors.hpp"
#include "martapprox/prop3.hpp"
#include "martapprox/rng.hpp"

using namespace martapprox;

namespace {

// Independent phi oracle: tail by direct summation to 2e6 terms plus 1/M.
std::vector<std::int64_t> phi_oracle(const BoundSequence& b, int K) {
  std::vector<std::int64_t> phi;
  std::int64_t prev = 12;
  for (int j = 1; j <= K; ++j) {
    double tail = 1.0 / 2e6;
    for (int k = 2000000; k > j; --k) tail += 1.0 / (static_cast<double>(k) * k);
    std::int64_t c = prev + 1;
    while (!(2.0 * tail > b(c) * b(c))) ++c;
    phi.push_back(c);
    prev = c;
  }
  return phi;
}

// ||S_n(e - U^{-lag} e)||^2 for a unit-variance iid stream, by expanding the
// coefficient of every innovation.
double brute_difference_norm(std::int64_t lag, std::int64_t n) {
  std::vector<double> coef(static_cast<std::size_t>(n + lag), 0.0);  // e_{-lag}..e_{n-1}
  for (std::int64_t i = 0; i < n; ++i) {
    coef[static_cast<std::size_t>(i + lag)] += 1.0;
    coef[static_cast<std::size_t>(i)] -= 1.0;
  }
  double s = 0.0;
  for (double c : coef) s += c * c;
  return s;
}

SparseSample zeros(int K) { return SparseSample(static_cast<std::size_t>(K)); }

}  // namespace

TEST_CASE("inverse square tail") {
  CHECK(inverse_square_tail(0) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0).epsilon(1e-14));
  CHECK(inverse_square_tail(1) == doctest::Approx(std::numbers::pi * std::numbers::pi / 6.0 - 1.0).epsilon(1e-14));
  CHECK(2.0 * inverse_square_tail(1) == doctest::Approx(1.2899).epsilon(1e-4));
}

TEST_CASE("synthesize_params: first levels") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 8);
  CHECK(P.phi[0] == 13);
  CHECK(P.rho[0] == doctest::Approx(1.0 / std::sqrt(104.0)).epsilon(1e-15));
  CHECK(P.rho[0] < 0.1);
  CHECK(P.log_q[0] == 0.0);
  CHECK(std::exp(std::log(P.rho[1]) + std::log(P.p[1]) + P.log_q[1]) == doctest::Approx(30.0).epsilon(1e-12));
  for (int k = 1; k <= 8; ++k) CHECK(P.p[static_cast<std::size_t>(k - 1)] == 1.0 / k);
  CHECK(P.phi == phi_oracle(inv_sqrt_log_bound(), 8));
  CHECK(P.s(1).sign() == 0);
  CHECK(P.r(0).sign() == 0);
}

TEST_CASE("synthesize_params: invariants up to K = 16") {
  for (int K = 2; K <= 16; ++K) {
    const auto P = synthesize_params(inv_sqrt_log_bound(), K);
    CHECK_NOTHROW(check_params(P));
    CHECK(P.phi.size() == static_cast<std::size_t>(K));
  }
  const auto P = synthesize_params(inv_log_bound(), 6);
  CHECK_NOTHROW(check_params(P));
  CHECK(P.phi == phi_oracle(inv_log_bound(), 6));
}

TEST_CASE("synthesize_params: errors") {
  CHECK_THROWS_AS(synthesize_params(inv_sqrt_log_bound(), 1), std::invalid_argument);
  const BoundSequence flat = [](std::int64_t) { return 0.9; };
  CHECK_THROWS_AS(synthesize_params(flat, 4, 1000), std::runtime_error);
  const BoundSequence negative = [](std::int64_t) { return -1.0; };
  CHECK_THROWS_AS(synthesize_params(negative, 3), std::invalid_argument);

  auto P = synthesize_params(inv_sqrt_log_bound(), 4);
  P.log_q[2] += 1e-6;
  CHECK_THROWS_AS(check_params(P), InvariantViolation);
}

TEST_CASE("norm formulas match the brute-force difference norm") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 6);
  for (std::int64_t n : {1, 5, 13, 14, 20, 64, 200}) {
    double first = 0.0, second = 0.0, star_first = 0.0, star_second = 0.0;
    for (int k = 1; k <= P.K; ++k) {
      const auto i = static_cast<std::size_t>(k - 1);
      const double d = brute_difference_norm(P.phi[i], n);
      const double wp = P.p[i] * P.p[i] * P.rho[i] * P.rho[i];
      const double ws = P.p[i] * P.p[i] * (1.0 + P.rho[i]) * (1.0 + P.rho[i]);
      (P.phi[i] <= n ? first : second) += wp * d;
      (P.phi[i] <= n ? star_first : star_second) += ws * d;
      CHECK(m_prime_level_term(P, k, n) == doctest::Approx(wp * d).epsilon(1e-14));
    }
    const auto mp = norm_m_prime_sq(P, n);
    const auto ms = norm_m_star_sq(P, n);
    CAPTURE(n);
    CHECK(mp.first_sum == doctest::Approx(first).epsilon(1e-13));
    CHECK(mp.second_sum == doctest::Approx(second).epsilon(1e-13));
    CHECK(ms.first_sum == doctest::Approx(star_first).epsilon(1e-13));
    CHECK(ms.second_sum == doctest::Approx(star_second).epsilon(1e-13));
  }
}

TEST_CASE("norm of S_n(f - m') stays below one") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 8);
  for (std::int64_t n = 1; n <= 1'000'000; n *= 10) {
    const auto v = norm_m_prime_sq(P, n);
    CAPTURE(n);
    CHECK(v.first_sum <= 0.25 * std::numbers::pi * std::numbers::pi / 6.0);
    CHECK(v.first_sum < 0.5);
    CHECK(v.total <= 1.0);
  }
  CHECK(norm_m_prime_sq(P, P.phi.back()).second_sum == 0.0);
  CHECK(norm_m_prime_sq(P, 10 * P.phi.back()).second_sum == 0.0);
  CHECK_THROWS_AS(norm_m_prime_sq(P, 0), std::invalid_argument);
}

TEST_CASE("norm of S_n(f - m*) witnesses b_n sqrt(n) at n = phi(j)") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 8);
  for (int j = 1; j <= P.K; ++j) {
    const std::int64_t n = P.phi[static_cast<std::size_t>(j - 1)];
    const auto v = norm_m_star_sq(P, n);
    const double tail = 2.0 * static_cast<double>(n) * inverse_square_tail(j);
    const double b = P.b(n);
    CAPTURE(j);
    CHECK(v.total >= tail * (1.0 - 1e-12));
    CHECK(v.total > static_cast<double>(n) * b * b);
  }
}

TEST_CASE("norm of S_n(f - m*) below phi(1) is all second sum") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 2);
  const std::int64_t n = 5;
  const auto v = norm_m_star_sq(P, n);
  const double w1 = P.p[0] * P.p[0] * (1 + P.rho[0]) * (1 + P.rho[0]);
  const double w2 = P.p[1] * P.p[1] * (1 + P.rho[1]) * (1 + P.rho[1]);
  CHECK(v.first_sum == 0.0);
  CHECK(v.total == doctest::Approx(2.0 * n * (w1 + w2 + inverse_square_tail(2))).epsilon(1e-14));
}

TEST_CASE("first sums of m* dominate those of m'") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 8);
  const std::int64_t n = P.phi.back();
  const double ratio = norm_m_star_sq(P, n).first_sum / norm_m_prime_sq(P, n).first_sum;
  const double rho1 = P.rho[0];
  CHECK(ratio >= (1.0 + rho1) * (1.0 + rho1) / (rho1 * rho1));
}

TEST_CASE("decoding tables") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 16);
  for (int level = 1; level <= P.K; ++level) CHECK_NOTHROW(decoding_table(P, level));
  CHECK_THROWS_AS(decoding_table(P, 0), std::invalid_argument);
  CHECK_THROWS_AS(decoding_table(P, 17), std::invalid_argument);

  const auto t = decoding_table(P, 3);
  const LogReal s = P.s(3), r = P.r(2);
  auto center_of = [&](int x, int y) {
    for (std::size_t i = 0; i < 9; ++i)
      if (t.outcomes[i] == LevelOutcome{x, y}) return t.centers[i];
    FAIL("missing outcome");
    return LogReal{};
  };
  CHECK(center_of(-1, -1) == s);
  CHECK(center_of(0, 0).sign() == 0);
  const LogReal expect = s + LogReal::from_double(20.0) * r;
  CHECK(std::abs(center_of(1, -1).log_mag() - expect.log_mag()) <= 1e-12);
  CHECK(t.half_width == r);

  const auto t1 = decoding_table(P, 1);
  CHECK(t1.half_width.to_double() == doctest::Approx(P.rho[0] / 2.0).epsilon(1e-14));
  CHECK(t1.centers[0].to_double() == doctest::Approx(-P.rho[0] + 1.0 + P.rho[0]).epsilon(1e-14));
}

TEST_CASE("decode: all-zero and single-level samples") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 4);
  auto sample = zeros(4);
  CHECK(encode_value(P, sample) == 0.0);
  auto res = decode_value(P, 0.0);
  CHECK(res.status == DecodeStatus::recovered);
  CHECK(res.outcomes == sample);

  for (int k = 2; k <= 4; ++k) {
    sample = zeros(4);
    sample[static_cast<std::size_t>(k - 1)] = {1, 0};
    const double f = encode_value(P, sample);
    CHECK(f == doctest::Approx(10.0 * P.r(k - 1).to_double()).epsilon(1e-12));
    res = decode_value(P, f);
    CHECK(res.status == DecodeStatus::recovered);
    CHECK(res.outcomes == sample);
  }
  CHECK(decode_value(P, 1e300).status == DecodeStatus::no_interval);
}

TEST_CASE("decode: boundary hits are reported separately") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 2);
  // Level 2 table: the (0,0) interval is (-r_1, r_1) with r_1 = 3.
  const double r1 = P.r(1).to_double();
  CHECK(r1 == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(decode_value(P, 3.0).status == DecodeStatus::boundary_hit);
}

TEST_CASE("simulate_and_decode: natural law, K = 4") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 4);
  const auto rep = simulate_and_decode(P, 10000, 7);
  CHECK(rep.samples == 10000);
  CHECK(rep.failures == 0);
  CHECK(rep.recovered + rep.boundary_hits == rep.samples);
  CHECK(rep.top_level_counts[0] == 0);  // level 1 always fires
  CHECK(rep.top_level_counts[1] > 9000);
  CHECK(simulate_and_decode(P, 500, 7).recovered == simulate_and_decode(P, 500, 7).recovered);
}

TEST_CASE("simulate_and_decode: uniform outcomes exercise every level") {
  const auto P4 = synthesize_params(inv_sqrt_log_bound(), 4);
  const auto r4 = simulate_and_decode(P4, 10000, 1, OccupancyLaw::uniform);
  CHECK(r4.failures == 0);
  CHECK(r4.recovered + r4.boundary_hits == 10000);
  CHECK(r4.top_level_counts[4] > 8000);

  const auto P8 = synthesize_params(inv_sqrt_log_bound(), 8);
  const auto r8 = simulate_and_decode(P8, 1000, 2, OccupancyLaw::uniform);
  CHECK(r8.failures == 0);
  CHECK(r8.decoded_extended > 0);

  const auto P16 = synthesize_params(inv_sqrt_log_bound(), 16);
  const auto r16 = simulate_and_decode(P16, 100, 3, OccupancyLaw::uniform);
  CHECK(r16.failures == 0);
  CHECK(r16.decoded_extended > 90);
}

TEST_CASE("simulate_and_decode: silent levels and truncation error") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 8);
  const auto rep = simulate_and_decode(P, 100, 4);
  REQUIRE_FALSE(rep.silent_levels.empty());
  for (int k : rep.silent_levels) CHECK(-2.0 * P.log_q[static_cast<std::size_t>(k - 1)] < -40.0);
  CHECK(rep.truncation_error > 0.0);
  CHECK(rep.truncation_error < 1e-15);
  CHECK(rep.failures == 0);
}

TEST_CASE("double and extended decoding agree where both apply") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 4);
  Engine eng(99);
  for (int t = 0; t < 200; ++t) {
    SparseSample s(4);
    for (auto& o : s) {
      o.x = static_cast<int>(eng() % 3) - 1;
      o.y = static_cast<int>(eng() % 3) - 1;
    }
    REQUIRE(resolvable_in_double(P, s));
    const auto a = decode_sample(P, s);
    const auto b = decode_value(P, encode_value(P, s));
    CHECK(a.status == b.status);
    CHECK(a.outcomes == b.outcomes);
  }
}

TEST_CASE("level-1 Monte-Carlo variance of S_n(f - m')") {
  const auto P = synthesize_params(inv_sqrt_log_bound(), 4);
  const double exact = m_prime_level_term(P, 1, 64);
  CHECK(exact == doctest::Approx(0.25).epsilon(1e-14));
  const double mc = level1_gap_variance_mc(P, 64, 10000, 9);
  CHECK(std::abs(mc - exact) <= 0.1 * exact);
}

TEST_CASE("LogReal arithmetic") {
  const LogReal a = LogReal::from_double(3.0), b = LogReal::from_double(-5.0);
  CHECK((a + b).to_double() == doctest::Approx(-2.0).epsilon(1e-15));
  CHECK((a - a).sign() == 0);
  CHECK((a * b).to_double() == doctest::Approx(-15.0).epsilon(1e-15));
  CHECK((b / a).to_double() == doctest::Approx(-5.0 / 3.0).epsilon(1e-15));
  CHECK(b < a);
  CHECK(LogReal{} < a);
  CHECK(b < LogReal{});
  const LogReal huge = LogReal::from_log(1000.0);
  CHECK(huge > a);
  CHECK((huge + a).log_mag() == doctest::Approx(1000.0).epsilon(1e-15));
  CHECK_THROWS_AS(a / LogReal{}, std::domain_error);
}
