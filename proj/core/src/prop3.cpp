#include "martapprox/prop3.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "martapprox/errors.hpp"
#include "martapprox/rng.hpp"

namespace martapprox {

namespace {

constexpr const char* kModule = "prop3_lab";

using Extended = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<256>>;
constexpr double kExtendedDigits = 256.0;

[[noreturn]] void violated(const std::string& invariant, const std::string& detail) {
  throw InvariantViolation(kModule, invariant, detail);
}

double uniform01(Engine& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

int uniform_sign3(Engine& eng) { return static_cast<int>(eng() % 3) - 1; }

}  // namespace

BoundSequence inv_sqrt_log_bound() {
  return [](std::int64_t n) { return 1.0 / std::sqrt(std::log(static_cast<double>(n) + 3.0)); };
}

BoundSequence inv_log_bound() {
  return [](std::int64_t n) { return 1.0 / std::log(static_cast<double>(n) + 3.0); };
}

double inverse_square_tail(int j) {
  // Summed from the small end after the asymptotic remainder so the result
  // keeps full relative precision even for large j.
  constexpr int kTerms = 1 << 16;
  const double M = static_cast<double>(j) + kTerms;
  // sum_{k>M} 1/k^2 = 1/M - 1/(2M^2) + 1/(6M^3) - ...
  double sum = 1.0 / M - 0.5 / (M * M) + 1.0 / (6.0 * M * M * M);
  for (int k = j + kTerms; k > j; --k) sum += 1.0 / (static_cast<double>(k) * k);
  return sum;
}

Prop3Params synthesize_params(const BoundSequence& b, int K, std::int64_t phi_search_cap) {
  if (K < 2) throw std::invalid_argument("synthesize_params: K must be >= 2");
  if (!b) throw std::invalid_argument("synthesize_params: missing bound sequence");

  Prop3Params P;
  P.K = K;
  P.b = b;
  P.phi_search_cap = phi_search_cap;
  const auto Kz = static_cast<std::size_t>(K);
  P.p.resize(Kz);
  P.rho.resize(Kz);
  P.phi.resize(Kz);
  P.log_q.resize(Kz);
  P.log_r.resize(Kz);
  P.log_s.resize(Kz);

  std::int64_t prev = 12;
  for (int j = 1; j <= K; ++j) {
    const auto i = static_cast<std::size_t>(j - 1);
    P.p[i] = 1.0 / j;
    const double target = 2.0 * inverse_square_tail(j);
    std::int64_t cand = prev + 1;
    for (;; ++cand) {
      if (cand > phi_search_cap) {
        std::ostringstream os;
        os << "synthesize_params: no phi(" << j << ") below the search cap " << phi_search_cap;
        throw std::runtime_error(os.str());
      }
      const double bv = b(cand);
      if (!(bv > 0.0) || !std::isfinite(bv))
        throw std::invalid_argument("synthesize_params: bound sequence must be positive and finite");
      if (target > bv * bv) break;
    }
    P.phi[i] = cand;
    P.rho[i] = 1.0 / std::sqrt(8.0 * static_cast<double>(cand));
    prev = cand;
  }

  // q_1 = 1;  rho_{n+1} p_{n+1} q_{n+1} = 30 sum_{k<=n} p_k q_k.
  const double ln3 = std::log(3.0), ln10 = std::log(10.0), ln30 = std::log(30.0);
  P.log_q[0] = 0.0;
  LogReal weighted = LogReal::from_log(std::log(P.p[0]));  // sum p_k q_k
  P.log_r[0] = ln3 + weighted.log_mag();
  P.log_s[0] = -std::numeric_limits<double>::infinity();
  for (std::size_t n = 1; n < Kz; ++n) {
    P.log_q[n] = ln30 + weighted.log_mag() - std::log(P.rho[n]) - std::log(P.p[n]);
    P.log_s[n] = ln10 + P.log_r[n - 1] - std::log(P.rho[n]);
    weighted = weighted + LogReal::from_log(std::log(P.p[n]) + P.log_q[n]);
    P.log_r[n] = ln3 + weighted.log_mag();
  }

  check_params(P);
  return P;
}

void check_params(const Prop3Params& P) {
  const auto Kz = static_cast<std::size_t>(P.K);
  if (P.p.size() != Kz || P.rho.size() != Kz || P.phi.size() != Kz || P.log_q.size() != Kz ||
      P.log_r.size() != Kz || P.log_s.size() != Kz)
    violated("level vectors have length K", "size mismatch");

  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < Kz; ++i) {
    const double expect = 1.0 / (8.0 * static_cast<double>(P.phi[i]));
    if (!(P.rho[i] < 0.1)) {
      os << "level " << i + 1 << ": rho = " << P.rho[i];
      violated("rho_k < 1/10", os.str());
    }
    if (std::abs(P.rho[i] * P.rho[i] - expect) > 1e-14 * expect) {
      os << "level " << i + 1;
      violated("rho_k^2 = 1/(8 phi(k))", os.str());
    }
    if (i > 0 && !(P.phi[i] > P.phi[i - 1])) {
      os << "level " << i + 1;
      violated("phi strictly increasing", os.str());
    }
  }
  if (P.phi[0] < 13) violated("phi(1) >= 13", "phi(1) = " + std::to_string(P.phi[0]));

  for (int j = 1; j < P.K; ++j) {
    double stored = 0.0;
    for (int k = j + 1; k <= P.K; ++k) stored += P.p[k - 1] * P.p[k - 1];
    const double lhs = 2.0 * stored + 2.0 * inverse_square_tail(P.K);
    const double bv = P.b(P.phi[static_cast<std::size_t>(j - 1)]);
    if (!(lhs > bv * bv)) {
      os << "j = " << j << ": " << lhs << " <= " << bv * bv;
      violated("2 sum_{k>j} p_k^2 > b_{phi(j)}^2", os.str());
    }
  }

  if (P.log_q[0] != 0.0) violated("q_1 = 1", "log q_1 = " + std::to_string(P.log_q[0]));
  LogReal weighted;
  for (std::size_t n = 0; n + 1 < Kz; ++n) {
    weighted = weighted + LogReal::from_log(std::log(P.p[n]) + P.log_q[n]);
    const double lhs = std::log(P.rho[n + 1]) + std::log(P.p[n + 1]) + P.log_q[n + 1];
    const double rhs = std::log(30.0) + weighted.log_mag();
    if (std::abs(lhs - rhs) > 1e-12) {
      os << "n = " << n + 1 << ": " << lhs << " vs " << rhs;
      violated("rho_{n+1} p_{n+1} q_{n+1} = 30 sum p_k q_k", os.str());
    }
    if (std::abs(P.log_r[n] - (std::log(3.0) + weighted.log_mag())) > 1e-12) {
      os << "n = " << n + 1;
      violated("r_n = 3 sum p_k q_k", os.str());
    }
    if (!(P.log_s[n + 1] - P.log_r[n] > std::log(100.0))) {
      os << "n = " << n + 1;
      violated("s_{n+1} > 100 r_n", os.str());
    }
  }
}

double m_prime_level_term(const Prop3Params& P, int k, std::int64_t n) {
  const auto i = static_cast<std::size_t>(k - 1);
  const double w = P.p.at(i) * P.p[i] * P.rho[i] * P.rho[i];
  return 2.0 * w * static_cast<double>(std::min(P.phi[i], n));
}

NormBreakdown norm_m_prime_sq(const Prop3Params& P, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("norm_m_prime_sq: horizon must be >= 1");
  NormBreakdown out;
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < P.p.size(); ++i) {
    const double w = P.p[i] * P.p[i] * P.rho[i] * P.rho[i];
    if (P.phi[i] <= n)
      out.first_sum += 2.0 * w * static_cast<double>(P.phi[i]);
    else
      out.second_sum += 2.0 * nd * w;
  }
  // Levels k > K: 2 p_k^2 rho_k^2 min(phi(k), n) = p_k^2 min(phi(k), n) / (4 phi(k))
  // <= p_k^2 min(1, n / phi(K)) / 4.
  const double tail = inverse_square_tail(P.K);
  const double phiK = static_cast<double>(P.phi.back());
  out.tail_lower = 0.0;
  out.tail_upper = 0.25 * std::min(1.0, nd / phiK) * tail;
  out.total = out.first_sum + out.second_sum + out.tail_upper;
  return out;
}

NormBreakdown norm_m_star_sq(const Prop3Params& P, std::int64_t n) {
  if (n < 1) throw std::invalid_argument("norm_m_star_sq: horizon must be >= 1");
  NormBreakdown out;
  const double nd = static_cast<double>(n);
  for (std::size_t i = 0; i < P.p.size(); ++i) {
    const double w = P.p[i] * P.p[i] * (1.0 + P.rho[i]) * (1.0 + P.rho[i]);
    if (P.phi[i] <= n)
      out.first_sum += 2.0 * w * static_cast<double>(P.phi[i]);
    else
      out.second_sum += 2.0 * nd * w;
  }
  // Levels k > K have phi(k) > phi(K) and rho_k < rho_K.
  const double tail = inverse_square_tail(P.K);
  const double phiK = static_cast<double>(P.phi.back());
  const double rhoK = P.rho.back();
  out.tail_lower = 2.0 * std::min(phiK + 1.0, nd) * tail;
  out.tail_upper = 2.0 * nd * (1.0 + rhoK) * (1.0 + rhoK) * tail;
  out.total = out.first_sum + out.second_sum + out.tail_lower;
  return out;
}

// ---------------------------------------------------------------------------
// Decoding
// ---------------------------------------------------------------------------

namespace {

constexpr std::array<LevelOutcome, 9> kOutcomes = {{
    {-1, -1}, {-1, 0}, {-1, 1}, {0, -1}, {0, 0}, {0, 1}, {1, -1}, {1, 0}, {1, 1},
}};

LogReal direct_center(const Prop3Params& P, int level, LevelOutcome o) {
  const auto i = static_cast<std::size_t>(level - 1);
  const double shape = P.rho[i] * o.x - (1.0 + P.rho[i]) * o.y;
  return LogReal::from_double(P.p[i]) * P.q(level) * LogReal::from_double(shape);
}

bool close_relative(const LogReal& a, const LogReal& b, double tol) {
  if (b.sign() == 0) return a.sign() == 0;
  const LogReal diff = a - b;
  return diff.sign() == 0 || diff.log_mag() - b.log_mag() <= std::log(tol);
}

}  // namespace

DecodingTable decoding_table(const Prop3Params& P, int level) {
  if (level < 1 || level > P.K) throw std::invalid_argument("decoding_table: level outside [1, K]");
  DecodingTable t;
  t.level = level;
  t.outcomes = kOutcomes;

  if (level == 1) {
    for (std::size_t i = 0; i < 9; ++i) t.centers[i] = direct_center(P, 1, kOutcomes[i]);
    t.half_width = LogReal::from_double(P.rho[0] * P.p[0] / 2.0);
  } else {
    const LogReal s = P.s(level);
    const LogReal r = P.r(level - 1);
    if (!(s.log_mag() - r.log_mag() > std::log(100.0)))
      violated("s > 100 r", "level " + std::to_string(level));
    const LogReal ten = LogReal::from_double(10.0), twenty = LogReal::from_double(20.0);
    t.centers = {s,          -(ten * r),      -s - twenty * r, s + ten * r, LogReal{},
                 -s - ten * r, s + twenty * r, ten * r,         -s};
    t.half_width = r;
    for (std::size_t i = 0; i < 9; ++i) {
      if (!close_relative(t.centers[i], direct_center(P, level, kOutcomes[i]), 1e-12))
        violated("center = p (rho x - (1+rho) y)", "level " + std::to_string(level) + ", entry " + std::to_string(i));
    }
  }

  std::array<LogReal, 9> sorted = t.centers;
  std::sort(sorted.begin(), sorted.end(), [](const LogReal& a, const LogReal& b) { return a < b; });
  const LogReal width = LogReal::from_double(2.0) * t.half_width;
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
    if (sorted[i + 1] - sorted[i] < width)
      violated("decoding intervals pairwise disjoint", "level " + std::to_string(level));
  }
  return t;
}

namespace {

template <class T>
struct LevelTables {
  std::vector<std::array<T, 9>> centers;  // index level - 1
  std::vector<T> half_width;
  std::vector<T> scale;                   // p_k q_k
  std::vector<T> rho;
};

// Constants are regenerated in T from p_k = 1/k, rho_k = 1/sqrt(8 phi(k)) and
// the q recursion so encoder and decoder share one arithmetic.
template <class T>
LevelTables<T> build_tables(const Prop3Params& P) {
  using std::sqrt;
  LevelTables<T> L;
  const auto Kz = static_cast<std::size_t>(P.K);
  L.centers.resize(Kz);
  L.half_width.resize(Kz);
  L.scale.resize(Kz);
  L.rho.resize(Kz);

  T weighted = 0;  // sum_{k<=n} p_k q_k
  for (std::size_t i = 0; i < Kz; ++i) {
    const T p = T(1) / T(static_cast<double>(i + 1));
    const T rho = T(1) / sqrt(T(8) * T(static_cast<double>(P.phi[i])));
    const T q = i == 0 ? T(1) : T(30) * weighted / (rho * p);
    L.rho[i] = rho;
    L.scale[i] = p * q;
    L.half_width[i] = i == 0 ? rho * p / T(2) : T(3) * weighted;
    for (std::size_t j = 0; j < 9; ++j) {
      const auto o = kOutcomes[j];
      if (o.x == 0 && o.y == 0) {
        L.centers[i][j] = T(0);
        continue;
      }
      L.centers[i][j] = L.scale[i] * (rho * T(o.x) - (T(1) + rho) * T(o.y));
    }
    weighted += p * q;
  }
  return L;
}

template <class T>
T encode_with(const LevelTables<T>& L, const SparseSample& sample) {
  T f = 0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    const auto o = sample[i];
    if (o.x == 0 && o.y == 0) continue;
    f += L.scale[i] * (L.rho[i] * T(o.x) - (T(1) + L.rho[i]) * T(o.y));
  }
  return f;
}

template <class T>
DecodeResult decode_with(const LevelTables<T>& L, T v) {
  using std::abs;
  DecodeResult out;
  out.outcomes.resize(L.centers.size());
  for (std::size_t level = L.centers.size(); level-- > 0;) {
    const T& hw = L.half_width[level];
    bool found = false;
    for (std::size_t j = 0; j < 9; ++j) {
      const T dist = abs(v - L.centers[level][j]);
      if (dist == hw) {
        out.status = DecodeStatus::boundary_hit;
        return out;
      }
      if (dist < hw) {
        out.outcomes[level] = kOutcomes[j];
        v -= L.centers[level][j];
        found = true;
        break;
      }
    }
    if (!found) {
      out.status = DecodeStatus::no_interval;
      return out;
    }
  }
  out.status = DecodeStatus::recovered;
  return out;
}

void require_sample_size(const Prop3Params& P, const SparseSample& s) {
  if (s.size() != static_cast<std::size_t>(P.K))
    throw std::invalid_argument("prop3: sample must carry one outcome per level");
}

int top_level(const SparseSample& s) {
  for (std::size_t i = s.size(); i-- > 0;)
    if (s[i].x != 0 || s[i].y != 0) return static_cast<int>(i) + 1;
  return 0;
}

// ln of the decoding margin needed at level 1 (a quarter of its half-width)
// minus ln of the largest magnitude touched while encoding.
double log_headroom(const Prop3Params& P, const SparseSample& s) {
  const int h = top_level(s);
  const double log_mag = h == 0 ? 0.0 : P.log_r[static_cast<std::size_t>(h - 1)];
  return std::log(P.rho[0] / 8.0) - log_mag - std::log(2.0 * P.K + 4.0);
}

}  // namespace

double encode_value(const Prop3Params& P, const SparseSample& sample) {
  require_sample_size(P, sample);
  return encode_with(build_tables<double>(P), sample);
}

DecodeResult decode_value(const Prop3Params& P, double value) {
  return decode_with(build_tables<double>(P), value);
}

bool resolvable_in_double(const Prop3Params& P, const SparseSample& sample) {
  require_sample_size(P, sample);
  return log_headroom(P, sample) > -53.0 * std::numbers::ln2;
}

DecodeResult decode_sample(const Prop3Params& P, const SparseSample& sample) {
  require_sample_size(P, sample);
  const double headroom = log_headroom(P, sample);
  if (headroom > -53.0 * std::numbers::ln2) {
    const auto L = build_tables<double>(P);
    return decode_with(L, encode_with(L, sample));
  }
  if (-headroom / std::numbers::ln10 + 10.0 > kExtendedDigits)
    throw std::range_error("decode_sample: dynamic range exceeds the extended precision");
  const auto L = build_tables<Extended>(P);
  DecodeResult out = decode_with(L, encode_with(L, sample));
  out.extended_precision = true;
  return out;
}

DecodeReport simulate_and_decode(const Prop3Params& P, std::int64_t samples, std::uint64_t seed, OccupancyLaw law) {
  if (samples < 1) throw std::invalid_argument("simulate_and_decode: need at least one sample");
  const auto Kz = static_cast<std::size_t>(P.K);

  DecodeReport rep;
  rep.samples = samples;
  rep.top_level_counts.assign(Kz + 1, 0);

  // Probability that one draw of e_k is nonzero is 1/q_k^2.
  std::vector<double> fire_prob(Kz, 0.0);
  double log_keep_silent = 0.0;
  for (std::size_t i = 0; i < Kz; ++i) {
    const double log_prob = -2.0 * P.log_q[i];
    if (log_prob < -40.0) {
      rep.silent_levels.push_back(static_cast<int>(i) + 1);
      log_keep_silent += 2.0 * std::log1p(-std::exp(log_prob));
    } else {
      fire_prob[i] = std::exp(log_prob);
    }
  }
  rep.truncation_error = law == OccupancyLaw::natural && log_keep_silent < 0.0 ? -std::expm1(log_keep_silent) : 0.0;

  // Double-precision tables are built once; the extended ones only if needed.
  const auto tables = build_tables<double>(P);
  SparseSample sample(Kz);
  for (std::int64_t t = 0; t < samples; ++t) {
    Engine eng = make_engine(seed, static_cast<std::uint64_t>(t));
    for (std::size_t i = 0; i < Kz; ++i) {
      if (law == OccupancyLaw::uniform) {
        sample[i].x = uniform_sign3(eng);
        sample[i].y = uniform_sign3(eng);
        continue;
      }
      auto draw = [&]() -> int {
        if (fire_prob[i] == 0.0) return 0;
        const bool fires = uniform01(eng) < fire_prob[i];
        const int sign = rademacher(eng) > 0 ? 1 : -1;
        return fires ? sign : 0;
      };
      sample[i].x = draw();
      sample[i].y = draw();
    }
    ++rep.top_level_counts[static_cast<std::size_t>(top_level(sample))];

    DecodeResult res;
    if (resolvable_in_double(P, sample))
      res = decode_with(tables, encode_with(tables, sample));
    else
      res = decode_sample(P, sample);
    (res.extended_precision ? rep.decoded_extended : rep.decoded_in_double) += 1;

    if (res.status == DecodeStatus::boundary_hit)
      ++rep.boundary_hits;
    else if (res.status == DecodeStatus::recovered && res.outcomes == sample)
      ++rep.recovered;
    else
      ++rep.failures;
  }
  return rep;
}

double level1_gap_variance_mc(const Prop3Params& P, std::int64_t n, int replicates, std::uint64_t seed) {
  if (n < 1 || replicates < 2) throw std::invalid_argument("level1_gap_variance_mc: need n >= 1 and >= 2 replicates");
  const double p = P.p[0], rho = P.rho[0];
  const std::int64_t lag = P.phi[0];
  std::vector<double> e(static_cast<std::size_t>(n + lag));  // e_{-lag}..e_{n-1}
  double mean = 0.0, m2 = 0.0;
  for (int r = 0; r < replicates; ++r) {
    Engine eng = make_engine(seed, static_cast<std::uint64_t>(r));
    for (double& v : e) v = rademacher(eng);
    double s = 0.0;
    for (std::int64_t i = 0; i < n; ++i) {
      const double now = e[static_cast<std::size_t>(i + lag)];
      const double past = e[static_cast<std::size_t>(i)];
      const double f = p * (rho * now - (1.0 + rho) * past);
      const double m_prime = -p * past;
      s += f - m_prime;
    }
    // Welford
    const double delta = s - mean;
    mean += delta / (r + 1);
    m2 += delta * (s - mean);
  }
  return m2 / (replicates - 1);
}

}  // namespace martapprox
