// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "martapprox/inner.hpp"
#include "martapprox/linear_process.hpp"
#include "martapprox/prop2.hpp"
#include "martapprox/prop3.hpp"
#include "martapprox/rng.hpp"
#include "martapprox/series.hpp"

#ifdef MARTAPPROX_HAVE_CLI
#include "cli.hpp"
#endif

using namespace martapprox;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (limit_s > 0 && dt > limit_s) {
    o.pass = false;
    o.detail += "; runtime over limit";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %s: %s (%.3f s", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), dt);
  if (limit_s > 0) std::printf(", limit %.0f s", limit_s);
  std::printf(")\n");
  std::fflush(stdout);
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

// ||S_n(X - c e)||^2 / n by expanding every innovation's coefficient.
double brute_gap_sq(const std::vector<double>& a, double c, int n) {
  const int N = static_cast<int>(a.size()) - 1;
  std::vector<double> coef(static_cast<std::size_t>(N + n), 0.0);  // e_{-N}..e_{n-1}
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j <= N; ++j) coef[static_cast<std::size_t>(i - j + N)] += a[static_cast<std::size_t>(j)];
    coef[static_cast<std::size_t>(i + N)] -= c;
  }
  double s = 0.0;
  for (double v : coef) s += v * v;
  return s / n;
}

double max_abs_diff(const std::vector<double>& x, const std::vector<double>& y) {
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

#ifdef MARTAPPROX_HAVE_CLI
std::string dir_blob(const std::filesystem::path& dir) {
  std::vector<std::string> names;
  for (const auto& e : std::filesystem::directory_iterator(dir)) names.push_back(e.path().filename().string());
  std::sort(names.begin(), names.end());
  std::string blob;
  for (const auto& n : names) {
    std::ifstream in(dir / n, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    blob += n + '\n' + ss.str();
  }
  return blob;
}
#endif

}  // namespace

int main() {
  criterion(1, "two-path singular coefficients", 1.0, [] {
    const auto s = singular_inner_coeffs(1.0, 200);
    const auto oracle = exp_series(singular_exponent_coeffs(1.0, 200), 200);
    double worst = 0.0;
    for (int k = 0; k <= 200; ++k)
      worst = std::max(worst, std::abs(s[static_cast<std::size_t>(k)] - oracle[static_cast<std::size_t>(k)]));
    return Outcome{worst <= 1e-10, "max |delta| = " + num(worst)};
  });

  criterion(2, "inner autocorrelation", 5.0, [] {
    const auto s = singular_inner_coeffs(1.0, 10000);
    const double T = *s.tail_mass_bound();
    double worst = 0.0;
    for (int k = 0; k <= 100; ++k) worst = std::max(worst, std::abs(autocorrelation(s, k) - (k == 0 ? 1.0 : 0.0)));
    return Outcome{T <= 0.01 && worst <= 2.0 * std::sqrt(T),
                   "T = " + num(T) + ", max dev = " + num(worst) + " <= " + num(2.0 * std::sqrt(T))};
  });

  criterion(3, "Cesaro mean of the singular series", 0.0, [] {
    const auto prof = cesaro_profile(singular_inner_coeffs(1.0, 10000));
    const double m = prof.mean(10000);
    return Outcome{std::abs(m) < 0.02, "|M_10000| = " + num(std::abs(m)) + " < 0.02"};
  });

  criterion(4, "scalar-gap lower bound", 0.0, [] {
    const auto s = singular_inner_coeffs(1.0, 10000);
    const auto r = best_scalar_gap(s, 10000, SnNorm::orthonormal);
    return Outcome{r.min_gap_sq >= 0.9,
                   "min_gap_sq = " + num(r.min_gap_sq) + " with ||S_n||^2 = n (orthonormal process), c* = " +
                       num(r.c_star) + "; truncated-coefficient ||S_n||^2/n = " + num(r.truncated_sn_norm_sq / r.n)};
  });

  criterion(5, "dyadic Blaschke bounds", 1.0, [] {
    bool ok = true;
    double worst_ratio = 1e300;
    for (int n = 2; n <= 20; ++n) {
      const auto r = prop6_check(n, 40);
      const double c = r.c_bound;
      ok = ok && r.p2 >= 0.125 && r.p3 >= 0.125 && r.p1 >= c && r.p4 >= c && r.product >= c * c / 64.0 &&
           r.value_at_zero == 0.0;
      worst_ratio = std::min(worst_ratio, r.product / (c * c / 64.0));
    }
    return Outcome{ok, "n = 2..20, min |B(r_n)| / (c^2/64) = " + num(worst_ratio) + ", |B(z_n)| = 0"};
  });

  criterion(6, "closed-form gap vs expansion", 0.0, [] {
    std::mt19937_64 eng(6);
    std::uniform_int_distribution<int> order(0, 8), horizon(1, 32);
    std::normal_distribution<double> normal;
    double worst = 0.0;
    for (int t = 0; t < 20; ++t) {
      std::vector<double> a(static_cast<std::size_t>(order(eng)) + 1);
      for (double& v : a) v = normal(eng);
      const int n = horizon(eng);
      const double c = normal(eng);
      const double closed = gap(CoefficientSeries(a), c, n).gap_sq;
      const double brute = brute_gap_sq(a, c, n);
      worst = std::max(worst, std::abs(closed - brute) / std::max(std::abs(brute), 1e-300));
    }
    return Outcome{worst <= 1e-10, "20 series, max relative difference = " + num(worst)};
  });

  criterion(7, "sparse-construction norm formulas", 1.0, [] {
    const auto P = synthesize_params(inv_sqrt_log_bound(), 8);
    double worst_up = 0.0;
    for (std::int64_t n = 1; n <= 1'000'000; n *= 10) worst_up = std::max(worst_up, norm_m_prime_sq(P, n).total);
    double worst_ratio = 1e300;
    for (int j = 1; j <= 8; ++j) {
      const std::int64_t n = P.phi[static_cast<std::size_t>(j - 1)];
      const double bn = P.b(n);
      worst_ratio = std::min(worst_ratio, norm_m_star_sq(P, n).total / (static_cast<double>(n) * bn * bn));
    }
    return Outcome{worst_up <= 1.0 && worst_ratio >= 1.0,
                   "max ||S_n(f-m')||^2 = " + num(worst_up) + ", min ||S_n(f-m*)||^2 / (n b_n^2) at phi(j) = " +
                       num(worst_ratio)};
  });

  criterion(8, "nine-interval decoder", 10.0, [] {
    const auto P16 = synthesize_params(inv_sqrt_log_bound(), 16);
    for (int level = 1; level <= 16; ++level) decoding_table(P16, level);  // throws unless disjoint
    const auto P = synthesize_params(inv_sqrt_log_bound(), 4);
    const auto rep = simulate_and_decode(P, 10000, 8);
    return Outcome{rep.failures == 0 && rep.recovered + rep.boundary_hits == 10000,
                   "tables disjoint at levels 1..16; K = 4: " + std::to_string(rep.recovered) + " recovered, " +
                       std::to_string(rep.boundary_hits) + " boundary, " + std::to_string(rep.failures) +
                       " failures"};
  });

  criterion(9, "level-1 Monte Carlo variance", 30.0, [] {
    const auto P = synthesize_params(inv_sqrt_log_bound(), 4);
    const double exact = m_prime_level_term(P, 1, 64);
    const double mc = level1_gap_variance_mc(P, 64, 10000, 9);
    const double rel = std::abs(mc - exact) / exact;
    return Outcome{rel <= 0.1, "empirical " + num(mc) + " vs exact " + num(exact) + " (rel " + num(rel) + ")"};
  });

  criterion(10, "finite sign-model exactness", 30.0, [] {
    const auto m3 = ExactModel::standard(3);
    const double root = std::sqrt(5.0 + std::pow(9.0, -3) + std::pow(9.0, -5) + std::pow(9.0, -7));
    const std::vector<double> expect{0.0, root, 1.0 / 9, 1.0 / 81, 1.0 / 729, 0.0};
    const auto md = md_norms(m3);
    double md_err = md.size() == expect.size() ? 0.0 : 1.0;
    for (std::size_t i = 0; i < std::min(md.size(), expect.size()); ++i)
      md_err = std::max(md_err, std::abs(md[i].computed - expect[i]));
    const auto h = hannan_sum(m3);
    const double h_err = std::abs(h.total - (root + 0.125));

    std::mt19937_64 eng(10);
    std::normal_distribution<double> normal;
    double tower_err = 0.0;
    int tower_pairs = 0;
    for (int K = 1; K <= 4; ++K)
      for (const auto& m : {ExactModel::standard(K), ExactModel::enlarged(K)}) {
        std::vector<double> t(m.atom_count());
        for (double& v : t) v = normal(eng);
        for (int big = -K - 1; big <= K; ++big) {
          const auto inner = conditional_expectation(m, t, m.c_k(big));
          for (int small = -K - 1; small <= big; ++small) {
            tower_err = std::max(tower_err, max_abs_diff(conditional_expectation(m, inner, m.c_k(small)),
                                                         conditional_expectation(m, t, m.c_k(small))));
            ++tower_pairs;
          }
        }
      }

    long decode_bad = 0, decoded = 0;
    for (int K = 1; K <= 6; ++K) {
      const int digits = 2 * K;
      std::vector<int> s(static_cast<std::size_t>(digits));
      for (std::uint32_t mask = 0; mask < (1u << digits); ++mask, ++decoded) {
        for (int j = 0; j < digits; ++j) s[static_cast<std::size_t>(j)] = (mask >> j) & 1u ? 1 : -1;
        if (decode_g(encode_g(s), K) != s) ++decode_bad;
      }
    }
    const bool ok = md_err <= 1e-12 && h.finite && h_err <= 1e-12 && tower_err <= 1e-12 && decode_bad == 0;
    return Outcome{ok, "md err " + num(md_err) + ", Hannan err " + num(h_err) + ", tower err " + num(tower_err) +
                           " over " + std::to_string(tower_pairs) + " pairs, decode " +
                           std::to_string(decoded - decode_bad) + "/" + std::to_string(decoded)};
  });

  criterion(11, "CLI determinism", 0.0, [] {
#ifdef MARTAPPROX_HAVE_CLI
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "martapprox_acceptance_cli";
    const std::vector<std::vector<std::string>> runs{
        {"inner", "--kind", "singular", "--a", "1", "--trunc", "5000"},
        {"inner", "--kind", "blaschke", "--zeros", "dyadic", "--zeros-count", "10", "--trunc", "20000"},
        {"cesaro", "--trunc", "10000", "--stride", "100"},
        {"gap", "--trunc", "10000", "--horizons", "10,100,1000,10000", "--out", "json"},
        {"prop6", "--n-range", "2..20", "--k-max", "40"},
        {"prop3", "--K", "4", "--b-rule", "invsqrtlog", "--samples", "10000", "--seed", "7", "--mc-replicates", "500"},
        {"prop3", "--K", "8", "--law", "uniform", "--samples", "300", "--seed", "3", "--out", "json"},
        {"prop2", "--depth", "3"}};
    int identical = 0;
    for (std::size_t r = 0; r < runs.size(); ++r) {
      std::string first;
      bool same = true;
      for (int rep = 0; rep < 2; ++rep) {
        fs::remove_all(dir);
        fs::create_directories(dir);
        std::vector<std::string> args{"martapprox"};
        args.insert(args.end(), runs[r].begin(), runs[r].end());
        args.push_back("--out-path");
        args.push_back((dir / ("run" + std::to_string(r))).string() + ".out");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        std::ostringstream out, err;
        if (cli::main_entry(static_cast<int>(argv.size()), argv.data(), out, err) != 0)
          return Outcome{false, "run failed: " + err.str()};
        const std::string blob = dir_blob(dir);
        if (rep == 0) first = blob;
        else same = blob == first;
      }
      identical += same ? 1 : 0;
    }
    fs::remove_all(dir);
    return Outcome{identical == static_cast<int>(runs.size()),
                   std::to_string(identical) + "/" + std::to_string(runs.size()) +
                       " configurations byte-identical across reruns"};
#else
    return Outcome{false, "command-line driver not built"};
#endif
  });

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
