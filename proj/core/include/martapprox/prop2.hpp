#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace martapprox {

// Finite model of F = f_0 g + 2 e_0 with
//   g = 1 + sum_{i=1}^K e_i 3^{-2i} + sum_{i=1}^K e_{-i} 3^{-(2i+1)},
// e_i and f_i independent Rademacher signs. Every atom (sign assignment) has
// weight 2^{-V}; conditional expectations are computed by averaging over the
// atoms that agree on the conditioning labels.

struct VarLabel {
  char kind = 'e';  // 'e' or 'f'
  int index = 0;
  friend bool operator==(const VarLabel&, const VarLabel&) = default;
};

std::string to_string(const VarLabel& v);

/// Subset of a model's variables, as a bitmask over variable positions.
struct ConditioningSet {
  std::uint32_t mask = 0;
};

class ExactModel {
 public:
  /// e_{-K}..e_K, f_{-1}, f_0. Requires 1 <= K <= 6.
  static ExactModel standard(int depth);
  /// e_{-K}..e_K and f_{-K}..f_K, for checks that reference f_i, i != 0.
  /// Requires 1 <= K <= 4.
  static ExactModel enlarged(int depth);

  int depth() const noexcept { return depth_; }
  const std::vector<VarLabel>& variables() const noexcept { return vars_; }
  std::size_t atom_count() const noexcept { return std::size_t{1} << vars_.size(); }
  double atom_weight() const noexcept { return 1.0 / static_cast<double>(atom_count()); }

  bool has(VarLabel v) const;
  /// Value (+-1) of variable v on every atom; throws std::out_of_range if absent.
  std::vector<double> values(VarLabel v) const;
  double value(std::size_t atom, VarLabel v) const;

  const std::vector<double>& g_values() const noexcept { return g_; }
  const std::vector<double>& F_values() const noexcept { return F_; }

  /// Labels must all exist in the model; throws std::out_of_range otherwise.
  ConditioningSet conditioning(std::span<const VarLabel> labels) const;
  ConditioningSet all() const;
  /// C_k: every e_i and f_i with i <= k present in the model.
  ConditioningSet c_k(int k) const;
  /// G_k surrogate: every e variable together with f_i, i <= k.
  ConditioningSet g_k(int k) const;

  /// E[x y] under the uniform atom weights.
  double inner(std::span<const double> x, std::span<const double> y) const;
  double norm(std::span<const double> x) const;

 private:
  ExactModel(int depth, std::vector<VarLabel> vars);
  int position(VarLabel v) const;

  int depth_ = 0;
  std::vector<VarLabel> vars_;
  std::vector<double> g_;
  std::vector<double> F_;
};

/// Exact conditional expectation, constant on the atoms that agree on `cond`.
std::vector<double> conditional_expectation(const ExactModel& model, std::span<const double> target,
                                            ConditioningSet cond);

struct MdNorm {
  int k = 0;
  double computed = 0.0;  // ||E(F|C_{k+1}) - E(F|C_k)||_2 by enumeration
  double analytic = 0.0;
};

/// k = -2..K. Analytic: 0 for k < -1, sqrt(5 + sum_{i<=K} 9^{-(2i+1)}) at
/// k = -1, 3^{-(2k+2)} for 0 <= k < K, and 0 at k = K where the model stops.
std::vector<MdNorm> md_norms(const ExactModel& model);

struct HannanSum {
  double enumerated = 0.0;     // sum of md_norms().computed
  double analytic_tail = 0.0;  // sum_{k>=K} 3^{-(2k+2)}
  double total = 0.0;
  bool finite = false;
};

HannanSum hannan_sum(const ExactModel& model);

struct ProjectionReport {
  std::vector<double> values;       // E(F | all e, f_{<=-1}) per atom
  double norm = 0.0;
  double max_dev_from_e0 = 0.0;     // max |value - e_0|
  double max_dev_from_2e0 = 0.0;    // max |value - 2 e_0|
  bool multiple_of_e0 = false;      // value / e_0 constant across atoms
  double multiple = 0.0;
  double max_md_inner_e = 0.0;      // max_j |E[(E(F|G_0) - E(F|G_{-1})) e_j]|
};

/// Requires f_{-1} in the model.
ProjectionReport g_projection_check(const ExactModel& model);

struct CaseTally {
  int checked = 0;
  int matched = 0;   // equals the displayed right-hand side
  int matched_alternative = 0;  // case 1 only: equals f_0 e_i instead
};

/// E(f_0 e_i | C_k) against the four displayed cases, for every k and i in
/// [-K, K] of an enlarged model:
///   0: k >= 0, i <= k  ->  f_i e_i
///   1: k >= 0, i > k   ->  0
///   2: k < 0,  i <= k  ->  0
///   3: k < 0,  i > k   ->  0
std::array<CaseTally, 4> check_conditional_cases(const ExactModel& enlarged_model);

/// 1 + sum of sign_m 3^{-m}, m = 2..2K+1, signs ordered e_1, e_{-1}, e_2, ...
double encode_g(std::span<const int> signs);

/// Greedy digit recovery of the signs from g. Throws std::domain_error if the
/// residual vanishes before `depth` levels are read.
std::vector<int> decode_g(double value, int depth);

}  // namespace martapprox
