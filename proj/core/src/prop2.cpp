#include "martapprox/prop2.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace martapprox {

std::string to_string(const VarLabel& v) { return std::string(1, v.kind) + "_" + std::to_string(v.index); }

ExactModel::ExactModel(int depth, std::vector<VarLabel> vars) : depth_(depth), vars_(std::move(vars)) {
  const std::size_t atoms = atom_count();
  g_.assign(atoms, 1.0);
  for (int i = 1; i <= depth_; ++i) {
    const double wp = std::pow(3.0, -2.0 * i);
    const double wn = std::pow(3.0, -(2.0 * i + 1.0));
    const int pp = position({'e', i}), pn = position({'e', -i});
    for (std::size_t a = 0; a < atoms; ++a) {
      g_[a] += wp * ((a >> pp) & 1U ? 1.0 : -1.0);
      g_[a] += wn * ((a >> pn) & 1U ? 1.0 : -1.0);
    }
  }
  const int f0 = position({'f', 0}), e0 = position({'e', 0});
  F_.resize(atoms);
  for (std::size_t a = 0; a < atoms; ++a) {
    const double fv = (a >> f0) & 1U ? 1.0 : -1.0;
    const double ev = (a >> e0) & 1U ? 1.0 : -1.0;
    F_[a] = fv * g_[a] + 2.0 * ev;
  }
}

ExactModel ExactModel::standard(int depth) {
  if (depth < 1 || depth > 6) throw std::invalid_argument("ExactModel::standard: depth must lie in [1, 6]");
  std::vector<VarLabel> vars;
  for (int i = -depth; i <= depth; ++i) vars.push_back({'e', i});
  vars.push_back({'f', -1});
  vars.push_back({'f', 0});
  return ExactModel(depth, std::move(vars));
}

ExactModel ExactModel::enlarged(int depth) {
  if (depth < 1 || depth > 4) throw std::invalid_argument("ExactModel::enlarged: depth must lie in [1, 4]");
  std::vector<VarLabel> vars;
  for (int i = -depth; i <= depth; ++i) vars.push_back({'e', i});
  for (int i = -depth; i <= depth; ++i) vars.push_back({'f', i});
  return ExactModel(depth, std::move(vars));
}

int ExactModel::position(VarLabel v) const {
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i] == v) return static_cast<int>(i);
  throw std::out_of_range("ExactModel: no variable " + to_string(v));
}

bool ExactModel::has(VarLabel v) const {
  for (const auto& w : vars_)
    if (w == v) return true;
  return false;
}

std::vector<double> ExactModel::values(VarLabel v) const {
  const int pos = position(v);
  std::vector<double> out(atom_count());
  for (std::size_t a = 0; a < out.size(); ++a) out[a] = (a >> pos) & 1U ? 1.0 : -1.0;
  return out;
}

double ExactModel::value(std::size_t atom, VarLabel v) const { return (atom >> position(v)) & 1U ? 1.0 : -1.0; }

ConditioningSet ExactModel::conditioning(std::span<const VarLabel> labels) const {
  ConditioningSet c;
  for (const auto& l : labels) c.mask |= std::uint32_t{1} << position(l);
  return c;
}

ConditioningSet ExactModel::all() const { return {static_cast<std::uint32_t>(atom_count() - 1)}; }

ConditioningSet ExactModel::c_k(int k) const {
  ConditioningSet c;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].index <= k) c.mask |= std::uint32_t{1} << i;
  return c;
}

ConditioningSet ExactModel::g_k(int k) const {
  ConditioningSet c;
  for (std::size_t i = 0; i < vars_.size(); ++i)
    if (vars_[i].kind == 'e' || vars_[i].index <= k) c.mask |= std::uint32_t{1} << i;
  return c;
}

double ExactModel::inner(std::span<const double> x, std::span<const double> y) const {
  if (x.size() != atom_count() || y.size() != atom_count())
    throw std::invalid_argument("ExactModel::inner: size mismatch");
  double acc = 0.0;
  for (std::size_t a = 0; a < x.size(); ++a) acc += x[a] * y[a];
  return acc * atom_weight();
}

double ExactModel::norm(std::span<const double> x) const { return std::sqrt(inner(x, x)); }

std::vector<double> conditional_expectation(const ExactModel& model, std::span<const double> target,
                                            ConditioningSet cond) {
  const std::size_t atoms = model.atom_count();
  if (target.size() != atoms) throw std::invalid_argument("conditional_expectation: target size mismatch");
  if ((cond.mask & ~static_cast<std::uint32_t>(atoms - 1)) != 0)
    throw std::invalid_argument("conditional_expectation: conditioning labels outside the model");

  // Atoms that agree on the conditioning bits share the key (atom & mask);
  // every class has the same number of atoms.
  std::vector<double> sums(atoms, 0.0);
  for (std::size_t a = 0; a < atoms; ++a) sums[a & cond.mask] += target[a];
  const double class_size = static_cast<double>(atoms >> std::popcount(cond.mask));
  std::vector<double> out(atoms);
  for (std::size_t a = 0; a < atoms; ++a) out[a] = sums[a & cond.mask] / class_size;
  return out;
}

std::vector<MdNorm> md_norms(const ExactModel& model) {
  const int K = model.depth();
  const auto& F = model.F_values();
  std::vector<MdNorm> out;
  std::vector<double> lower = conditional_expectation(model, F, model.c_k(-2));
  for (int k = -2; k <= K; ++k) {
    std::vector<double> upper = conditional_expectation(model, F, model.c_k(k + 1));
    std::vector<double> diff(upper.size());
    for (std::size_t a = 0; a < diff.size(); ++a) diff[a] = upper[a] - lower[a];

    MdNorm m;
    m.k = k;
    m.computed = model.norm(diff);
    if (k == -1) {
      double s = 5.0;
      for (int i = 1; i <= K; ++i) s += std::pow(9.0, -(2.0 * i + 1.0));
      m.analytic = std::sqrt(s);
    } else if (k >= 0 && k < K) {
      m.analytic = std::pow(3.0, -(2.0 * k + 2.0));
    }
    out.push_back(m);
    lower = std::move(upper);
  }
  return out;
}

HannanSum hannan_sum(const ExactModel& model) {
  HannanSum h;
  for (const auto& m : md_norms(model)) h.enumerated += m.computed;
  // sum_{k>=K} 9^{-(k+1)} = 9^{-K} / 8
  h.analytic_tail = std::pow(9.0, -static_cast<double>(model.depth())) / 8.0;
  h.total = h.enumerated + h.analytic_tail;
  h.finite = std::isfinite(h.total);
  return h;
}

ProjectionReport g_projection_check(const ExactModel& model) {
  if (!model.has({'f', -1})) throw std::invalid_argument("g_projection_check: model lacks f_{-1}");
  const auto& F = model.F_values();
  ProjectionReport rep;
  rep.values = conditional_expectation(model, F, model.g_k(-1));
  rep.norm = model.norm(rep.values);

  const std::vector<double> e0 = model.values({'e', 0});
  rep.multiple = rep.values[0] / e0[0];
  rep.multiple_of_e0 = true;
  for (std::size_t a = 0; a < e0.size(); ++a) {
    rep.max_dev_from_e0 = std::max(rep.max_dev_from_e0, std::abs(rep.values[a] - e0[a]));
    rep.max_dev_from_2e0 = std::max(rep.max_dev_from_2e0, std::abs(rep.values[a] - 2.0 * e0[a]));
    if (std::abs(rep.values[a] / e0[a] - rep.multiple) > 1e-12) rep.multiple_of_e0 = false;
  }

  const std::vector<double> upper = conditional_expectation(model, F, model.g_k(0));
  std::vector<double> md(upper.size());
  for (std::size_t a = 0; a < md.size(); ++a) md[a] = upper[a] - rep.values[a];
  for (const auto& v : model.variables()) {
    if (v.kind != 'e') continue;
    rep.max_md_inner_e = std::max(rep.max_md_inner_e, std::abs(model.inner(md, model.values(v))));
  }
  return rep;
}

std::array<CaseTally, 4> check_conditional_cases(const ExactModel& model) {
  const int K = model.depth();
  for (int i = -K; i <= K; ++i)
    if (!model.has({'f', i})) throw std::invalid_argument("check_conditional_cases: needs an enlarged model");

  std::array<CaseTally, 4> tally{};
  const std::vector<double> f0 = model.values({'f', 0});
  for (int k = -K; k <= K; ++k) {
    const ConditioningSet cond = model.c_k(k);
    for (int i = -K; i <= K; ++i) {
      const std::vector<double> ei = model.values({'e', i});
      std::vector<double> target(ei.size());
      for (std::size_t a = 0; a < target.size(); ++a) target[a] = f0[a] * ei[a];
      const std::vector<double> got = conditional_expectation(model, target, cond);

      const int which = k >= 0 ? (i <= k ? 0 : 1) : (i <= k ? 2 : 3);
      std::vector<double> displayed(got.size(), 0.0);
      if (which == 0) {
        const std::vector<double> fi = model.values({'f', i});
        for (std::size_t a = 0; a < displayed.size(); ++a) displayed[a] = fi[a] * ei[a];
      }
      auto same = [&](const std::vector<double>& ref) {
        for (std::size_t a = 0; a < got.size(); ++a)
          if (std::abs(got[a] - ref[a]) > 1e-12) return false;
        return true;
      };
      auto& t = tally[static_cast<std::size_t>(which)];
      ++t.checked;
      if (same(displayed)) ++t.matched;
      if (which == 0 && same(target)) ++t.matched_alternative;
    }
  }
  return tally;
}

double encode_g(std::span<const int> signs) {
  double g = 1.0;
  for (std::size_t j = 0; j < signs.size(); ++j) {
    if (signs[j] != 1 && signs[j] != -1) throw std::invalid_argument("encode_g: signs must be +-1");
    g += signs[j] * std::pow(3.0, -static_cast<double>(j + 2));
  }
  return g;
}

std::vector<int> decode_g(double value, int depth) {
  if (depth < 0) throw std::invalid_argument("decode_g: negative depth");
  std::vector<int> signs;
  signs.reserve(2 * static_cast<std::size_t>(depth));
  double residual = value - 1.0;
  // The remaining digits sum to at most 3^{-m}/2 < 3^{-m}, so the sign of
  // the residual is the sign of digit m.
  for (int m = 2; m <= 2 * depth + 1; ++m) {
    if (residual == 0.0) throw std::domain_error("decode_g: residual vanished at digit " + std::to_string(m));
    const int d = residual > 0.0 ? 1 : -1;
    signs.push_back(d);
    residual -= d * std::pow(3.0, -static_cast<double>(m));
  }
  return signs;
}

}  // namespace martapprox
