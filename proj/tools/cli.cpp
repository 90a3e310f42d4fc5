#include "cli.hpp"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "martapprox/errors.hpp"
#include "martapprox/inner.hpp"
#include "martapprox/linear_process.hpp"
#include "martapprox/prop2.hpp"
#include "martapprox/prop3.hpp"
#include "martapprox/series.hpp"

#ifndef MARTAPPROX_VERSION
#define MARTAPPROX_VERSION "unknown"
#endif

namespace martapprox::cli {

namespace {

using json = nlohmann::ordered_json;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

template <class T>
T parse_number(std::string_view key, std::string_view text) {
  const std::string v = trim(text);
  T out{};
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || ptr != v.data() + v.size())
    throw UsageError("invalid value for '" + std::string(key) + "': '" + std::string(text) + "'");
  return out;
}

std::string choice(std::string_view key, std::string_view text, std::initializer_list<const char*> allowed) {
  const std::string v = trim(text);
  for (const char* a : allowed)
    if (v == a) return v;
  std::string msg = "invalid value for '" + std::string(key) + "': '" + v + "' (expected one of";
  for (const char* a : allowed) msg += std::string(" ") + a;
  throw UsageError(msg + ")");
}

std::vector<std::int64_t> parse_list(std::string_view key, std::string_view text) {
  std::vector<std::int64_t> out;
  std::string item;
  std::stringstream ss{std::string(text)};
  while (std::getline(ss, item, ',')) {
    const auto v = parse_number<std::int64_t>(key, item);
    if (v < 1) throw UsageError("invalid value for '" + std::string(key) + "': horizons must be >= 1");
    out.push_back(v);
  }
  if (out.empty()) throw UsageError("invalid value for '" + std::string(key) + "': empty list");
  return out;
}

std::string join(const std::vector<std::int64_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

std::string fmt_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string cell_text(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return std::to_string(*i);
  if (const auto* d = std::get_if<double>(&c)) return fmt_double(*d);
  return std::get<std::string>(c);
}

json cell_json(const Cell& c) {
  if (const auto* i = std::get_if<std::int64_t>(&c)) return *i;
  if (const auto* d = std::get_if<double>(&c)) return *d;
  return std::get<std::string>(c);
}

const char* extension(OutFormat f) { return f == OutFormat::csv ? "csv" : "json"; }

std::int64_t to_i(bool b) { return b ? 1 : 0; }

// ---- series shared by inner, cesaro and gap ----

CoefficientSeries build_series(const RunConfig& cfg) {
  if (cfg.trunc < 1) throw UsageError("invalid value for 'trunc': must be >= 1");
  if (cfg.kind == "singular") return singular_inner_coeffs(cfg.a, cfg.trunc);
  const BlaschkeSpec spec = cfg.zeros == "dyadic" ? BlaschkeSpec::dyadic(cfg.zeros_count)
                                                  : BlaschkeSpec::power(cfg.alpha, cfg.zeros_count);
  return blaschke_product_coeffs(spec, cfg.trunc);
}

std::string tail_text(const CoefficientSeries& s) {
  return s.tail_mass_bound() ? fmt_double(*s.tail_mass_bound()) : std::string("unset");
}

std::vector<Table> inner_tables(const RunConfig& cfg) {
  const CoefficientSeries s = build_series(cfg);
  const CesaroProfile prof = cesaro_profile(s);
  const bool singular = cfg.kind == "singular";

  Table coeffs{"coefficients", {"n", "a_n", "A_n", "M_n"}, {}};
  if (singular) coeffs.columns.push_back("main_term");
  for (int n = 0; n <= s.order(); ++n) {
    const auto i = static_cast<std::size_t>(n);
    std::vector<Cell> row{std::int64_t{n}, s[i], prof.partial_sums[i], n == 0 ? 0.0 : prof.mean(i)};
    if (singular) row.emplace_back(n == 0 ? 0.0 : singular_coeff_main_term(cfg.a, n));
    coeffs.rows.push_back(std::move(row));
  }

  Table ac{"autocorrelation", {"lag", "value", "deviation", "bound"}, {}};
  const double T = s.tail_mass_bound().value_or(0.0);
  for (int k = 0; k <= std::min(cfg.max_lag, s.order()); ++k) {
    const double v = autocorrelation(s, k);
    ac.rows.push_back({std::int64_t{k}, v, std::abs(v - (k == 0 ? 1.0 : 0.0)), 2.0 * std::sqrt(T)});
  }
  return {coeffs, ac};
}

std::vector<Table> cesaro_tables(const RunConfig& cfg) {
  if (cfg.stride < 1) throw UsageError("invalid value for 'stride': must be >= 1");
  const CoefficientSeries s = build_series(cfg);
  const CesaroProfile prof = cesaro_profile(s);
  const auto N = static_cast<std::size_t>(s.order());  // means M_1..M_N
  if (N == 0) throw UsageError("invalid value for 'trunc': cesaro needs trunc >= 1");

  Table t{"cesaro", {"n", "A_n_minus_1", "M_n"}, {}};
  for (std::size_t n = 1; n <= N; n += static_cast<std::size_t>(cfg.stride))
    t.rows.push_back({static_cast<std::int64_t>(n), prof.partial_sums[n - 1], prof.mean(n)});
  if ((N - 1) % static_cast<std::size_t>(cfg.stride) != 0)
    t.rows.push_back({static_cast<std::int64_t>(N), prof.partial_sums[N - 1], prof.mean(N)});

  const DecayDiagnostics d = coefficient_decay_diagnostics(s);
  Table diag{"diagnostics", {"order", "sup_n_abs_a_n", "argmax", "tail_mass_bound", "M_last"}, {}};
  diag.rows.push_back({std::int64_t{s.order()}, d.sup, std::int64_t{d.argmax}, tail_text(s), prof.mean(N)});
  return {t, diag};
}

std::vector<Table> gap_tables(const RunConfig& cfg) {
  const CoefficientSeries s = build_series(cfg);
  const SnNorm src = cfg.sn_norm == "orthonormal" ? SnNorm::orthonormal : SnNorm::coefficients;
  Table t{"gap",
          {"n", "c_star", "min_gap_sq", "gap_sq_c_plus1", "gap_sq_c_minus1", "sn_norm_sq", "truncated_sn_norm_sq",
           "horizon_exceeds_order"},
          {}};
  for (std::int64_t n : cfg.horizons) {
    if (src == SnNorm::orthonormal && n - 1 > s.order())
      throw UsageError("invalid value for 'horizons': " + std::to_string(n) + " exceeds trunc + 1");
    const GapReport best = best_scalar_gap(s, n, src);
    const GapReport plus = gap(s, 1.0, n, src);
    const GapReport minus = gap(s, -1.0, n, src);
    t.rows.push_back({n, best.c_star, best.min_gap_sq, plus.gap_sq, minus.gap_sq, best.sn_norm_sq,
                      best.truncated_sn_norm_sq, to_i(best.horizon_exceeds_order)});
  }
  return {t};
}

std::vector<Table> prop6_tables(const RunConfig& cfg) {
  if (cfg.n_min < 1 || cfg.n_max < cfg.n_min || cfg.n_max > cfg.k_max - 1)
    throw UsageError("invalid value for 'n-range': need 1 <= lo <= hi <= k-max - 1");
  Table t{"prop6", {"n", "r", "p1", "p2", "p3", "p4", "product", "c_bound", "value_at_zero"}, {}};
  for (int n = cfg.n_min; n <= cfg.n_max; ++n) {
    const Prop6Report r = prop6_check(n, cfg.k_max);
    t.rows.push_back({std::int64_t{n}, r.r, r.p1, r.p2, r.p3, r.p4, r.product, r.c_bound, r.value_at_zero});
  }
  return {t};
}

std::vector<Table> prop3_tables(const RunConfig& cfg) {
  const BoundSequence b = cfg.b_rule == "invsqrtlog" ? inv_sqrt_log_bound() : inv_log_bound();
  const Prop3Params P = synthesize_params(b, cfg.K);
  check_params(P);

  Table params{"params", {"k", "p", "rho", "phi", "log_q", "log_r", "log_s"}, {}};
  for (int k = 1; k <= P.K; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    params.rows.push_back({std::int64_t{k}, P.p[i], P.rho[i], P.phi[i], P.log_q[i], P.log_r[i],
                           k == 1 ? Cell{std::string("-inf")} : Cell{P.log_s[i]}});
  }

  Table norms{"norms",
              {"n", "m_prime_first", "m_prime_second", "m_prime_total", "m_star_first", "m_star_second",
               "m_star_total", "n_b_n_sq"},
              {}};
  for (std::int64_t n : cfg.norm_horizons) {
    const NormBreakdown mp = norm_m_prime_sq(P, n), ms = norm_m_star_sq(P, n);
    const double bn = P.b(n);
    norms.rows.push_back({n, mp.first_sum, mp.second_sum, mp.total, ms.first_sum, ms.second_sum, ms.total,
                          static_cast<double>(n) * bn * bn});
  }

  Table witness{"witness", {"j", "phi", "m_star_total", "phi_b_phi_sq"}, {}};
  for (int j = 1; j <= P.K; ++j) {
    const std::int64_t n = P.phi[static_cast<std::size_t>(j - 1)];
    const double bn = P.b(n);
    witness.rows.push_back({std::int64_t{j}, n, norm_m_star_sq(P, n).total, static_cast<double>(n) * bn * bn});
  }

  const DecodeReport rep =
      simulate_and_decode(P, cfg.samples, cfg.seed, cfg.law == "uniform" ? OccupancyLaw::uniform : OccupancyLaw::natural);
  std::string silent;
  for (std::size_t i = 0; i < rep.silent_levels.size(); ++i)
    silent += (i ? ";" : "") + std::to_string(rep.silent_levels[i]);
  Table decode{"decode",
               {"samples", "recovered", "failures", "boundary_hits", "decoded_in_double", "decoded_extended",
                "silent_levels", "truncation_error"},
               {}};
  decode.rows.push_back({rep.samples, rep.recovered, rep.failures, rep.boundary_hits, rep.decoded_in_double,
                         rep.decoded_extended, silent, rep.truncation_error});

  std::vector<Table> out{params, norms, witness, decode};
  if (cfg.mc_replicates > 0) {
    Table mc{"mc", {"n", "replicates", "empirical_variance", "exact"}, {}};
    mc.rows.push_back({cfg.mc_n, std::int64_t{cfg.mc_replicates},
                       level1_gap_variance_mc(P, cfg.mc_n, cfg.mc_replicates, cfg.seed),
                       m_prime_level_term(P, 1, cfg.mc_n)});
    out.push_back(mc);
  }
  return out;
}

std::vector<Table> prop2_tables(const RunConfig& cfg) {
  const ExactModel model = ExactModel::standard(cfg.depth);

  Table md{"md_norms", {"k", "computed", "analytic"}, {}};
  for (const MdNorm& m : md_norms(model)) md.rows.push_back({std::int64_t{m.k}, m.computed, m.analytic});

  const HannanSum h = hannan_sum(model);
  Table hannan{"hannan", {"enumerated", "analytic_tail", "total", "finite"}, {}};
  hannan.rows.push_back({h.enumerated, h.analytic_tail, h.total, to_i(h.finite)});

  Table cases{"cases", {"case", "checked", "matched", "matched_alternative"}, {}};
  if (cfg.depth <= 4) {
    const auto tally = check_conditional_cases(ExactModel::enlarged(cfg.depth));
    for (std::size_t c = 0; c < tally.size(); ++c)
      cases.rows.push_back({static_cast<std::int64_t>(c), std::int64_t{tally[c].checked},
                            std::int64_t{tally[c].matched}, std::int64_t{tally[c].matched_alternative}});
  }

  const ProjectionReport p = g_projection_check(model);
  Table proj{"projection",
             {"norm", "multiple_of_e0", "multiple", "max_dev_from_e0", "max_dev_from_2e0", "max_md_inner_e"},
             {}};
  proj.rows.push_back({p.norm, to_i(p.multiple_of_e0), p.multiple, p.max_dev_from_e0, p.max_dev_from_2e0,
                       p.max_md_inner_e});
  return {md, hannan, cases, proj};
}

json metadata_for(const RunConfig& cfg, const std::string& table) {
  json cfg_echo = json::object();
  for (const auto& [k, v] : serialize(cfg)) cfg_echo[k] = v;
  json m = json::object();
  m["tool"] = "martapprox";
  m["version"] = MARTAPPROX_VERSION;
  m["compiler"] = __VERSION__;
  m["command"] = cfg.command;
  m["table"] = table;
  m["config"] = cfg_echo;
  return m;
}

std::filesystem::path sibling(const std::filesystem::path& primary, const std::string& tag, const char* ext) {
  std::filesystem::path p = primary.parent_path() / primary.stem();
  p += "." + tag + "." + ext;
  return p;
}

}  // namespace

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys{
      "command", "seed",    "trunc", "out",         "out-path", "kind",  "a",      "zeros",
      "zeros-count", "alpha", "max-lag", "stride",  "horizons", "sn-norm", "n-range", "k-max",
      "K",       "b-rule",  "norm-horizons", "samples", "law", "mc-replicates", "mc-n", "depth"};
  return keys;
}

void set_key(RunConfig& cfg, std::string_view key, std::string_view value) {
  const std::string k = trim(key);
  if (k == "command") cfg.command = choice(k, value, {"inner", "cesaro", "gap", "prop6", "prop3", "prop2"});
  else if (k == "seed") cfg.seed = parse_number<std::uint64_t>(k, value);
  else if (k == "trunc") cfg.trunc = parse_number<int>(k, value);
  else if (k == "out") cfg.out_format = choice(k, value, {"csv", "json"}) == "csv" ? OutFormat::csv : OutFormat::json;
  else if (k == "out-path") cfg.out_path = trim(value);
  else if (k == "kind") cfg.kind = choice(k, value, {"singular", "blaschke"});
  else if (k == "a") {
    cfg.a = parse_number<double>(k, value);
    if (!(cfg.a > 0.0)) throw UsageError("invalid value for 'a': must be > 0");
  } else if (k == "zeros") cfg.zeros = choice(k, value, {"dyadic", "power"});
  else if (k == "zeros-count") cfg.zeros_count = parse_number<int>(k, value);
  else if (k == "alpha") cfg.alpha = parse_number<double>(k, value);
  else if (k == "max-lag") cfg.max_lag = parse_number<int>(k, value);
  else if (k == "stride") cfg.stride = parse_number<int>(k, value);
  else if (k == "horizons") cfg.horizons = parse_list(k, value);
  else if (k == "sn-norm") cfg.sn_norm = choice(k, value, {"orthonormal", "coefficients"});
  else if (k == "n-range") {
    const std::string v = trim(value);
    const auto dots = v.find("..");
    if (dots == std::string::npos) throw UsageError("invalid value for 'n-range': expected lo..hi");
    cfg.n_min = parse_number<int>(k, std::string_view(v).substr(0, dots));
    cfg.n_max = parse_number<int>(k, std::string_view(v).substr(dots + 2));
  } else if (k == "k-max") cfg.k_max = parse_number<int>(k, value);
  else if (k == "K") cfg.K = parse_number<int>(k, value);
  else if (k == "b-rule") cfg.b_rule = choice(k, value, {"invsqrtlog", "invlog"});
  else if (k == "norm-horizons") cfg.norm_horizons = parse_list(k, value);
  else if (k == "samples") cfg.samples = parse_number<std::int64_t>(k, value);
  else if (k == "law") cfg.law = choice(k, value, {"natural", "uniform"});
  else if (k == "mc-replicates") cfg.mc_replicates = parse_number<int>(k, value);
  else if (k == "mc-n") cfg.mc_n = parse_number<std::int64_t>(k, value);
  else if (k == "depth") cfg.depth = parse_number<int>(k, value);
  else throw UsageError("unknown key '" + k + "'");
}

std::vector<std::pair<std::string, std::string>> serialize(const RunConfig& cfg) {
  return {{"command", cfg.command},
          {"seed", std::to_string(cfg.seed)},
          {"trunc", std::to_string(cfg.trunc)},
          {"out", extension(cfg.out_format)},
          {"out-path", cfg.out_path},
          {"kind", cfg.kind},
          {"a", fmt_double(cfg.a)},
          {"zeros", cfg.zeros},
          {"zeros-count", std::to_string(cfg.zeros_count)},
          {"alpha", fmt_double(cfg.alpha)},
          {"max-lag", std::to_string(cfg.max_lag)},
          {"stride", std::to_string(cfg.stride)},
          {"horizons", join(cfg.horizons)},
          {"sn-norm", cfg.sn_norm},
          {"n-range", std::to_string(cfg.n_min) + ".." + std::to_string(cfg.n_max)},
          {"k-max", std::to_string(cfg.k_max)},
          {"K", std::to_string(cfg.K)},
          {"b-rule", cfg.b_rule},
          {"norm-horizons", join(cfg.norm_horizons)},
          {"samples", std::to_string(cfg.samples)},
          {"law", cfg.law},
          {"mc-replicates", std::to_string(cfg.mc_replicates)},
          {"mc-n", std::to_string(cfg.mc_n)},
          {"depth", std::to_string(cfg.depth)}};
}

void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::stringstream ss{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config line " + std::to_string(lineno) + ": expected key = value");
    set_key(cfg, line.substr(0, eq), line.substr(eq + 1));
  }
}

void apply_config_file(RunConfig& cfg, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read config file '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(cfg, buf.str());
}

void emit_table(const Table& table, OutFormat format, const std::filesystem::path& path, const json& metadata) {
  for (const auto& row : table.rows)
    if (row.size() != table.columns.size())
      throw std::invalid_argument("emit_table: row width does not match schema of '" + table.name + "'");

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("emit_table: cannot write '" + path.string() + "'");

  if (format == OutFormat::csv) {
    for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
    out << '\n';
    for (const auto& row : table.rows) {
      for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
      out << '\n';
    }
  } else {
    json doc = json::object();
    doc["metadata"] = metadata;
    json rows = json::array();
    for (const auto& row : table.rows) {
      json r = json::object();
      for (std::size_t c = 0; c < row.size(); ++c) r[table.columns[c]] = cell_json(row[c]);
      rows.push_back(std::move(r));
    }
    doc["rows"] = std::move(rows);
    out << doc.dump(2) << '\n';
  }
  if (!out) throw std::runtime_error("emit_table: write failed for '" + path.string() + "'");
}

std::vector<Table> build_tables(const RunConfig& cfg) {
  if (cfg.command == "inner") return inner_tables(cfg);
  if (cfg.command == "cesaro") return cesaro_tables(cfg);
  if (cfg.command == "gap") return gap_tables(cfg);
  if (cfg.command == "prop6") return prop6_tables(cfg);
  if (cfg.command == "prop3") return prop3_tables(cfg);
  if (cfg.command == "prop2") return prop2_tables(cfg);
  throw UsageError("unknown command '" + cfg.command + "'");
}

std::filesystem::path primary_path(const RunConfig& cfg) {
  if (!cfg.out_path.empty()) return cfg.out_path;
  std::filesystem::path dir = ".";
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') dir = env;
  return dir / (cfg.command + "." + extension(cfg.out_format));
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const auto start = std::chrono::steady_clock::now();
  try {
    const std::vector<Table> tables = build_tables(cfg);
    const std::filesystem::path primary = primary_path(cfg);
    const char* ext = extension(cfg.out_format);
    for (std::size_t i = 0; i < tables.size(); ++i) {
      const auto path = i == 0 ? primary : sibling(primary, tables[i].name, ext);
      emit_table(tables[i], cfg.out_format, path, metadata_for(cfg, tables[i].name));
      out << path.string() << '\n';
    }
    if (cfg.out_format == OutFormat::csv) {
      json meta = metadata_for(cfg, tables.front().name);
      json names = json::array();
      for (const auto& t : tables) names.push_back(t.name);
      meta["tables"] = names;
      const auto path = sibling(primary, "meta", "json");
      std::ofstream m(path, std::ios::binary | std::ios::trunc);
      if (!m) throw std::runtime_error("cannot write '" + path.string() + "'");
      m << meta.dump(2) << '\n';
      out << path.string() << '\n';
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvariantViolation& e) {
    err << "invariant violation [" << e.module() << "/" << e.invariant() << "]: " << e.what() << '\n';
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  const std::chrono::duration<double> dt = std::chrono::steady_clock::now() - start;
  err << "wall_time_s=" << fmt_double(dt.count()) << '\n';
  return kExitOk;
}

int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"martapprox: martingale-approximation numerics"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "key = value file; flags take precedence");

  std::map<std::string, std::string> flag_values;
  std::map<std::string, CLI::Option*> flag_opts;
  for (const std::string& key : config_keys()) {
    if (key == "command") continue;
    flag_opts[key] = app.add_option("--" + key, flag_values[key]);
  }
  for (const char* cmd : {"inner", "cesaro", "gap", "prop6", "prop3", "prop2"}) app.add_subcommand(cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }

  RunConfig cfg;
  try {
    if (!config_path.empty()) apply_config_file(cfg, config_path);
    cfg.command = app.get_subcommands().front()->get_name();
    for (const auto& [key, opt] : flag_opts)
      if (opt->count() > 0) set_key(cfg, key, flag_values[key]);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return run(cfg, out, err);
}

}  // namespace martapprox::cli
