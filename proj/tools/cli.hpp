#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

namespace martapprox::cli {

/// Bad key, bad value or bad combination; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitInvariant = 3;

/// Environment variable naming the directory used when out-path is unset.
inline constexpr const char* kOutDirEnv = "MARTAPPROX_OUT_DIR";

enum class OutFormat { csv, json };

// Every field is settable by key (see set_key); keys are the long flag names.
struct RunConfig {
  std::string command;                 // inner | cesaro | gap | prop6 | prop3 | prop2
  std::uint64_t seed = 0;              // seed
  int trunc = 5000;                    // trunc: truncation order N
  OutFormat out_format = OutFormat::csv;  // out
  std::string out_path;                // out-path; empty: $MARTAPPROX_OUT_DIR/<command>.<ext>

  std::string kind = "singular";       // kind: singular | blaschke
  double a = 1.0;                      // a
  std::string zeros = "dyadic";        // zeros: dyadic | power
  int zeros_count = 12;                // zeros-count
  double alpha = 2.0;                  // alpha (power rule)
  int max_lag = 100;                   // max-lag (inner autocorrelation table)
  int stride = 1;                      // stride (cesaro rows)

  std::vector<std::int64_t> horizons{10, 100, 1000};  // horizons (gap)
  std::string sn_norm = "orthonormal"; // sn-norm: orthonormal | coefficients

  int n_min = 2;                       // n-range "lo..hi"
  int n_max = 20;
  int k_max = 40;                      // k-max

  int K = 4;                           // K
  std::string b_rule = "invsqrtlog";   // b-rule: invsqrtlog | invlog
  std::vector<std::int64_t> norm_horizons{1, 10, 100, 1000, 10000, 100000, 1000000};  // norm-horizons
  std::int64_t samples = 10000;        // samples
  std::string law = "natural";         // law: natural | uniform
  int mc_replicates = 0;               // mc-replicates (0 skips the table)
  std::int64_t mc_n = 64;              // mc-n

  int depth = 3;                       // depth (prop2)
};

/// All known keys in serialization order.
const std::vector<std::string>& config_keys();

/// Throws UsageError naming the key for unknown keys or unparsable values.
void set_key(RunConfig& cfg, std::string_view key, std::string_view value);

/// key=value pairs in config_keys() order; feeding them back through set_key
/// reproduces the config.
std::vector<std::pair<std::string, std::string>> serialize(const RunConfig& cfg);

/// Strict "key = value" lines; '#' starts a comment. Applied on top of cfg.
void apply_config_text(RunConfig& cfg, std::string_view text);
void apply_config_file(RunConfig& cfg, const std::filesystem::path& path);

using Cell = std::variant<std::int64_t, double, std::string>;

struct Table {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
};

/// CSV: header row then one line per row, doubles as %.17g. JSON: an object
/// with "metadata" and "rows" (array of column-keyed objects). Throws
/// std::runtime_error if the file cannot be written and std::invalid_argument
/// if a row does not match the column count.
void emit_table(const Table& table, OutFormat format, const std::filesystem::path& path,
                const nlohmann::ordered_json& metadata = nlohmann::ordered_json::object());

/// Builds the tables for cfg.command without writing anything.
std::vector<Table> build_tables(const RunConfig& cfg);

/// Primary output path for cfg, honouring kOutDirEnv.
std::filesystem::path primary_path(const RunConfig& cfg);

/// Runs the command and writes its files: the first table to primary_path,
/// table t to <stem>.<t>.<ext>, and for csv a <stem>.meta.json record.
/// Returns the exit status; messages go to `err`.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

/// Full command-line entry point (argv[0] included).
int main_entry(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace martapprox::cli
