#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hdc/numeric.hpp"

namespace hdc::cli {

/// Environment variable naming the directory for relative --out paths.
inline constexpr const char* kOutputDirEnv = "HDC_OUTPUT_DIR";

/// Exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitCheckFailed = 1,
  kExitUsage = 2,
  kExitResource = 3,
  kExitRuntime = 4,
};

struct RunConfig {
  std::string subcommand;
  /// Echo of every option of the subcommand, given or defaulted.
  nlohmann::json echo = nlohmann::json::object();

  std::string format;  // text, csv, json; empty picks the subcommand default
  std::string out;     // file path; empty writes to stdout
  std::string out_dir;
  bool quiet = false;
  bool allow_large = false;
  unsigned threads = 0;

  double tol = 1e-9;
  std::string method = "series";
  std::size_t truncation = 10'000'000;

  std::size_t k = 2;
  /// x_k as written: a decimal or p/q, read exactly in rational mode.
  std::string xk = "1";
  std::size_t n_max = 1000;
  std::string kernel = "harmonic";
  bool exact = false;
  bool check_direct = false;

  std::size_t n = 1000;
  std::vector<std::size_t> ns;
  std::size_t n_lo = 2000;
  std::size_t n_hi = 30000;
  std::size_t points = 200;

  double gamma = 2.5;
  std::vector<double> gammas;
  std::size_t grid = 1000;

  std::size_t k_min = 2;
  std::size_t k_max = 10;
  std::size_t n_exact = 200;
  std::size_t n_float = 10000;

  std::size_t replicas = 1000;
  std::optional<std::uint64_t> seed;
  std::string stat = "count:2";
  std::string beta = "critical";
  std::string order = "unordered";
  std::string standardize = "dp-exact";
  std::optional<double> threshold;

  std::string f = "pow:-0.5";
  std::vector<int> only;
};

/// Exact value of a decimal ("0.25", "1e-3") or fraction ("7/22").
Rational parse_rational(const std::string& text);

/// Runs a parsed, validated config. Results go to `out` (or a file), the
/// metadata block and diagnostics to `err`.
int dispatch(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches.
int run(int argc, const char* const* argv);

/// tool version, generator id, config echo, ISO-8601 UTC timestamp.
nlohmann::json metadata(const RunConfig& config);

}  // namespace hdc::cli
