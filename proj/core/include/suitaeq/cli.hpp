#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace suitaeq::cli {

inline constexpr std::string_view kVersion = "0.1.0";

// exit codes: 2 carries a negative but informative verdict (NOT_EQUALITY,
// NOT_FOUND, criterion unsatisfied), 3 a numerical-quality failure, 4 a
// configuration or schema problem
inline constexpr int kExitOk = 0;
inline constexpr int kExitNegative = 2;
inline constexpr int kExitNumeric = 3;
inline constexpr int kExitConfig = 4;

struct Flags {
  std::string config_path;
  std::string out_path;  // report copy; CSV target for dump-field
  std::optional<unsigned> seed;
  std::optional<double> tolerance;
  std::optional<int> degree;
  bool timings = true;
};

std::span<const std::string_view> command_names();

/// Validate a config against the command's schema and materialize every
/// default; the result is canonical: normalizing it again is the identity.
/// Throws ConfigError on schema violations.
std::string normalize_config(const std::string& config_json, const std::string& command);

/// Run one command on config text: JSON report to `out`, diagnostics to
/// `err`. Returns the exit code.
int run_text(const std::string& command, const std::string& config_json, const Flags& flags,
             std::ostream& out, std::ostream& err);

/// File-reading wrapper around run_text; also writes --out artifacts.
int run(const std::string& command, const Flags& flags, std::ostream& out, std::ostream& err);

}  // namespace suitaeq::cli
