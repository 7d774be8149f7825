#pragma once

// Batch scenarios: JSON payloads describing a capacity, a step function and an
// economy, plus a list of checks. Running one produces a report.

#include "choquet/capacity.hpp"
#include "choquet/economy.hpp"
#include "choquet/error.hpp"
#include "choquet/integral.hpp"
#include "choquet/verdict.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace choquet::scenario {

inline constexpr const char* format_version = "1";
inline constexpr std::uint64_t default_seed = 20240601;

struct Options {
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<double> tol;
};

/// Restricts a run to the operations of one CLI subcommand, e.g. "economy walras".
/// An empty filter runs every listed check.
struct Filter {
  std::string command;
};

struct CheckResult {
  std::string name;
  std::string op;
  std::string tag;
  Status status = Status::pass;
  std::string detail;
  std::vector<std::pair<std::string, double>> values;
  std::vector<std::pair<std::string, std::string>> exact;
  std::vector<std::pair<std::string, std::string>> witness;
  std::optional<std::uint64_t> seed;
  double elapsed_ms = 0.0;
};

struct Report {
  std::string description;
  std::vector<CheckResult> checks;

  /// 0 when nothing failed, 1 otherwise.
  int exit_code() const;
  std::string to_json(bool indent = true) const;
  std::string to_text() const;
};

/// Parses and runs a scenario. Schema problems throw Error(parse) with a JSON
/// pointer to the offending field.
Report run(std::string_view scenario_json, const Options& opts = {}, const Filter& filter = {});

/// Bundled scenarios.
std::vector<std::string> demo_names();
/// Throws Error(invalid_argument) listing the registry for unknown names.
std::string demo_scenario(const std::string& name);

/// Standalone payload parsers shared with the C interface.
Capacity parse_capacity(std::string_view json);
Region parse_region(std::string_view json, const Universe& u);
Economy parse_economy(std::string_view json);

/// Maps a library error to a process exit code: 3 for broken invariants, 2 otherwise.
int exit_code_for(const Error& e);

}  // namespace choquet::scenario
