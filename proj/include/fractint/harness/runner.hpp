#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fractint/harness/config.hpp"

namespace fractint {

inline constexpr const char* kToolVersion = "0.1.0";

// Experiments the runner knows, in a fixed order.
const std::vector<std::string>& experiment_names();

struct SummaryRow {
  std::string experiment;
  std::string theorem;
  std::string construction;
  std::string predicted;
  std::string fitted_slope;
  std::string residual;
  std::string verdict;
  std::string statistic;
  std::string value;
  std::string exceptional_fraction;
  std::string exceptional_dim;
  std::string predicted_exceptional_dim;
};

std::string summary_header();
std::string summary_line(const SummaryRow& row);
// Parses one data line written by summary_line.
SummaryRow parse_summary_line(const std::string& line);

// Quotes a field when it holds a comma or a quote.
std::string csv_field(const std::string& s);
std::vector<std::string> split_csv_line(const std::string& line);

struct RunOptions {
  std::filesystem::path config;
  // Empty or "run": use the config's experiment. Otherwise it must match.
  std::string experiment;
  std::optional<std::uint64_t> seed;
  bool force = false;
  // Falls back to the config's [run] out, then "results".
  std::optional<std::filesystem::path> out;
};

struct RunOutcome {
  int exit_code = 0;  // 0 respected or informational, 1 error, 2 bound violated
  std::filesystem::path dir;
  bool cached = false;
  std::string verdict;
};

// Loads, runs and persists one experiment. Errors are reported on `log` and
// give exit code 1 with nothing written.
RunOutcome run_experiment(const RunOptions& options, std::ostream& log);
// Same for an already parsed config; throws Error instead of reporting.
RunOutcome run_config(Config config, const RunOptions& options, std::ostream& log);

}  // namespace fractint
