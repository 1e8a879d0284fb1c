#pragma once

#include <filesystem>
#include <vector>

namespace fractint {

struct ReportOutcome {
  std::size_t rows = 0;
  std::vector<std::filesystem::path> files;
};

// Merges the summaries of finished runs into report.csv (all rows grouped by
// theorem in a fixed order), one report-<theorem>.csv per theorem, and copies
// each run's log-log plot data to plot-<run>.dat. Throws FormatError when a
// directory has no manifest.
ReportOutcome write_report(const std::vector<std::filesystem::path>& dirs, const std::filesystem::path& out);

}  // namespace fractint
