#include "fractint/harness/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <string>

#include <fmt/format.h>

#include "fractint/error.hpp"
#include "fractint/harness/runner.hpp"

namespace fractint {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string>& theorem_order() {
  static const std::vector<std::string> order{
      "construction", "dimension", "energy",   "fourier-decay", "hyperplane", "mattila",      "translation",
      "rotation",     "fourier",   "dilation", "operator",      "level-set",  "maximal",      "two-equation",
      "two-spheres",  "inverse",   "number-theory"};
  return order;
}

std::size_t rank(const std::string& theorem) {
  const auto& order = theorem_order();
  const auto it = std::find(order.begin(), order.end(), theorem);
  return static_cast<std::size_t>(it - order.begin());
}

constexpr const char* kHeader = "theorem,construction,predicted_exponent,fitted_slope,residual,verdict,run";

std::string row_line(const SummaryRow& r, const std::string& run) {
  return fmt::format("{},{},{},{},{},{},{}", csv_field(r.theorem), csv_field(r.construction), csv_field(r.predicted),
                     csv_field(r.fitted_slope), csv_field(r.residual), csv_field(r.verdict), csv_field(run));
}

}  // namespace

ReportOutcome write_report(const std::vector<fs::path>& dirs, const fs::path& out) {
  struct Row {
    SummaryRow summary;
    std::string run;
  };
  std::vector<Row> rows;
  for (const fs::path& dir : dirs) {
    if (!fs::exists(dir / "manifest.txt")) throw FormatError(fmt::format("no manifest in '{}'", dir.string()));
    std::ifstream in(dir / "summary.csv");
    if (!in) throw FormatError(fmt::format("no summary in '{}'", dir.string()));
    std::string line;
    std::getline(in, line);
    if (line != summary_header()) throw FormatError(fmt::format("unexpected summary header in '{}'", dir.string()));
    const std::string run = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
    while (std::getline(in, line)) {
      if (!line.empty()) rows.push_back({parse_summary_line(line), run});
    }
  }
  std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    const auto ra = rank(a.summary.theorem), rb = rank(b.summary.theorem);
    if (ra != rb) return ra < rb;
    if (ra == theorem_order().size()) return a.summary.theorem < b.summary.theorem;
    return false;
  });

  fs::create_directories(out);
  ReportOutcome outcome;
  outcome.rows = rows.size();
  std::ofstream all(out / "report.csv", std::ios::binary);
  all << kHeader << "\n";
  std::map<std::string, std::ofstream> per_theorem;
  for (const Row& r : rows) {
    all << row_line(r.summary, r.run) << "\n";
    auto it = per_theorem.find(r.summary.theorem);
    if (it == per_theorem.end()) {
      const fs::path p = out / fmt::format("report-{}.csv", r.summary.theorem);
      it = per_theorem.emplace(r.summary.theorem, std::ofstream(p, std::ios::binary)).first;
      it->second << kHeader << "\n";
      outcome.files.push_back(p);
    }
    it->second << row_line(r.summary, r.run) << "\n";
  }
  outcome.files.insert(outcome.files.begin(), out / "report.csv");
  for (const fs::path& dir : dirs) {
    if (fs::exists(dir / "plot.dat")) {
      const fs::path target = out / fmt::format("plot-{}.dat", dir.filename().string());
      fs::copy_file(dir / "plot.dat", target, fs::copy_options::overwrite_existing);
      outcome.files.push_back(target);
    }
  }
  return outcome;
}

}  // namespace fractint
