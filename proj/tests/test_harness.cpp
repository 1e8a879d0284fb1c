#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fractint/harness/config.hpp"
#include "fractint/harness/report.hpp"
#include "fractint/harness/runner.hpp"
#include "fractint/parallel.hpp"

using namespace fractint;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fractint-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_config(const fs::path& dir, const std::string& name, const std::string& text) {
  const fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunOutcome run(const fs::path& config, const fs::path& out, bool force = false) {
  RunOptions opt;
  opt.config = config;
  opt.out = out;
  opt.force = force;
  std::ostringstream log;
  return run_experiment(opt, log);
}

const char* kTranslate = R"(experiment = intersect-translate
seed = 3
[A]
kind = product
factors = box cantor
k = 8
[B]
kind = sphere
d = 2
[sampling]
per_axis = 8
)";

}  // namespace

TEST_CASE("config sections, comments and typed values") {
  std::istringstream in(R"(# leading comment
experiment = dims   ; trailing comment
ladder = 2, 4 6 8

[A]
kind = box
d = 2
radius = 0.25
)");
  const Config c = Config::parse(in, "mem");
  CHECK(c.text("run", "experiment") == "dims");
  CHECK(c.numbers("run", "ladder") == std::vector<double>{2, 4, 6, 8});
  CHECK(c.integer("A", "d") == 2);
  CHECK(c.number("A", "radius") == 0.25);
  CHECK(c.number_or("A", "missing", 7.0) == 7.0);
  CHECK(c.unused().size() == 1);
  CHECK(c.unused()[0] == "mem:6: [A] kind");
}

TEST_CASE("config diagnostics carry the line") {
  auto fails_with = [](const std::string& text, const std::string& fragment) {
    std::istringstream in(text);
    try {
      const Config c = Config::parse(in, "cfg");
      (void)c.integer("run", "k");
    } catch (const ConfigError& e) {
      return std::string(e.what()).find(fragment) != std::string::npos;
    }
    return false;
  };
  CHECK(fails_with("k = 1\nk = 2\n", "cfg:2: duplicate key"));
  CHECK(fails_with("k 1\n", "cfg:1: expected key = value"));
  CHECK(fails_with("[A\n", "cfg:1: unterminated"));
  CHECK(fails_with("\nk = ten\n", "cfg:2: [run] k: 'ten' is not an integer"));
  CHECK(fails_with("j = 1\n", "[run] k: missing"));
}

TEST_CASE("canonical form and hash ignore layout") {
  std::istringstream a("x = 1\n[B]\ny = 2\n");
  std::istringstream b("[B]\ny   =   2   # same\n[run]\nx=1\n");
  CHECK(Config::parse(a).canonical() == Config::parse(b).canonical());
  CHECK(fnv1a64("") == 0xcbf29ce484222325ull);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cull);
}

TEST_CASE("summary lines round trip through quoting") {
  SummaryRow r{"dims", "dimension", "cantor(1/4,n=6)", "0.5", "0.5", "0", "informational", "say \"hi\"", "", "", "", ""};
  const SummaryRow back = parse_summary_line(summary_line(r));
  CHECK(back.construction == r.construction);
  CHECK(back.statistic == r.statistic);
}

TEST_CASE("dims run on the Cantor set") {
  const fs::path dir = scratch("dims");
  const fs::path cfg = write_config(dir, "dims.ini", "experiment = dims\n[A]\nkind = cantor\np = 2\nn = 6\nk = 12\n");
  const RunOutcome r = run(cfg, dir / "out");
  CHECK(r.exit_code == 0);
  const std::string summary = slurp(r.dir / "summary.csv");
  const SummaryRow row = parse_summary_line(summary.substr(summary.find('\n') + 1, summary.rfind('\n') - summary.find('\n') - 1));
  CHECK(std::abs(std::stod(row.fitted_slope) - 0.5) < 0.05);
  for (const char* f : {"records.csv", "summary.csv", "verdict.txt", "manifest.txt", "plot.dat"}) {
    CHECK(fs::exists(r.dir / f));
  }
}

TEST_CASE("count run reproduces the golden table") {
  const fs::path dir = scratch("count");
  const fs::path cfg = write_config(
      dir, "count.ini", "experiment = count\n[lattice]\nd = 2\nq = 8\ns = 1.5\nlambda = 8\nmode = exhaustive\n");
  const RunOutcome r = run(cfg, dir / "out");
  CHECK(r.exit_code == 0);
  CHECK(slurp(r.dir / "records.csv") == slurp(FRACTINT_GOLDEN_DIR "/count_d2_q8.csv"));
}

TEST_CASE("bad configs exit 1 without artifacts") {
  const fs::path dir = scratch("bad");
  for (const std::string text : {"experiment = intersect-sideways\n", "experiment = dims\n[A]\nkind = box\ncolour = red\n",
                                 "experiment = dims\n[A]\nkind = pentagon\n", "experiment = dims\n",
                                 "experiment = count\n[lattice]\nq = 8\ns = 3.5\n"}) {
    const fs::path cfg = write_config(dir, "bad.ini", text);
    CHECK(run(cfg, dir / "out").exit_code == 1);
    CHECK_FALSE(fs::exists(dir / "out"));
  }
  RunOptions opt;
  opt.config = dir / "missing.ini";
  std::ostringstream log;
  CHECK(run_experiment(opt, log).exit_code == 1);
}

TEST_CASE("subcommand must match the config") {
  const fs::path dir = scratch("mismatch");
  const fs::path cfg = write_config(dir, "t.ini", kTranslate);
  RunOptions opt;
  opt.config = cfg;
  opt.out = dir / "out";
  opt.experiment = "dims";
  std::ostringstream log;
  CHECK(run_experiment(opt, log).exit_code == 1);
  opt.experiment = "intersect-translate";
  CHECK(run_experiment(opt, log).exit_code == 0);
}

TEST_CASE("violated bound exits 2") {
  const fs::path dir = scratch("violated");
  const fs::path cfg = write_config(dir, "full.ini", R"(experiment = intersect-translate
tolerance = -0.5
[A]
kind = box
d = 2
k = 8
[B]
kind = box
)");
  const RunOutcome r = run(cfg, dir / "out");
  CHECK(r.exit_code == 2);
  CHECK(r.verdict == "bound-violated");
  CHECK(run(cfg, dir / "out").cached);
  CHECK(run(cfg, dir / "out").exit_code == 2);
}

TEST_CASE("cached result equals a forced recomputation") {
  const fs::path dir = scratch("cache");
  const fs::path cfg = write_config(dir, "t.ini", kTranslate);
  const RunOutcome first = run(cfg, dir / "out");
  const std::string records = slurp(first.dir / "records.csv");
  const RunOutcome again = run(cfg, dir / "out");
  CHECK(again.cached);
  CHECK(again.dir == first.dir);
  const RunOutcome forced = run(cfg, dir / "out", true);
  CHECK_FALSE(forced.cached);
  CHECK(slurp(forced.dir / "records.csv") == records);
  RunOptions seeded;
  seeded.config = cfg;
  seeded.out = dir / "out";
  seeded.seed = 4;
  std::ostringstream log;
  CHECK(run_experiment(seeded, log).dir != first.dir);
}

TEST_CASE("artifacts do not depend on the worker count") {
  const fs::path dir = scratch("threads");
  const std::vector<std::pair<std::string, std::string>> configs{
      {"t.ini", kTranslate},
      {"r.ini", R"(experiment = intersect-rotate
rotations = 4
[A]
kind = product
factors = box cantor
k = 8
[B]
kind = sphere
d = 2
[sampling]
per_axis = 4
)"},
      {"l.ini", R"(experiment = levelset
[A]
kind = product
factors = box cantor
k = 8
[map]
family = euclidean-distance
level = 0.5
)"},
      {"c.ini", "experiment = count\n[lattice]\nq = 32\ns = 1.6\nmode = sampled\npairs = 512\n"},
  };
  for (const auto& [name, text] : configs) {
    const fs::path cfg = write_config(dir, name, text);
    std::string reference;
    for (int threads : {1, 4, 8}) {
      set_worker_override(threads);
      const RunOutcome r = run(cfg, dir / "out", true);
      REQUIRE(r.exit_code != 1);
      const std::string bytes = slurp(r.dir / "records.csv") + slurp(r.dir / "summary.csv");
      if (reference.empty()) reference = bytes;
      CHECK(bytes == reference);
    }
    set_worker_override(0);
  }
}

TEST_CASE("report merges runs by theorem") {
  const fs::path dir = scratch("report");
  CHECK(write_report({}, dir / "empty").rows == 0);
  CHECK(slurp(dir / "empty" / "report.csv").find('\n') == slurp(dir / "empty" / "report.csv").size() - 1);

  std::string text2 = kTranslate;
  text2.replace(text2.find("seed = 3"), 8, "seed = 5");
  const fs::path t1 = write_config(dir, "t1.ini", kTranslate);
  const fs::path t2 = write_config(dir, "t2.ini", text2);
  const fs::path d1 = write_config(dir, "d.ini", "experiment = dims\n[A]\nkind = box\nd = 2\nk = 8\n");
  const RunOutcome a = run(t1, dir / "out");
  const RunOutcome b = run(t2, dir / "out");
  const RunOutcome c = run(d1, dir / "out");
  const ReportOutcome two = write_report({a.dir, b.dir}, dir / "two");
  CHECK(two.rows == 2);
  const ReportOutcome mixed = write_report({a.dir, c.dir, b.dir}, dir / "mixed");
  CHECK(mixed.rows == 3);
  const std::string table = slurp(dir / "mixed" / "report.csv");
  CHECK(table.find("dimension") < table.find("translation"));
  CHECK(fs::exists(dir / "mixed" / "report-translation.csv"));
  CHECK(fs::exists(dir / "mixed" / ("plot-" + a.dir.filename().string() + ".dat")));
  CHECK_THROWS_AS(write_report({dir}, dir / "none"), FormatError);
}
