#include <iostream>

#include <CLI11.hpp>

#include "fractint/harness/report.hpp"
#include "fractint/harness/runner.hpp"

using namespace fractint;

int main(int argc, char** argv) {
  CLI::App app{"Discretized fractal intersection experiments"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  RunOptions opt;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<CLI::App*> runners;
  auto add_runner = [&](const std::string& name, const std::string& help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "Experiment config file")->required()->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Override the config seed");
    sub->add_flag("--force", opt.force, "Recompute even if a cached result exists");
    sub->add_option("--out", out, "Results directory");
    runners.push_back(sub);
  };
  add_runner("run", "Run the experiment named in the config");
  for (const std::string& name : experiment_names()) add_runner(name, "Run a " + name + " config");

  std::vector<std::string> dirs;
  std::string report_out = "report";
  CLI::App* report = app.add_subcommand("report", "Merge finished runs into per-theorem tables");
  report->add_option("dirs", dirs, "Result directories");
  report->add_option("--out", report_out, "Report directory");

  CLI11_PARSE(app, argc, argv);

  if (report->parsed()) {
    try {
      std::vector<std::filesystem::path> paths(dirs.begin(), dirs.end());
      const ReportOutcome r = write_report(paths, report_out);
      std::cout << r.rows << " rows\n";
      for (const auto& f : r.files) std::cout << f.string() << "\n";
      return 0;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << "\n";
      return 1;
    }
  }

  for (CLI::App* sub : runners) {
    if (!sub->parsed()) continue;
    opt.experiment = sub->get_name();
    if (sub->count("--seed")) opt.seed = seed;
    if (sub->count("--out")) opt.out = out;
    return run_experiment(opt, std::cerr).exit_code;
  }
  return 1;
}
