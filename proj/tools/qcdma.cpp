// qcdma: scenario runner for the chaotic-encoding multiple-access simulator.
//
//   qcdma <scenario> [--config FILE] [--out DIR] [--seed N] [--threads K] [--plots]
//   qcdma print-config <scenario>
//   qcdma validate --config FILE
//
// Scenarios: chaos, sync, spectrum, fidelity-sweep, p0-sweep, capacity.
// Exit codes: 0 ok, 2 invalid config, 3 numerical divergence, 4 unconverged.

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "qcdma/scenario.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& scenario, const std::string& config_path,
        const std::string& out_dir, long long seed, int threads, bool plots) {
  std::string raw = config_path.empty() ? qcdma::scenario::default_config_text(scenario)
                                        : read_file(config_path);
  auto validated = qcdma::scenario::validate_config(raw);
  if (!validated.ok()) {
    std::cerr << "invalid config:\n";
    for (const auto& e : validated.errors) std::cerr << "  - " << e << "\n";
    return 2;
  }
  qcdma::scenario::ScenarioConfig cfg = *validated.config;
  if (cfg.scenario != scenario) {
    std::cerr << "config is for scenario \"" << cfg.scenario << "\", not \"" << scenario << "\"\n";
    return 2;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (const char* env = std::getenv("QCDMA_OUT"); env && out_dir.empty()) cfg.out_dir = env;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  if (threads > 0) cfg.threads = threads;
  if (plots) cfg.plots = true;

  const auto result = qcdma::scenario::run_scenario(cfg);
  if (result.status != qcdma::scenario::RunStatus::Ok)
    std::cerr << "error: " << result.message << "\n";
  else
    std::cout << "wrote " << result.manifest.outputs.size() << " outputs to "
              << cfg.out_dir.string() << "\n";
  return static_cast<int>(result.status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"q-CDMA network simulator"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  long long seed = -1;
  int threads = 0;
  bool plots = false;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file (defaults used when absent)");
    sub->add_option("--out", out_dir, "output directory (overrides config and QCDMA_OUT)");
    sub->add_option("--seed", seed, "seed override");
    sub->add_option("--threads", threads, "worker threads for sweeps");
    sub->add_flag("--plots", plots, "also render SVG plots");
  };

  static const char* scenarios[] = {"chaos", "sync", "spectrum",
                                    "fidelity-sweep", "p0-sweep", "capacity"};
  for (const char* name : scenarios) add_common(app.add_subcommand(name));

  auto* print_cfg = app.add_subcommand("print-config", "print the default config for a scenario");
  std::string print_scenario;
  print_cfg->add_option("scenario", print_scenario, "scenario name")->required();

  auto* validate = app.add_subcommand("validate", "validate a config file");
  std::string validate_path;
  validate->add_option("--config", validate_path, "JSON config file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (print_cfg->parsed()) {
      std::cout << qcdma::scenario::default_config_text(print_scenario);
      return 0;
    }
    if (validate->parsed()) {
      const auto v = qcdma::scenario::validate_config(read_file(validate_path));
      if (v.ok()) {
        std::cout << "ok\n";
        return 0;
      }
      for (const auto& e : v.errors) std::cerr << "  - " << e << "\n";
      return 2;
    }
    for (const char* name : scenarios)
      if (app.get_subcommand(name)->parsed())
        return run(name, config_path, out_dir, seed, threads, plots);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
