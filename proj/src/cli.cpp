#include "dressed/scenario.hpp"

#include "CLI11.hpp"

#include <chrono>
#include <iostream>

namespace dressed {

namespace {

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  bool quiet = false;
  std::optional<double> budget;
};

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("-c,--config", o.config, "scenario file (key = value lines)")->required();
  cmd->add_option("--seed", o.seed, "override the scenario seed");
  cmd->add_option("--budget", o.budget, "cost budget in work units");
}

ScenarioConfig load(const Options& o) {
  ScenarioConfig cfg = ScenarioConfig::load(o.config);
  if (o.budget) {
    cfg.set("budget", std::to_string(*o.budget));
  }
  return cfg;
}

void warn_budget(const ValidationReport& v) {
  if (v.over_budget()) {
    std::cerr << "warning: estimated cost " << v.cost << " exceeds budget " << v.budget << "\n";
  }
}

} // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"Dressed-state qubit control simulator"};
  app.require_subcommand(1);
  Options o;
  CLI::App* run = app.add_subcommand("run", "run a scenario and write CSV + metadata");
  add_common(run, o);
  run->add_option("-o,--out", o.out, "output directory (default: output_dir key or .)");
  run->add_option("-j,--threads", o.threads, "worker threads, 0 = hardware")->check(CLI::NonNegativeNumber);
  run->add_flag("-q,--quiet", o.quiet, "suppress the summary line");
  CLI::App* validate = app.add_subcommand("validate", "check a scenario and estimate its cost");
  add_common(validate, o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const ScenarioConfig cfg = load(o);
    const ValidationReport v = validate_scenario(cfg);
    if (validate->parsed()) {
      std::cout << v.scenario << ": ok, estimated cost " << v.cost << " (budget " << v.budget << ")\n";
      warn_budget(v);
      return 0;
    }
    warn_budget(v);
    RunSettings s;
    s.output_dir = !o.out.empty() ? o.out : cfg.text("output_dir", ".");
    s.seed = o.seed;
    s.threads = o.threads;
    s.quiet = o.quiet;
    const auto t0 = std::chrono::steady_clock::now();
    const RunReport r = run_scenario(cfg, s);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.quiet) {
      std::cout << r.scenario << ": " << r.summary << " [" << r.rows << " rows -> " << r.csv.string() << ", "
                << secs << " s]\n";
    }
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}

} // namespace dressed
