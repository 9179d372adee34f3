// dynphase: run scenario configs and write phase series, sweeps and reports.

#include "dynphase/errors.hpp"
#include "dynphase/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

namespace {

constexpr int kExitChecksFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitCompute = 3;

struct Options {
  std::string config;
  dynphase::ConfigOverrides overrides;
  bool json = false;
};

void add_common(CLI::App* cmd, Options& opt, long long& steps, long long& truncation, double& tol,
                std::string& out_dir) {
  cmd->add_option("config", opt.config, "scenario config (JSON)")->required();
  cmd->add_option("--steps", steps, "grid steps")->check(CLI::PositiveNumber);
  cmd->add_option("--truncation", truncation, "Fock truncation N")->check(CLI::PositiveNumber);
  cmd->add_option("--tol", tol, "integrator tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--out-dir", out_dir, "directory for relative output paths");
  cmd->add_flag("--json", opt.json, "print the report to standard output");
}

void print_summary(const dynphase::RunReport& report) {
  for (const auto& c : report.checks)
    std::cerr << (c.passed ? "pass " : "FAIL ") << c.name << "  measured " << c.measured << "  expected " << c.expected
              << "  tol " << c.tolerance << "\n";
  std::cerr << report.checks.size() << " checks, "
            << std::count_if(report.checks.begin(), report.checks.end(), [](const auto& c) { return !c.passed; })
            << " failed\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamical invariants and cyclic phases of time-dependent Hamiltonians"};
  app.require_subcommand(1);

  Options opt;
  long long steps = 0;
  long long truncation = 0;
  double tol = 0.0;
  std::string out_dir;

  auto* run_cmd = app.add_subcommand("run", "run every task in the config");
  auto* sweep_cmd = app.add_subcommand("sweep", "run only the parameter sweep");
  auto* validate_cmd = app.add_subcommand("validate", "check a config against the schema without computing");
  for (auto* cmd : {run_cmd, sweep_cmd, validate_cmd}) add_common(cmd, opt, steps, truncation, tol, out_dir);

  CLI11_PARSE(app, argc, argv);

  if (steps > 0) opt.overrides.steps = steps;
  if (truncation > 0) opt.overrides.truncation = truncation;
  if (tol > 0.0) opt.overrides.tol = tol;
  if (!out_dir.empty()) opt.overrides.out_dir = out_dir;

  dynphase::ScenarioConfig config;
  try {
    config = dynphase::load_config(opt.config);
    dynphase::apply_overrides(config, opt.overrides);
  } catch (const dynphase::Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return e.kind() == dynphase::ErrorKind::ConfigError ? kExitConfig : kExitCompute;
  }

  if (validate_cmd->parsed()) {
    std::cout << "config ok: " << config.name << ", " << dynphase::expected_check_count(config) << " checks\n";
    return 0;
  }

  try {
    const auto mode = sweep_cmd->parsed() ? dynphase::RunMode::sweep_only : dynphase::RunMode::all_tasks;
    const dynphase::RunReport report = dynphase::run(config, mode);
    if (opt.json) std::cout << report.to_json();
    print_summary(report);
    return dynphase::exit_code(report) == 0 ? 0 : kExitChecksFailed;
  } catch (const dynphase::Error& e) {
    std::cerr << "error (" << dynphase::to_string(e.kind()) << "): " << e.what() << "\n";
    return e.kind() == dynphase::ErrorKind::ConfigError ? kExitConfig : kExitCompute;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitCompute;
  }
}
