#pragma once

// Scenario runner behind the command-line tool: a JSON config names a system
// (oscillator parameters, a cranked pair or a tabulated schedule), a grid, a
// truncation and a task list; run() executes the tasks, writes the phase
// series CSV, the sweep CSV and the JSON report, and returns the report.

#include "dynphase/linalg.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dynphase {

enum class SystemKind { oscillator, cranked, schedule };

/// coefficient(t) = sum_i poly_i t^i + sum a cos(f t + p) + sum a sin(f t + p)
struct ScheduleTerm {
  Matrix op;
  std::vector<double> poly;
  std::vector<std::array<double, 3>> cos_terms;  // amplitude, frequency, phase
  std::vector<std::array<double, 3>> sin_terms;

  double coefficient(double t) const;
};

struct SweepAxis {
  std::string name;  // one of M, Omega, m, omega
  std::vector<double> values;
};

struct ScenarioConfig {
  std::string name = "scenario";
  SystemKind system = SystemKind::oscillator;

  std::array<double, 4> oscillator{};  // M, Omega, m, omega
  Matrix h0, k;                        // cranked pair
  Index schedule_dim = 0;
  std::vector<ScheduleTerm> terms;
  std::optional<double> schedule_period;

  Index N = 60;
  Index N_int = -1;
  std::optional<double> t_max;  // defaults to the period when one is known
  Index steps = 2048;
  double tol = 1e-10;
  Index levels = 6;

  std::vector<std::string> tasks;
  std::vector<double> loop_times;
  std::vector<std::optional<Complex>> loop_expected;
  std::vector<SweepAxis> sweep;
  Index threads = 0;  // sweep workers; 0 picks the hardware concurrency

  std::filesystem::path csv_path = "phases.csv";
  std::filesystem::path sweep_csv_path = "sweep.csv";
  std::filesystem::path report_path = "report.json";
};

/// Command-line overrides applied after parsing.
struct ConfigOverrides {
  std::optional<Index> steps;
  std::optional<Index> truncation;
  std::optional<double> tol;
  std::optional<std::filesystem::path> out_dir;
};

/// Parses and validates a config; every problem (unknown keys, wrong types,
/// parameter constraints, non-Hermitian operators) raises ConfigError.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);
void apply_overrides(ScenarioConfig& config, const ConfigOverrides& overrides);

/// Number of checks the task list expands to.
std::size_t expected_check_count(const ScenarioConfig& config);

struct CheckResult {
  std::string name;
  bool passed = false;
  double measured = 0.0;
  double expected = 0.0;
  double tolerance = 0.0;
  std::string provenance;
  std::string note;
};

struct ConvergenceRow {
  Index N = 0;
  double max_phase_error = 0.0;
  double min_fidelity = 0.0;
  std::string status;
};

struct PhaseSeriesRow {
  double t = 0.0;
  Index n = 0;
  double delta = 0.0;
  double gamma = 0.0;
  double total = 0.0;
  double fidelity = 0.0;
};

struct SweepRow {
  std::array<double, 4> params{};  // M, Omega, m, omega
  std::string status;              // ok, degenerate, invalid, truncated
  double gamma0 = 0.0;
  double gamma0_closed = 0.0;
  double delta0 = 0.0;
  double delta0_closed = 0.0;
  double fidelity = 0.0;
};

struct RunReport {
  std::string scenario;
  std::string system;
  std::vector<std::string> tasks;
  std::vector<CheckResult> checks;
  std::vector<ConvergenceRow> convergence;
  std::vector<PhaseSeriesRow> series;
  std::vector<SweepRow> sweep;
  std::vector<std::pair<std::string, double>> timings;  // seconds per task

  bool all_passed() const;
  /// Deterministic JSON text (timings excluded).
  std::string to_json() const;
};

enum class RunMode { all_tasks, sweep_only };

/// Executes the configured tasks and writes every artifact. Compute failures
/// propagate as Error with the task name prepended to the message.
RunReport run(const ScenarioConfig& config, RunMode mode = RunMode::all_tasks);

/// 0 when every check passed, 1 otherwise.
int exit_code(const RunReport& report);

std::string phase_series_csv(const RunReport& report);
std::string sweep_csv(const RunReport& report);

}  // namespace dynphase
