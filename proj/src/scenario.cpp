#include "dynphase/scenario.hpp"

#include "dynphase/cranked.hpp"
#include "dynphase/errors.hpp"
#include "dynphase/grid.hpp"
#include "dynphase/invariant.hpp"
#include "dynphase/oscillator.hpp"
#include "dynphase/phases.hpp"
#include "dynphase/propagator.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <set>
#include <sstream>
#include <thread>

namespace dynphase {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr double pi = std::numbers::pi;
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string> kTaskNames = {"phases", "validate", "loop-check", "sweep"};
const std::array<std::string, 4> kParamNames = {"M", "Omega", "m", "omega"};

[[noreturn]] void config_error(const std::string& msg) { raise(ErrorKind::ConfigError, msg); }

std::string join_path(const std::string& where, const std::string& key) {
  return where.empty() ? key : where + "." + key;
}

void require_object(const json& j, const std::string& where, std::initializer_list<std::string_view> keys) {
  if (!j.is_object()) config_error(where + " must be an object");
  for (const auto& item : j.items()) {
    if (std::find(keys.begin(), keys.end(), item.key()) == keys.end())
      config_error("unknown key '" + join_path(where, item.key()) + "'");
  }
}

double number(const json& j, const std::string& where) {
  if (!j.is_number()) config_error(where + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) config_error(where + " must be finite");
  return v;
}

Index integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) config_error(where + " must be an integer");
  return static_cast<Index>(j.get<long long>());
}

std::vector<double> number_list(const json& j, const std::string& where) {
  if (!j.is_array()) config_error(where + " must be an array");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

Matrix parse_matrix(const json& j, const std::string& where) {
  require_object(j, where, {"real", "imag", "diagonal"});
  if (j.contains("diagonal")) {
    if (j.contains("real") || j.contains("imag")) config_error(where + ": give either diagonal or real/imag");
    const auto d = number_list(j["diagonal"], where + ".diagonal");
    if (d.empty()) config_error(where + ".diagonal is empty");
    Matrix m = Matrix::Zero(static_cast<Index>(d.size()), static_cast<Index>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i) m(static_cast<Index>(i), static_cast<Index>(i)) = d[i];
    return m;
  }
  if (!j.contains("real")) config_error(where + " needs 'real' or 'diagonal'");
  auto rows = [&](const json& a, const std::string& w) {
    if (!a.is_array() || a.empty()) config_error(w + " must be a non-empty array of rows");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < a.size(); ++i) out.push_back(number_list(a[i], w + "[" + std::to_string(i) + "]"));
    for (const auto& r : out)
      if (r.size() != out.size()) config_error(w + " must be square");
    return out;
  };
  const auto re = rows(j["real"], where + ".real");
  const Index n = static_cast<Index>(re.size());
  Matrix m(n, n);
  for (Index r = 0; r < n; ++r)
    for (Index c = 0; c < n; ++c) m(r, c) = re[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  if (j.contains("imag")) {
    const auto im = rows(j["imag"], where + ".imag");
    if (static_cast<Index>(im.size()) != n) config_error(where + ".imag does not match the size of .real");
    for (Index r = 0; r < n; ++r)
      for (Index c = 0; c < n; ++c)
        m(r, c) += kI * im[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)];
  }
  return m;
}

Matrix parse_hermitian(const json& j, const std::string& where) {
  Matrix m = parse_matrix(j, where);
  const double scale = std::max(m.cwiseAbs().maxCoeff(), kAbsoluteFloor);
  if (hermiticity_defect(m) > kHermitianRelTol * scale) config_error(where + " is not Hermitian");
  return hermitian_part(m);
}

std::vector<std::array<double, 3>> parse_harmonics(const json& j, const std::string& where) {
  if (!j.is_array()) config_error(where + " must be an array of [amplitude, frequency, phase]");
  std::vector<std::array<double, 3>> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const std::string w = where + "[" + std::to_string(i) + "]";
    const auto v = number_list(j[i], w);
    if (v.size() != 3) config_error(w + " must have three entries");
    out.push_back({v[0], v[1], v[2]});
  }
  return out;
}

std::vector<double> parse_axis(const json& j, const std::string& where) {
  if (j.is_array()) {
    auto v = number_list(j, where);
    if (v.empty()) config_error(where + " is empty");
    return v;
  }
  require_object(j, where, {"start", "stop", "count"});
  for (const char* key : {"start", "stop", "count"})
    if (!j.contains(key)) config_error(where + " needs '" + key + "'");
  const double a = number(j["start"], where + ".start");
  const double b = number(j["stop"], where + ".stop");
  const Index n = integer(j["count"], where + ".count");
  if (n < 1) config_error(where + ".count must be positive");
  std::vector<double> v(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i)
    v[static_cast<std::size_t>(i)] = n == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

bool has_task(const ScenarioConfig& c, std::string_view task) {
  return std::find(c.tasks.begin(), c.tasks.end(), task) != c.tasks.end();
}

Index effective_n_int(const ScenarioConfig& c) {
  return c.N_int > 0 ? c.N_int : std::max<Index>(c.N - 20, c.N / 2);
}

OscillatorParams oscillator_params(const ScenarioConfig& c) {
  return derive_params(c.oscillator[0], c.oscillator[1], c.oscillator[2], c.oscillator[3]);
}

double resolved_t_max(const ScenarioConfig& c) {
  if (c.t_max) return *c.t_max;
  if (c.system == SystemKind::oscillator) return oscillator_params(c).T;
  if (c.system == SystemKind::schedule && c.schedule_period) return *c.schedule_period;
  config_error("grid.t_max is required for this system");
}

// Eigenvalue clusters of I0 = H0 - K, lowest first, at most `levels`.
std::vector<std::pair<Index, Index>> cranked_levels(const ScenarioConfig& c) {
  const OperatorMatrix i0 = OperatorMatrix::hermitian(c.h0 - c.k);
  const Eigensystem es = eigh(i0);
  auto clusters = degenerate_clusters(es.eigenvalues, degeneracy_threshold(i0.matrix().norm()));
  if (static_cast<Index>(clusters.size()) > c.levels) clusters.resize(static_cast<std::size_t>(c.levels));
  return clusters;
}

void validate_config(const ScenarioConfig& c) {
  if (c.tasks.empty()) config_error("tasks must list at least one task");
  if (c.steps < 8) config_error("grid.steps must be at least 8");
  if (!(c.tol > 0.0)) config_error("tol must be positive");
  if (c.levels < 1) config_error("levels must be positive");
  if (c.t_max && !(*c.t_max > 0.0)) config_error("grid.t_max must be positive");

  if (c.system == SystemKind::oscillator) {
    try {
      (void)oscillator_params(c);
    } catch (const Error& e) {
      config_error(std::string("system.oscillator: ") + e.what());
    }
    if (c.N < 16) config_error("truncation.N must be at least 16");
    if (c.N_int > 0 && c.N_int > c.N - 4) config_error("truncation.N_int must not exceed N - 4");
    if (c.levels > effective_n_int(c)) config_error("levels must not exceed the interior block size");
    const OscillatorParams p = oscillator_params(c);
    if (c.t_max) {
      const double periods = *c.t_max / p.T;
      if (std::abs(periods - std::round(periods)) > 1e-12 * periods || std::round(periods) < 1.0)
        config_error("grid.t_max must be a whole number of periods pi/omega for an oscillator");
    }
  } else {
    const Index dim = c.system == SystemKind::cranked ? c.h0.rows() : c.schedule_dim;
    if (c.system == SystemKind::cranked && c.k.rows() != dim)
      config_error("system.cranked: H0 and K must have the same size");
    if (!c.t_max && !(c.system == SystemKind::schedule && c.schedule_period))
      config_error("grid.t_max is required for this system");
    if (has_task(c, "sweep")) config_error("the sweep task needs an oscillator system");
    if (has_task(c, "loop-check") && c.loop_times.empty())
      config_error("loop-check needs loop_check.times for this system");
    if (c.system == SystemKind::schedule) {
      const double t_max = resolved_t_max(c);
      for (double t : c.loop_times) {
        const double pos = t / t_max * static_cast<double>(c.steps);
        if (t <= 0.0 || t > t_max * (1.0 + 1e-12) || std::abs(pos - std::round(pos)) > 1e-9)
          config_error("loop_check.times must lie on the grid of a schedule system");
      }
    }
  }
  for (double t : c.loop_times)
    if (!(t > 0.0)) config_error("loop_check.times must be positive");
  if (has_task(c, "sweep") && c.sweep.empty()) config_error("the sweep task needs a sweep section");
}

// ---- formatting -----------------------------------------------------------

std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::string indexed(const std::string& base, Index n) { return base + "[" + std::to_string(n) + "]"; }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(ErrorKind::IoError, "cannot open " + path.string() + " for writing");
  out << text;
  out.close();
  if (!out) raise(ErrorKind::IoError, "failed writing " + path.string());
}

// ---- check bookkeeping ----------------------------------------------------

struct Checks {
  std::vector<CheckResult>& out;

  // |measured - expected| <= tol
  void close(std::string name, double measured, double expected, double tol, std::string provenance,
             std::string note = {}) {
    const bool ok = std::isfinite(measured) && std::abs(measured - expected) <= tol;
    out.push_back({std::move(name), ok, measured, expected, tol, std::move(provenance), std::move(note)});
  }
  // angles compared mod 2 pi
  void angle(std::string name, double measured, double expected, double tol, std::string provenance,
             std::string note = {}) {
    const bool ok = std::isfinite(measured) && std::abs(wrap_angle(measured - expected)) <= tol;
    out.push_back({std::move(name), ok, measured, expected, tol, std::move(provenance), std::move(note)});
  }
  // measured <= expected + tol
  void below(std::string name, double measured, double expected, double tol, std::string provenance,
             std::string note = {}) {
    const bool ok = std::isfinite(measured) && measured <= expected + tol;
    out.push_back({std::move(name), ok, measured, expected, tol, std::move(provenance), std::move(note)});
  }
  // measured <= bound
  void at_most(std::string name, double measured, double bound, std::string provenance, std::string note = {}) {
    const bool ok = std::isfinite(measured) && measured <= bound;
    out.push_back({std::move(name), ok, measured, 0.0, bound, std::move(provenance), std::move(note)});
  }
};

// Largest divisor of steps giving at least `samples` recorded intervals.
Index stride_for(Index steps, Index samples) {
  for (Index d = std::max<Index>(steps / samples, 1); d > 1; --d)
    if (steps % d == 0) return d;
  return 1;
}

double relative_lvn(const InvariantPath& inv, const HamiltonianSchedule& h, std::optional<Index> block) {
  const auto res = lvn_residual(inv, h, block);
  double scale = 0.0;
  for (const auto& s : inv.samples) scale = std::max(scale, block ? block_norm(s.matrix(), *block) : s.matrix().norm());
  return *std::max_element(res.begin(), res.end()) / std::max(scale, kAbsoluteFloor);
}

// ---- oscillator -----------------------------------------------------------

double delta_closed(const OscillatorParams& p, Index n, double t) {
  return -0.25 * (2.0 * static_cast<double>(n) + 1.0) * (p.mu + 1.0 / p.mu) * p.omega * t;
}

double gamma_closed(const OscillatorParams& p, Index n, double t) {
  return is_degenerate(p) ? 0.0 : closed_form_phases(p, n, t).gamma;
}

std::string gamma_provenance(const OscillatorParams& p) {
  return is_degenerate(p) ? "degenerate limit: H(t) = H0" : "closed form";
}

struct CyclicMeasurement {
  std::vector<double> delta, total, fidelity;
};

// <lambda_n;0| exp(-iKt) |lambda_n;0> in the k-basis, where K is diagonal.
CyclicMeasurement measure_cyclic(const FockSpace& fk, Index levels, double t) {
  const Matrix states = invariant_eigenstates(fk, levels);
  const Matrix& k = fk.K.matrix();
  CyclicMeasurement m;
  for (Index n = 0; n < levels; ++n) {
    const Vector psi = states.col(n);
    Complex amp = 0.0;
    double energy = 0.0;
    for (Index i = 0; i < fk.N; ++i) {
      const double kii = k(i, i).real();
      const double w = std::norm(psi(i));
      amp += w * std::exp(-kI * kii * t);
      energy += w * kii;
    }
    m.delta.push_back(-energy * t);
    m.total.push_back(std::arg(amp));
    m.fidelity.push_back(std::abs(amp));
  }
  return m;
}

void oscillator_phases(const ScenarioConfig& c, RunReport& report) {
  const OscillatorParams p = oscillator_params(c);
  const double t_max = resolved_t_max(c);
  const Index L = c.levels;
  const Index n_int = effective_n_int(c);
  const bool degenerate = is_degenerate(p);
  Checks checks{report.checks};

  // Frame in the analytic W gauge, ktilde basis.
  const FockSpace ft = build_fock(p, c.N, FockBasis::ktilde, n_int);
  const std::vector<double> grid = uniform_grid(t_max, c.steps);
  const Matrix identity = Matrix::Identity(c.N, c.N);
  const InvariantFrame frame = frame_from_unitary(
      grid, [&](double t) { return degenerate ? identity : w_operator(ft, t).matrix(); }, ft.I0, L);
  PhaseRecord record = project(frame, HamiltonianSchedule::constant(ft.K, "K"));
  abelian_phases(record);

  const SpectralExponential& ek = *ft.exp_K;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const RealVector& ev = ek.eigenvalues();
    Vector phases(ev.size());
    for (Index i = 0; i < ev.size(); ++i) phases(i) = std::exp(-kI * ev(i) * grid[k]);
    for (Index n = 0; n < L; ++n) {
      const auto& lvl = record.levels[static_cast<std::size_t>(n)];
      const Vector psi0 = frame.levels[static_cast<std::size_t>(n)].columns.front().col(0);
      const Vector psit = ek.frame() * phases.cwiseProduct(ek.frame().adjoint() * psi0);
      const Complex amp = frame.levels[static_cast<std::size_t>(n)].columns[k].col(0).dot(psit);
      report.series.push_back({grid[k], n, lvl.delta[k], lvl.gamma[k], wrap_angle(std::arg(amp)), std::abs(amp)});
    }
  }

  // Exact cyclic evolution in the k-basis.
  const FockSpace fk = build_fock(p, c.N, FockBasis::k, n_int);
  const CyclicMeasurement cyc = measure_cyclic(fk, L, t_max);

  std::vector<double> gamma_int(static_cast<std::size_t>(L));
  for (Index n = 0; n < L; ++n) {
    const auto sn = static_cast<std::size_t>(n);
    const double dcf = delta_closed(p, n, t_max);
    const double gcf = gamma_closed(p, n, t_max);
    gamma_int[sn] = record.levels[sn].gamma.back();
    const double geometric = gcf + wrap_angle(cyc.total[sn] - cyc.delta[sn] - gcf);
    checks.close(indexed("phases.delta", n), cyc.delta[sn], dcf, 1e-7, "closed form",
                 "-int <K> dt in the k-basis");
    checks.close(indexed("phases.gamma_integral", n), gamma_int[sn], gcf, 1e-6, gamma_provenance(p),
                 "int A dt in the analytic frame");
    checks.close(indexed("phases.gamma_total_minus_dynamical", n), geometric, gcf, 1e-6, gamma_provenance(p),
                 "total - dynamical on the branch of the expected value");
    checks.angle(indexed("phases.total", n), cyc.total[sn], wrap_angle(dcf + gcf), 1e-6, "closed form",
                 "arg <lambda_n;0|exp(-iKt)|lambda_n;0> against delta + gamma mod 2 pi");
    checks.close(indexed("phases.fidelity", n), cyc.fidelity[sn], 1.0, 1e-8, "exact: cyclic state");
  }
  if (!degenerate) {
    for (Index n = 1; n < L; ++n)
      checks.close(indexed("phases.gamma_ratio", n), gamma_int[static_cast<std::size_t>(n)] / gamma_int[0],
                   2.0 * static_cast<double>(n) + 1.0, 1e-8, "closed form: gamma_n proportional to 2n + 1");
  }

  // Truncation convergence of the cyclic phases.
  std::set<Index> sizes;
  for (Index N : {c.N / 2, (3 * c.N) / 4, c.N})
    if (N >= 16) sizes.insert(N);
  for (Index N : sizes) {
    ConvergenceRow row;
    row.N = N;
    const Index ni = std::max<Index>(N - 20, N / 2);
    if (L > ni) {
      row.status = "too small";
      row.max_phase_error = nan;
      row.min_fidelity = nan;
      report.convergence.push_back(row);
      continue;
    }
    const FockSpace f = build_fock(p, N, FockBasis::k, ni);
    const CyclicMeasurement m = measure_cyclic(f, L, t_max);
    row.min_fidelity = 1.0;
    for (Index n = 0; n < L; ++n) {
      const auto sn = static_cast<std::size_t>(n);
      const double expected = delta_closed(p, n, t_max) + gamma_closed(p, n, t_max);
      row.max_phase_error = std::max(row.max_phase_error, std::abs(wrap_angle(m.total[sn] - expected)));
      row.min_fidelity = std::min(row.min_fidelity, m.fidelity[sn]);
    }
    row.status = row.min_fidelity >= 1.0 - 1e-6 ? "ok" : "truncated";
    report.convergence.push_back(row);
  }
}

void oscillator_validate(const ScenarioConfig& c, RunReport& report) {
  const OscillatorParams p = oscillator_params(c);
  const double t_max = resolved_t_max(c);
  const Index n_int = effective_n_int(c);
  Checks checks{report.checks};

  const FockSpace ft = build_fock(p, c.N, FockBasis::ktilde, n_int);
  const std::vector<double> grid = uniform_grid(t_max, c.steps);
  const InvariantPath inv = sample_invariant([&](double t) { return gho_I(ft, t); }, grid);
  checks.at_most("validate.lvn_H", relative_lvn(inv, gho_schedule(ft), n_int), 1e-6, "exact invariant",
                 "max ||dI/dt - i[I,H]|| / ||I|| on the interior block");
  checks.at_most("validate.lvn_K", relative_lvn(inv, HamiltonianSchedule::constant(ft.K, "K"), n_int), 1e-6,
                 "exact invariant", "same invariant against the constant Hamiltonian K");
  checks.at_most("validate.spectrum_drift", spectrum_drift(inv, c.levels), 1e-8, "exact invariant");

  const FockSpace fk = build_fock(p, c.N, FockBasis::k, n_int);
  const CrankedSystem sys = as_cranked(fk);
  const Index stride = stride_for(c.steps, 10);
  const UnitaryPath u = evolve(gho_schedule(fk), t_max, c.steps, c.tol, {.record_stride = stride});
  double worst = 0.0;
  for (std::size_t k = 0; k < u.grid.size(); ++k)
    worst = std::max(worst, block_norm(u.samples[k].matrix() - cranked_U(sys, u.grid[k]).matrix(), n_int));
  checks.at_most("validate.cranked_closed_form", worst, 1e-7, "closed form",
                 "||U_ode - exp(-iKt) exp(-i(H0 - K)t)|| on the interior block");

  const ErmakovResult er = ermakov_check(p, t_max, c.steps);
  checks.at_most("validate.ermakov_residual", er.max_residual, 1e-6, "closed form");
  checks.at_most("validate.pinney", er.pinney_deviation, 1e-12, "closed form");

  const Complex ratio = gho_I(ft, 0.5 * p.T).matrix()(0, 0) / ft.I0.matrix()(0, 0);
  const double zeta_numeric = 0.5 * (ratio.real() - 1.0);
  const double zeta_printed = -(1.0 - p.nu * p.nu) * (1.0 - p.mu * p.mu) / (4.0 * (1.0 - p.M / p.m));
  checks.close("validate.zeta", zeta_numeric, zeta_printed, 1e-10, "closed form",
               "cosh(theta_bar) at T/2 from <0|I|0>");
}

void oscillator_loops(const ScenarioConfig& c, RunReport& report) {
  const OscillatorParams p = oscillator_params(c);
  const FockSpace fk = build_fock(p, c.N, FockBasis::k, effective_n_int(c));
  std::vector<double> times = c.loop_times;
  std::vector<std::optional<Complex>> expected = c.loop_expected;
  if (times.empty()) {
    times = {p.tau, 2.0 * p.tau};
    expected = {Complex(-1.0, 0.0), Complex(1.0, 0.0)};
  }
  Checks checks{report.checks};
  for (std::size_t i = 0; i < times.size(); ++i) {
    UnitaryPath path;
    path.grid = {times[i]};
    path.samples = {(*fk.exp_K)(times[i])};
    const auto c_loop = loop_check(path, times[i], 1e-12);
    const double measured = c_loop ? std::arg(*c_loop) : nan;
    const auto& e = expected[i];
    checks.angle(indexed("loop.t", static_cast<Index>(i)), measured, e ? std::arg(*e) : measured, 1e-12,
                 e ? "closed form: U(n tau) = (-1)^n" : "loop detection",
                 "constant K in the k-basis at t = " + fmt(times[i]));
  }
}

void oscillator_sweep(const ScenarioConfig& c, RunReport& report) {
  std::vector<std::vector<double>> axes;
  for (std::size_t a = 0; a < 4; ++a) {
    std::vector<double> values = {c.oscillator[a]};
    for (const auto& ax : c.sweep)
      if (ax.name == kParamNames[a]) values = ax.values;
    axes.push_back(values);
  }
  std::vector<std::array<double, 4>> tuples;
  for (double M : axes[0])
    for (double Om : axes[1])
      for (double m : axes[2])
        for (double om : axes[3]) tuples.push_back({M, Om, m, om});

  std::vector<SweepRow> rows(tuples.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < tuples.size(); i = next++) {
      SweepRow& row = rows[i];
      row.params = tuples[i];
      row.gamma0 = row.gamma0_closed = row.delta0 = row.delta0_closed = row.fidelity = nan;
      OscillatorParams p;
      try {
        p = derive_params(tuples[i][0], tuples[i][1], tuples[i][2], tuples[i][3]);
      } catch (const Error&) {
        row.status = "invalid";
        continue;
      }
      if (is_degenerate(p)) {
        row.status = "degenerate";
        continue;
      }
      const FockSpace fk = build_fock(p, c.N, FockBasis::k, effective_n_int(c));
      const CyclicMeasurement m = measure_cyclic(fk, 1, p.T);
      row.delta0 = m.delta[0];
      row.delta0_closed = delta_closed(p, 0, p.T);
      row.gamma0_closed = gamma_closed(p, 0, p.T);
      row.gamma0 = row.gamma0_closed + wrap_angle(m.total[0] - m.delta[0] - row.gamma0_closed);
      row.fidelity = m.fidelity[0];
      row.status = row.fidelity >= 1.0 - 1e-6 ? "ok" : "truncated";
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads =
      std::min<std::size_t>(tuples.size(), c.threads > 0 ? static_cast<std::size_t>(c.threads) : hw);
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < n_threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  double max_gamma = 0.0, max_delta = 0.0, min_fid = 1.0, max_d0 = -std::numeric_limits<double>::infinity();
  std::size_t ok = 0;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    ++ok;
    max_gamma = std::max(max_gamma, std::abs(r.gamma0 - r.gamma0_closed));
    max_delta = std::max(max_delta, std::abs(r.delta0 - r.delta0_closed));
    min_fid = std::min(min_fid, r.fidelity);
    max_d0 = std::max(max_d0, r.delta0);
  }
  const std::string note = std::to_string(ok) + " of " + std::to_string(rows.size()) + " rows evaluated";
  Checks checks{report.checks};
  if (ok == 0) {
    for (const char* name : {"sweep.max_gamma_error", "sweep.max_delta_error", "sweep.min_fidelity",
                             "sweep.delta_bound"})
      report.checks.push_back({name, false, nan, 0.0, 0.0, "sweep", "no evaluable rows"});
  } else {
    checks.at_most("sweep.max_gamma_error", max_gamma, 1e-6, "closed form", note);
    checks.at_most("sweep.max_delta_error", max_delta, 1e-7, "closed form", note);
    checks.close("sweep.min_fidelity", min_fid, 1.0, 1e-8, "exact: cyclic state", note);
    checks.below("sweep.delta_bound", max_d0, -0.5 * pi, 1e-7, "closed form: mu + 1/mu >= 2",
                 "largest delta_0(T) is at most -pi/2");
  }
  report.sweep = std::move(rows);
}

// ---- cranked pair ---------------------------------------------------------

void cranked_phases(const ScenarioConfig& c, RunReport& report) {
  const CrankedSystem sys(OperatorMatrix::hermitian(c.h0), OperatorMatrix::hermitian(c.k));
  const double t_max = resolved_t_max(c);
  const std::vector<double> grid = uniform_grid(t_max, c.steps);
  const InvariantPath inv = sample_invariant([&](double t) { return cranked_I(sys, t); }, grid);
  const InvariantFrame frame = eigenframe(inv, {.enforce_periodic = true, .max_levels = c.levels});
  PhaseRecord record = project(frame, cranked_schedule(sys));
  abelian_phases(record);
  nonabelian_holonomy(record, t_max);
  Checks checks{report.checks};

  const Matrix ut = cranked_U(sys, t_max).matrix();
  const Matrix rot = sys.rotation(t_max).matrix();
  for (std::size_t n = 0; n < frame.levels.size(); ++n) {
    const auto& lvl = frame.levels[n];
    const Matrix c0 = lvl.columns.front();
    const auto idx = static_cast<Index>(n);
    if (lvl.degeneracy > 1) {
      const Matrix block = c0.adjoint() * ut * c0;
      Eigen::JacobiSVD<Matrix> svd(block);
      checks.at_most(indexed("phases.holonomy_unitarity", idx),
                     unitarity_defect(*record.levels[n].Gamma_T), 1e-8, "exact: unitary holonomy");
      checks.close(indexed("phases.fidelity", idx), svd.singularValues().minCoeff(), 1.0, 1e-8,
                   "cyclic eigenspace", "smallest singular value of the returned block");
      continue;
    }
    const Vector psi0 = c0.col(0);
    const double h0n = psi0.dot(sys.H0().matrix() * psi0).real();
    const double kn = psi0.dot(sys.K().matrix() * psi0).real();
    const Complex ret = psi0.dot(ut * psi0);
    const double alpha = std::arg(psi0.dot(rot * psi0));
    checks.close(indexed("phases.delta", idx), record.levels[n].delta.back(), -h0n * t_max, 1e-7, "closed form",
                 "-<H0>_n t");
    checks.angle(indexed("phases.geometric", idx), wrap_angle(record.levels[n].gamma.back()),
                 wrap_angle(kn * t_max + alpha), 1e-6,
                 "closed form", "int A dt against <K>_n t + arg <lambda_n|exp(-iKt)|lambda_n>");
    checks.close(indexed("phases.fidelity", idx), std::abs(ret), 1.0, 1e-8, "cyclic state");
  }

  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Matrix uk = cranked_U(sys, grid[k]).matrix();
    for (std::size_t n = 0; n < frame.levels.size(); ++n) {
      if (frame.levels[n].degeneracy > 1) continue;
      const Complex amp = frame.levels[n].columns[k].col(0).dot(uk * frame.levels[n].columns.front().col(0));
      report.series.push_back({grid[k], static_cast<Index>(n), record.levels[n].delta[k], record.levels[n].gamma[k],
                               wrap_angle(std::arg(amp)), std::abs(amp)});
    }
  }
}

void cranked_validate(const ScenarioConfig& c, RunReport& report) {
  const CrankedSystem sys(OperatorMatrix::hermitian(c.h0), OperatorMatrix::hermitian(c.k));
  const double t_max = resolved_t_max(c);
  const std::vector<double> grid = uniform_grid(t_max, c.steps);
  const InvariantPath inv = sample_invariant([&](double t) { return cranked_I(sys, t); }, grid);
  Checks checks{report.checks};
  checks.at_most("validate.lvn_H", relative_lvn(inv, cranked_schedule(sys), std::nullopt), 1e-6,
                 "exact invariant");
  checks.at_most("validate.spectrum_drift", spectrum_drift(inv), 1e-8, "exact invariant");
  const UnitaryPath u = evolve(cranked_schedule(sys), t_max, c.steps, c.tol, {.record_stride = stride_for(c.steps, 10)});
  double worst = 0.0;
  for (std::size_t k = 0; k < u.grid.size(); ++k)
    worst = std::max(worst, (u.samples[k].matrix() - cranked_U(sys, u.grid[k]).matrix()).norm());
  checks.at_most("validate.cranked_closed_form", worst, 1e-7, "closed form");
}

void cranked_loops(const ScenarioConfig& c, RunReport& report) {
  const CrankedSystem sys(OperatorMatrix::hermitian(c.h0), OperatorMatrix::hermitian(c.k));
  Checks checks{report.checks};
  for (std::size_t i = 0; i < c.loop_times.size(); ++i) {
    UnitaryPath path;
    path.grid = {c.loop_times[i]};
    path.samples = {sys.rotation(c.loop_times[i])};
    const auto cl = loop_check(path, c.loop_times[i], 1e-10);
    const double measured = cl ? std::arg(*cl) : nan;
    const auto& e = c.loop_expected[i];
    checks.angle(indexed("loop.t", static_cast<Index>(i)), measured, e ? std::arg(*e) : measured, 1e-10,
                 e ? "configured" : "loop detection", "constant K at t = " + fmt(c.loop_times[i]));
  }
}

// ---- tabulated schedule ---------------------------------------------------

HamiltonianSchedule make_schedule(const ScenarioConfig& c) {
  HamiltonianSchedule h;
  h.dim = c.schedule_dim;
  h.period = c.schedule_period;
  h.label = "schedule";
  auto terms = c.terms;
  const Index dim = c.schedule_dim;
  h.eval = [terms, dim](double t) {
    Matrix m = Matrix::Zero(dim, dim);
    for (const auto& term : terms) m += term.coefficient(t) * term.op;
    return OperatorMatrix(std::move(m), Structure::hermitian, trusted);
  };
  return h;
}

// I0 = i log U(T): every eigenvector of U(T) returns to itself at T.
OperatorMatrix floquet_invariant(const Matrix& ut) {
  Eigen::ComplexSchur<Matrix> schur(ut);
  const Matrix& z = schur.matrixU();
  const Matrix& tri = schur.matrixT();
  RealVector q(tri.rows());
  for (Index i = 0; i < tri.rows(); ++i) q(i) = -std::arg(tri(i, i));
  return OperatorMatrix::hermitian(hermitian_part(z * q.asDiagonal() * z.adjoint()));
}

void schedule_phases(const ScenarioConfig& c, RunReport& report) {
  const HamiltonianSchedule h = make_schedule(c);
  const double t_max = resolved_t_max(c);
  const UnitaryPath u = evolve(h, t_max, c.steps, c.tol);
  const OperatorMatrix i0 = floquet_invariant(u.samples.back().matrix());
  const InvariantPath inv = transport(u, i0);
  const InvariantFrame frame = eigenframe(inv, {.enforce_periodic = true, .max_levels = c.levels});
  PhaseRecord record = project(frame, h);
  abelian_phases(record);

  double worst = 0.0, min_fid = 1.0;
  const Matrix& ut = u.samples.back().matrix();
  for (std::size_t n = 0; n < frame.levels.size(); ++n) {
    const auto& lvl = frame.levels[n];
    if (lvl.degeneracy > 1) {
      Eigen::JacobiSVD<Matrix> svd(Matrix(lvl.columns.front().adjoint() * ut * lvl.columns.front()));
      min_fid = std::min(min_fid, svd.singularValues().minCoeff());
      continue;
    }
    const Vector psi0 = lvl.columns.front().col(0);
    const Complex ret = psi0.dot(ut * psi0);
    min_fid = std::min(min_fid, std::abs(ret));
    const double frame_total = record.levels[n].delta.back() + record.levels[n].gamma.back();
    worst = std::max(worst, std::abs(wrap_angle(frame_total - std::arg(ret))));
    for (std::size_t k = 0; k < u.grid.size(); ++k) {
      const Complex amp = lvl.columns[k].col(0).dot(u.samples[k].matrix() * psi0);
      report.series.push_back({u.grid[k], static_cast<Index>(n), record.levels[n].delta[k], record.levels[n].gamma[k],
                               wrap_angle(std::arg(amp)), std::abs(amp)});
    }
  }
  std::stable_sort(report.series.begin(), report.series.end(),
                   [](const PhaseSeriesRow& a, const PhaseSeriesRow& b) { return a.t < b.t; });
  Checks checks{report.checks};
  checks.at_most("phases.total_max_error", worst, 1e-6, "derived",
                 "delta + gamma from the frame against arg <lambda_n;0|U(T)|lambda_n;0>");
  checks.close("phases.min_fidelity", min_fid, 1.0, 1e-8, "exact: Floquet eigenstates");
}

void schedule_validate(const ScenarioConfig& c, RunReport& report) {
  const HamiltonianSchedule h = make_schedule(c);
  const double t_max = resolved_t_max(c);
  const UnitaryPath u = evolve(h, t_max, c.steps, c.tol);
  Checks checks{report.checks};
  checks.at_most("validate.unitarity", u.max_unitarity_drift, 1e-10, "exact");
  const InvariantPath inv = transport(u, floquet_invariant(u.samples.back().matrix()));
  checks.at_most("validate.lvn_H", relative_lvn(inv, h, std::nullopt), 1e-6, "exact invariant");
  if (c.schedule_period) {
    checks.at_most("validate.periodicity", periodicity_defect(h, u.grid), 1e-10, "configured period");
  }
}

void schedule_loops(const ScenarioConfig& c, RunReport& report) {
  const HamiltonianSchedule h = make_schedule(c);
  const UnitaryPath u = evolve(h, resolved_t_max(c), c.steps, c.tol);
  Checks checks{report.checks};
  for (std::size_t i = 0; i < c.loop_times.size(); ++i) {
    const auto cl = loop_check(u, c.loop_times[i], 1e-8);
    const double measured = cl ? std::arg(*cl) : nan;
    const auto& e = c.loop_expected[i];
    checks.angle(indexed("loop.t", static_cast<Index>(i)), measured, e ? std::arg(*e) : measured, 1e-8,
                 e ? "configured" : "loop detection", "t = " + fmt(c.loop_times[i]));
  }
}

const char* system_name(SystemKind k) {
  switch (k) {
    case SystemKind::oscillator: return "oscillator";
    case SystemKind::cranked: return "cranked";
    case SystemKind::schedule: return "schedule";
  }
  return "unknown";
}

}  // namespace

double ScheduleTerm::coefficient(double t) const {
  double v = 0.0;
  double tp = 1.0;
  for (double a : poly) {
    v += a * tp;
    tp *= t;
  }
  for (const auto& h : cos_terms) v += h[0] * std::cos(h[1] * t + h[2]);
  for (const auto& h : sin_terms) v += h[0] * std::sin(h[1] * t + h[2]);
  return v;
}

ScenarioConfig parse_config(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    config_error(std::string("config is not valid JSON: ") + e.what());
  }
  require_object(j, "", {"name", "system", "truncation", "grid", "tol", "levels", "tasks", "loop_check", "sweep",
                         "output"});
  ScenarioConfig c;
  if (j.contains("name")) {
    if (!j["name"].is_string()) config_error("name must be a string");
    c.name = j["name"].get<std::string>();
  }

  if (!j.contains("system")) config_error("system is required");
  const json& sys = j["system"];
  require_object(sys, "system", {"oscillator", "cranked", "schedule"});
  if (sys.size() != 1) config_error("system must name exactly one of oscillator, cranked, schedule");
  if (sys.contains("oscillator")) {
    const json& o = sys["oscillator"];
    require_object(o, "system.oscillator", {"M", "Omega", "m", "omega"});
    for (std::size_t i = 0; i < 4; ++i) {
      if (!o.contains(kParamNames[i])) config_error("system.oscillator." + kParamNames[i] + " is required");
      c.oscillator[i] = number(o[kParamNames[i]], "system.oscillator." + kParamNames[i]);
    }
    c.system = SystemKind::oscillator;
  } else if (sys.contains("cranked")) {
    const json& o = sys["cranked"];
    require_object(o, "system.cranked", {"H0", "K"});
    if (!o.contains("H0") || !o.contains("K")) config_error("system.cranked needs H0 and K");
    c.h0 = parse_hermitian(o["H0"], "system.cranked.H0");
    c.k = parse_hermitian(o["K"], "system.cranked.K");
    c.system = SystemKind::cranked;
  } else {
    const json& o = sys["schedule"];
    require_object(o, "system.schedule", {"dim", "period", "terms"});
    if (!o.contains("dim") || !o.contains("terms")) config_error("system.schedule needs dim and terms");
    c.schedule_dim = integer(o["dim"], "system.schedule.dim");
    if (c.schedule_dim < 1) config_error("system.schedule.dim must be positive");
    if (o.contains("period")) {
      c.schedule_period = number(o["period"], "system.schedule.period");
      if (!(*c.schedule_period > 0.0)) config_error("system.schedule.period must be positive");
    }
    if (!o["terms"].is_array() || o["terms"].empty()) config_error("system.schedule.terms must be a non-empty array");
    for (std::size_t i = 0; i < o["terms"].size(); ++i) {
      const std::string w = "system.schedule.terms[" + std::to_string(i) + "]";
      const json& t = o["terms"][i];
      require_object(t, w, {"operator", "poly", "cos", "sin"});
      if (!t.contains("operator")) config_error(w + ".operator is required");
      ScheduleTerm term;
      term.op = parse_hermitian(t["operator"], w + ".operator");
      if (term.op.rows() != c.schedule_dim) config_error(w + ".operator does not match dim");
      if (t.contains("poly")) term.poly = number_list(t["poly"], w + ".poly");
      if (t.contains("cos")) term.cos_terms = parse_harmonics(t["cos"], w + ".cos");
      if (t.contains("sin")) term.sin_terms = parse_harmonics(t["sin"], w + ".sin");
      if (term.poly.empty() && term.cos_terms.empty() && term.sin_terms.empty())
        config_error(w + " needs at least one of poly, cos, sin");
      c.terms.push_back(std::move(term));
    }
    c.system = SystemKind::schedule;
  }

  if (j.contains("truncation")) {
    const json& t = j["truncation"];
    require_object(t, "truncation", {"N", "N_int"});
    if (t.contains("N")) c.N = integer(t["N"], "truncation.N");
    if (t.contains("N_int")) c.N_int = integer(t["N_int"], "truncation.N_int");
  }
  if (j.contains("grid")) {
    const json& g = j["grid"];
    require_object(g, "grid", {"t_max", "steps"});
    if (g.contains("t_max")) c.t_max = number(g["t_max"], "grid.t_max");
    if (g.contains("steps")) c.steps = integer(g["steps"], "grid.steps");
  }
  if (j.contains("tol")) c.tol = number(j["tol"], "tol");
  if (j.contains("levels")) c.levels = integer(j["levels"], "levels");

  if (!j.contains("tasks") || !j["tasks"].is_array()) config_error("tasks must be an array of task names");
  for (const auto& t : j["tasks"]) {
    if (!t.is_string()) config_error("tasks must be strings");
    const auto name = t.get<std::string>();
    if (std::find(kTaskNames.begin(), kTaskNames.end(), name) == kTaskNames.end())
      config_error("unknown task '" + name + "'");
    if (has_task(c, name)) config_error("task '" + name + "' listed twice");
    c.tasks.push_back(name);
  }

  if (j.contains("loop_check")) {
    const json& l = j["loop_check"];
    require_object(l, "loop_check", {"times", "expected"});
    if (l.contains("times")) c.loop_times = number_list(l["times"], "loop_check.times");
    c.loop_expected.assign(c.loop_times.size(), std::nullopt);
    if (l.contains("expected")) {
      const json& e = l["expected"];
      if (!e.is_array() || e.size() != c.loop_times.size())
        config_error("loop_check.expected must match loop_check.times in length");
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i].is_null()) continue;
        const auto v = number_list(e[i], "loop_check.expected[" + std::to_string(i) + "]");
        if (v.size() != 2) config_error("loop_check.expected entries are [re, im] or null");
        c.loop_expected[i] = Complex(v[0], v[1]);
      }
    }
  }

  if (j.contains("sweep")) {
    const json& s = j["sweep"];
    require_object(s, "sweep", {"M", "Omega", "m", "omega", "threads"});
    for (const auto& name : kParamNames)
      if (s.contains(name)) c.sweep.push_back({name, parse_axis(s[name], "sweep." + name)});
    if (s.contains("threads")) c.threads = integer(s["threads"], "sweep.threads");
    if (c.sweep.empty()) config_error("sweep must vary at least one of M, Omega, m, omega");
  }

  if (j.contains("output")) {
    const json& o = j["output"];
    require_object(o, "output", {"csv_path", "sweep_csv_path", "report_path"});
    auto path = [&](const char* key, std::filesystem::path& dst) {
      if (!o.contains(key)) return;
      if (!o[key].is_string() || o[key].get<std::string>().empty())
        config_error(std::string("output.") + key + " must be a non-empty string");
      dst = o[key].get<std::string>();
    };
    path("csv_path", c.csv_path);
    path("sweep_csv_path", c.sweep_csv_path);
    path("report_path", c.report_path);
  }

  validate_config(c);
  return c;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(ErrorKind::IoError, "cannot read config " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

void apply_overrides(ScenarioConfig& config, const ConfigOverrides& o) {
  if (o.steps) config.steps = *o.steps;
  if (o.truncation) config.N = *o.truncation;
  if (o.tol) config.tol = *o.tol;
  if (o.out_dir) {
    for (auto* p : {&config.csv_path, &config.sweep_csv_path, &config.report_path})
      if (p->is_relative()) *p = *o.out_dir / *p;
  }
  validate_config(config);
}

std::size_t expected_check_count(const ScenarioConfig& c) {
  std::size_t count = 0;
  const auto L = static_cast<std::size_t>(c.levels);
  for (const auto& task : c.tasks) {
    if (task == "phases") {
      if (c.system == SystemKind::oscillator)
        count += 5 * L + (is_degenerate(oscillator_params(c)) ? 0 : L - 1);
      else if (c.system == SystemKind::cranked)
        for (const auto& [begin, end] : cranked_levels(c)) count += end - begin > 1 ? 2 : 3;
      else
        count += 2;
    } else if (task == "validate") {
      if (c.system == SystemKind::oscillator) count += 7;
      else if (c.system == SystemKind::cranked) count += 3;
      else count += c.schedule_period ? 3 : 2;
    } else if (task == "loop-check") {
      count += c.loop_times.empty() && c.system == SystemKind::oscillator ? 2 : c.loop_times.size();
    } else if (task == "sweep") {
      count += 4;
    }
  }
  return count;
}

bool RunReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

int exit_code(const RunReport& report) { return report.all_passed() ? 0 : 1; }

std::string RunReport::to_json() const {
  ordered_json j;
  j["scenario"] = scenario;
  j["system"] = system;
  j["tasks"] = tasks;
  ordered_json cs = ordered_json::array();
  std::size_t passed = 0;
  for (const auto& c : checks) {
    ordered_json e;
    e["name"] = c.name;
    e["status"] = c.passed ? "pass" : "fail";
    e["measured"] = num(c.measured);
    e["expected"] = num(c.expected);
    e["tolerance"] = num(c.tolerance);
    e["provenance"] = c.provenance;
    if (!c.note.empty()) e["note"] = c.note;
    cs.push_back(std::move(e));
    passed += c.passed ? 1 : 0;
  }
  j["checks"] = std::move(cs);
  ordered_json conv = ordered_json::array();
  for (const auto& r : convergence) {
    ordered_json e;
    e["N"] = r.N;
    e["max_phase_error"] = num(r.max_phase_error);
    e["min_fidelity"] = num(r.min_fidelity);
    e["status"] = r.status;
    conv.push_back(std::move(e));
  }
  j["convergence"] = std::move(conv);
  j["summary"] = {{"checks", checks.size()},
                  {"passed", passed},
                  {"failed", checks.size() - passed},
                  {"status", passed == checks.size() ? "pass" : "fail"}};
  return j.dump(2) + "\n";
}

std::string phase_series_csv(const RunReport& report) {
  std::string out = "t,n,delta_unwrapped,gamma_unwrapped,total_mod_2pi,fidelity\n";
  for (const auto& r : report.series) {
    out += fmt(r.t) + "," + std::to_string(r.n) + "," + fmt(r.delta) + "," + fmt(r.gamma) + "," + fmt(r.total) + "," +
           fmt(r.fidelity) + "\n";
  }
  return out;
}

std::string sweep_csv(const RunReport& report) {
  std::string out = "M,Omega,m,omega,status,gamma0_T,gamma0_T_closed_form,delta0_T,delta0_T_closed_form,fidelity\n";
  for (const auto& r : report.sweep) {
    for (double v : r.params) out += fmt(v) + ",";
    out += r.status + "," + fmt(r.gamma0) + "," + fmt(r.gamma0_closed) + "," + fmt(r.delta0) + "," +
           fmt(r.delta0_closed) + "," + fmt(r.fidelity) + "\n";
  }
  return out;
}

RunReport run(const ScenarioConfig& config, RunMode mode) {
  RunReport report;
  report.scenario = config.name;
  report.system = system_name(config.system);
  if (mode == RunMode::sweep_only) {
    if (config.system != SystemKind::oscillator || config.sweep.empty())
      raise(ErrorKind::ConfigError, "sweep needs an oscillator system with a sweep section");
    report.tasks = {"sweep"};
  } else {
    report.tasks = config.tasks;
  }

  using Task = void (*)(const ScenarioConfig&, RunReport&);
  auto pick = [&](const std::string& task) -> Task {
    switch (config.system) {
      case SystemKind::oscillator:
        if (task == "phases") return oscillator_phases;
        if (task == "validate") return oscillator_validate;
        if (task == "loop-check") return oscillator_loops;
        return oscillator_sweep;
      case SystemKind::cranked:
        if (task == "phases") return cranked_phases;
        if (task == "validate") return cranked_validate;
        return cranked_loops;
      case SystemKind::schedule:
        if (task == "phases") return schedule_phases;
        if (task == "validate") return schedule_validate;
        return schedule_loops;
    }
    return nullptr;
  };

  for (const auto& task : report.tasks) {
    const auto start = std::chrono::steady_clock::now();
    try {
      pick(task)(config, report);
    } catch (const Error& e) {
      raise(e.kind(), "task " + task + ": " + e.what());
    }
    report.timings.emplace_back(task, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
  }

  if (!report.series.empty()) write_file(config.csv_path, phase_series_csv(report));
  if (!report.sweep.empty()) write_file(config.sweep_csv_path, sweep_csv(report));
  write_file(config.report_path, report.to_json());
  ordered_json t;
  for (const auto& [task, seconds] : report.timings) t[task] = seconds;
  std::filesystem::path sidecar = config.report_path;
  sidecar.replace_extension(".timings.json");
  write_file(sidecar, t.dump(2) + "\n");
  return report;
}

}  // namespace dynphase
