#pragma once

// Integration of i dU/dt = H(t) U(t), composition of evolution operators of
// geometrically equivalent systems and detection of evolution loops.

#include "dynphase/linalg.hpp"

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace dynphase {

/// Time-dependent Hermitian operator.
struct HamiltonianSchedule {
  Index dim = 0;
  std::function<OperatorMatrix(double)> eval;
  std::optional<double> period;
  std::string label;
  bool is_constant = false;
  // Set when eval is only defined on a sampled grid (for example an operator
  // built by finite differences); integrators then cannot refine below it.
  std::optional<double> sample_spacing;

  OperatorMatrix operator()(double t) const { return eval(t); }

  static HamiltonianSchedule constant(OperatorMatrix h, std::string label = "constant");
  static HamiltonianSchedule zero(Index dim);
  /// f(t) * A for a fixed Hermitian A.
  static HamiltonianSchedule scaled(OperatorMatrix a, std::function<double(double)> f,
                                    std::string label = "scaled");
};

/// ||H(t+T) - H(t)||_F <= 1e-10 ||H(t)||_F at the given times. Returns the
/// worst relative deviation; zero when no period is declared.
double periodicity_defect(const HamiltonianSchedule& h, std::span<const double> times);

/// Evolution operator sampled on a uniform grid.
struct UnitaryPath {
  std::vector<double> grid;
  std::vector<OperatorMatrix> samples;
  double tol_achieved = 0.0;
  double max_unitarity_drift = 0.0;

  Index size() const noexcept { return static_cast<Index>(grid.size()); }
  /// Position of t on the grid; throws InvalidArgument if absent.
  Index index_of(double t) const;
  const OperatorMatrix& at(double t) const { return samples[static_cast<std::size_t>(index_of(t))]; }
  Index dim() const { return samples.empty() ? 0 : samples.front().dim(); }
};

struct EvolveOptions {
  // Keep every record_stride-th step (the final time is always kept).
  Index record_stride = 1;
  // Each step may be bisected at most this many times to meet tol.
  int max_refinement = 6;
  // Skip step doubling when the caller controls accuracy by other means.
  bool estimate_error = true;
};

/// Fourth-order commutator-free exponential integrator. Local error per step
/// is estimated by step doubling; samples are re-unitarized when their drift
/// exceeds 1e-12.
UnitaryPath evolve(const HamiltonianSchedule& h, double t_max, Index steps, double tol,
                   const EvolveOptions& options = {});

/// U(t) V(t) with i dV/dt = Y(t) V(t), V(0) = 1. Y must commute with I0.
UnitaryPath compose_geq(const UnitaryPath& u, const HamiltonianSchedule& y,
                        const OperatorMatrix& i0, double tol = 1e-10,
                        const EvolveOptions& options = {});

/// Best-fit phase c with ||U(t) - c 1||_F <= tol dim, if any.
std::optional<Complex> loop_check(const UnitaryPath& u, double t, double tol);

/// Solves i dP/dt = G(t) P, P(0) = 1 for a generator known only on a uniform
/// grid. Each interval uses moments of the local cubic interpolant and the
/// same fourth-order exponential pair as evolve.
std::vector<Matrix> ordered_exponential_series(std::span<const Matrix> generator, double h);

namespace detail {
// exp(-i(b0/2 + c)) exp(-i(b0/2 - c)) for Hermitian b0, c.
Matrix cf4_step(const Matrix& b0, const Matrix& c);
// U (3 - U^dagger U) / 2, iterated until the drift is below 1e-14.
Matrix reunitarize(const Matrix& u);
}  // namespace detail

}  // namespace dynphase
