#pragma once

// Dynamical invariants: transport by an evolution operator, Liouville-von
// Neumann residuals, smooth eigenframes, geometrically equivalent
// Hamiltonians, the frame Hamiltonian H* = i dW/dt W^dagger and gauge
// transformations of frames.

#include "dynphase/linalg.hpp"
#include "dynphase/propagator.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace dynphase {

enum class InvariantSource { transported, analytic };

struct InvariantPath {
  std::vector<double> grid;
  std::vector<OperatorMatrix> samples;
  InvariantSource source = InvariantSource::analytic;

  Index dim() const { return samples.empty() ? 0 : samples.front().dim(); }
};

/// Samples an analytic invariant on a grid.
InvariantPath sample_invariant(const std::function<OperatorMatrix(double)>& invariant,
                               const std::vector<double>& grid);

/// I(t_k) = U(t_k) I0 U(t_k)^dagger.
InvariantPath transport(const UnitaryPath& u, const OperatorMatrix& i0);

/// ||dI/dt - i[I, H]||_F per grid point (optionally on the leading block),
/// with fourth-order finite differences for dI/dt.
std::vector<double> lvn_residual(const InvariantPath& inv, const HamiltonianSchedule& h,
                                 std::optional<Index> block = std::nullopt);

/// max_k max_n |lambda_n(t_k) - lambda_n(0)| / (1 + |lambda_n(0)|) over the
/// lowest `levels` eigenvalues (all when negative).
double spectrum_drift(const InvariantPath& inv, Index levels = -1);

/// One eigenvalue lambda_n with its d_n orthonormal eigenvectors per grid point.
struct FrameLevel {
  double eigenvalue = 0.0;
  Index degeneracy = 1;
  std::vector<Matrix> columns;  // dim x degeneracy, one per grid point
};

struct InvariantFrame {
  std::vector<double> grid;
  Index dim = 0;
  std::vector<FrameLevel> levels;
  bool periodic = false;

  Index tracked_dim() const;
  bool complete() const { return tracked_dim() == dim; }
  /// Columns of every level side by side at grid point k.
  Matrix columns_at(std::size_t k) const;
  /// W(t_k) = C(t_k) C(0)^dagger; a unitary with W(0) = 1 when complete.
  Matrix unitary_at(std::size_t k) const;
};

struct EigenframeOptions {
  bool enforce_periodic = false;
  // Track only the lowest max_levels eigenvalues; all when negative.
  Index max_levels = -1;
  double min_overlap = 0.5;
  double spectrum_tol = 1e-8;
};

/// Smooth eigenframe: clusters are matched across steps by maximal overlap,
/// phases (or d x d unitaries) are fixed by parallel transport and, when
/// requested, the closing holonomy is spread uniformly over the period.
InvariantFrame eigenframe(const InvariantPath& inv, const EigenframeOptions& options = {});

/// Frame built from an analytic frame operator: columns W(t)|lambda_n; 0>.
InvariantFrame frame_from_unitary(const std::vector<double>& grid,
                                  const std::function<Matrix(double)>& w,
                                  const OperatorMatrix& i0, Index max_levels = -1);

/// sum_n lambda_n P_n(t_k) - I(t_k), worst Frobenius norm over the grid,
/// optionally on the leading block. Needs a complete frame.
double frame_reconstruction_error(const InvariantFrame& frame, const InvariantPath& inv,
                                  std::optional<Index> block = std::nullopt);

struct SymmetryReport {
  double max_relative = 0.0;  // max_k ||[I, X]||_F / max(||X||_F, floor)
  double worst_time = 0.0;
  bool passed = true;
};

SymmetryReport symmetry_check(const InvariantPath& inv, const HamiltonianSchedule& x,
                              double tol = 1e-8, std::optional<Index> block = std::nullopt);

/// H + X after checking [I(t), X(t)] = 0 on the invariant's grid.
HamiltonianSchedule build_geq(const HamiltonianSchedule& h, const HamiltonianSchedule& x,
                              const InvariantPath& inv, double tol = 1e-8,
                              std::optional<Index> block = std::nullopt);

struct FrameHamiltonian {
  HamiltonianSchedule schedule;  // defined on the frame grid only
  double antihermitian_residual = 0.0;
};

/// H*(t) = i dW/dt W^dagger for the complete frame W, Hermitized.
FrameHamiltonian hstar(const InvariantFrame& frame);

struct GaugeResult {
  InvariantFrame frame;
  std::optional<FrameHamiltonian> hstar;  // present for complete frames
};

/// W' = W Z with [Z(t), I0] = 0; H*' = H* + i W dZ/dt Z^dagger W^dagger.
GaugeResult gauge_transform(const InvariantFrame& frame, const UnitaryPath& z,
                            const OperatorMatrix& i0, double tol = 1e-8);

}  // namespace dynphase
