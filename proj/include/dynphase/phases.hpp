#pragma once

// Projected matrices E^n, A^n, Delta^n = E^n - A^n of a Hamiltonian in an
// invariant eigenframe, the block Schroedinger equation i du^n/dt = Delta^n u^n,
// Abelian phase angles, non-Abelian holonomies and the reconstruction
// U(t) = sum_n sum_ab u^n_ab(t) |lambda_n,a;t><lambda_n,b;0|.

#include "dynphase/invariant.hpp"
#include "dynphase/linalg.hpp"
#include "dynphase/propagator.hpp"

#include <optional>
#include <vector>

namespace dynphase {

struct LevelPhases {
  double eigenvalue = 0.0;
  Index degeneracy = 1;
  std::vector<Matrix> E;      // <lambda_n,a;t| H |lambda_n,b;t>
  std::vector<Matrix> A;      // i <lambda_n,a;t| d/dt |lambda_n,b;t>, Hermitized
  std::vector<Matrix> Delta;  // E - A
  std::vector<Matrix> u;      // filled by solve_un
  std::vector<double> delta;  // -int_0^t E, nondegenerate levels only
  std::vector<double> gamma;  // int_0^t A, nondegenerate levels only
  std::optional<Matrix> Gamma_T;
  double a_antihermitian_residual = 0.0;
  double u_error_estimate = 0.0;
};

struct PhaseRecord {
  std::vector<double> grid;
  std::vector<LevelPhases> levels;
};

/// Fills E, A and Delta for every tracked level of the frame.
PhaseRecord project(const InvariantFrame& frame, const HamiltonianSchedule& h);

/// Integrates i du/dt = Delta u per level. The error is estimated against the
/// same integration on every other grid point.
PhaseRecord& solve_un(PhaseRecord& record, double tol = 1e-8);

/// delta_n and gamma_n series for one level; throws DegenerateEigenvalue if
/// d_n > 1.
PhaseRecord& abelian_phases(PhaseRecord& record, std::size_t level);
/// Same for every nondegenerate level; degenerate ones are left empty.
PhaseRecord& abelian_phases(PhaseRecord& record);

/// Gamma^n(T) = T exp(i int_0^T A^n) for every level.
PhaseRecord& nonabelian_holonomy(PhaseRecord& record, double period);

/// U(t) from the frame and the u^n. The frame must be complete unless
/// allow_partial is set, in which case the result is U(t) restricted to the
/// tracked subspace (U P_tracked).
UnitaryPath reconstruct_U(const InvariantFrame& frame, const PhaseRecord& record,
                          bool allow_partial = false);

struct PhaseDecomposition {
  std::size_t level = 0;
  Index a = 0;
  double modulus = 0.0;  // |<lambda_n,a;0| U(T) |lambda_n,a;0>|
  double total = 0.0;    // its argument in (-pi, pi]
  std::optional<double> dynamical;           // delta_n(T), unwrapped
  std::optional<double> geometric;           // total - dynamical, mod 2 pi
  std::optional<double> geometric_integral;  // gamma_n(T), unwrapped
};

/// Splits the cyclic total phase of each tracked eigenvector. Throws NotCyclic
/// if an eigenvector (or eigenspace) fails to return to itself at T.
std::vector<PhaseDecomposition> total_phase_decompose(const UnitaryPath& u, const InvariantFrame& frame,
                                                      const PhaseRecord& record, double period);

}  // namespace dynphase
