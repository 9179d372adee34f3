#pragma once

// The generalized harmonic oscillator obtained by cranking
// H0 = p^2/2M + M Omega^2 x^2/2 with K = p^2/2m + m omega^2 x^2/2, realized
// in a truncated Fock basis: parameters, quadratic operators, the SU(1,1)
// frame operator, closed-form phases and the Ermakov cross-check.

#include "dynphase/cranked.hpp"
#include "dynphase/linalg.hpp"
#include "dynphase/propagator.hpp"

#include <functional>
#include <memory>
#include <vector>

namespace dynphase {

struct OscillatorParams {
  double M = 0.0;
  double Omega = 0.0;
  double m = 0.0;
  double omega = 0.0;

  // H(t) = ((a + b cos 2wt) p^2 + c sin 2wt (xp + px) + (d + e cos 2wt) x^2) / 2
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double d = 0.0;
  double e = 0.0;

  double nu = 0.0;      // M Omega / (m omega)
  double mtilde = 0.0;  // (1/M - 1/m)^-1
  double wtilde = 0.0;  // sqrt((1/M - 1/m)(M Omega^2 - m omega^2))
  double mu = 0.0;      // m omega / (mtilde wtilde)
  double zeta = 0.0;    // cosh(theta_bar) = 1 + zeta (1 - cos 2wt)
  double xi = 0.0;      // tan(phi_bar) = xi sin 2wt / (1 - cos 2wt)
  double kappa1 = 0.0;  // R1 = kappa1 (1 - cos 2wt)
  double kappa2 = 0.0;  // R2 = kappa2 sin 2wt
  double T = 0.0;       // pi / omega, period of H(t)
  double tau = 0.0;     // 2 pi / omega, period of K
  double bbar = 0.0;    // 2 wtilde
};

/// Throws ConstraintViolation unless all inputs are positive, m > M and
/// M Omega^2 > m omega^2.
OscillatorParams derive_params(double M, double Omega, double m, double omega);

/// True on the lines mu = 1 or nu = 1 (which coincide), where H(t) = H0 and
/// the hyperbolic coordinates and closed-form geometric phase are undefined.
bool is_degenerate(const OscillatorParams& p);
/// Throws DegenerateParameters when is_degenerate holds.
void require_nondegenerate(const OscillatorParams& p);

enum class FockBasis {
  ktilde,  // number basis of the (mtilde, wtilde) oscillator: I0 diagonal
  k,       // number basis of the (m, omega) oscillator: K diagonal
};

struct FockSpace {
  Index N = 0;
  Index N_int = 0;
  FockBasis basis = FockBasis::ktilde;
  double scale = 0.0;  // mass times frequency of the reference oscillator
  OscillatorParams params;

  OperatorMatrix x, p, X, P;
  OperatorMatrix K1, K2, K3;
  OperatorMatrix x2, p2, xp_px;  // x^2, p^2 and xp + px from the ladder algebra
  OperatorMatrix H0, K, I0;

  std::shared_ptr<const SpectralExponential> exp_K2;
  std::shared_ptr<const SpectralExponential> exp_K3;
  std::shared_ptr<const SpectralExponential> exp_K;
  std::shared_ptr<const SpectralExponential> exp_I0;
};

/// Truncated operators in the chosen basis. N >= 16; n_int defaults to
/// max(N - 20, N / 2) and must not exceed N - 4.
FockSpace build_fock(const OscillatorParams& params, Index N, FockBasis basis, Index n_int = -1);

/// The system as a cranked pair (H0, K).
CrankedSystem as_cranked(const FockSpace& fock);

OperatorMatrix gho_H(const FockSpace& fock, double t);
/// gho_H(t) - K.
OperatorMatrix gho_I(const FockSpace& fock, double t);
HamiltonianSchedule gho_schedule(const FockSpace& fock);

struct HyperbolicPoint {
  double theta_bar = 0.0;
  double phi_bar = 0.0;
  double R1 = 0.0;
  double R2 = 0.0;
  double R3 = 1.0;
};

/// Coordinates of R(t) on the unit hyperboloid. phi_bar is continuous on each
/// period (0, T]; at multiples of T the curve passes through the pole
/// theta_bar = 0 where phi_bar is undefined, and successive periods are
/// offset by 2 pi.
HyperbolicPoint hyperbolic_coords(const OscillatorParams& p, double t);

/// d phi_bar / d phi with phi = 2 omega t.
double phi_bar_rate(const OscillatorParams& p, double t);

/// W = exp(-i phi K3) exp(-i theta K2) exp(i phi K3).
OperatorMatrix w_operator(const FockSpace& fock, double theta_bar, double phi_bar);
/// W[R(t)].
OperatorMatrix w_operator(const FockSpace& fock, double t);

struct ClosedFormPhases {
  double delta = 0.0;
  double gamma = 0.0;
};

/// sigma(t) = -2 wt + 2|xi| atan(tan(wt)/|xi|) on its continuous branch.
double sigma(const OscillatorParams& p, double t);

/// delta_n(t) and gamma_n(t) for the eigenstates of the invariant.
ClosedFormPhases closed_form_phases(const OscillatorParams& p, Index n, double t);

/// The cyclic geometric phase expression in terms of mu, nu and M/m that
/// follows from evaluating sigma(T) on the principal branch of atan. Kept for
/// comparison; it differs from the continuous-branch value.
double principal_branch_cyclic_geometric_phase(const OscillatorParams& p, Index n);

struct CyclicState {
  Index n = 0;
  double fidelity = 0.0;          // |<lambda_n;0| exp(-iKT) |lambda_n;0>|
  double total_phase = 0.0;       // its argument
  double projector_error = 0.0;   // || P_n(T) - P_n(0) ||_F
  double energy_spread = 0.0;     // max_t |<K>(t) - <K>(0)|
  double mean_energy = 0.0;       // <lambda_n;0| K |lambda_n;0>
};

/// Exact evolution of the invariant eigenstates under K over one period T in
/// the k-basis. Throws TruncationTooSmall if a fidelity is below 1 - 1e-6.
std::vector<CyclicState> cyclic_basis_evolution(const FockSpace& fock, Index n_max);

/// Eigenvectors |lambda_n;0> of I0 for n < count, as columns.
Matrix invariant_eigenstates(const FockSpace& fock, Index count);

struct ErmakovResult {
  double max_residual = 0.0;         // max |rho'' + w^2 rho - eta / rho^3|
  double pinney_deviation = 0.0;     // max |rho^2 - (c1 sin^2 wt + c2 cos^2 wt)|
  double eta = 0.0;
  double min_rho2 = 0.0;
};

/// rho^2 = 1/mtilde - b (1 - cos 2wt) on steps + 1 points of [0, t_max].
/// Throws DomainError if rho^2 <= 0 anywhere on the grid.
ErmakovResult ermakov_check(const OscillatorParams& p, double t_max, Index steps);

/// Member of the family exp(-iKt)[K + f(t) I0]exp(iKt) with exact propagator
/// exp(-iKt) exp(-iF(t) I0), F the antiderivative of f with F(0) = 0.
struct GhoFamily {
  FockSpace fock;
  std::function<double(double)> f;
  std::function<double(double)> F;

  OperatorMatrix H(double t) const;
  OperatorMatrix U(double t) const;
  HamiltonianSchedule schedule() const;
};

GhoFamily gho_family(const FockSpace& fock, std::function<double(double)> f, std::function<double(double)> F);

}  // namespace dynphase
