#pragma once

// Cranked Hamiltonians H(t) = exp(-iKt) H0 exp(iKt): the invariant H(t) - K,
// the exact propagator exp(-iKt) exp(-i(H0 - K)t), the geometrically
// equivalent family built on the same invariant and the generalized form
// h(t) exp(-ig(t)K) H0 exp(ig(t)K).

#include "dynphase/linalg.hpp"
#include "dynphase/propagator.hpp"

#include <functional>
#include <memory>
#include <optional>

namespace dynphase {

class CrankedSystem {
 public:
  CrankedSystem(OperatorMatrix h0, OperatorMatrix k);

  Index dim() const noexcept { return h0_.dim(); }
  const OperatorMatrix& H0() const noexcept { return h0_; }
  const OperatorMatrix& K() const noexcept { return k_; }
  /// I0 = H0 - K.
  const OperatorMatrix& I0() const noexcept { return i0_; }

  /// exp(-iKt).
  OperatorMatrix rotation(double t) const { return (*exp_k_)(t); }
  /// exp(-i I0 t).
  OperatorMatrix invariant_flow(double t) const { return (*exp_i0_)(t); }

 private:
  OperatorMatrix h0_;
  OperatorMatrix k_;
  OperatorMatrix i0_;
  std::shared_ptr<const SpectralExponential> exp_k_;
  std::shared_ptr<const SpectralExponential> exp_i0_;
};

/// exp(-iKt) A exp(iKt) for the system's K.
OperatorMatrix rotate(const CrankedSystem& sys, const OperatorMatrix& a, double t);

OperatorMatrix cranked_H(const CrankedSystem& sys, double t);
/// exp(-iKt) (H0 - K) exp(iKt) = H(t) - K.
OperatorMatrix cranked_I(const CrankedSystem& sys, double t);
/// exp(-iKt) exp(-i(H0 - K)t).
OperatorMatrix cranked_U(const CrankedSystem& sys, double t);

HamiltonianSchedule cranked_schedule(const CrankedSystem& sys, std::optional<double> period = std::nullopt);

struct GeqMember {
  HamiltonianSchedule hamiltonian;  // exp(-iKt) [K + Y(t)] exp(iKt)
  UnitaryPath propagator;           // exp(-iKt) T exp(-i int_0^t Y)
};

/// Member of the class of Hamiltonians sharing the cranked invariant, sampled
/// on steps + 1 uniform points of [0, t_max]. Y must commute with I0.
GeqMember geq_member(const CrankedSystem& sys, const HamiltonianSchedule& ytilde, double t_max, Index steps,
                     double tol = 1e-10, const EvolveOptions& options = {});

/// h(t) exp(-ig(t)K) H0 exp(ig(t)K).
OperatorMatrix generalized_cranked(const OperatorMatrix& k, const OperatorMatrix& h0,
                                   const std::function<double(double)>& g,
                                   const std::function<double(double)>& h, double t);

/// Schedule form of generalized_cranked with the spectral data of K cached.
HamiltonianSchedule generalized_cranked_schedule(const OperatorMatrix& k, const OperatorMatrix& h0,
                                                 std::function<double(double)> g,
                                                 std::function<double(double)> h);

struct NondegeneratePhases {
  double gamma = 0.0;
  double delta = 0.0;
};

/// gamma_n(T) = K_n T + zeta_n(T), delta_n(T) = -K_n T - int_0^T Y_n, with the
/// integral by composite Simpson on `steps` intervals.
NondegeneratePhases nondeg_phase_formulas(double kn, const std::function<double(double)>& zeta_n,
                                          const std::function<double(double)>& yn, double period,
                                          Index steps = 4096);

}  // namespace dynphase
