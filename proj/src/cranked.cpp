#include "dynphase/cranked.hpp"

#include "dynphase/errors.hpp"
#include "dynphase/grid.hpp"

#include <algorithm>
#include <sstream>

namespace dynphase {

CrankedSystem::CrankedSystem(OperatorMatrix h0, OperatorMatrix k) : h0_(std::move(h0)), k_(std::move(k)) {
  if (h0_.dim() != k_.dim()) raise(ErrorKind::DimensionMismatch, "H0 and K differ in dimension");
  if (!h0_.is(Structure::hermitian)) h0_ = OperatorMatrix::hermitian(h0_.matrix());
  if (!k_.is(Structure::hermitian)) k_ = OperatorMatrix::hermitian(k_.matrix());
  i0_ = OperatorMatrix(h0_.matrix() - k_.matrix(), Structure::hermitian, trusted);
  exp_k_ = std::make_shared<const SpectralExponential>(k_);
  exp_i0_ = std::make_shared<const SpectralExponential>(i0_);
}

OperatorMatrix rotate(const CrankedSystem& sys, const OperatorMatrix& a, double t) {
  const OperatorMatrix r = sys.rotation(t);
  if (r.is(Structure::diagonal)) {
    const Vector d = r.matrix().diagonal();
    Matrix out = d.asDiagonal() * a.matrix() * d.conjugate().asDiagonal();
    return OperatorMatrix(hermitian_part(out), Structure::hermitian, trusted);
  }
  return OperatorMatrix(hermitian_part(r.matrix() * a.matrix() * r.matrix().adjoint()), Structure::hermitian,
                        trusted);
}

OperatorMatrix cranked_H(const CrankedSystem& sys, double t) { return rotate(sys, sys.H0(), t); }

OperatorMatrix cranked_I(const CrankedSystem& sys, double t) { return rotate(sys, sys.I0(), t); }

OperatorMatrix cranked_U(const CrankedSystem& sys, double t) {
  const OperatorMatrix r = sys.rotation(t);
  if (r.is(Structure::diagonal))
    return OperatorMatrix(r.matrix().diagonal().asDiagonal() * sys.invariant_flow(t).matrix(), Structure::unitary,
                          trusted);
  return OperatorMatrix(r.matrix() * sys.invariant_flow(t).matrix(), Structure::unitary, trusted);
}

HamiltonianSchedule cranked_schedule(const CrankedSystem& sys, std::optional<double> period) {
  HamiltonianSchedule s;
  s.dim = sys.dim();
  s.eval = [sys](double t) { return cranked_H(sys, t); };
  s.period = period;
  s.label = "cranked";
  return s;
}

GeqMember geq_member(const CrankedSystem& sys, const HamiltonianSchedule& ytilde, double t_max, Index steps,
                     double tol, const EvolveOptions& options) {
  if (ytilde.dim != sys.dim()) raise(ErrorKind::DimensionMismatch, "Y and the cranked system differ in dimension");
  const std::vector<double> grid = uniform_grid(t_max, steps);
  const double scale_i0 = std::max(sys.I0().matrix().norm(), kAbsoluteFloor);
  for (double t : grid) {
    const OperatorMatrix y = ytilde(t);
    const double c = comm_norm(y, sys.I0());
    if (c > 1e-8 * std::max(y.matrix().norm(), kAbsoluteFloor) && c > 1e-14 * scale_i0) {
      std::ostringstream msg;
      msg << "[Y, I0] = " << c << " at t = " << t;
      raise(ErrorKind::SymmetryViolation, msg.str());
    }
    if (ytilde.is_constant) break;
  }

  GeqMember out;
  const bool zero = ytilde.is_constant && ytilde(0.0).matrix().isZero(0.0);
  if (zero) {
    out.hamiltonian = HamiltonianSchedule::constant(sys.K(), "K");
  } else {
    out.hamiltonian.dim = sys.dim();
    out.hamiltonian.label = "cranked-geq";
    out.hamiltonian.eval = [sys, ytilde](double t) {
      const OperatorMatrix inner(sys.K().matrix() + ytilde(t).matrix(), Structure::hermitian, trusted);
      return rotate(sys, inner, t);
    };
  }

  UnitaryPath v;
  if (zero) {
    v.grid = grid;
    v.samples.assign(grid.size(), OperatorMatrix::identity(sys.dim()));
  } else {
    EvolveOptions inner = options;
    inner.record_stride = 1;
    v = evolve(ytilde, t_max, steps, tol, inner);
  }
  out.propagator.grid = grid;
  out.propagator.tol_achieved = v.tol_achieved;
  out.propagator.max_unitarity_drift = v.max_unitarity_drift;
  out.propagator.samples.reserve(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k)
    out.propagator.samples.emplace_back(sys.rotation(grid[k]).matrix() * v.samples[k].matrix(), Structure::unitary,
                                        trusted);
  return out;
}

OperatorMatrix generalized_cranked(const OperatorMatrix& k, const OperatorMatrix& h0,
                                   const std::function<double(double)>& g, const std::function<double(double)>& h,
                                   double t) {
  if (k.dim() != h0.dim()) raise(ErrorKind::DimensionMismatch, "H0 and K differ in dimension");
  const Matrix r = expm_igen(k, g(t)).matrix();
  return OperatorMatrix(hermitian_part(h(t) * (r * h0.matrix() * r.adjoint())), Structure::hermitian, trusted);
}

HamiltonianSchedule generalized_cranked_schedule(const OperatorMatrix& k, const OperatorMatrix& h0,
                                                 std::function<double(double)> g, std::function<double(double)> h) {
  if (k.dim() != h0.dim()) raise(ErrorKind::DimensionMismatch, "H0 and K differ in dimension");
  auto exp_k = std::make_shared<const SpectralExponential>(k);
  HamiltonianSchedule s;
  s.dim = k.dim();
  s.label = "generalized-cranked";
  s.eval = [exp_k, h0, g = std::move(g), h = std::move(h)](double t) {
    const Matrix r = (*exp_k)(g(t)).matrix();
    return OperatorMatrix(hermitian_part(h(t) * (r * h0.matrix() * r.adjoint())), Structure::hermitian, trusted);
  };
  return s;
}

NondegeneratePhases nondeg_phase_formulas(double kn, const std::function<double(double)>& zeta_n,
                                          const std::function<double(double)>& yn, double period, Index steps) {
  if (!(period > 0.0)) raise(ErrorKind::InvalidArgument, "period must be positive");
  if (steps < 2) steps = 2;
  if (steps % 2 != 0) ++steps;
  const std::vector<double> grid = uniform_grid(period, steps);
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) values[k] = yn(grid[k]);
  const double integral = cumulative_integral(values, period / static_cast<double>(steps)).back();
  return {kn * period + zeta_n(period), -kn * period - integral};
}

}  // namespace dynphase
