#include "dynphase/oscillator.hpp"

#include "dynphase/errors.hpp"
#include "dynphase/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace dynphase {

namespace {

constexpr double pi = std::numbers::pi;
constexpr double kDegenerateGap = 1e-9;

OperatorMatrix herm(Matrix m) { return OperatorMatrix(hermitian_part(m), Structure::hermitian, trusted); }

}  // namespace

OscillatorParams derive_params(double M, double Omega, double m, double omega) {
  std::ostringstream msg;
  if (!(M > 0.0 && Omega > 0.0 && m > 0.0 && omega > 0.0)) {
    msg << "masses and frequencies must be positive (M=" << M << ", Omega=" << Omega << ", m=" << m
        << ", omega=" << omega << ")";
    raise(ErrorKind::ConstraintViolation, msg.str());
  }
  if (!(m > M)) {
    msg << "need m > M, got m=" << m << ", M=" << M;
    raise(ErrorKind::ConstraintViolation, msg.str());
  }
  if (!(M * Omega * Omega > m * omega * omega)) {
    msg << "need M Omega^2 > m omega^2, got " << M * Omega * Omega << " <= " << m * omega * omega;
    raise(ErrorKind::ConstraintViolation, msg.str());
  }

  OscillatorParams p;
  p.M = M;
  p.Omega = Omega;
  p.m = m;
  p.omega = omega;
  p.nu = M * Omega / (m * omega);
  const double nu2 = p.nu * p.nu;
  const double mw = m * omega;
  p.a = (1.0 + nu2) / (2.0 * M);
  p.b = (1.0 - nu2) / (2.0 * M);
  p.c = mw * (1.0 - nu2) / (2.0 * M);
  p.d = mw * mw * (1.0 + nu2) / (2.0 * M);
  p.e = -mw * mw * (1.0 - nu2) / (2.0 * M);

  const double inv_mass = 1.0 / M - 1.0 / m;
  p.mtilde = 1.0 / inv_mass;
  p.wtilde = std::sqrt(inv_mass * (M * Omega * Omega - m * omega * omega));
  p.mu = mw / (p.mtilde * p.wtilde);
  const double e_term = p.e / (p.mtilde * p.wtilde * p.wtilde);
  p.zeta = -0.5 * (p.mtilde * p.b + e_term);
  p.kappa1 = 0.5 * (p.mtilde * p.b - e_term);
  p.kappa2 = -p.c / p.wtilde;
  p.xi = -2.0 * p.mu / (1.0 + p.mu * p.mu);
  p.T = pi / omega;
  p.tau = 2.0 * pi / omega;
  p.bbar = 2.0 * p.wtilde;
  return p;
}

bool is_degenerate(const OscillatorParams& p) {
  return std::abs(p.mu - 1.0) < kDegenerateGap || std::abs(p.nu - 1.0) < kDegenerateGap;
}

void require_nondegenerate(const OscillatorParams& p) {
  if (is_degenerate(p)) {
    std::ostringstream msg;
    msg << "parameters lie on the degenerate line (mu=" << p.mu << ", nu=" << p.nu
        << "): H(t) = H0 and the closed-form geometric phase is singular";
    raise(ErrorKind::DegenerateParameters, msg.str());
  }
}

FockSpace build_fock(const OscillatorParams& params, Index N, FockBasis basis, Index n_int) {
  if (N < 16) raise(ErrorKind::InvalidArgument, "Fock truncation needs N >= 16");
  if (n_int < 0) n_int = std::max(N - 20, N / 2);
  if (n_int < 1 || n_int > N - 4) raise(ErrorKind::InvalidArgument, "interior block must satisfy 1 <= N_int <= N - 4");

  FockSpace f;
  f.N = N;
  f.N_int = n_int;
  f.basis = basis;
  f.params = params;
  const double s_tilde = params.mtilde * params.wtilde;
  f.scale = basis == FockBasis::ktilde ? s_tilde : params.m * params.omega;
  const double s = f.scale;
  const double r = s_tilde / s;

  Matrix a = Matrix::Zero(N, N);
  for (Index n = 1; n < N; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
  const Matrix ad = a.adjoint();
  Matrix a2 = Matrix::Zero(N, N);
  for (Index n = 2; n < N; ++n) a2(n - 2, n) = std::sqrt(static_cast<double>(n) * static_cast<double>(n - 1));
  const Matrix ad2 = a2.adjoint();
  Matrix d = Matrix::Zero(N, N);
  for (Index n = 0; n < N; ++n) d(n, n) = 2.0 * static_cast<double>(n) + 1.0;

  const Matrix sum2 = a2 + ad2;
  f.x = herm((a + ad) / std::sqrt(2.0 * s));
  f.p = herm(kI * std::sqrt(s / 2.0) * (ad - a));
  f.X = herm(std::sqrt(r) * (a + ad) / std::sqrt(2.0));
  f.P = herm(kI * (ad - a) / std::sqrt(2.0 * r));
  f.x2 = herm((sum2 + d) / (2.0 * s));
  f.p2 = herm((s / 2.0) * (d - sum2));
  f.xp_px = herm(kI * (ad2 - a2));
  const Matrix X2 = r * (sum2 + d) / 2.0;
  const Matrix P2 = (d - sum2) / (2.0 * r);
  f.K1 = herm((X2 - P2) / 4.0);
  f.K2 = herm(-f.xp_px.matrix() / 4.0);
  f.K3 = herm((X2 + P2) / 4.0);

  const Matrix h0 = f.p2.matrix() / (2.0 * params.M) + params.M * params.Omega * params.Omega * f.x2.matrix() / 2.0;
  RealVector levels(N);
  if (basis == FockBasis::k) {
    for (Index n = 0; n < N; ++n) levels(n) = params.omega * (static_cast<double>(n) + 0.5);
    f.K = OperatorMatrix::diagonal(levels);
    f.H0 = herm(h0);
    f.I0 = herm(h0 - f.K.matrix());
  } else {
    for (Index n = 0; n < N; ++n) levels(n) = params.wtilde * (static_cast<double>(n) + 0.5);
    f.I0 = OperatorMatrix::diagonal(levels);
    f.K = herm(f.p2.matrix() / (2.0 * params.m) +
               params.m * params.omega * params.omega * f.x2.matrix() / 2.0);
    f.H0 = herm(f.K.matrix() + f.I0.matrix());
  }

  f.exp_K2 = std::make_shared<const SpectralExponential>(f.K2);
  f.exp_K3 = std::make_shared<const SpectralExponential>(f.K3);
  f.exp_K = std::make_shared<const SpectralExponential>(f.K);
  f.exp_I0 = std::make_shared<const SpectralExponential>(f.I0);
  return f;
}

CrankedSystem as_cranked(const FockSpace& fock) { return CrankedSystem(fock.H0, fock.K); }

OperatorMatrix gho_H(const FockSpace& fock, double t) {
  const OscillatorParams& q = fock.params;
  const double phi = 2.0 * q.omega * t;
  const double cp = std::cos(phi);
  const double sp = std::sin(phi);
  const Matrix h = 0.5 * ((q.a + q.b * cp) * fock.p2.matrix() + (q.c * sp) * fock.xp_px.matrix() +
                          (q.d + q.e * cp) * fock.x2.matrix());
  return OperatorMatrix(h, Structure::hermitian, trusted);
}

OperatorMatrix gho_I(const FockSpace& fock, double t) {
  return OperatorMatrix(gho_H(fock, t).matrix() - fock.K.matrix(), Structure::hermitian, trusted);
}

HamiltonianSchedule gho_schedule(const FockSpace& fock) {
  HamiltonianSchedule s;
  s.dim = fock.N;
  s.label = "gho";
  s.period = fock.params.T;
  s.eval = [fock](double t) { return gho_H(fock, t); };
  return s;
}

HyperbolicPoint hyperbolic_coords(const OscillatorParams& p, double t) {
  require_nondegenerate(p);
  HyperbolicPoint out;
  const double phi = 2.0 * p.omega * t;
  const double one_minus_cos = 1.0 - std::cos(phi);
  out.R3 = 1.0 + p.zeta * one_minus_cos;
  out.R1 = p.kappa1 * one_minus_cos;
  out.R2 = p.kappa2 * std::sin(phi);
  out.theta_bar = std::acosh(std::max(out.R3, 1.0));

  // R1 = 2 sin(s) rho cos(g), R2 = 2 sin(s) rho sin(g) with s = omega t and
  // g = atan2(kappa2 cos s, kappa1 sin s), so g lifts phi_bar on (0, pi].
  const double s = p.omega * t;
  const double j = s <= 0.0 ? 0.0 : std::ceil(s / pi) - 1.0;
  const double sr = s - j * pi;
  const double dir = p.xi < 0.0 ? 1.0 : -1.0;
  const double g0 = std::atan2(p.kappa2, 0.0);
  double local;
  if (std::abs(sr - pi) <= 1e-15 * std::max(1.0, s))
    local = g0 + dir * pi;
  else
    local = g0 + wrap_angle(std::atan2(p.kappa2 * std::cos(sr), p.kappa1 * std::sin(sr)) - g0);
  out.phi_bar = local + 2.0 * pi * j * dir;
  return out;
}

double phi_bar_rate(const OscillatorParams& p, double t) {
  const double phi = 2.0 * p.omega * t;
  const double x2 = p.xi * p.xi;
  return -p.xi / ((x2 + 1.0) + (x2 - 1.0) * std::cos(phi));
}

OperatorMatrix w_operator(const FockSpace& fock, double theta_bar, double phi_bar) {
  const Matrix e3 = (*fock.exp_K3)(phi_bar).matrix();
  const Matrix e2 = (*fock.exp_K2)(theta_bar).matrix();
  return OperatorMatrix(e3 * e2 * e3.adjoint(), Structure::unitary, trusted);
}

OperatorMatrix w_operator(const FockSpace& fock, double t) {
  const HyperbolicPoint h = hyperbolic_coords(fock.params, t);
  return w_operator(fock, h.theta_bar, h.phi_bar);
}

double sigma(const OscillatorParams& p, double t) {
  const double s = p.omega * t;
  const double ax = std::abs(p.xi);
  const double branch = std::atan(std::tan(s) / ax) + pi * std::round(s / pi);
  return -2.0 * s + 2.0 * ax * branch;
}

ClosedFormPhases closed_form_phases(const OscillatorParams& p, Index n, double t) {
  require_nondegenerate(p);
  if (n < 0) raise(ErrorKind::InvalidArgument, "level index must be nonnegative");
  const double k = 2.0 * static_cast<double>(n) + 1.0;
  ClosedFormPhases out;
  out.delta = -0.25 * k * (p.mu + 1.0 / p.mu) * p.omega * t;
  out.gamma = k * p.zeta * p.xi * sigma(p, t) / (4.0 * (1.0 - p.xi * p.xi));
  return out;
}

double principal_branch_cyclic_geometric_phase(const OscillatorParams& p, Index n) {
  require_nondegenerate(p);
  const double k = 2.0 * static_cast<double>(n) + 1.0;
  const double mu2 = p.mu * p.mu;
  return pi * p.mu * (1.0 + mu2) * (1.0 - p.nu * p.nu) * k / (4.0 * (1.0 - p.M / p.m) * (mu2 - 1.0));
}

Matrix invariant_eigenstates(const FockSpace& fock, Index count) {
  if (count < 1 || count > fock.N) raise(ErrorKind::InvalidArgument, "eigenstate count out of range");
  return eigh(fock.I0).frame.matrix().leftCols(count);
}

std::vector<CyclicState> cyclic_basis_evolution(const FockSpace& fock, Index n_max) {
  if (fock.basis != FockBasis::k) raise(ErrorKind::InvalidArgument, "cyclic evolution runs in the k-basis");
  if (n_max < 0 || n_max >= fock.N_int) raise(ErrorKind::InvalidArgument, "need 0 <= n_max < N_int");
  const double period = fock.params.T;
  const Matrix states = invariant_eigenstates(fock, n_max + 1);
  const Matrix ut = (*fock.exp_K)(period).matrix();
  const Matrix& k = fock.K.matrix();
  std::vector<CyclicState> out;
  for (Index n = 0; n <= n_max; ++n) {
    const Vector psi0 = states.col(n);
    const Vector psit = ut * psi0;
    const Complex amp = psi0.dot(psit);
    CyclicState c;
    c.n = n;
    c.fidelity = std::abs(amp);
    c.total_phase = std::arg(amp);
    c.projector_error = (psit * psit.adjoint() - psi0 * psi0.adjoint()).norm();
    c.mean_energy = psi0.dot(k * psi0).real();
    for (int j = 1; j <= 16; ++j) {
      const Vector psi = (*fock.exp_K)(period * j / 16.0).matrix() * psi0;
      c.energy_spread = std::max(c.energy_spread, std::abs(psi.dot(k * psi).real() - c.mean_energy));
    }
    if (c.fidelity < 1.0 - 1e-6) {
      std::ostringstream msg;
      msg << "return fidelity " << c.fidelity << " for n = " << n << " at N = " << fock.N << "; increase N";
      raise(ErrorKind::TruncationTooSmall, msg.str());
    }
    out.push_back(c);
  }
  return out;
}

ErmakovResult ermakov_check(const OscillatorParams& p, double t_max, Index steps) {
  const std::vector<double> grid = uniform_grid(t_max, steps);
  const double h = t_max / static_cast<double>(steps);
  const double inv_mt = 1.0 / p.mtilde;
  const double w = p.omega;
  ErmakovResult out;
  out.eta = inv_mt * (inv_mt - 2.0 * p.b) * w * w;
  const double c1 = inv_mt - 2.0 * p.b;
  const double c2 = inv_mt;

  std::vector<double> rho(grid.size());
  out.min_rho2 = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double t = grid[k];
    const double rho2 = inv_mt - p.b * (1.0 - std::cos(2.0 * w * t));
    out.min_rho2 = std::min(out.min_rho2, rho2);
    if (!(rho2 > 0.0)) {
      std::ostringstream msg;
      msg << "rho^2 = " << rho2 << " <= 0 at t = " << t;
      raise(ErrorKind::DomainError, msg.str());
    }
    rho[k] = std::sqrt(rho2);
    const double sn = std::sin(w * t);
    const double cs = std::cos(w * t);
    out.pinney_deviation = std::max(out.pinney_deviation, std::abs(rho2 - (c1 * sn * sn + c2 * cs * cs)));
  }
  const std::vector<double> rdd = second_derivative(rho, h);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double r = rho[k];
    out.max_residual = std::max(out.max_residual, std::abs(rdd[k] + w * w * r - out.eta / (r * r * r)));
  }
  return out;
}

OperatorMatrix GhoFamily::H(double t) const {
  return OperatorMatrix(fock.K.matrix() + f(t) * gho_I(fock, t).matrix(), Structure::hermitian, trusted);
}

OperatorMatrix GhoFamily::U(double t) const {
  return OperatorMatrix((*fock.exp_K)(t).matrix() * (*fock.exp_I0)(F(t)).matrix(), Structure::unitary, trusted);
}

HamiltonianSchedule GhoFamily::schedule() const {
  HamiltonianSchedule s;
  s.dim = fock.N;
  s.label = "gho-family";
  s.eval = [self = *this](double t) { return self.H(t); };
  return s;
}

GhoFamily gho_family(const FockSpace& fock, std::function<double(double)> f, std::function<double(double)> F) {
  if (!f || !F) raise(ErrorKind::InvalidArgument, "gho_family needs f and its antiderivative");
  if (std::abs(F(0.0)) > 1e-14) raise(ErrorKind::InvalidArgument, "antiderivative must vanish at t = 0");
  return GhoFamily{fock, std::move(f), std::move(F)};
}

}  // namespace dynphase
