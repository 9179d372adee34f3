#include "helpers.hpp"

#include "dynphase/errors.hpp"
#include "dynphase/grid.hpp"
#include "dynphase/oscillator.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>

using namespace dynphase;

namespace {

constexpr double pi = std::numbers::pi;
constexpr Index kBlock = 20;

Matrix block(const Matrix& a) { return a.topLeftCorner(kBlock, kBlock); }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

// Trapezoid rule on a periodic integrand, which converges geometrically.
double cyclic_gamma0_quadrature(const OscillatorParams& p) {
  const int n = 4096;
  double sum = 0.0;
  for (int j = 0; j < n; ++j) {
    const double phi = 2.0 * pi * j / n;
    const double x2 = p.xi * p.xi;
    sum += p.zeta * (1.0 - std::cos(phi)) * (-p.xi) / ((x2 + 1.0) + (x2 - 1.0) * std::cos(phi));
  }
  return 0.25 * sum * 2.0 * pi / n;
}

}  // namespace

TEST_SUITE("oscillator") {

TEST_CASE("derived parameters of the reference oscillator") {
  const OscillatorParams p = testing::reference_params();
  CHECK(p.mtilde == doctest::Approx(2.0));
  CHECK(p.wtilde == doctest::Approx(std::sqrt(3.5)));
  CHECK(p.nu == doctest::Approx(1.5));
  CHECK(p.mu == doctest::Approx(1.0 / std::sqrt(3.5)));
  CHECK(p.T == doctest::Approx(pi));
  CHECK(p.tau == doctest::Approx(2.0 * pi));
  CHECK(p.a + p.b == doctest::Approx(1.0 / p.M));
  CHECK(p.d + p.e == doctest::Approx(p.M * p.Omega * p.Omega));
  CHECK_FALSE(is_degenerate(p));

  CHECK(kind_of([] { derive_params(2.0, 1.0, 1.0, 1.0); }) == ErrorKind::ConstraintViolation);
  CHECK(kind_of([] { derive_params(1.0, 1.0, 2.0, 1.0); }) == ErrorKind::ConstraintViolation);
  CHECK(kind_of([] { derive_params(-1.0, 3.0, 2.0, 1.0); }) == ErrorKind::ConstraintViolation);
  CHECK(kind_of([] { build_fock(testing::reference_params(), 8, FockBasis::k); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("ktilde basis diagonalizes I0 and K3") {
  const OscillatorParams p = testing::reference_params();
  const FockSpace f = build_fock(p, 40, FockBasis::ktilde);
  for (Index n = 0; n < 40; ++n) {
    CHECK(f.I0(n, n).real() == doctest::Approx(p.wtilde * (n + 0.5)));
    CHECK(f.K3(n, n).real() == doctest::Approx((2.0 * n + 1.0) / 4.0));
  }
  CHECK(f.K3.matrix().isDiagonal(1e-14));
  CHECK(f.x2(0, 0).real() == doctest::Approx(1.0 / (2.0 * p.mtilde * p.wtilde)));
  CHECK(f.p2(0, 0).real() == doctest::Approx(p.mtilde * p.wtilde / 2.0));
  CHECK((block(f.x.matrix() * f.x.matrix()) - block(f.x2.matrix())).norm() < 1e-12);
  CHECK((block(f.x.matrix() * f.p.matrix() + f.p.matrix() * f.x.matrix()) - block(f.xp_px.matrix())).norm() < 1e-12);
  // canonical commutator on the interior
  const Matrix c = f.x.matrix() * f.p.matrix() - f.p.matrix() * f.x.matrix();
  CHECK((block(c) - kI * Matrix::Identity(kBlock, kBlock)).norm() < 1e-12);
}

TEST_CASE("su(1,1) commutators on the interior block") {
  const FockSpace f = build_fock(testing::reference_params(), 40, FockBasis::ktilde);
  auto comm = [](const OperatorMatrix& a, const OperatorMatrix& b) {
    return Matrix(a.matrix() * b.matrix() - b.matrix() * a.matrix());
  };
  CHECK((block(comm(f.K1, f.K2)) + kI * block(f.K3.matrix())).norm() < 1e-12);
  CHECK((block(comm(f.K2, f.K3)) - kI * block(f.K1.matrix())).norm() < 1e-12);
  // follows from the quadratic forms above; the opposite sign misses by 2 ||K2||
  CHECK((block(comm(f.K3, f.K1)) - kI * block(f.K2.matrix())).norm() < 1e-12);
}

TEST_CASE("the k basis diagonalizes K and carries the invariant spectrum") {
  const OscillatorParams p = testing::reference_params();
  const FockSpace f = build_fock(p, 60, FockBasis::k);
  for (Index n = 0; n < 60; ++n) CHECK(f.K(n, n).real() == doctest::Approx(p.omega * (n + 0.5)));
  const Matrix v = invariant_eigenstates(f, 4);
  for (Index n = 0; n < 4; ++n) {
    const Vector col = v.col(n);
    CHECK((f.I0.matrix() * col - p.wtilde * (n + 0.5) * col).norm() < 1e-9);
  }
}

TEST_CASE("gho Hamiltonian") {
  const OscillatorParams p = testing::reference_params();
  const FockSpace f = build_fock(p, 40, FockBasis::k);
  CHECK((gho_H(f, 0.0).matrix() - f.H0.matrix()).norm() < 1e-12);
  CHECK((gho_H(f, 0.3 + p.T).matrix() - gho_H(f, 0.3).matrix()).norm() < 1e-11);
  const CrankedSystem sys = as_cranked(f);
  for (double t : {0.2, 1.0, 2.5}) {
    CHECK((gho_H(f, t).matrix() - cranked_H(sys, t).matrix()).norm() < 1e-10);
    CHECK((gho_I(f, t).matrix() - cranked_I(sys, t).matrix()).norm() < 1e-10);
  }
  const auto s = gho_schedule(f);
  REQUIRE(s.period.has_value());
  CHECK(*s.period == doctest::Approx(pi));

  // nu = 1: the Hamiltonian does not move
  const OscillatorParams q = derive_params(1.0, 2.0, 2.0, 1.0);
  CHECK(is_degenerate(q));
  const FockSpace g = build_fock(q, 30, FockBasis::k);
  CHECK((gho_H(g, 0.9).matrix() - g.H0.matrix()).norm() < 1e-12);
  CHECK(kind_of([&] { hyperbolic_coords(q, 0.5); }) == ErrorKind::DegenerateParameters);
  CHECK(kind_of([&] { closed_form_phases(q, 0, q.T); }) == ErrorKind::DegenerateParameters);
}

TEST_CASE("Heisenberg rotation of x and p by K") {
  const OscillatorParams p = testing::reference_params();
  const FockSpace f = build_fock(p, 40, FockBasis::k);
  const CrankedSystem sys = as_cranked(f);
  for (double t : {0.4, 2.2}) {
    const double c = std::cos(p.omega * t), s = std::sin(p.omega * t);
    const Matrix xr = rotate(sys, f.x, t).matrix();
    const Matrix pr = rotate(sys, f.p, t).matrix();
    CHECK((block(xr) - block(c * f.x.matrix() - s / (p.m * p.omega) * f.p.matrix())).norm() < 1e-12);
    CHECK((block(pr) - block(p.m * p.omega * s * f.x.matrix() + c * f.p.matrix())).norm() < 1e-12);
  }
}

TEST_CASE("R(t) stays on the unit hyperboloid") {
  const OscillatorParams p = testing::reference_params();
  for (double t : {0.1, 0.7, 1.3, 2.9, 3.5}) {
    const HyperbolicPoint h = hyperbolic_coords(p, t);
    CHECK(h.R3 * h.R3 - h.R1 * h.R1 - h.R2 * h.R2 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::cosh(h.theta_bar) == doctest::Approx(1.0 + p.zeta * (1.0 - std::cos(2.0 * p.omega * t))));
    CHECK(std::sinh(h.theta_bar) * std::cos(h.phi_bar) == doctest::Approx(h.R1).epsilon(1e-10));
    CHECK(std::sinh(h.theta_bar) * std::sin(h.phi_bar) == doctest::Approx(h.R2).epsilon(1e-10));
  }
}

TEST_CASE("phi_bar rate against finite differences") {
  const OscillatorParams p = testing::reference_params();
  const double h = 1e-4;
  for (double t : {0.3, 1.0, 1.6, 2.8}) {
    const double fd = (hyperbolic_coords(p, t + h).phi_bar - hyperbolic_coords(p, t - h).phi_bar) / (2.0 * h);
    CHECK(fd == doctest::Approx(2.0 * p.omega * phi_bar_rate(p, t)).epsilon(1e-6));
  }
}

TEST_CASE("frame operator identities") {
  const OscillatorParams p = testing::reference_params();
  // the squeeze reaches theta_bar ~ 1.2, so the interior needs room
  const FockSpace f = build_fock(p, 120, FockBasis::ktilde);
  for (double t : {0.5, 1.2, 2.6}) {
    const HyperbolicPoint h = hyperbolic_coords(p, t);
    const Matrix w = w_operator(f, t).matrix();
    CHECK((w - w_operator(f, h.theta_bar, h.phi_bar).matrix()).norm() == 0.0);
    const Matrix lhs = w * f.K3.matrix() * w.adjoint();
    const Matrix rhs = std::sinh(h.theta_bar) * std::cos(h.phi_bar) * f.K1.matrix() +
                       std::sinh(h.theta_bar) * std::sin(h.phi_bar) * f.K2.matrix() +
                       std::cosh(h.theta_bar) * f.K3.matrix();
    CHECK((block(lhs) - block(rhs)).norm() < 1e-9);
    // the frame carries I0 into I(t)
    CHECK((block(w * f.I0.matrix() * w.adjoint()) - block(gho_I(f, t).matrix())).norm() < 1e-9);
  }
  CHECK((w_operator(f, 0.0, 0.3).matrix() - Matrix::Identity(120, 120)).norm() < 1e-12);
}

TEST_CASE("closed-form phases against quadrature") {
  const OscillatorParams p = testing::reference_params();
  const double oracle = cyclic_gamma0_quadrature(p);
  CHECK(oracle == doctest::Approx(0.3183620701).epsilon(1e-9));
  for (Index n = 0; n < 4; ++n) {
    const ClosedFormPhases c = closed_form_phases(p, n, p.T);
    CHECK(c.gamma == doctest::Approx((2.0 * n + 1.0) * oracle).epsilon(1e-9));
  }
  CHECK(sigma(p, p.T) == doctest::Approx(2.0 * pi * (std::abs(p.xi) - 1.0)).epsilon(1e-12));
  // the principal-branch expression is off by a quarter turn per unit of 2n + 1
  CHECK(principal_branch_cyclic_geometric_phase(p, 0) - oracle == doctest::Approx(pi / 2.0).epsilon(1e-6));
}

TEST_CASE("invariant eigenstates are cyclic under K") {
  const FockSpace f = build_fock(testing::reference_params(), 80, FockBasis::k);
  const auto states = cyclic_basis_evolution(f, 3);
  REQUIRE(states.size() == 4);
  for (const auto& s : states) {
    CHECK(s.fidelity == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(s.projector_error < 1e-6);
    CHECK(s.energy_spread < 1e-8);
  }
}

TEST_CASE("Ermakov-Pinney check") {
  const OscillatorParams p = testing::reference_params();
  const ErmakovResult coarse = ermakov_check(p, p.T, 256);
  const ErmakovResult fine = ermakov_check(p, p.T, 512);
  CHECK(fine.max_residual < 1e-6);
  CHECK(std::log2(coarse.max_residual / fine.max_residual) > 3.6);
  CHECK(fine.pinney_deviation < 1e-12);
  CHECK(fine.min_rho2 > 0.0);
}

TEST_CASE("gho family propagator") {
  const OscillatorParams p = testing::reference_params();
  const FockSpace fock = build_fock(p, 80, FockBasis::k);
  const GhoFamily fam = gho_family(fock, [](double t) { return std::sin(t); }, [](double t) { return 1.0 - std::cos(t); });
  CHECK((fam.H(0.0).matrix() - fock.K.matrix()).norm() < 1e-12);
  CHECK((fam.U(0.0).matrix() - Matrix::Identity(80, 80)).norm() < 1e-12);
  const double h = 2e-4;
  for (double t : {0.5, 1.4}) {
    const Matrix du = (fam.U(t - 2 * h).matrix() - 8.0 * fam.U(t - h).matrix() + 8.0 * fam.U(t + h).matrix() -
                       fam.U(t + 2 * h).matrix()) /
                      (12.0 * h);
    CHECK((block(kI * du - fam.H(t).matrix() * fam.U(t).matrix())).norm() < 1e-7);
  }
}

}  // TEST_SUITE
