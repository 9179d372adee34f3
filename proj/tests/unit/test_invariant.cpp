#include "helpers.hpp"

#include "dynphase/cranked.hpp"
#include "dynphase/errors.hpp"
#include "dynphase/grid.hpp"
#include "dynphase/invariant.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

using namespace dynphase;

namespace {

constexpr double pi = std::numbers::pi;

// Integer spectrum for K so that everything closes after 2 pi.
CrankedSystem periodic_system(std::uint64_t seed) {
  std::mt19937_64 rng{seed};
  RealVector k(3);
  k << 1.0, 0.0, -1.0;
  return CrankedSystem(OperatorMatrix::hermitian(testing::random_hermitian(3, rng)), OperatorMatrix::diagonal(k));
}

InvariantPath analytic_invariant(const CrankedSystem& sys, const std::vector<double>& grid) {
  return sample_invariant([&sys](double t) { return cranked_I(sys, t); }, grid);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

}  // namespace

TEST_SUITE("invariant") {

TEST_CASE("transport of I0 reproduces the cranked invariant") {
  const CrankedSystem sys = periodic_system(31u);
  const auto u = evolve(cranked_schedule(sys), 2.0, 128, 1e-12);
  const auto inv = transport(u, sys.I0());
  CHECK(inv.source == InvariantSource::transported);
  for (std::size_t k = 0; k < inv.grid.size(); k += 16)
    CHECK((inv.samples[k].matrix() - cranked_I(sys, inv.grid[k]).matrix()).norm() < 1e-9);
}

TEST_CASE("Liouville-von Neumann residual vanishes at fourth order") {
  const CrankedSystem sys = periodic_system(32u);
  const auto h = cranked_schedule(sys);
  double prev = 0.0;
  for (Index steps : {64, 128, 256}) {
    const auto res = lvn_residual(analytic_invariant(sys, uniform_grid(2.0 * pi, steps)), h);
    const double worst = *std::max_element(res.begin(), res.end());
    if (prev > 0.0) CHECK(std::log2(prev / worst) > 3.6);
    prev = worst;
  }
  CHECK(prev < 1e-5);

  // the Hamiltonian itself is not an invariant
  const auto grid = uniform_grid(2.0 * pi, 128);
  const auto wrong = sample_invariant([&sys](double t) { return cranked_H(sys, t); }, grid);
  const auto res = lvn_residual(wrong, h);
  CHECK(*std::max_element(res.begin(), res.end()) > 1e-2);
}

TEST_CASE("eigenframe of a periodic invariant") {
  const CrankedSystem sys = periodic_system(33u);
  const auto grid = uniform_grid(2.0 * pi, 256);
  const auto inv = analytic_invariant(sys, grid);
  CHECK(spectrum_drift(inv) < 1e-12);

  EigenframeOptions opt;
  opt.enforce_periodic = true;
  const InvariantFrame frame = eigenframe(inv, opt);
  REQUIRE(frame.complete());
  CHECK(frame.periodic);
  CHECK(frame_reconstruction_error(frame, inv) < 1e-10);
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Matrix c = frame.columns_at(k);
    CHECK((c.adjoint() * c - Matrix::Identity(3, 3)).norm() < 1e-10);
    for (const auto& level : frame.levels) {
      const Matrix& v = level.columns[k];
      CHECK((inv.samples[k].matrix() * v - level.eigenvalue * v).norm() < 1e-10);
      if (k > 0) CHECK(std::abs((level.columns[k - 1].adjoint() * v)(0, 0)) > 0.99);
    }
  }
  for (const auto& level : frame.levels) CHECK((level.columns.back() - level.columns.front()).norm() < 1e-10);
  CHECK((frame.unitary_at(0) - Matrix::Identity(3, 3)).norm() < 1e-12);
}

TEST_CASE("eigenframe keeps degenerate levels together") {
  std::mt19937_64 rng{34u};
  RealVector d(3);
  d << 1.0, 1.0, -1.0;
  const Matrix q = Eigen::HouseholderQR<Matrix>(testing::random_matrix(3, rng)).householderQ();
  const OperatorMatrix k = OperatorMatrix::hermitian(testing::random_hermitian(3, rng));
  const CrankedSystem sys(OperatorMatrix::hermitian(k.matrix() + q * d.asDiagonal() * q.adjoint()), k);
  const auto inv = analytic_invariant(sys, uniform_grid(1.0, 64));
  const InvariantFrame frame = eigenframe(inv);
  REQUIRE(frame.levels.size() == 2);
  CHECK(frame.levels[1].degeneracy == 2);
  CHECK(frame.tracked_dim() == 3);
  CHECK(frame_reconstruction_error(frame, inv) < 1e-10);

  EigenframeOptions lowest;
  lowest.max_levels = 1;
  CHECK(eigenframe(inv, lowest).tracked_dim() == 1);
}

TEST_CASE("a moving spectrum is rejected") {
  RealVector d(2);
  d << 1.0, -1.0;
  const auto inv = sample_invariant(
      [&](double t) { return OperatorMatrix::diagonal((1.0 + t) * d); }, uniform_grid(1.0, 16));
  CHECK(spectrum_drift(inv) == doctest::Approx(0.5));
  CHECK(kind_of([&] { eigenframe(inv); }) == ErrorKind::SpectrumDrift);
}

TEST_CASE("build_geq accepts commuting additions only") {
  const CrankedSystem sys = periodic_system(35u);
  const auto grid = uniform_grid(pi, 32);
  const auto inv = analytic_invariant(sys, grid);
  const auto h = cranked_schedule(sys);

  HamiltonianSchedule x;
  x.dim = 3;
  x.eval = [&sys](double t) { return OperatorMatrix::hermitian(std::sin(t) * cranked_I(sys, t).matrix()); };
  const auto geq = build_geq(h, x, inv);
  CHECK((geq(0.7).matrix() - h(0.7).matrix() - x(0.7).matrix()).norm() < 1e-14);
  CHECK(symmetry_check(inv, x).passed);

  const auto bad = HamiltonianSchedule::constant(sys.K());
  const auto report = symmetry_check(inv, bad);
  CHECK_FALSE(report.passed);
  CHECK(kind_of([&] { build_geq(h, bad, inv); }) == ErrorKind::SymmetryViolation);
}

TEST_CASE("frame Hamiltonian examples") {
  const CrankedSystem sys = periodic_system(36u);
  const auto grid = uniform_grid(2.0 * pi, 1024);

  // constant frame
  const auto still = frame_from_unitary(grid, [](double) { return Matrix(Matrix::Identity(3, 3)); }, sys.I0());
  const auto h_still = hstar(still);
  for (double t : {0.0, 1.0 * pi, 2.0 * pi}) CHECK(h_still.schedule(t).matrix().norm() < 1e-14);

  // W = exp(-iKt) gives H* = K
  const auto rot = frame_from_unitary(grid, [&sys](double t) { return sys.rotation(t).matrix(); }, sys.I0());
  const auto h_rot = hstar(rot);
  double worst = 0.0;
  for (double t : grid) worst = std::max(worst, (h_rot.schedule(t).matrix() - sys.K().matrix()).norm());
  CHECK(worst < 1e-8);
  CHECK(h_rot.antihermitian_residual < 1e-8);

  // evolving with H* regenerates W
  const auto path = evolve(h_rot.schedule, 2.0 * pi, 256, 1e-8);
  CHECK((path.samples.back().matrix() - rot.unitary_at(grid.size() - 1)).norm() < 1e-7);

  // too coarse a grid is detected
  const auto coarse = frame_from_unitary(uniform_grid(2.0 * pi, 8),
                                         [&sys](double t) { return sys.rotation(t).matrix(); }, sys.I0());
  CHECK(kind_of([&] { hstar(coarse); }) == ErrorKind::GridTooCoarse);
}

TEST_CASE("gauge transformations shift H* by W dZ/dt Z^dagger W^dagger") {
  const CrankedSystem sys = periodic_system(37u);
  const auto grid = uniform_grid(pi, 512);
  const auto frame = frame_from_unitary(grid, [&sys](double t) { return sys.rotation(t).matrix(); }, sys.I0());

  // Z = exp(-i F(t) I0) with F = 1 - cos t
  const SpectralExponential flow(sys.I0());
  UnitaryPath z;
  z.grid = grid;
  for (double t : grid) z.samples.push_back(flow(1.0 - std::cos(t)));
  const GaugeResult g = gauge_transform(frame, z, sys.I0());
  REQUIRE(g.hstar.has_value());
  double worst = 0.0;
  for (double t : grid) {
    const Matrix expected = sys.K().matrix() + std::sin(t) * cranked_I(sys, t).matrix();
    worst = std::max(worst, (g.hstar->schedule(t).matrix() - expected).norm());
  }
  CHECK(worst < 1e-7);
  // the gauge only rephases each eigenvector
  for (std::size_t l = 0; l < frame.levels.size(); ++l)
    for (std::size_t k = 0; k < grid.size(); k += 64) {
      const Complex overlap = (frame.levels[l].columns[k].adjoint() * g.frame.levels[l].columns[k])(0, 0);
      CHECK(std::abs(overlap) == doctest::Approx(1.0).epsilon(1e-12));
    }

  // identity gauge changes nothing
  UnitaryPath one;
  one.grid = grid;
  one.samples.assign(grid.size(), OperatorMatrix::identity(3));
  const GaugeResult same = gauge_transform(frame, one, sys.I0());
  CHECK((same.frame.unitary_at(100) - frame.unitary_at(100)).norm() < 1e-14);

  // a gauge that does not commute with I0 is rejected
  UnitaryPath bad;
  bad.grid = grid;
  for (double t : grid) bad.samples.push_back(sys.rotation(t));
  CHECK(kind_of([&] { gauge_transform(frame, bad, sys.I0()); }) == ErrorKind::SymmetryViolation);
}

TEST_CASE("a periodic invariant commutes with U(T)") {
  const CrankedSystem sys = periodic_system(38u);
  const OperatorMatrix ut = cranked_U(sys, 2.0 * pi);
  CHECK(comm_norm(ut, sys.I0()) < 1e-10);
  CHECK(comm_norm(cranked_U(sys, 1.0), sys.I0()) > 1e-3);
}

}  // TEST_SUITE
