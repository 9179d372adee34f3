#include "helpers.hpp"

#include "dynphase/cranked.hpp"
#include "dynphase/errors.hpp"
#include "dynphase/grid.hpp"
#include "dynphase/propagator.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace dynphase;

namespace {

constexpr double pi = std::numbers::pi;

Matrix pauli(char which) {
  Matrix m = Matrix::Zero(2, 2);
  switch (which) {
    case 'x': m(0, 1) = m(1, 0) = 1.0; break;
    case 'y': m(0, 1) = Complex(0.0, -1.0); m(1, 0) = Complex(0.0, 1.0); break;
    default: m(0, 0) = 1.0; m(1, 1) = -1.0; break;
  }
  return m;
}

Matrix driven_qubit(double t) { return 0.7 * pauli('z') + std::cos(3.0 * t) * pauli('x') + 0.4 * t * pauli('y'); }

HamiltonianSchedule driven_schedule() {
  HamiltonianSchedule h;
  h.dim = 2;
  h.eval = [](double t) { return OperatorMatrix::hermitian(driven_qubit(t)); };
  h.label = "driven qubit";
  return h;
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

TEST_SUITE("propagator") {

TEST_CASE("constant diagonal generators are integrated exactly") {
  RealVector d(3);
  d << 0.5, -1.0, 2.0;
  const auto path = evolve(HamiltonianSchedule::constant(OperatorMatrix::diagonal(d)), 2.0, 40, 1e-12);
  REQUIRE(path.size() == 41);
  for (Index k = 0; k < path.size(); ++k) {
    const double t = path.grid[static_cast<std::size_t>(k)];
    for (Index i = 0; i < 3; ++i)
      CHECK(std::abs(path.samples[static_cast<std::size_t>(k)](i, i) - std::exp(-kI * d(i) * t)) < 1e-14);
  }
}

TEST_CASE("evolution matches a fine RK4 reference") {
  const auto path = evolve(driven_schedule(), 2.0, 64, 1e-11);
  const Matrix ref = testing::rk4_propagate(driven_qubit, 2, 2.0, 20000);
  CHECK((path.samples.back().matrix() - ref).norm() < 1e-9);
  CHECK(path.tol_achieved <= 1e-11);
  CHECK(path.max_unitarity_drift < 1e-10);
  CHECK(unitarity_defect(path.samples.back().matrix()) < 1e-12);
}

TEST_CASE("fixed steps converge at fourth order") {
  const Matrix ref = testing::rk4_propagate(driven_qubit, 2, 2.0, 40000);
  EvolveOptions fixed;
  fixed.estimate_error = false;
  double prev = 0.0;
  for (Index steps : {16, 32, 64}) {
    const double e = (evolve(driven_schedule(), 2.0, steps, 1.0, fixed).samples.back().matrix() - ref).norm();
    if (prev > 0.0) CHECK(std::log2(prev / e) == doctest::Approx(4.0).epsilon(0.08));
    prev = e;
  }
}

TEST_CASE("record stride keeps every stride-th sample") {
  EvolveOptions opt;
  opt.record_stride = 4;
  const auto coarse = evolve(driven_schedule(), 1.0, 32, 1e-10, opt);
  const auto fine = evolve(driven_schedule(), 1.0, 32, 1e-10);
  REQUIRE(coarse.size() == 9);
  CHECK((coarse.samples.back().matrix() - fine.samples.back().matrix()).norm() < 1e-12);
  CHECK(coarse.at(0.5).matrix().isApprox(fine.at(0.5).matrix(), 1e-12));
  CHECK(kind_of([&] { coarse.at(0.3); }) == ErrorKind::InvalidArgument);
  opt.record_stride = 5;
  CHECK(kind_of([&] { evolve(driven_schedule(), 1.0, 32, 1e-10, opt); }) == ErrorKind::InvalidArgument);
}

TEST_CASE("sampled schedules that are too coarse report ToleranceNotMet") {
  HamiltonianSchedule h = driven_schedule();
  h.sample_spacing = 0.5;
  CHECK(kind_of([&] { evolve(h, 2.0, 4, 1e-14); }) == ErrorKind::ToleranceNotMet);
  EvolveOptions shallow;
  shallow.max_refinement = 0;
  CHECK(kind_of([&] { evolve(driven_schedule(), 2.0, 2, 1e-14, shallow); }) == ErrorKind::ToleranceNotMet);
}

TEST_CASE("periodicity defect") {
  HamiltonianSchedule h = HamiltonianSchedule::scaled(OperatorMatrix::hermitian(pauli('x')),
                                                      [](double t) { return 1.0 + std::sin(2.0 * t); });
  h.period = pi;
  const auto times = uniform_grid(pi, 16);
  CHECK(periodicity_defect(h, times) < 1e-14);
  h.period = 1.0;
  CHECK(periodicity_defect(h, times) > 0.1);
}

TEST_CASE("compose_geq with a vanishing generator returns the input path") {
  std::mt19937_64 rng{21u};
  const OperatorMatrix i0 = OperatorMatrix::hermitian(testing::random_hermitian(4, rng));
  const auto u = evolve(HamiltonianSchedule::constant(i0), 1.0, 8, 1e-12);
  const auto out = compose_geq(u, HamiltonianSchedule::zero(4), i0);
  for (std::size_t k = 0; k < u.samples.size(); ++k) CHECK((out.samples[k].matrix() - u.samples[k].matrix()).norm() == 0.0);
}

TEST_CASE("compose_geq with f(t) I0 matches U exp(-i F I0)") {
  std::mt19937_64 rng{22u};
  const OperatorMatrix h0 = OperatorMatrix::hermitian(testing::random_hermitian(3, rng));
  const OperatorMatrix i0 = OperatorMatrix::hermitian(testing::random_hermitian(3, rng));
  const auto u = evolve(HamiltonianSchedule::constant(h0), 2.0, 32, 1e-12);
  const auto y = HamiltonianSchedule::scaled(i0, [](double t) { return std::sin(t); });
  const auto out = compose_geq(u, y, i0, 1e-11);
  for (std::size_t k = 0; k < u.samples.size(); ++k) {
    const double F = 1.0 - std::cos(u.grid[k]);
    const Matrix expected = u.samples[k].matrix() * testing::taylor_expm(i0.matrix(), F);
    CHECK((out.samples[k].matrix() - expected).norm() < 1e-9);
  }
}

TEST_CASE("compose_geq rejects generators that do not commute with I0") {
  RealVector d(2);
  d << 1.0, -1.0;
  const auto u = evolve(HamiltonianSchedule::constant(OperatorMatrix::identity(2)), 1.0, 4, 1e-12);
  const auto y = HamiltonianSchedule::constant(OperatorMatrix::hermitian(pauli('x')));
  CHECK(kind_of([&] { compose_geq(u, y, OperatorMatrix::diagonal(d)); }) == ErrorKind::SymmetryViolation);
}

TEST_CASE("loop_check finds evolution loops") {
  RealVector d(4);
  d << 0.5, 1.5, 2.5, 3.5;
  const double tau = 2.0 * pi;
  const auto u = evolve(HamiltonianSchedule::constant(OperatorMatrix::diagonal(d)), 2.0 * tau, 64, 1e-12);
  const auto first = loop_check(u, tau, 1e-10);
  REQUIRE(first.has_value());
  CHECK(std::abs(*first + 1.0) < 1e-12);
  const auto second = loop_check(u, 2.0 * tau, 1e-10);
  REQUIRE(second.has_value());
  CHECK(std::abs(*second - 1.0) < 1e-12);
  CHECK_FALSE(loop_check(u, 0.5 * tau, 1e-10).has_value());
}

TEST_CASE("ordered exponential of a sampled generator") {
  const double t_max = 1.5;
  const Matrix ref = testing::rk4_propagate(driven_qubit, 2, t_max, 40000);
  double prev = 0.0;
  std::vector<double> grid;
  for (Index steps : {48, 96, 192}) {
    grid = uniform_grid(t_max, steps);
    std::vector<Matrix> gen;
    for (double t : grid) gen.push_back(driven_qubit(t));
    const auto series = ordered_exponential_series(gen, uniform_spacing(grid));
    REQUIRE(series.size() == grid.size());
    const double e = (series.back() - ref).norm();
    if (prev > 0.0) CHECK(std::log2(prev / e) > 3.6);
    prev = e;
  }
  CHECK(prev < 1e-8);

  // a constant generator is reproduced exactly
  std::vector<Matrix> flat(grid.size(), pauli('y'));
  const auto exact = ordered_exponential_series(flat, uniform_spacing(grid));
  CHECK((exact.back() - testing::taylor_expm(pauli('y'), t_max)).norm() < 1e-12);
}

TEST_CASE("cranked schedule integrates to the closed-form propagator") {
  std::mt19937_64 rng{23u};
  const CrankedSystem sys(OperatorMatrix::hermitian(testing::random_hermitian(4, rng)),
                          OperatorMatrix::hermitian(testing::random_hermitian(4, rng)));
  const auto path = evolve(cranked_schedule(sys), 2.0, 256, 1e-12);
  for (double t : {0.5, 1.25, 2.0})
    CHECK((path.at(t).matrix() - cranked_U(sys, t).matrix()).norm() < 1e-9);
}

}  // TEST_SUITE
