#include "dynphase/propagator.hpp"

#include "dynphase/errors.hpp"
#include "dynphase/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

namespace dynphase {

namespace {

constexpr double kReunitarizeThreshold = 1e-12;

double drift(const Matrix& u) {
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm();
}

class Stepper {
 public:
  Stepper(const HamiltonianSchedule& h, double tol, const EvolveOptions& options)
      : h_(h), tol_(tol), options_(options) {}

  // Propagator over [t, t + dt], bisecting until the step-doubling estimate
  // meets the tolerance.
  Matrix advance(double t, double dt, int level) {
    if (!options_.estimate_error) return simpson_step(eval(t), eval(t + 0.5 * dt), eval(t + dt), dt);

    const Matrix h0 = eval(t);
    const Matrix h1 = eval(t + 0.25 * dt);
    const Matrix h2 = eval(t + 0.5 * dt);
    const Matrix h3 = eval(t + 0.75 * dt);
    const Matrix h4 = eval(t + dt);
    const Matrix full = simpson_step(h0, h2, h4, dt);
    const Matrix halves = simpson_step(h2, h3, h4, 0.5 * dt) * simpson_step(h0, h1, h2, 0.5 * dt);
    const double error = (halves - full).norm() / 15.0;
    if (error <= tol_) {
      achieved_ = std::max(achieved_, error);
      return halves;
    }
    if (h_.sample_spacing || level >= options_.max_refinement) {
      std::ostringstream msg;
      msg << "step-doubling error " << error << " exceeds tol " << tol_ << " on [" << t << ", "
          << t + dt << "]";
      if (h_.sample_spacing) msg << " and the schedule is only sampled on a fixed grid";
      raise(ErrorKind::ToleranceNotMet, msg.str());
    }
    const Matrix first = advance(t, 0.5 * dt, level + 1);
    const Matrix second = advance(t + 0.5 * dt, 0.5 * dt, level + 1);
    return second * first;
  }

  double achieved() const { return achieved_; }

 private:
  Matrix eval(double t) const { return h_.eval(t).matrix(); }

  static Matrix simpson_step(const Matrix& h0, const Matrix& hm, const Matrix& h1, double dt) {
    const Matrix b0 = (dt / 6.0) * (h0 + 4.0 * hm + h1);
    const Matrix c = (dt / 6.0) * (h1 - h0);
    return detail::cf4_step(b0, c);
  }

  const HamiltonianSchedule& h_;
  double tol_;
  EvolveOptions options_;
  double achieved_ = 0.0;
};

// Integrals of the Lagrange basis on nodes 0..m-1 over [a, a+1], plain and
// weighted by (x - a - 1/2). Three-point Gauss-Legendre is exact here.
struct IntervalWeights {
  std::array<double, 4> w{};
  std::array<double, 4> v{};
};

IntervalWeights interval_weights(int m, int a) {
  const double r = std::sqrt(0.6) / 2.0;
  const std::array<double, 3> offsets{-r, 0.0, r};
  const std::array<double, 3> gw{5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  IntervalWeights out;
  for (int q = 0; q < 3; ++q) {
    const double x = a + 0.5 + offsets[q];
    for (int j = 0; j < m; ++j) {
      double l = 1.0;
      for (int i = 0; i < m; ++i)
        if (i != j) l *= (x - i) / static_cast<double>(j - i);
      out.w[j] += gw[q] * l;
      out.v[j] += gw[q] * offsets[q] * l;
    }
  }
  return out;
}

}  // namespace

HamiltonianSchedule HamiltonianSchedule::constant(OperatorMatrix h, std::string label) {
  if (!h.is(Structure::hermitian)) h = OperatorMatrix::hermitian(h.matrix());
  HamiltonianSchedule s;
  s.dim = h.dim();
  s.eval = [h = std::move(h)](double) { return h; };
  s.label = std::move(label);
  s.is_constant = true;
  return s;
}

HamiltonianSchedule HamiltonianSchedule::zero(Index dim) {
  return constant(OperatorMatrix::zero(dim), "zero");
}

HamiltonianSchedule HamiltonianSchedule::scaled(OperatorMatrix a, std::function<double(double)> f,
                                                std::string label) {
  if (!a.is(Structure::hermitian)) a = OperatorMatrix::hermitian(a.matrix());
  HamiltonianSchedule s;
  s.dim = a.dim();
  s.eval = [a = std::move(a), f = std::move(f)](double t) {
    return OperatorMatrix(f(t) * a.matrix(), Structure::hermitian, trusted);
  };
  s.label = std::move(label);
  return s;
}

double periodicity_defect(const HamiltonianSchedule& h, std::span<const double> times) {
  if (!h.period) return 0.0;
  double worst = 0.0;
  for (double t : times) {
    const Matrix a = h(t).matrix();
    const Matrix b = h(t + *h.period).matrix();
    worst = std::max(worst, (b - a).norm() / std::max(a.norm(), kAbsoluteFloor));
  }
  return worst;
}

Index UnitaryPath::index_of(double t) const {
  const Index k = grid_index(grid, t);
  if (k < 0) {
    std::ostringstream msg;
    msg << "time " << t << " is not on the path grid";
    raise(ErrorKind::InvalidArgument, msg.str());
  }
  return k;
}

namespace detail {

Matrix cf4_step(const Matrix& b0, const Matrix& c) {
  const Matrix half = 0.5 * hermitian_part(b0);
  const Matrix ch = hermitian_part(c);
  const Matrix later = half + ch;
  const Matrix earlier = half - ch;
  const auto components = sparsity_components(later, earlier);
  if (components.size() == 1) return hermitian_exp(later, 1.0) * hermitian_exp(earlier, 1.0);
  const Index n = b0.rows();
  Matrix out = Matrix::Zero(n, n);
  for (const auto& idx : components) {
    if (idx.size() == 1) {
      const Index i = idx.front();
      out(i, i) = std::exp(-kI * (later(i, i).real() + earlier(i, i).real()));
      continue;
    }
    scatter(out, hermitian_exp(gather(later, idx), 1.0) * hermitian_exp(gather(earlier, idx), 1.0), idx);
  }
  return out;
}

Matrix reunitarize(const Matrix& u) {
  Matrix out = u;
  const Matrix eye = Matrix::Identity(u.rows(), u.cols());
  for (int it = 0; it < 8; ++it) {
    const Matrix g = out.adjoint() * out;
    if ((g - eye).norm() <= 1e-14) break;
    out = 0.5 * out * (3.0 * eye - g);
  }
  return out;
}

}  // namespace detail

UnitaryPath evolve(const HamiltonianSchedule& h, double t_max, Index steps, double tol,
                   const EvolveOptions& options) {
  if (!(t_max > 0.0)) raise(ErrorKind::InvalidArgument, "evolve needs t_max > 0");
  if (!(tol > 0.0)) raise(ErrorKind::InvalidArgument, "evolve needs tol > 0");
  if (steps < 1) raise(ErrorKind::InvalidArgument, "evolve needs at least one step");
  if (options.record_stride < 1 || steps % options.record_stride != 0)
    raise(ErrorKind::InvalidArgument, "record_stride must divide the step count");
  if (!h.eval) raise(ErrorKind::InvalidArgument, "schedule has no evaluator");

  const std::vector<double> full_grid = uniform_grid(t_max, steps);
  UnitaryPath path;
  path.grid.reserve(static_cast<std::size_t>(steps / options.record_stride) + 1);
  path.samples.reserve(path.grid.capacity());
  const Index dim = h.dim;

  if (h.is_constant) {
    const SpectralExponential exp_h(h(0.0));
    for (Index k = 0; k <= steps; k += options.record_stride) {
      const double t = full_grid[static_cast<std::size_t>(k)];
      path.grid.push_back(t);
      path.samples.push_back(exp_h(t));
    }
    return path;
  }

  Stepper stepper(h, tol, options);
  Matrix u = Matrix::Identity(dim, dim);
  path.grid.push_back(0.0);
  path.samples.push_back(OperatorMatrix::identity(dim));
  for (Index k = 0; k < steps; ++k) {
    const double t = full_grid[static_cast<std::size_t>(k)];
    const double dt = full_grid[static_cast<std::size_t>(k) + 1] - t;
    u = stepper.advance(t, dt, 0) * u;
    const double d = drift(u);
    path.max_unitarity_drift = std::max(path.max_unitarity_drift, d);
    if (d > kReunitarizeThreshold) u = detail::reunitarize(u);
    if ((k + 1) % options.record_stride == 0) {
      path.grid.push_back(full_grid[static_cast<std::size_t>(k) + 1]);
      path.samples.emplace_back(u, Structure::unitary, trusted);
    }
  }
  path.tol_achieved = stepper.achieved();
  return path;
}

UnitaryPath compose_geq(const UnitaryPath& u, const HamiltonianSchedule& y, const OperatorMatrix& i0,
                        double tol, const EvolveOptions& options) {
  if (u.samples.empty()) raise(ErrorKind::InvalidArgument, "empty unitary path");
  if (y.dim != u.dim() || i0.dim() != u.dim())
    raise(ErrorKind::DimensionMismatch, "compose_geq operands differ in dimension");

  for (std::size_t k = 0; k < u.grid.size(); ++k) {
    const OperatorMatrix yk = y(u.grid[k]);
    const double scale = std::max(yk.matrix().norm(), kAbsoluteFloor);
    const double c = comm_norm(yk, i0);
    if (c > 1e-8 * scale) {
      std::ostringstream msg;
      msg << "[Y, I0] = " << c << " at t = " << u.grid[k] << " exceeds 1e-8 ||Y||";
      raise(ErrorKind::SymmetryViolation, msg.str());
    }
    if (y.is_constant) break;
  }

  if (y.is_constant && y(0.0).matrix().isZero(0.0)) return u;

  UnitaryPath out;
  out.grid = u.grid;
  out.samples.reserve(u.samples.size());
  if (y.is_constant) {
    const SpectralExponential v(y(0.0));
    for (std::size_t k = 0; k < u.grid.size(); ++k)
      out.samples.emplace_back(u.samples[k].matrix() * v(u.grid[k]).matrix(), Structure::unitary,
                               trusted);
    out.tol_achieved = u.tol_achieved;
    out.max_unitarity_drift = u.max_unitarity_drift;
    return out;
  }

  if (u.grid.size() < 2) raise(ErrorKind::GridTooCoarse, "compose_geq needs at least two points");
  uniform_spacing(u.grid);
  const Index intervals = u.size() - 1;
  const Index sub = std::max<Index>(1, options.record_stride);
  EvolveOptions inner = options;
  inner.record_stride = sub;
  const UnitaryPath v = evolve(y, u.grid.back(), intervals * sub, tol, inner);
  for (std::size_t k = 0; k < u.grid.size(); ++k)
    out.samples.emplace_back(u.samples[k].matrix() * v.samples[k].matrix(), Structure::unitary,
                             trusted);
  out.tol_achieved = std::max(u.tol_achieved, v.tol_achieved);
  out.max_unitarity_drift = std::max(u.max_unitarity_drift, v.max_unitarity_drift);
  return out;
}

std::optional<Complex> loop_check(const UnitaryPath& u, double t, double tol) {
  const OperatorMatrix& s = u.at(t);
  const Complex trace = s.matrix().trace();
  if (std::abs(trace) == 0.0) return std::nullopt;
  const Complex c = trace / std::abs(trace);
  const Matrix diff = s.matrix() - c * Matrix::Identity(s.dim(), s.dim());
  if (diff.norm() <= tol * static_cast<double>(s.dim())) return c;
  return std::nullopt;
}

std::vector<Matrix> ordered_exponential_series(std::span<const Matrix> generator, double h) {
  const std::size_t n = generator.size();
  if (n == 0) raise(ErrorKind::GridTooCoarse, "empty generator series");
  const Index dim = generator.front().rows();
  std::vector<Matrix> out;
  out.reserve(n);
  out.push_back(Matrix::Identity(dim, dim));
  if (n == 1) return out;

  const int m = static_cast<int>(std::min<std::size_t>(n, 4));
  std::array<IntervalWeights, 3> weights;
  for (int a = 0; a < m - 1; ++a) weights[a] = interval_weights(m, a);

  for (std::size_t k = 0; k + 1 < n; ++k) {
    const std::size_t j0 = std::min<std::size_t>(k > 0 ? k - 1 : 0, n - m);
    const auto& wt = weights[k - j0];
    Matrix b0 = Matrix::Zero(dim, dim);
    Matrix b1 = Matrix::Zero(dim, dim);
    for (int j = 0; j < m; ++j) {
      b0 += (h * wt.w[j]) * generator[j0 + j];
      b1 += (h * wt.v[j]) * generator[j0 + j];
    }
    Matrix next = detail::cf4_step(b0, 2.0 * b1) * out.back();
    if (drift(next) > kReunitarizeThreshold) next = detail::reunitarize(next);
    out.push_back(std::move(next));
  }
  return out;
}

}  // namespace dynphase
