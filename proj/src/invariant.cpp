#include "dynphase/invariant.hpp"

#include "dynphase/errors.hpp"
#include "dynphase/grid.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dynphase {

namespace {

// Unitary polar factor of a small square matrix.
Matrix polar_unitary(const Matrix& s) {
  if (s.rows() == 1) {
    const double r = std::abs(s(0, 0));
    return Matrix::Constant(1, 1, r > 0.0 ? s(0, 0) / r : Complex{1.0, 0.0});
  }
  Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

// G^{-s} for a unitary G, via its Schur form (diagonal for normal matrices).
Matrix unitary_power(const Matrix& g, double s) {
  if (g.rows() == 1) return Matrix::Constant(1, 1, std::exp(Complex{0.0, s * std::arg(g(0, 0))}));
  Eigen::ComplexSchur<Matrix> schur(g);
  const Matrix& z = schur.matrixU();
  const Matrix& t = schur.matrixT();
  Matrix scaled = z;
  for (Index j = 0; j < t.rows(); ++j) scaled.col(j) *= std::exp(Complex{0.0, s * std::arg(t(j, j))});
  return scaled * z.adjoint();
}

struct Cluster {
  Index begin;
  Index size;
  double eigenvalue;
};

std::vector<Cluster> clusters_of(const Eigensystem& es, double threshold) {
  std::vector<Cluster> out;
  for (const auto& [b, e] : degenerate_clusters(es.eigenvalues, threshold))
    out.push_back({b, e - b, es.eigenvalues.segment(b, e - b).mean()});
  return out;
}

void check_grid(const std::vector<double>& grid, std::size_t samples) {
  if (grid.size() != samples) raise(ErrorKind::DimensionMismatch, "grid and samples differ in length");
}

}  // namespace

InvariantPath sample_invariant(const std::function<OperatorMatrix(double)>& invariant,
                               const std::vector<double>& grid) {
  InvariantPath path;
  path.grid = grid;
  path.source = InvariantSource::analytic;
  path.samples.reserve(grid.size());
  for (double t : grid) {
    OperatorMatrix s = invariant(t);
    if (!s.is(Structure::hermitian)) s = OperatorMatrix::hermitian(s.matrix());
    path.samples.push_back(std::move(s));
  }
  return path;
}

InvariantPath transport(const UnitaryPath& u, const OperatorMatrix& i0) {
  if (u.dim() != i0.dim()) raise(ErrorKind::DimensionMismatch, "transport: U and I0 differ in dimension");
  InvariantPath path;
  path.grid = u.grid;
  path.source = InvariantSource::transported;
  path.samples.reserve(u.samples.size());
  for (const auto& s : u.samples) {
    Matrix m = s.matrix() * i0.matrix() * s.matrix().adjoint();
    path.samples.emplace_back(hermitian_part(m), Structure::hermitian, trusted);
  }
  return path;
}

std::vector<double> lvn_residual(const InvariantPath& inv, const HamiltonianSchedule& h,
                                 std::optional<Index> block) {
  if (inv.samples.size() < 3) raise(ErrorKind::GridTooCoarse, "lvn_residual needs at least 3 grid points");
  check_grid(inv.grid, inv.samples.size());
  if (h.dim != inv.dim()) raise(ErrorKind::DimensionMismatch, "lvn_residual: I and H differ in dimension");
  const double dt = uniform_spacing(inv.grid);
  std::vector<Matrix> values;
  values.reserve(inv.samples.size());
  for (const auto& s : inv.samples) values.push_back(s.matrix());
  const std::vector<Matrix> derivative = differentiate(values, dt);
  std::vector<double> out(values.size());
  const Index b = block.value_or(inv.dim());
  for (std::size_t k = 0; k < values.size(); ++k) {
    const Matrix hk = h(inv.grid[k]).matrix();
    const Matrix r = derivative[k] - kI * (values[k] * hk - hk * values[k]);
    out[k] = block_norm(r, b);
  }
  return out;
}

double spectrum_drift(const InvariantPath& inv, Index levels) {
  if (inv.samples.empty()) return 0.0;
  const RealVector ref = eigh(inv.samples.front()).eigenvalues;
  const Index count = levels < 0 ? ref.size() : std::min(levels, ref.size());
  double worst = 0.0;
  for (const auto& s : inv.samples) {
    const RealVector ev = eigh(s).eigenvalues;
    for (Index n = 0; n < count; ++n)
      worst = std::max(worst, std::abs(ev(n) - ref(n)) / (1.0 + std::abs(ref(n))));
  }
  return worst;
}

Index InvariantFrame::tracked_dim() const {
  Index d = 0;
  for (const auto& level : levels) d += level.degeneracy;
  return d;
}

Matrix InvariantFrame::columns_at(std::size_t k) const {
  Matrix c(dim, tracked_dim());
  Index col = 0;
  for (const auto& level : levels) {
    c.middleCols(col, level.degeneracy) = level.columns[k];
    col += level.degeneracy;
  }
  return c;
}

Matrix InvariantFrame::unitary_at(std::size_t k) const {
  if (!complete()) raise(ErrorKind::IncompleteRecord, "frame operator needs every eigenvalue tracked");
  return columns_at(k) * columns_at(0).adjoint();
}

InvariantFrame eigenframe(const InvariantPath& inv, const EigenframeOptions& options) {
  if (inv.samples.empty()) raise(ErrorKind::GridTooCoarse, "eigenframe needs at least one grid point");
  check_grid(inv.grid, inv.samples.size());

  InvariantFrame frame;
  frame.grid = inv.grid;
  frame.dim = inv.dim();

  const OperatorMatrix& first = inv.samples.front();
  const double threshold = degeneracy_threshold(first.matrix().norm());
  const Eigensystem es0 = eigh(first);
  const std::vector<Cluster> clusters0 = clusters_of(es0, threshold);
  const std::size_t tracked = options.max_levels < 0
                                  ? clusters0.size()
                                  : std::min<std::size_t>(clusters0.size(), options.max_levels);
  frame.levels.resize(tracked);
  for (std::size_t l = 0; l < tracked; ++l) {
    auto& level = frame.levels[l];
    level.eigenvalue = clusters0[l].eigenvalue;
    level.degeneracy = clusters0[l].size;
    level.columns.reserve(inv.samples.size());
    level.columns.push_back(es0.frame.matrix().middleCols(clusters0[l].begin, clusters0[l].size));
  }

  for (std::size_t k = 1; k < inv.samples.size(); ++k) {
    const Eigensystem es = eigh(inv.samples[k]);
    const std::vector<Cluster> clusters = clusters_of(es, threshold);
    std::vector<bool> used(clusters.size(), false);
    const Matrix prev = frame.columns_at(k - 1);
    const Matrix overlaps = prev.adjoint() * es.frame.matrix();
    Index row = 0;
    for (auto& level : frame.levels) {
      const Index d = level.degeneracy;
      std::size_t best = clusters.size();
      double best_score = -1.0;
      for (std::size_t c = 0; c < clusters.size(); ++c) {
        const double score =
            overlaps.block(row, clusters[c].begin, d, clusters[c].size).squaredNorm() / static_cast<double>(d);
        if (score > best_score) {
          best_score = score;
          best = c;
        }
      }
      std::ostringstream where;
      where << " for lambda = " << level.eigenvalue << " at t = " << inv.grid[k];
      if (best_score < options.min_overlap)
        raise(ErrorKind::OverlapTooSmall, "best overlap " + std::to_string(best_score) + where.str());
      const Cluster& match = clusters[best];
      if (used[best] || match.size != d)
        raise(ErrorKind::DegeneracyCrossing, "degeneracy structure changed" + where.str());
      used[best] = true;
      if (std::abs(match.eigenvalue - level.eigenvalue) > options.spectrum_tol * (1.0 + std::abs(level.eigenvalue)))
        raise(ErrorKind::SpectrumDrift, "eigenvalue moved to " + std::to_string(match.eigenvalue) + where.str());

      const Matrix q = es.frame.matrix().middleCols(match.begin, d);
      const Matrix s = q.adjoint() * level.columns.back();
      level.columns.push_back(q * polar_unitary(s));
      row += d;
    }
  }

  if (options.enforce_periodic && inv.samples.size() > 1) {
    const Matrix& a = inv.samples.front().matrix();
    const Matrix& b = inv.samples.back().matrix();
    if ((b - a).norm() <= 1e-6 * std::max(a.norm(), kAbsoluteFloor)) {
      const double steps = static_cast<double>(inv.samples.size() - 1);
      for (auto& level : frame.levels) {
        const Matrix g = polar_unitary(level.columns.front().adjoint() * level.columns.back());
        for (std::size_t k = 1; k < level.columns.size(); ++k)
          level.columns[k] = level.columns[k] * unitary_power(g, -static_cast<double>(k) / steps);
        level.columns.back() = level.columns.front();
      }
      frame.periodic = true;
    }
  }
  return frame;
}

InvariantFrame frame_from_unitary(const std::vector<double>& grid, const std::function<Matrix(double)>& w,
                                  const OperatorMatrix& i0, Index max_levels) {
  const Eigensystem es = eigh(i0);
  const std::vector<Cluster> clusters = clusters_of(es, degeneracy_threshold(i0.matrix().norm()));
  const std::size_t tracked =
      max_levels < 0 ? clusters.size() : std::min<std::size_t>(clusters.size(), max_levels);
  InvariantFrame frame;
  frame.grid = grid;
  frame.dim = i0.dim();
  frame.levels.resize(tracked);
  for (std::size_t l = 0; l < tracked; ++l) {
    frame.levels[l].eigenvalue = clusters[l].eigenvalue;
    frame.levels[l].degeneracy = clusters[l].size;
    frame.levels[l].columns.reserve(grid.size());
  }
  for (double t : grid) {
    const Matrix wt = w(t);
    for (std::size_t l = 0; l < tracked; ++l)
      frame.levels[l].columns.push_back(wt * es.frame.matrix().middleCols(clusters[l].begin, clusters[l].size));
  }
  if (grid.size() > 1) {
    double gap = 0.0;
    for (const auto& level : frame.levels) gap = std::max(gap, (level.columns.back() - level.columns.front()).norm());
    frame.periodic = gap <= 1e-8;
  }
  return frame;
}

double frame_reconstruction_error(const InvariantFrame& frame, const InvariantPath& inv,
                                  std::optional<Index> block) {
  if (!frame.complete()) raise(ErrorKind::IncompleteRecord, "reconstruction needs every eigenvalue tracked");
  check_grid(inv.grid, inv.samples.size());
  if (inv.grid.size() != frame.grid.size()) raise(ErrorKind::DimensionMismatch, "frame and invariant grids differ");
  const Index b = block.value_or(frame.dim);
  double worst = 0.0;
  for (std::size_t k = 0; k < inv.samples.size(); ++k) {
    Matrix sum = Matrix::Zero(frame.dim, frame.dim);
    for (const auto& level : frame.levels)
      sum += level.eigenvalue * level.columns[k] * level.columns[k].adjoint();
    worst = std::max(worst, block_norm(sum - inv.samples[k].matrix(), b));
  }
  return worst;
}

SymmetryReport symmetry_check(const InvariantPath& inv, const HamiltonianSchedule& x, double tol,
                              std::optional<Index> block) {
  if (x.dim != inv.dim()) raise(ErrorKind::DimensionMismatch, "symmetry_check: I and X differ in dimension");
  SymmetryReport report;
  const Index b = block.value_or(inv.dim());
  for (std::size_t k = 0; k < inv.samples.size(); ++k) {
    const OperatorMatrix xk = x(inv.grid[k]);
    const double scale = std::max(block_norm(xk.matrix(), b), kAbsoluteFloor);
    const double rel = comm_norm(inv.samples[k], xk, b) / scale;
    if (rel > report.max_relative) {
      report.max_relative = rel;
      report.worst_time = inv.grid[k];
    }
  }
  report.passed = report.max_relative <= tol;
  return report;
}

HamiltonianSchedule build_geq(const HamiltonianSchedule& h, const HamiltonianSchedule& x,
                              const InvariantPath& inv, double tol, std::optional<Index> block) {
  if (h.dim != x.dim) raise(ErrorKind::DimensionMismatch, "build_geq: H and X differ in dimension");
  const SymmetryReport report = symmetry_check(inv, x, tol, block);
  if (!report.passed) {
    std::ostringstream msg;
    msg << "[I, X] relative norm " << report.max_relative << " at t = " << report.worst_time;
    raise(ErrorKind::SymmetryViolation, msg.str());
  }
  if (x.is_constant && x(0.0).matrix().isZero(0.0)) return h;
  HamiltonianSchedule out;
  out.dim = h.dim;
  out.eval = [h, x](double t) {
    return OperatorMatrix(h(t).matrix() + x(t).matrix(), Structure::hermitian, trusted);
  };
  if (h.period && x.period && std::abs(*h.period - *x.period) <= 1e-12 * *h.period) out.period = h.period;
  if (h.is_constant && x.is_constant) out.is_constant = true;
  out.label = h.label + "+" + x.label;
  if (h.sample_spacing) out.sample_spacing = h.sample_spacing;
  if (x.sample_spacing) out.sample_spacing = x.sample_spacing;
  return out;
}

namespace {

HamiltonianSchedule sampled_schedule(std::vector<double> grid, std::vector<OperatorMatrix> samples,
                                     std::string label) {
  HamiltonianSchedule s;
  s.dim = samples.front().dim();
  s.label = std::move(label);
  s.sample_spacing = uniform_spacing(grid);
  s.eval = [grid = std::move(grid), samples = std::move(samples)](double t) {
    const Index k = grid_index(grid, t);
    if (k < 0) {
      std::ostringstream msg;
      msg << "sampled schedule evaluated off its grid at t = " << t;
      raise(ErrorKind::InvalidArgument, msg.str());
    }
    return samples[static_cast<std::size_t>(k)];
  };
  return s;
}

}  // namespace

FrameHamiltonian hstar(const InvariantFrame& frame) {
  if (frame.grid.size() < 3) raise(ErrorKind::GridTooCoarse, "hstar needs at least 3 grid points");
  const double dt = uniform_spacing(frame.grid);
  std::vector<Matrix> w;
  w.reserve(frame.grid.size());
  for (std::size_t k = 0; k < frame.grid.size(); ++k) w.push_back(frame.unitary_at(k));
  const std::vector<Matrix> wdot = differentiate(w, dt);

  FrameHamiltonian out;
  std::vector<OperatorMatrix> samples;
  samples.reserve(w.size());
  // Rounding in the stencil alone produces |dW/dt| of order eps / dt; below
  // that level the anti-Hermitian part carries no information.
  const double noise_floor =
      1e7 * std::numeric_limits<double>::epsilon() * static_cast<double>(frame.dim) / dt;
  for (std::size_t k = 0; k < w.size(); ++k) {
    const Matrix raw = kI * wdot[k] * w[k].adjoint();
    const Matrix herm = hermitian_part(raw);
    const double scale = std::max(herm.norm(), noise_floor);
    out.antihermitian_residual = std::max(out.antihermitian_residual, (raw - herm).norm() / scale);
    samples.emplace_back(herm, Structure::hermitian, trusted);
  }
  if (out.antihermitian_residual > 1e-6) {
    std::ostringstream msg;
    msg << "anti-Hermitian part of i dW/dt W^dagger is " << out.antihermitian_residual
        << " of its Hermitian part; refine the frame grid";
    raise(ErrorKind::GridTooCoarse, msg.str());
  }
  out.schedule = sampled_schedule(frame.grid, std::move(samples), "hstar");
  return out;
}

GaugeResult gauge_transform(const InvariantFrame& frame, const UnitaryPath& z, const OperatorMatrix& i0,
                            double tol) {
  if (z.grid.size() != frame.grid.size()) raise(ErrorKind::DimensionMismatch, "gauge path and frame grids differ");
  if (z.dim() != frame.dim || i0.dim() != frame.dim)
    raise(ErrorKind::DimensionMismatch, "gauge transform dimension mismatch");
  const double scale = std::max(i0.matrix().norm(), kAbsoluteFloor);
  for (std::size_t k = 0; k < z.samples.size(); ++k) {
    const double c = comm_norm(z.samples[k], i0);
    if (c > tol * scale) {
      std::ostringstream msg;
      msg << "[Z, I0] relative norm " << c / scale << " at t = " << z.grid[k];
      raise(ErrorKind::SymmetryViolation, msg.str());
    }
  }

  GaugeResult out;
  out.frame = frame;
  out.frame.periodic = false;
  for (auto& level : out.frame.levels) {
    const Matrix base = level.columns.front();
    for (std::size_t k = 0; k < level.columns.size(); ++k)
      level.columns[k] = level.columns[k] * (base.adjoint() * z.samples[k].matrix() * base);
  }
  if (frame.grid.size() > 1) {
    double gap = 0.0;
    for (const auto& level : out.frame.levels)
      gap = std::max(gap, (level.columns.back() - level.columns.front()).norm());
    out.frame.periodic = frame.periodic && gap <= 1e-8;
  }

  if (frame.complete()) {
    FrameHamiltonian base = hstar(frame);
    const double dt = uniform_spacing(frame.grid);
    std::vector<Matrix> zs;
    zs.reserve(z.samples.size());
    for (const auto& s : z.samples) zs.push_back(s.matrix());
    const std::vector<Matrix> zdot = differentiate(zs, dt);
    std::vector<OperatorMatrix> samples;
    samples.reserve(zs.size());
    for (std::size_t k = 0; k < zs.size(); ++k) {
      const Matrix w = frame.unitary_at(k);
      const Matrix extra = kI * w * zdot[k] * zs[k].adjoint() * w.adjoint();
      samples.emplace_back(hermitian_part(base.schedule(frame.grid[k]).matrix() + extra), Structure::hermitian,
                           trusted);
    }
    FrameHamiltonian primed;
    primed.antihermitian_residual = base.antihermitian_residual;
    primed.schedule = sampled_schedule(frame.grid, std::move(samples), "hstar'");
    out.hstar = std::move(primed);
  }
  return out;
}

}  // namespace dynphase
