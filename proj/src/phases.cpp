#include "dynphase/phases.hpp"

#include "dynphase/errors.hpp"
#include "dynphase/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dynphase {

namespace {

Index period_index(const std::vector<double>& grid, double period) {
  const Index k = grid_index(grid, period);
  if (k < 0) {
    std::ostringstream msg;
    msg << "period " << period << " is not on the grid";
    raise(ErrorKind::InvalidArgument, msg.str());
  }
  return k;
}

}  // namespace

PhaseRecord project(const InvariantFrame& frame, const HamiltonianSchedule& h) {
  if (frame.grid.size() < 3) raise(ErrorKind::GridTooCoarse, "project needs at least 3 grid points");
  if (h.dim != frame.dim) raise(ErrorKind::DimensionMismatch, "project: frame and H differ in dimension");
  const double dt = uniform_spacing(frame.grid);
  const std::size_t n = frame.grid.size();

  PhaseRecord record;
  record.grid = frame.grid;
  record.levels.resize(frame.levels.size());
  for (std::size_t l = 0; l < frame.levels.size(); ++l) {
    auto& out = record.levels[l];
    out.eigenvalue = frame.levels[l].eigenvalue;
    out.degeneracy = frame.levels[l].degeneracy;
    out.E.reserve(n);
    out.A.reserve(n);
    out.Delta.reserve(n);
  }

  for (std::size_t k = 0; k < n; ++k) {
    const Matrix hk = h(frame.grid[k]).matrix();
    for (std::size_t l = 0; l < frame.levels.size(); ++l) {
      const Matrix& f = frame.levels[l].columns[k];
      record.levels[l].E.push_back(hermitian_part(f.adjoint() * hk * f));
    }
  }
  for (std::size_t l = 0; l < frame.levels.size(); ++l) {
    auto& out = record.levels[l];
    const auto& columns = frame.levels[l].columns;
    const std::vector<Matrix> derivative = differentiate(columns, dt);
    for (std::size_t k = 0; k < n; ++k) {
      const Matrix raw = kI * columns[k].adjoint() * derivative[k];
      const Matrix a = hermitian_part(raw);
      const double scale = std::max(a.norm(), 1.0);
      out.a_antihermitian_residual = std::max(out.a_antihermitian_residual, (raw - a).norm() / scale);
      out.A.push_back(a);
      out.Delta.push_back(out.E[k] - a);
    }
  }
  return record;
}

PhaseRecord& solve_un(PhaseRecord& record, double tol) {
  if (record.grid.size() < 2) raise(ErrorKind::GridTooCoarse, "solve_un needs at least 2 grid points");
  const double dt = uniform_spacing(record.grid);
  for (auto& level : record.levels) {
    if (level.Delta.size() != record.grid.size())
      raise(ErrorKind::IncompleteRecord, "Delta series missing or misaligned");
    level.u = ordered_exponential_series(level.Delta, dt);
    level.u_error_estimate = 0.0;
    if (level.Delta.size() >= 5) {
      std::vector<Matrix> coarse_delta;
      for (std::size_t k = 0; k < level.Delta.size(); k += 2) coarse_delta.push_back(level.Delta[k]);
      const std::vector<Matrix> coarse = ordered_exponential_series(coarse_delta, 2.0 * dt);
      for (std::size_t j = 0; j < coarse.size(); ++j)
        level.u_error_estimate =
            std::max(level.u_error_estimate, (level.u[2 * j] - coarse[j]).norm() / 15.0);
    }
    if (level.u_error_estimate > tol) {
      std::ostringstream msg;
      msg << "u^n error estimate " << level.u_error_estimate << " exceeds " << tol
          << " for lambda = " << level.eigenvalue;
      raise(ErrorKind::ToleranceNotMet, msg.str());
    }
  }
  return record;
}

PhaseRecord& abelian_phases(PhaseRecord& record, std::size_t index) {
  if (index >= record.levels.size()) raise(ErrorKind::InvalidArgument, "level index out of range");
  auto& level = record.levels[index];
  if (level.degeneracy != 1) {
    std::ostringstream msg;
    msg << "lambda = " << level.eigenvalue << " has degeneracy " << level.degeneracy;
    raise(ErrorKind::DegenerateEigenvalue, msg.str());
  }
  if (level.E.size() != record.grid.size() || level.A.size() != record.grid.size())
    raise(ErrorKind::IncompleteRecord, "E or A series missing");
  const double dt = uniform_spacing(record.grid);
  std::vector<double> e(level.E.size());
  std::vector<double> a(level.A.size());
  for (std::size_t k = 0; k < e.size(); ++k) {
    e[k] = level.E[k](0, 0).real();
    a[k] = level.A[k](0, 0).real();
  }
  level.delta = cumulative_integral(e, dt);
  for (double& v : level.delta) v = -v;
  level.gamma = cumulative_integral(a, dt);
  return record;
}

PhaseRecord& abelian_phases(PhaseRecord& record) {
  for (std::size_t l = 0; l < record.levels.size(); ++l)
    if (record.levels[l].degeneracy == 1) abelian_phases(record, l);
  return record;
}

PhaseRecord& nonabelian_holonomy(PhaseRecord& record, double period) {
  const Index kt = period_index(record.grid, period);
  const double dt = uniform_spacing(record.grid);
  for (auto& level : record.levels) {
    if (level.A.size() != record.grid.size()) raise(ErrorKind::IncompleteRecord, "A series missing");
    std::vector<Matrix> generator;
    generator.reserve(static_cast<std::size_t>(kt) + 1);
    for (Index k = 0; k <= kt; ++k) generator.push_back(-level.A[static_cast<std::size_t>(k)]);
    Matrix gamma = ordered_exponential_series(generator, dt).back();
    const double defect = unitarity_defect(gamma);
    if (defect > 1e-8) {
      std::ostringstream msg;
      msg << "holonomy unitarity defect " << defect;
      raise(ErrorKind::ToleranceNotMet, msg.str());
    }
    level.Gamma_T = std::move(gamma);
  }
  return record;
}

UnitaryPath reconstruct_U(const InvariantFrame& frame, const PhaseRecord& record, bool allow_partial) {
  if (!allow_partial && !frame.complete())
    raise(ErrorKind::IncompleteRecord, "reconstruction needs every eigenvalue of the invariant");
  if (record.levels.size() != frame.levels.size())
    raise(ErrorKind::IncompleteRecord, "record and frame track different levels");
  for (const auto& level : record.levels)
    if (level.u.size() != frame.grid.size()) raise(ErrorKind::IncompleteRecord, "u^n series missing");

  UnitaryPath path;
  path.grid = frame.grid;
  path.samples.reserve(frame.grid.size());
  for (std::size_t k = 0; k < frame.grid.size(); ++k) {
    Matrix u = Matrix::Zero(frame.dim, frame.dim);
    for (std::size_t l = 0; l < frame.levels.size(); ++l)
      u += frame.levels[l].columns[k] * record.levels[l].u[k] * frame.levels[l].columns.front().adjoint();
    path.samples.emplace_back(std::move(u), Structure::none);
  }
  return path;
}

std::vector<PhaseDecomposition> total_phase_decompose(const UnitaryPath& u, const InvariantFrame& frame,
                                                      const PhaseRecord& record, double period) {
  if (u.dim() != frame.dim) raise(ErrorKind::DimensionMismatch, "U and frame differ in dimension");
  const Matrix& ut = u.at(period).matrix();
  const Index kt = period_index(record.grid, period);
  std::vector<PhaseDecomposition> out;
  for (std::size_t l = 0; l < frame.levels.size(); ++l) {
    const Matrix& f0 = frame.levels[l].columns.front();
    const Matrix block = f0.adjoint() * ut * f0;
    const Index d = frame.levels[l].degeneracy;
    std::ostringstream where;
    where << " for lambda = " << frame.levels[l].eigenvalue;
    if (d == 1) {
      const double modulus = std::abs(block(0, 0));
      if (modulus < 1.0 - 1e-6)
        raise(ErrorKind::NotCyclic, "return amplitude " + std::to_string(modulus) + where.str());
      PhaseDecomposition p;
      p.level = l;
      p.modulus = modulus;
      p.total = std::arg(block(0, 0));
      const auto& level = record.levels[l];
      if (!level.delta.empty()) {
        p.dynamical = level.delta[static_cast<std::size_t>(kt)];
        p.geometric = wrap_angle(p.total - *p.dynamical);
      }
      if (!level.gamma.empty()) p.geometric_integral = level.gamma[static_cast<std::size_t>(kt)];
      out.push_back(p);
    } else {
      const double defect = unitarity_defect(block);
      if (defect > 1e-6)
        raise(ErrorKind::NotCyclic, "eigenspace does not return to itself (defect " + std::to_string(defect) +
                                        ")" + where.str());
      for (Index a = 0; a < d; ++a) {
        PhaseDecomposition p;
        p.level = l;
        p.a = a;
        p.modulus = std::abs(block(a, a));
        p.total = std::arg(block(a, a));
        out.push_back(p);
      }
    }
  }
  return out;
}

}  // namespace dynphase
