#include "dynphase/linalg.hpp"

#include "dynphase/errors.hpp"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dynphase {

namespace {

double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

// LAPACK divide-and-conquer solver on a dense Hermitian block.
void dense_eigh(Matrix& block, RealVector& values) {
  const Index n = block.rows();
  values.resize(n);
  const lapack_int info =
      LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'U', static_cast<lapack_int>(n),
                     reinterpret_cast<lapack_complex_double*>(block.data()),
                     static_cast<lapack_int>(n), values.data());
  if (info != 0) {
    std::ostringstream msg;
    msg << "zheevd returned info=" << info << " for a " << n << "x" << n << " block";
    raise(ErrorKind::ConvergenceFailure, msg.str());
  }
}

struct RawSpectrum {
  RealVector values;
  Matrix vectors;
};

// Eigenpairs sorted ascending; ties keep component order.
RawSpectrum raw_eigh(const Matrix& a) {
  const Index n = a.rows();
  const auto components = detail::sparsity_components(a);

  struct Pair {
    double value;
    Index component;
    Index local;
  };
  std::vector<Pair> pairs;
  pairs.reserve(static_cast<std::size_t>(n));
  std::vector<Matrix> blocks(components.size());
  for (std::size_t c = 0; c < components.size(); ++c) {
    const auto& idx = components[c];
    const Index m = static_cast<Index>(idx.size());
    if (m == 1) {
      blocks[c] = Matrix::Ones(1, 1);
      pairs.push_back({a(idx[0], idx[0]).real(), static_cast<Index>(c), 0});
      continue;
    }
    Matrix sub = detail::gather(a, idx);
    RealVector values;
    dense_eigh(sub, values);
    blocks[c] = std::move(sub);
    for (Index k = 0; k < m; ++k) pairs.push_back({values(k), static_cast<Index>(c), k});
  }
  std::stable_sort(pairs.begin(), pairs.end(),
                   [](const Pair& x, const Pair& y) { return x.value < y.value; });

  RawSpectrum out{RealVector(n), Matrix::Zero(n, n)};
  for (Index k = 0; k < n; ++k) {
    const auto& p = pairs[static_cast<std::size_t>(k)];
    out.values(k) = p.value;
    const auto& idx = components[static_cast<std::size_t>(p.component)];
    const Matrix& blk = blocks[static_cast<std::size_t>(p.component)];
    for (std::size_t i = 0; i < idx.size(); ++i)
      out.vectors(idx[i], k) = blk(static_cast<Index>(i), p.local);
  }
  return out;
}

void fix_phase(Eigen::Ref<Vector> v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  if (vmax == 0.0) return;
  Index pivot = 0;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= (1.0 - 1e-10) * vmax) {
      pivot = i;
      break;
    }
  }
  const Complex phase = std::conj(v(pivot)) / std::abs(v(pivot));
  v *= phase;
}

// Replaces the columns [begin, end) by an orthonormal basis of the same
// subspace built from the projected canonical basis vectors in index order.
void canonicalize_cluster(Matrix& vectors, Index begin, Index end) {
  const Index n = vectors.rows();
  const Index d = end - begin;
  const Matrix q = vectors.middleCols(begin, d);
  Matrix basis(n, d);
  Index found = 0;
  for (double accept : {1e-3, 1e-8}) {
    for (Index j = 0; j < n && found < d; ++j) {
      Vector r = q * q.row(j).adjoint();
      for (int pass = 0; pass < 2; ++pass)
        for (Index k = 0; k < found; ++k) r -= basis.col(k) * basis.col(k).dot(r);
      const double norm = r.norm();
      if (norm > accept) basis.col(found++) = r / norm;
    }
    if (found == d) break;
  }
  if (found < d) raise(ErrorKind::ConvergenceFailure, "could not span a degenerate eigenspace");
  vectors.middleCols(begin, d) = basis;
}

}  // namespace

OperatorMatrix::OperatorMatrix(Matrix entries, Structure structure)
    : entries_(std::move(entries)), structure_(structure) {
  if (entries_.rows() != entries_.cols())
    raise(ErrorKind::DimensionMismatch, "operator matrices must be square");
  if (has(structure_, Structure::hermitian)) {
    const double defect = hermiticity_defect(entries_);
    if (defect > kHermitianRelTol) {
      std::ostringstream msg;
      msg << "relative hermiticity defect " << defect << " exceeds " << kHermitianRelTol;
      raise(ErrorKind::NonHermitianInput, msg.str());
    }
  }
  if (has(structure_, Structure::unitary)) {
    const double defect = unitarity_defect(entries_);
    const double bound = kUnitaryTolPerDim * static_cast<double>(std::max<Index>(1, dim()));
    if (defect > bound) {
      std::ostringstream msg;
      msg << "unitarity defect " << defect << " exceeds " << bound;
      raise(ErrorKind::NonUnitaryInput, msg.str());
    }
  }
  if (has(structure_, Structure::diagonal)) {
    for (Index j = 0; j < entries_.cols(); ++j)
      for (Index i = 0; i < entries_.rows(); ++i)
        if (i != j && entries_(i, j) != Complex{0.0, 0.0})
          raise(ErrorKind::InvalidArgument, "diagonal flag with nonzero off-diagonal entry");
  }
}

OperatorMatrix OperatorMatrix::hermitian(Matrix entries) {
  return OperatorMatrix(std::move(entries), Structure::hermitian);
}

OperatorMatrix OperatorMatrix::unitary(Matrix entries) {
  return OperatorMatrix(std::move(entries), Structure::unitary);
}

OperatorMatrix OperatorMatrix::diagonal(const RealVector& values) {
  Matrix m = Matrix::Zero(values.size(), values.size());
  for (Index i = 0; i < values.size(); ++i) m(i, i) = values(i);
  return OperatorMatrix(std::move(m), Structure::hermitian | Structure::diagonal, trusted);
}

OperatorMatrix OperatorMatrix::identity(Index dim) {
  return OperatorMatrix(Matrix::Identity(dim, dim),
                        Structure::hermitian | Structure::unitary | Structure::diagonal, trusted);
}

OperatorMatrix OperatorMatrix::zero(Index dim) {
  return OperatorMatrix(Matrix::Zero(dim, dim), Structure::hermitian | Structure::diagonal,
                        trusted);
}

OperatorMatrix OperatorMatrix::adjoint() const {
  return OperatorMatrix(entries_.adjoint(), structure_, trusted);
}

double hermiticity_defect(const Matrix& a) {
  const double scale = std::max(max_abs(a), kAbsoluteFloor);
  return max_abs(a - a.adjoint()) / scale;
}

double unitarity_defect(const Matrix& a) {
  return (a * a.adjoint() - Matrix::Identity(a.rows(), a.cols())).norm();
}

Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

Matrix nearest_unitary(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

double block_norm(const Matrix& a, Index block) {
  const Index b = std::min({block, a.rows(), a.cols()});
  return a.topLeftCorner(b, b).norm();
}

double degeneracy_threshold(double operator_norm) {
  return std::max(1e-9 * operator_norm, kAbsoluteFloor);
}

std::vector<std::pair<Index, Index>> degenerate_clusters(const RealVector& ascending,
                                                         double threshold) {
  std::vector<std::pair<Index, Index>> clusters;
  Index begin = 0;
  for (Index k = 1; k <= ascending.size(); ++k) {
    if (k == ascending.size() || ascending(k) - ascending(k - 1) >= threshold) {
      clusters.emplace_back(begin, k);
      begin = k;
    }
  }
  return clusters;
}

Eigensystem eigh(const OperatorMatrix& a) {
  if (a.dim() < 1) raise(ErrorKind::InvalidArgument, "eigh needs dim >= 1");
  if (!a.is(Structure::hermitian)) {
    const double defect = hermiticity_defect(a.matrix());
    if (defect > kHermitianRelTol) {
      std::ostringstream msg;
      msg << "eigh input has relative hermiticity defect " << defect;
      raise(ErrorKind::NonHermitianInput, msg.str());
    }
  }
  RawSpectrum raw = raw_eigh(a.matrix());
  const double threshold = degeneracy_threshold(a.matrix().norm());
  for (const auto& [begin, end] : degenerate_clusters(raw.values, threshold)) {
    if (end - begin == 1)
      fix_phase(raw.vectors.col(begin));
    else
      canonicalize_cluster(raw.vectors, begin, end);
  }
  return {std::move(raw.values),
          OperatorMatrix(std::move(raw.vectors), Structure::unitary, trusted)};
}

namespace detail {

// Block-diagonal structure up to a permutation is exploited throughout:
// quadratic oscillator operators, for example, split into parity sectors,
// and diagonal inputs are handled exactly.
std::vector<std::vector<Index>> sparsity_components(const Matrix& a) { return sparsity_components(a, a); }

std::vector<std::vector<Index>> sparsity_components(const Matrix& a, const Matrix& b) {
  const Index n = a.rows();
  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) {
      parent[i] = parent[parent[i]];
      i = parent[i];
    }
    return i;
  };
  const Complex zero{0.0, 0.0};
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < j; ++i) {
      if (a(i, j) != zero || a(j, i) != zero || b(i, j) != zero || b(j, i) != zero) {
        const Index ri = find(i);
        const Index rj = find(j);
        if (ri != rj) parent[std::max(ri, rj)] = std::min(ri, rj);
      }
    }
  }
  std::vector<std::vector<Index>> components;
  std::vector<Index> slot(static_cast<std::size_t>(n), -1);
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<Index>(components.size());
      components.emplace_back();
    }
    components[slot[r]].push_back(i);
  }
  return components;
}

Matrix gather(const Matrix& a, const std::vector<Index>& idx) {
  const Index m = static_cast<Index>(idx.size());
  Matrix sub(m, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < m; ++i) sub(i, j) = a(idx[i], idx[j]);
  return sub;
}

void scatter(Matrix& out, const Matrix& block, const std::vector<Index>& idx) {
  const Index m = static_cast<Index>(idx.size());
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < m; ++i) out(idx[i], idx[j]) = block(i, j);
}

Matrix hermitian_exp(const Matrix& h, double s) {
  const Index n = h.rows();
  if (s == 0.0) return Matrix::Identity(n, n);
  Matrix out = Matrix::Zero(n, n);
  for (const auto& idx : sparsity_components(h)) {
    const Index m = static_cast<Index>(idx.size());
    if (m == 1) {
      out(idx[0], idx[0]) = std::exp(-kI * s * h(idx[0], idx[0]).real());
      continue;
    }
    Matrix sub = gather(h, idx);
    RealVector values;
    dense_eigh(sub, values);
    Matrix scaled = sub;
    for (Index k = 0; k < m; ++k) scaled.col(k) *= std::exp(-kI * s * values(k));
    scatter(out, scaled * sub.adjoint(), idx);
  }
  return out;
}

}  // namespace detail

OperatorMatrix expm_igen(const OperatorMatrix& a, double s) {
  if (!a.is(Structure::hermitian) && hermiticity_defect(a.matrix()) > kHermitianRelTol)
    raise(ErrorKind::NonHermitianInput, "expm_igen needs a Hermitian generator");
  return OperatorMatrix(detail::hermitian_exp(a.matrix(), s), Structure::unitary, trusted);
}

SpectralExponential::SpectralExponential(const OperatorMatrix& generator) {
  if (!generator.is(Structure::hermitian) &&
      hermiticity_defect(generator.matrix()) > kHermitianRelTol)
    raise(ErrorKind::NonHermitianInput, "spectral exponential needs a Hermitian generator");
  RawSpectrum raw = raw_eigh(generator.matrix());
  eigenvalues_ = std::move(raw.values);
  frame_ = std::move(raw.vectors);
  const Matrix& g = generator.matrix();
  diagonal_ = (g - Matrix(g.diagonal().asDiagonal())).isZero(0.0);
  if (diagonal_) diagonal_entries_ = g.diagonal().real();
}

OperatorMatrix SpectralExponential::operator()(double s) const {
  if (s == 0.0) return OperatorMatrix::identity(dim());
  if (diagonal_) {
    Matrix out = Matrix::Zero(dim(), dim());
    for (Index i = 0; i < dim(); ++i) out(i, i) = std::exp(-kI * s * diagonal_entries_(i));
    return OperatorMatrix(std::move(out), Structure::unitary | Structure::diagonal, trusted);
  }
  Matrix scaled = frame_;
  for (Index k = 0; k < scaled.cols(); ++k) scaled.col(k) *= std::exp(-kI * s * eigenvalues_(k));
  return OperatorMatrix(scaled * frame_.adjoint(), Structure::unitary, trusted);
}

double comm_norm(const OperatorMatrix& a, const OperatorMatrix& b) {
  if (a.dim() != b.dim()) raise(ErrorKind::DimensionMismatch, "comm_norm dimension mismatch");
  return (a.matrix() * b.matrix() - b.matrix() * a.matrix()).norm();
}

double comm_norm(const OperatorMatrix& a, const OperatorMatrix& b, Index block) {
  if (a.dim() != b.dim()) raise(ErrorKind::DimensionMismatch, "comm_norm dimension mismatch");
  return block_norm(a.matrix() * b.matrix() - b.matrix() * a.matrix(), block);
}

}  // namespace dynphase
