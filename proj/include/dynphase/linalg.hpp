#pragma once

// Dense complex linear algebra used throughout the library: a structured
// operator type, Hermitian eigendecomposition with reproducible frames,
// unitary exponentials of Hermitian generators and commutator norms.
//
// Conventions: hbar = 1, and exp(-i s A) is the propagator generated by A
// over a duration s.

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <utility>
#include <vector>

namespace dynphase {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr Complex kI{0.0, 1.0};

enum class Structure : unsigned {
  none = 0u,
  hermitian = 1u << 0,
  unitary = 1u << 1,
  diagonal = 1u << 2,
};

constexpr Structure operator|(Structure a, Structure b) {
  return static_cast<Structure>(static_cast<unsigned>(a) | static_cast<unsigned>(b));
}

constexpr bool has(Structure set, Structure flag) {
  return (static_cast<unsigned>(set) & static_cast<unsigned>(flag)) != 0u;
}

// Tag for constructors whose structure flags hold by construction.
struct Trusted {};
inline constexpr Trusted trusted{};

// Tolerances for the structure flags.
inline constexpr double kHermitianRelTol = 1e-12;
inline constexpr double kUnitaryTolPerDim = 1e-10;
inline constexpr double kAbsoluteFloor = 1e-14;

/// Square complex matrix with validated structure flags. Immutable once built.
class OperatorMatrix {
 public:
  OperatorMatrix() = default;

  /// Validates every requested flag; throws NonHermitianInput / NonUnitaryInput
  /// / InvalidArgument on violation.
  explicit OperatorMatrix(Matrix entries, Structure structure = Structure::none);

  /// Skips validation. Only for results whose structure is guaranteed by the
  /// algorithm that produced them.
  OperatorMatrix(Matrix entries, Structure structure, Trusted) noexcept
      : entries_(std::move(entries)), structure_(structure) {}

  static OperatorMatrix hermitian(Matrix entries);
  static OperatorMatrix unitary(Matrix entries);
  static OperatorMatrix diagonal(const RealVector& values);
  static OperatorMatrix identity(Index dim);
  static OperatorMatrix zero(Index dim);

  Index dim() const noexcept { return entries_.rows(); }
  const Matrix& matrix() const noexcept { return entries_; }
  Structure structure() const noexcept { return structure_; }
  bool is(Structure flag) const noexcept { return has(structure_, flag); }
  Complex operator()(Index i, Index j) const { return entries_(i, j); }

  OperatorMatrix adjoint() const;

 private:
  Matrix entries_;
  Structure structure_ = Structure::none;
};

/// max |A - A^dagger| relative to max |A| (floored).
double hermiticity_defect(const Matrix& a);
/// ||A A^dagger - 1||_F.
double unitarity_defect(const Matrix& a);
Matrix hermitian_part(const Matrix& a);
/// Unitary polar factor of a (nearest unitary in Frobenius norm).
Matrix nearest_unitary(const Matrix& a);
/// Frobenius norm of the leading block x block sub-matrix.
double block_norm(const Matrix& a, Index block);

struct Eigensystem {
  RealVector eigenvalues;  // ascending
  OperatorMatrix frame;    // columns are the eigenvectors
};

/// Gap below which two eigenvalues are treated as one degenerate level.
double degeneracy_threshold(double operator_norm);

/// Groups ascending eigenvalues into degenerate clusters [begin, end).
std::vector<std::pair<Index, Index>> degenerate_clusters(const RealVector& ascending,
                                                         double threshold);

/// Hermitian eigendecomposition. Frames are canonicalized: nondegenerate
/// eigenvectors have their largest component real positive, degenerate
/// clusters are re-spanned by Gram-Schmidt on the projected canonical basis
/// in index order.
Eigensystem eigh(const OperatorMatrix& a);

/// exp(-i s A) for Hermitian A.
OperatorMatrix expm_igen(const OperatorMatrix& a, double s);

/// Caches the spectral decomposition of a Hermitian generator so that
/// exp(-i s A) can be evaluated for many s at the cost of one product each.
class SpectralExponential {
 public:
  explicit SpectralExponential(const OperatorMatrix& generator);

  OperatorMatrix operator()(double s) const;
  Index dim() const noexcept { return frame_.rows(); }
  const RealVector& eigenvalues() const noexcept { return eigenvalues_; }
  const Matrix& frame() const noexcept { return frame_; }

 private:
  RealVector eigenvalues_;
  Matrix frame_;
  // Diagonal generators are exponentiated entrywise.
  bool diagonal_ = false;
  RealVector diagonal_entries_;
};

/// ||AB - BA||_F, optionally restricted to the leading block.
double comm_norm(const OperatorMatrix& a, const OperatorMatrix& b);
double comm_norm(const OperatorMatrix& a, const OperatorMatrix& b, Index block);

namespace detail {
// Raw exp(-i s H) of a Hermitian matrix without flag bookkeeping; used by the
// integrators in their inner loops.
Matrix hermitian_exp(const Matrix& h, double s);
// Connected components of the nonzero pattern of a (or of a and b together),
// each listed in increasing index order.
std::vector<std::vector<Index>> sparsity_components(const Matrix& a);
std::vector<std::vector<Index>> sparsity_components(const Matrix& a, const Matrix& b);
Matrix gather(const Matrix& a, const std::vector<Index>& idx);
void scatter(Matrix& out, const Matrix& block, const std::vector<Index>& idx);
}  // namespace detail

}  // namespace dynphase
