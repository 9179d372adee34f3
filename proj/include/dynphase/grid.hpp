#pragma once

// Uniform time grids plus the fourth-order finite-difference and cumulative
// quadrature rules shared by the invariant, phase and oscillator modules.

#include "dynphase/errors.hpp"
#include "dynphase/linalg.hpp"

#include <span>
#include <vector>

namespace dynphase {

/// steps + 1 equally spaced points on [0, t_max].
std::vector<double> uniform_grid(double t_max, Index steps);

/// Spacing of a uniform grid; throws GridTooCoarse below two points and
/// InvalidArgument if the grid is not uniform.
double uniform_spacing(std::span<const double> grid);

/// Index of t on the grid (within 1e-9 of a spacing), or -1.
Index grid_index(std::span<const double> grid, double t);

namespace detail {

// Five-point stencils: centred in the interior, one-sided at the two points
// next to each end. Needs at least five samples; three or four samples fall
// back to second-order differences.
template <class T>
std::vector<T> differentiate_impl(std::span<const T> f, double h) {
  const std::size_t n = f.size();
  if (n < 3) raise(ErrorKind::GridTooCoarse, "differentiation needs at least 3 grid points");
  std::vector<T> d(n);
  if (n < 5) {
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (std::size_t k = 1; k + 1 < n; ++k) d[k] = (f[k + 1] - f[k - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
  }
  const double s = 1.0 / (12.0 * h);
  d[0] = s * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
  d[1] = s * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
  for (std::size_t k = 2; k + 2 < n; ++k)
    d[k] = s * (f[k - 2] - 8.0 * f[k - 1] + 8.0 * f[k + 1] - f[k + 2]);
  d[n - 2] = s * (3.0 * f[n - 1] + 10.0 * f[n - 2] - 18.0 * f[n - 3] + 6.0 * f[n - 4] - f[n - 5]);
  d[n - 1] = s * (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] - 16.0 * f[n - 4] +
                  3.0 * f[n - 5]);
  return d;
}

}  // namespace detail

std::vector<Matrix> differentiate(std::span<const Matrix> f, double h);
std::vector<double> differentiate(std::span<const double> f, double h);

/// Fourth-order second derivative (six-point one-sided rules at the ends);
/// needs at least six samples.
std::vector<double> second_derivative(std::span<const double> f, double h);

/// Running integral F_k = int_0^{t_k} f on a uniform grid: Simpson on even
/// points, a three-point partial-panel rule on odd points.
std::vector<double> cumulative_integral(std::span<const double> f, double h);

/// Maps an angle to (-pi, pi].
double wrap_angle(double angle);

/// Removes 2 pi jumps from a sampled phase so consecutive values differ by
/// less than pi.
std::vector<double> unwrap(std::span<const double> angles);

}  // namespace dynphase
