#include "dynphase/grid.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dynphase {

std::vector<double> uniform_grid(double t_max, Index steps) {
  if (!(t_max > 0.0)) raise(ErrorKind::InvalidArgument, "grid length must be positive");
  if (steps < 1) raise(ErrorKind::InvalidArgument, "grid needs at least one step");
  std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
  for (Index k = 0; k <= steps; ++k)
    grid[static_cast<std::size_t>(k)] = t_max * static_cast<double>(k) / static_cast<double>(steps);
  grid.back() = t_max;
  return grid;
}

double uniform_spacing(std::span<const double> grid) {
  if (grid.size() < 2) raise(ErrorKind::GridTooCoarse, "a grid needs at least two points");
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  if (!(h > 0.0)) raise(ErrorKind::InvalidArgument, "grid must be strictly increasing");
  for (std::size_t k = 1; k < grid.size(); ++k) {
    if (std::abs(grid[k] - grid[k - 1] - h) > 1e-9 * h) {
      std::ostringstream msg;
      msg << "grid is not uniform at index " << k;
      raise(ErrorKind::InvalidArgument, msg.str());
    }
  }
  return h;
}

Index grid_index(std::span<const double> grid, double t) {
  if (grid.empty()) return -1;
  if (grid.size() == 1) return std::abs(t - grid[0]) <= 1e-12 ? 0 : -1;
  const double h = (grid.back() - grid.front()) / static_cast<double>(grid.size() - 1);
  const double pos = (t - grid.front()) / h;
  const double k = std::round(pos);
  if (k < 0.0 || k > static_cast<double>(grid.size() - 1)) return -1;
  const auto idx = static_cast<std::size_t>(k);
  if (std::abs(grid[idx] - t) > 1e-9 * h) return -1;
  return static_cast<Index>(idx);
}

std::vector<Matrix> differentiate(std::span<const Matrix> f, double h) {
  return detail::differentiate_impl(f, h);
}

std::vector<double> differentiate(std::span<const double> f, double h) {
  return detail::differentiate_impl(f, h);
}

std::vector<double> second_derivative(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  if (n < 6) raise(ErrorKind::GridTooCoarse, "second derivative needs at least 6 grid points");
  const double s = 1.0 / (12.0 * h * h);
  std::vector<double> d(n);
  d[0] = s * (45.0 * f[0] - 154.0 * f[1] + 214.0 * f[2] - 156.0 * f[3] + 61.0 * f[4] - 10.0 * f[5]);
  d[1] = s * (10.0 * f[0] - 15.0 * f[1] - 4.0 * f[2] + 14.0 * f[3] - 6.0 * f[4] + f[5]);
  for (std::size_t k = 2; k + 2 < n; ++k)
    d[k] = s * (-f[k - 2] + 16.0 * f[k - 1] - 30.0 * f[k] + 16.0 * f[k + 1] - f[k + 2]);
  d[n - 2] = s * (10.0 * f[n - 1] - 15.0 * f[n - 2] - 4.0 * f[n - 3] + 14.0 * f[n - 4] - 6.0 * f[n - 5] + f[n - 6]);
  d[n - 1] = s * (45.0 * f[n - 1] - 154.0 * f[n - 2] + 214.0 * f[n - 3] - 156.0 * f[n - 4] + 61.0 * f[n - 5] -
                  10.0 * f[n - 6]);
  return d;
}

std::vector<double> cumulative_integral(std::span<const double> f, double h) {
  const std::size_t n = f.size();
  std::vector<double> out(n, 0.0);
  if (n < 2) return out;
  if (n == 2) {
    out[1] = 0.5 * h * (f[0] + f[1]);
    return out;
  }
  for (std::size_t k = 2; k < n; k += 2) out[k] = out[k - 2] + h / 3.0 * (f[k - 2] + 4.0 * f[k - 1] + f[k]);
  for (std::size_t k = 1; k < n; k += 2) {
    if (k + 1 < n)
      out[k] = out[k - 1] + h / 12.0 * (5.0 * f[k - 1] + 8.0 * f[k] - f[k + 1]);
    else
      out[k] = out[k - 1] + h / 12.0 * (-f[k - 2] + 8.0 * f[k - 1] + 5.0 * f[k]);
  }
  return out;
}

double wrap_angle(double angle) {
  constexpr double pi = std::numbers::pi;
  double r = std::remainder(angle, 2.0 * pi);
  if (r <= -pi) r += 2.0 * pi;
  return r;
}

std::vector<double> unwrap(std::span<const double> angles) {
  std::vector<double> out(angles.begin(), angles.end());
  for (std::size_t k = 1; k < out.size(); ++k)
    out[k] = out[k - 1] + wrap_angle(angles[k] - angles[k - 1]);
  return out;
}

}  // namespace dynphase
