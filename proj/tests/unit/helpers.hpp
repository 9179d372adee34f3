#pragma once

// Independent oracles shared by the unit tests: seeded random operators, a
// Taylor-series exponential and a fixed-step RK4 integrator.

#include "dynphase/linalg.hpp"
#include "dynphase/oscillator.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace testing {

using dynphase::Complex;
using dynphase::Index;
using dynphase::Matrix;

inline Matrix random_matrix(Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix a(n, n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) a(i, j) = Complex(nd(rng), nd(rng));
  return a;
}

inline Matrix random_hermitian(Index n, std::mt19937_64& rng) {
  const Matrix a = random_matrix(n, rng);
  return 0.5 * (a + a.adjoint());
}

// exp(-i s A) by scaling and squaring of the Taylor series.
inline Matrix taylor_expm(const Matrix& a, double s) {
  const Matrix g = Complex(0.0, -s) * a;
  const double norm = g.cwiseAbs().rowwise().sum().maxCoeff();
  int squarings = 0;
  while (norm / std::pow(2.0, squarings) > 0.25) ++squarings;
  const Matrix x = g / std::pow(2.0, squarings);
  Matrix term = Matrix::Identity(a.rows(), a.cols());
  Matrix sum = term;
  for (int k = 1; k < 30; ++k) {
    term = term * x / static_cast<double>(k);
    sum += term;
  }
  for (int k = 0; k < squarings; ++k) sum = sum * sum;
  return sum;
}

// Classical RK4 for i dU/dt = H(t) U with U(0) = 1.
inline Matrix rk4_propagate(const std::function<Matrix(double)>& h, Index dim, double t_max, int steps) {
  const double dt = t_max / steps;
  const Complex mi(0.0, -1.0);
  Matrix u = Matrix::Identity(dim, dim);
  for (int k = 0; k < steps; ++k) {
    const double t = k * dt;
    const Matrix k1 = mi * h(t) * u;
    const Matrix k2 = mi * h(t + 0.5 * dt) * (u + 0.5 * dt * k1);
    const Matrix k3 = mi * h(t + 0.5 * dt) * (u + 0.5 * dt * k2);
    const Matrix k4 = mi * h(t + dt) * (u + dt * k3);
    u += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return u;
}

inline double leading_block_norm(const Matrix& a, Index block) {
  return a.topLeftCorner(block, block).norm();
}

inline dynphase::OscillatorParams reference_params() { return dynphase::derive_params(1.0, 3.0, 2.0, 1.0); }

}  // namespace testing
