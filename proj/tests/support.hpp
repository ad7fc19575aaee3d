#pragma once

// Independent reference computations for the tests. Nothing here calls into
// the library's numerics, so agreement is a real cross-check.

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

namespace testing {

using cdouble = std::complex<double>;

inline std::mt19937_64& rng() {
  static std::mt19937_64 engine(20260415);
  return engine;
}

inline double uniform(double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng());
}

inline cdouble complex_normal() {
  std::normal_distribution<double> n(0.0, 1.0);
  return {n(rng()), n(rng())};
}

/// Random complex vector of length n scaled to unit Euclidean norm.
inline Eigen::VectorXcd random_unit_vector(Eigen::Index n) {
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = complex_normal();
  return v / v.norm();
}

/// Morse levels: -D + w0 (v + 1/2) - w0^2 / (4 D) (v + 1/2)^2, w0 = a sqrt(2D/mu).
inline double morse_level(double depth, double a, double mu, int v) {
  const double w0 = a * std::sqrt(2.0 * depth / mu);
  const double x = v + 0.5;
  return -depth + w0 * x - w0 * w0 / (4.0 * depth) * x * x;
}

/// Eigenvalues of a 2x2 Hermitian matrix from its characteristic polynomial.
inline std::pair<double, double> hermitian_2x2_eigenvalues(double a, double d, cdouble b) {
  const double tr = a + d;
  const double det = a * d - std::norm(b);
  const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));
  return {0.5 * (tr + disc), 0.5 * (tr - disc)};
}

/// exp(-i H t) for H = [[a, conj(b)], [b, d]] via the Pauli decomposition.
inline Eigen::Matrix2cd two_level_propagator(double a, double d, cdouble b, double t) {
  const double mean = 0.5 * (a + d);
  const double hz = 0.5 * (a - d);
  const double hx = b.real();
  const double hy = b.imag();
  const double w = std::sqrt(hx * hx + hy * hy + hz * hz);
  const cdouble i(0.0, 1.0);
  Eigen::Matrix2cd sigma_n;
  if (w > 0.0) {
    sigma_n << hz / w, (hx - i * hy) / w, (hx + i * hy) / w, -hz / w;
  } else {
    sigma_n.setZero();
  }
  const Eigen::Matrix2cd u = std::cos(w * t) * Eigen::Matrix2cd::Identity() -
                             i * std::sin(w * t) * sigma_n;
  return std::exp(-i * mean * t) * u;
}

/// Fourth-order central second difference at interior samples.
inline std::vector<cdouble> second_derivative_5pt(const std::vector<cdouble>& f, double h) {
  std::vector<cdouble> out(f.size(), 0.0);
  for (std::size_t k = 2; k + 2 < f.size(); ++k) {
    out[k] = (-f[k - 2] + 16.0 * f[k - 1] - 30.0 * f[k] + 16.0 * f[k + 1] - f[k + 2]) /
             (12.0 * h * h);
  }
  return out;
}

/// Sum over |rho_mn|^2 for the Gram matrix of the given columns with weight w.
inline double gram_purity(const std::vector<Eigen::VectorXcd>& psi, double w) {
  double p = 0.0;
  for (const auto& a : psi) {
    for (const auto& b : psi) p += std::norm(w * a.dot(b));
  }
  return p;
}

}  // namespace testing
