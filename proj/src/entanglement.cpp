#include "vibronic/entanglement.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vibronic/errors.hpp"

namespace vibronic {

ReducedDensityMatrix reduced_density(const ChannelState& state) {
  const Eigen::MatrixXcd psi = state.packed();
  // rho_mn = dr * sum_k conj(psi_n(k)) psi_m(k)
  Eigen::MatrixXcd rho = state.grid().spacing() * (psi.transpose() * psi.conjugate());
  return {0.5 * (rho + rho.adjoint())};
}

std::vector<double> populations(const ChannelState& state) {
  std::vector<double> p;
  p.reserve(state.channel_count());
  for (const auto& psi : state.channels) p.push_back(psi.norm_squared());
  return p;
}

std::vector<double> partial_population(const ChannelState& state, double r_cut) {
  const SpatialGrid& grid = state.grid();
  if (!(r_cut > grid.r_min() && r_cut <= grid.r_max())) {
    throw std::out_of_range("partial_population: R_cut outside (r_min, r_max]");
  }
  std::size_t count = 0;
  while (count < grid.size() && grid.point(count) <= r_cut) ++count;
  std::vector<double> p;
  p.reserve(state.channel_count());
  for (const auto& psi : state.channels) {
    p.push_back(grid.spacing() *
                psi.amplitudes().head(static_cast<Eigen::Index>(count)).squaredNorm());
  }
  return p;
}

std::vector<double> schmidt_spectrum(const ReducedDensityMatrix& rho) {
  const Eigen::MatrixXcd& m = rho.matrix;
  if (m.rows() != m.cols() || m.rows() == 0) {
    throw std::invalid_argument("schmidt_spectrum: matrix must be square and non-empty");
  }
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("schmidt_spectrum: matrix is not Hermitian");
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
  std::vector<double> lambda(solver.eigenvalues().data(),
                             solver.eigenvalues().data() + solver.eigenvalues().size());
  std::sort(lambda.begin(), lambda.end(), std::greater<>());
  for (double& x : lambda) {
    if (x < -1e-8) {
      throw NumericalError("schmidt_spectrum: eigenvalue " + std::to_string(x) +
                           " is negative beyond roundoff");
    }
    if (x < 0.0 && x >= -1e-10) x = 0.0;
    if (x > 1.0 && x <= 1.0 + 1e-10) x = 1.0;
  }
  return lambda;
}

double shannon_entropy_bits(std::span<const double> probabilities) {
  double s = 0.0;
  for (double p : probabilities) {
    if (p > 0.0) s -= p * std::log2(p);
  }
  return s;
}

double von_neumann(const ReducedDensityMatrix& rho) {
  if (std::abs(rho.trace() - 1.0) > 1e-8) {
    throw std::invalid_argument("von_neumann: trace differs from 1 by more than 1e-8");
  }
  const auto lambda = schmidt_spectrum(rho);
  return shannon_entropy_bits(lambda);
}

double von_neumann_population_approx(std::span<const double> populations) {
  return shannon_entropy_bits(populations);
}

double purity(const ReducedDensityMatrix& rho) { return rho.matrix.cwiseAbs2().sum(); }

double linear_entropy(const ReducedDensityMatrix& rho) { return 1.0 - purity(rho); }

double renyi2(const ReducedDensityMatrix& rho) {
  const double p = purity(rho);
  if (!(p > 0.0)) throw std::domain_error("renyi2: purity must be positive");
  const double r = -std::log2(p);
  return r == 0.0 ? 0.0 : r;  // no negative zero for pure states
}

namespace {

void check_residual(const CoefficientVector& c) {
  if (std::abs(c.residual) > kCoefficientResidualLimit) {
    throw std::invalid_argument("purity_from_coefficients: channel " + std::to_string(c.channel) +
                                " has residual population " + std::to_string(c.residual) +
                                " outside the retained basis");
  }
}

cdouble coherence(const CoefficientVector& a, const CoefficientVector& b,
                  const Eigen::MatrixXcd& overlaps) {
  if (overlaps.rows() != a.coefficients.size() || overlaps.cols() != b.coefficients.size()) {
    throw std::invalid_argument("purity_from_coefficients: overlap matrix shape mismatch");
  }
  return a.coefficients.dot(overlaps * b.coefficients);
}

}  // namespace

double purity_from_coefficients(const CoefficientVector& g, const CoefficientVector& e,
                                const Eigen::MatrixXcd& overlaps) {
  check_residual(g);
  check_residual(e);
  const double d = g.coefficients.squaredNorm() - e.coefficients.squaredNorm();
  return 0.5 + 0.5 * d * d + 2.0 * std::norm(coherence(g, e, overlaps));
}

double purity_from_coefficients(const std::vector<CoefficientVector>& coefficients,
                                const std::vector<std::vector<Eigen::MatrixXcd>>& overlaps) {
  double sum = 0.0;
  for (const auto& c : coefficients) {
    check_residual(c);
    const double p = c.coefficients.squaredNorm();
    sum += p * p;
  }
  for (std::size_t m = 0; m < coefficients.size(); ++m) {
    for (std::size_t n = m + 1; n < coefficients.size(); ++n) {
      sum += 2.0 * std::norm(coherence(coefficients[m], coefficients[n], overlaps.at(m).at(n)));
    }
  }
  return sum;
}

std::vector<std::vector<Eigen::MatrixXcd>> pairwise_overlaps(
    const std::vector<VibrationalBasis>& bases) {
  std::vector<std::vector<Eigen::MatrixXcd>> out(bases.size(),
                                                 std::vector<Eigen::MatrixXcd>(bases.size()));
  for (std::size_t m = 0; m < bases.size(); ++m) {
    for (std::size_t n = m + 1; n < bases.size(); ++n) out[m][n] = overlap_matrix(bases[m], bases[n]);
  }
  return out;
}

EntanglementRecord measure(const ChannelState& state, std::span<const double> r_cuts) {
  EntanglementRecord rec;
  rec.time = state.time;
  const ReducedDensityMatrix rho = reduced_density(state);
  const auto n = static_cast<Eigen::Index>(rho.dimension());
  for (Eigen::Index m = 0; m < n; ++m) rec.populations.push_back(rho.matrix(m, m).real());
  for (double cut : r_cuts) rec.partial_populations.push_back(partial_population(state, cut));
  for (Eigen::Index m = 0; m < n; ++m) {
    for (Eigen::Index k = m + 1; k < n; ++k) rec.overlap_squared.push_back(std::norm(rho.matrix(m, k)));
  }
  // Entropies and purity describe the unit-trace state, so norm drift from
  // propagation does not show up as spurious mixing.
  const double trace = rho.trace();
  if (!(trace > 0.0)) throw std::domain_error("measure: state has zero norm");
  const ReducedDensityMatrix unit{rho.matrix / trace};
  std::vector<double> shares;
  for (double p : rec.populations) shares.push_back(p / trace);
  rec.schmidt = schmidt_spectrum(unit);
  rec.svn_exact = von_neumann(unit);
  rec.svn_population = von_neumann_population_approx(shares);
  rec.purity = purity(unit);
  rec.linear_entropy = 1.0 - rec.purity;
  rec.renyi2 = renyi2(unit);
  if (n == 2) rec.population_difference = rec.populations[0] - rec.populations[1];
  rec.svn_discrepancy =
      std::abs(rec.svn_exact - rec.svn_population) > kEntropyDiscrepancyThreshold;
  return rec;
}

}  // namespace vibronic
