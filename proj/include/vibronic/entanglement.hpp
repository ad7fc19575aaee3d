#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "vibronic/propagator.hpp"
#include "vibronic/vibrational_basis.hpp"

namespace vibronic {

/// Electronic reduced density matrix of a pure electronic-vibrational state:
/// the Gram matrix rho_mn = <psi_n | psi_m> of the channel wavepackets.
struct ReducedDensityMatrix {
  Eigen::MatrixXcd matrix;

  std::size_t dimension() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  double trace() const { return matrix.trace().real(); }
};

/// Gram matrix of the channel wavepackets, symmetrized as (rho + rho^H) / 2.
ReducedDensityMatrix reduced_density(const ChannelState& state);

std::vector<double> populations(const ChannelState& state);

/// Delta-weighted sum of |psi_n|^2 over grid points with R_k <= r_cut.
/// Throws std::out_of_range unless r_min < r_cut <= r_max.
std::vector<double> partial_population(const ChannelState& state, double r_cut);

/// Eigenvalues of rho, descending. Values within 1e-10 below 0 or above 1 are
/// clipped; throws NumericalError below -1e-8 and std::invalid_argument when
/// rho deviates from Hermitian by more than 1e-10.
std::vector<double> schmidt_spectrum(const ReducedDensityMatrix& rho);

/// -sum lambda log2 lambda, with 0 log 0 = 0.
double shannon_entropy_bits(std::span<const double> probabilities);

/// Exact entropy of entanglement in bits. Throws std::invalid_argument when
/// the trace differs from 1 by more than 1e-8.
double von_neumann(const ReducedDensityMatrix& rho);

/// -sum P_n log2 P_n: the population-only entropy, exact only when the
/// channel wavepackets are mutually orthogonal.
double von_neumann_population_approx(std::span<const double> populations);

/// sum_mn |rho_mn|^2 = sum P_n^2 + 2 sum_{m<n} |<psi_m|psi_n>|^2.
double purity(const ReducedDensityMatrix& rho);
double linear_entropy(const ReducedDensityMatrix& rho);
/// -log2 Tr rho^2. Throws std::domain_error for non-positive purity.
double renyi2(const ReducedDensityMatrix& rho);

/// Residual population above which the coefficient formulas refuse to run.
inline constexpr double kCoefficientResidualLimit = 1e-8;

/// Two-channel purity from vibrational coefficients:
/// 1/2 + (P_g - P_e)^2 / 2 + 2 |sum c*_vg c_ve <chi_vg|chi_ve>|^2.
/// `overlaps(i, j)` = <chi^g_i | chi^e_j>. Throws std::invalid_argument when a
/// residual exceeds kCoefficientResidualLimit.
double purity_from_coefficients(const CoefficientVector& g, const CoefficientVector& e,
                                const Eigen::MatrixXcd& overlaps);

/// N-channel form: sum P_n^2 + 2 sum_{m<n} |c_m^H F_mn c_n|^2.
/// overlaps[m][n] (m < n) = <chi^m_i | chi^n_j>.
double purity_from_coefficients(const std::vector<CoefficientVector>& coefficients,
                                const std::vector<std::vector<Eigen::MatrixXcd>>& overlaps);

/// overlaps[m][n] = overlap_matrix(bases[m], bases[n]) for m < n.
std::vector<std::vector<Eigen::MatrixXcd>> pairwise_overlaps(
    const std::vector<VibrationalBasis>& bases);

/// |S_exact - S_pop| above which a record flags the discrepancy.
inline constexpr double kEntropyDiscrepancyThreshold = 1e-6;

/// Observables of one sample.
struct EntanglementRecord {
  double time = 0.0;
  std::vector<double> populations;
  /// One row per R_cut, one entry per channel.
  std::vector<std::vector<double>> partial_populations;
  /// |<psi_m|psi_n>|^2 for m < n, in (0,1), (0,2), ..., (1,2), ... order.
  std::vector<double> overlap_squared;
  std::vector<double> schmidt;
  double svn_exact = 0.0;
  double svn_population = 0.0;
  double purity = 1.0;
  double linear_entropy = 0.0;
  double renyi2 = 0.0;
  /// P_1 - P_2 for two-channel states.
  std::optional<double> population_difference;
  bool svn_discrepancy = false;
};

/// Populations, partial populations and overlaps are taken from rho as is;
/// the spectrum, entropies and purity from rho / Tr rho.
EntanglementRecord measure(const ChannelState& state, std::span<const double> r_cuts = {});

}  // namespace vibronic
