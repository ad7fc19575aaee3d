#pragma once

#include <cstddef>
#include <iosfwd>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "vibronic/grid.hpp"
#include "vibronic/potentials.hpp"

namespace vibronic {

/// Levels within this distance below the asymptote do not count as bound.
inline constexpr double kBoundEpsilon = 1e-10;

struct VibrationalLevel {
  std::size_t v;
  double energy;
  RadialWavefunction wavefunction;
};

/// Orthonormal eigenfunctions of one channel's radial Hamiltonian, ascending in energy.
class VibrationalBasis {
 public:
  VibrationalBasis(std::size_t channel, double mass, int J, double asymptote,
                   std::vector<VibrationalLevel> levels);

  std::size_t channel() const noexcept { return channel_; }
  double mass() const noexcept { return mass_; }
  int J() const noexcept { return J_; }
  double asymptote() const noexcept { return asymptote_; }
  std::size_t size() const noexcept { return levels_.size(); }
  const VibrationalLevel& level(std::size_t v) const { return levels_.at(v); }
  const std::vector<VibrationalLevel>& levels() const noexcept { return levels_; }
  const SpatialGrid& grid() const { return levels_.front().wavefunction.grid(); }

  /// Columns are the level amplitudes (n_points x size()).
  Eigen::MatrixXcd amplitude_matrix() const;

 private:
  std::size_t channel_;
  double mass_;
  int J_;
  double asymptote_;
  std::vector<VibrationalLevel> levels_;
};

struct LevelCount {
  std::size_t count;
};
struct EnergyCeiling {
  double energy;
};
/// Every eigenpair of the grid Hamiltonian, bound or not (a complete basis).
struct FullSpectrum {};
using LevelSelection = std::variant<LevelCount, EnergyCeiling, FullSpectrum>;

/// Dense T + V + centrifugal on the grid.
Eigen::MatrixXd dvr_hamiltonian(const SpatialGrid& grid, const PotentialCurve& curve, double mass,
                                int J = 0);

/// Dense Hermitian eigensolve. Each wavefunction has unit Delta-weighted norm
/// and its first amplitude above 1e-8 of the peak (scanning from r_min) is
/// real positive. Throws LevelShortfall when fewer bound levels exist than
/// requested, or when an energy ceiling captures none.
VibrationalBasis solve_levels(const SpatialGrid& grid, const PotentialCurve& curve, double mass,
                              int J, const LevelSelection& selection, std::size_t channel = 0);

/// Index of the highest level with E < asymptote - kBoundEpsilon. Throws
/// LevelShortfall if there is none.
std::size_t last_bound_level(const VibrationalBasis& basis);

/// Sign changes of the real part, ignoring amplitudes below rel_threshold * peak.
std::size_t count_nodes(const RadialWavefunction& psi, double rel_threshold = 1e-8);

struct FranckCondon {
  cdouble overlap;
  double factor;
};

FranckCondon franck_condon(const RadialWavefunction& a, const RadialWavefunction& b);

/// (i, j) = <chi^a_i | chi^b_j>.
Eigen::MatrixXcd overlap_matrix(const VibrationalBasis& a, const VibrationalBasis& b);

/// Expansion coefficients of a wavepacket in one channel's basis.
struct CoefficientVector {
  std::size_t channel;
  Eigen::VectorXcd coefficients;
  /// <psi|psi> - sum |c_v|^2, the population outside the retained levels.
  double residual;

  double population() const { return coefficients.squaredNorm() + residual; }
};

CoefficientVector project(const RadialWavefunction& psi, const VibrationalBasis& basis);
RadialWavefunction reconstruct(const CoefficientVector& c, const VibrationalBasis& basis);

/// CSV with header "v,E_cm1".
void write_levels_csv(std::ostream& out, const VibrationalBasis& basis);
/// CSV with header "R_a0,re,im".
void write_wavefunction_csv(std::ostream& out, const RadialWavefunction& psi);

}  // namespace vibronic
