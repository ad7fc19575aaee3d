#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>

#include <Eigen/Dense>

namespace vibronic {

using cdouble = std::complex<double>;

/// Uniform radial grid with hard walls at r_min and r_max. The walls are not
/// grid points: R_k = r_min + k * spacing for k = 1..n_points, with
/// spacing = (r_max - r_min) / (n_points + 1). Quadrature weight is the spacing.
class SpatialGrid {
 public:
  static constexpr std::size_t kMinPoints = 8;

  /// Throws std::invalid_argument unless r_max > r_min and n_points >= 8.
  SpatialGrid(double r_min, double r_max, std::size_t n_points);

  double r_min() const noexcept { return r_min_; }
  double r_max() const noexcept { return r_max_; }
  std::size_t size() const noexcept { return n_points_; }
  double length() const noexcept { return r_max_ - r_min_; }
  double spacing() const noexcept { return spacing_; }

  /// k is zero-based: point(0) == r_min + spacing.
  double point(std::size_t k) const noexcept {
    return r_min_ + static_cast<double>(k + 1) * spacing_;
  }
  Eigen::VectorXd points() const;

  /// Wavenumber of sine mode m (one-based): m * pi / length.
  double mode_wavenumber(std::size_t m) const noexcept;

  friend bool operator==(const SpatialGrid&, const SpatialGrid&) = default;

 private:
  double r_min_;
  double r_max_;
  std::size_t n_points_;
  double spacing_;
};

/// Complex radial amplitudes sampled on a grid (units a0^-1/2).
class RadialWavefunction {
 public:
  explicit RadialWavefunction(const SpatialGrid& grid);
  RadialWavefunction(const SpatialGrid& grid, Eigen::VectorXcd amplitudes);

  /// Samples f(R) at each grid point.
  template <typename F>
  static RadialWavefunction sample(const SpatialGrid& grid, F&& f) {
    Eigen::VectorXcd values(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) {
      values[static_cast<Eigen::Index>(k)] = cdouble(f(grid.point(k)));
    }
    return {grid, std::move(values)};
  }

  const SpatialGrid& grid() const noexcept { return grid_; }
  const Eigen::VectorXcd& amplitudes() const noexcept { return amplitudes_; }
  Eigen::VectorXcd& amplitudes() noexcept { return amplitudes_; }
  std::size_t size() const noexcept { return grid_.size(); }

  double norm_squared() const;
  /// Scales to unit discrete norm. Throws std::domain_error for a zero function.
  void normalize();

 private:
  SpatialGrid grid_;
  Eigen::VectorXcd amplitudes_;
};

/// spacing * sum conj(a_k) b_k. Throws GridMismatch.
cdouble inner_product(const RadialWavefunction& a, const RadialWavefunction& b);

/// Gaussian wavepacket whose probability density has standard deviation
/// `width`, with mean momentum `momentum`; normalized on the grid.
RadialWavefunction gaussian_wavepacket(const SpatialGrid& grid, double center,
                                       double width, double momentum = 0.0);

/// Samples sin(m * pi * (R - r_min) / L), the m-th (one-based) box mode.
RadialWavefunction sine_mode(const SpatialGrid& grid, std::size_t m);

/// hbar^2 J (J+1) / (2 mu R_k^2) per grid point. Throws std::invalid_argument
/// if the grid contains R <= 0 (checked only for J > 0) or mass <= 0.
Eigen::VectorXd centrifugal_term(const SpatialGrid& grid, double mass, int J);

/// -(1/2mu) d^2/dR^2 on the sine-DVR grid. Applied spectrally with a
/// DST-I (fast path) or with the dense matrix S diag(k_m^2 / 2mu) S.
///
/// Applying is thread-safe: the transform plan is immutable once built and
/// every call works on its own buffers.
class KineticOperator {
 public:
  KineticOperator(const SpatialGrid& grid, double mass);

  const SpatialGrid& grid() const noexcept { return grid_; }
  double mass() const noexcept { return mass_; }
  /// k_m^2 / (2 mu) for m = 1..n.
  const Eigen::VectorXd& mode_energies() const noexcept { return mode_energies_; }
  double max_energy() const noexcept;

  RadialWavefunction apply(const RadialWavefunction& psi) const;
  RadialWavefunction apply_dense(const RadialWavefunction& psi) const;

  /// out = T in, fast path. Sizes must equal grid().size(); in and out may alias.
  void apply(std::span<const cdouble> in, std::span<cdouble> out) const;

  /// Dense real symmetric matrix of T on the grid.
  Eigen::MatrixXd dense_matrix() const;

 private:
  struct Plan;

  SpatialGrid grid_;
  double mass_;
  Eigen::VectorXd mode_energies_;
  std::shared_ptr<const Plan> plan_;
};

}  // namespace vibronic
