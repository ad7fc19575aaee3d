#pragma once

#include <filesystem>
#include <memory>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "vibronic/grid.hpp"

namespace vibronic {

/// V(R) = asymptote - well_depth + well_depth * (1 - exp(-range (R - equilibrium)))^2
struct MorseParams {
  double well_depth;   // D_e, hartree
  double range;        // a, 1/bohr
  double equilibrium;  // R_e, bohr
  double asymptote = 0.0;
};

/// V(R) = minimum + mu * frequency^2 * (R - equilibrium)^2 / 2, with mu the
/// channel mass supplied at evaluation time, so frequency is the level spacing.
struct HarmonicParams {
  double frequency;
  double equilibrium;
  double minimum = 0.0;
};

/// Natural cubic spline through (R_i, V_i). Evaluation outside
/// [R_front, R_back] throws std::out_of_range.
class TabulatedCurve {
 public:
  /// Requires >= 4 strictly increasing abscissae with finite values.
  TabulatedCurve(std::vector<double> r, std::vector<double> v);

  double operator()(double r) const;
  const std::vector<double>& abscissae() const noexcept { return r_; }
  const std::vector<double>& values() const noexcept { return v_; }

 private:
  struct Spline;

  std::vector<double> r_;
  std::vector<double> v_;
  std::shared_ptr<const Spline> spline_;
};

enum class PotentialKind { kMorse, kHarmonic, kTabulated };

/// A diabatic potential-energy curve plus an additive photon-dressing shift.
/// Immutable; copies share tabulated data.
class PotentialCurve {
 public:
  using Parameters = std::variant<MorseParams, HarmonicParams, TabulatedCurve>;

  static PotentialCurve morse(const MorseParams& p);
  static PotentialCurve harmonic(const HarmonicParams& p);
  static PotentialCurve tabulated(std::vector<double> r, std::vector<double> v);

  PotentialKind kind() const noexcept;
  const Parameters& parameters() const noexcept { return params_; }
  double dressing_shift() const noexcept { return shift_; }

  /// `mass` is only used by harmonic curves.
  double evaluate(double r, double mass) const;
  Eigen::VectorXd sample(const SpatialGrid& grid, double mass) const;

  /// Copy with dressing_shift increased by photon_energy.
  PotentialCurve dressed(double photon_energy) const;

  /// Dissociation limit including the shift: +inf for harmonic curves, the
  /// last tabulated value for tabulated ones.
  double asymptote() const;

 private:
  explicit PotentialCurve(Parameters p) : params_(std::move(p)) {}

  Parameters params_;
  double shift_ = 0.0;
};

inline double evaluate(const PotentialCurve& curve, double r, double mass = 1.0) {
  return curve.evaluate(r, mass);
}
inline PotentialCurve dress(const PotentialCurve& curve, double photon_energy) {
  return curve.dressed(photon_energy);
}

struct ConstantCoupling {
  double strength;
};

/// amplitude * exp(-(R - center)^2 / (2 width^2))
struct GaussianCoupling {
  double amplitude;
  double center;
  double width;
};

/// Real, R-dependent inter-channel coupling.
class CouplingCurve {
 public:
  using Parameters = std::variant<ConstantCoupling, GaussianCoupling>;

  static CouplingCurve constant(double strength);
  /// Throws std::invalid_argument unless width > 0.
  static CouplingCurve gaussian(double amplitude, double center, double width);

  const Parameters& parameters() const noexcept { return params_; }
  double value(double r) const;
  Eigen::VectorXd sample(const SpatialGrid& grid) const;

 private:
  explicit CouplingCurve(Parameters p) : params_(p) {}
  Parameters params_;
};

inline double coupling_value(const CouplingCurve& curve, double r) { return curve.value(r); }

/// Locates R_c in [lo, hi] with a(R_c) = b(R_c) by bisection to `tolerance`.
/// Throws std::invalid_argument when a - b does not change sign on the bracket.
double find_crossing(const PotentialCurve& a, const PotentialCurve& b, double lo, double hi,
                     double mass, double tolerance = 1e-10);

/// Reads a two-column text table (R in bohr, V in cm^-1; '#' comments) and
/// returns a tabulated curve in hartree. Throws IoError / ConfigError.
PotentialCurve load_tabulated_potential(const std::filesystem::path& path);

}  // namespace vibronic
