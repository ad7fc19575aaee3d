#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "vibronic/grid.hpp"

namespace vibronic {

/// One Gaussian, quadratically chirped laser pulse in the rotating-wave
/// picture. All quantities in atomic units.
struct PulseSpec {
  double coupling;           // W_L, sign included
  double photon_energy;      // hbar * omega_L, dresses the lower channel
  double center;             // t_P
  double chirped_width;      // tau_C, FWHM of f^2 after chirping
  double transform_limited;  // tau_L
  double chirp_rate = 0.0;   // phi(t) = chirp_rate * (t - t_P)^2 / 2
  std::size_t lower = 0;
  std::size_t upper = 1;
};

/// Throws std::invalid_argument unless tau_C >= tau_L > 0, all fields are
/// finite and lower != upper.
void validate(const PulseSpec& p);

/// sqrt(tau_L / tau_C) * exp(-2 ln2 ((t - t_P) / tau_C)^2)
double envelope(const PulseSpec& p, double t);
double phase(const PulseSpec& p, double t);
/// d phi / dt, the shift of the instantaneous carrier frequency.
double instantaneous_frequency_shift(const PulseSpec& p, double t);

/// Chirp rate of a Gaussian pulse stretched from tau_L to tau_C:
/// sign * (4 ln2 / tau_C^2) * sqrt((tau_C / tau_L)^2 - 1).
double default_chirp_rate(double tau_l, double tau_c, int sign);

/// hbar * pi / |W|.
double rabi_period(double coupling);
/// sqrt(tau_C / tau_L) * hbar * pi / |W_L|. Throws std::invalid_argument for W_L = 0.
double chirped_rabi_period(const PulseSpec& p);

/// Hamiltonian block (upper, lower) in the RWA: -W_L f(t) exp(-i phi(t)).
/// The (lower, upper) block is its conjugate.
cdouble laser_coupling(const PulseSpec& p, double t);

/// W_L = -E_0 D / 2 with E_0 = sqrt(2 I / (c eps0)); intensity in W/cm^2,
/// transition dipole in atomic units. Never applied implicitly.
double coupling_from_intensity(double intensity_w_per_cm2, double transition_dipole_au);

/// Pulses ordered by center, optionally repeated with a fixed period.
class PulseSequence {
 public:
  PulseSequence() = default;
  /// Sorts by center. `repetitions` counts extra copies of the whole list.
  explicit PulseSequence(std::vector<PulseSpec> pulses,
                         std::optional<double> repetition_period = std::nullopt,
                         std::size_t repetitions = 1);

  const std::vector<PulseSpec>& pulses() const noexcept { return pulses_; }
  std::optional<double> repetition_period() const noexcept { return period_; }
  std::size_t repetitions() const noexcept { return period_ ? repetitions_ : 0; }

  /// Base pulses followed by each shifted copy, ordered by center.
  std::vector<PulseSpec> expanded() const;

 private:
  std::vector<PulseSpec> pulses_;
  std::optional<double> period_;
  std::size_t repetitions_ = 0;
};

}  // namespace vibronic
