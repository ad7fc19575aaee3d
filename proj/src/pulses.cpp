#include "vibronic/pulses.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vibronic/units.hpp"

namespace vibronic {

void validate(const PulseSpec& p) {
  for (double x : {p.coupling, p.photon_energy, p.center, p.chirped_width, p.transform_limited,
                   p.chirp_rate}) {
    if (!std::isfinite(x)) throw std::invalid_argument("pulse: non-finite parameter");
  }
  if (!(p.transform_limited > 0.0)) throw std::invalid_argument("pulse: tau_L must be positive");
  if (p.chirped_width < p.transform_limited) {
    throw std::invalid_argument("pulse: tau_C must be >= tau_L");
  }
  if (p.lower == p.upper) throw std::invalid_argument("pulse: lower and upper channel coincide");
}

double envelope(const PulseSpec& p, double t) {
  const double x = (t - p.center) / p.chirped_width;
  return std::sqrt(p.transform_limited / p.chirped_width) *
         std::exp(-2.0 * std::numbers::ln2 * x * x);
}

double phase(const PulseSpec& p, double t) {
  const double x = t - p.center;
  return 0.5 * p.chirp_rate * x * x;
}

double instantaneous_frequency_shift(const PulseSpec& p, double t) {
  return p.chirp_rate * (t - p.center);
}

double default_chirp_rate(double tau_l, double tau_c, int sign) {
  if (!(tau_l > 0.0) || tau_c < tau_l) {
    throw std::invalid_argument("default_chirp_rate: require tau_C >= tau_L > 0");
  }
  if (sign != 1 && sign != -1) throw std::invalid_argument("default_chirp_rate: sign must be +-1");
  const double ratio = tau_c / tau_l;
  return static_cast<double>(sign) * (4.0 * std::numbers::ln2 / (tau_c * tau_c)) *
         std::sqrt(ratio * ratio - 1.0);
}

double rabi_period(double coupling) {
  if (coupling == 0.0 || !std::isfinite(coupling)) {
    throw std::invalid_argument("rabi_period: coupling must be finite and nonzero");
  }
  return std::numbers::pi / std::abs(coupling);
}

double chirped_rabi_period(const PulseSpec& p) {
  return std::sqrt(p.chirped_width / p.transform_limited) * rabi_period(p.coupling);
}

cdouble laser_coupling(const PulseSpec& p, double t) {
  return -p.coupling * envelope(p, t) * std::polar(1.0, -phase(p, t));
}

double coupling_from_intensity(double intensity_w_per_cm2, double transition_dipole_au) {
  if (!(intensity_w_per_cm2 >= 0.0) || !std::isfinite(transition_dipole_au)) {
    throw std::invalid_argument("coupling_from_intensity: invalid intensity or dipole");
  }
  const double field = std::sqrt(intensity_w_per_cm2 / units::kAtomicIntensityWattsPerCm2);
  return -0.5 * field * transition_dipole_au;
}

PulseSequence::PulseSequence(std::vector<PulseSpec> pulses, std::optional<double> repetition_period,
                             std::size_t repetitions)
    : pulses_(std::move(pulses)), period_(repetition_period), repetitions_(repetitions) {
  for (const auto& p : pulses_) validate(p);
  if (period_ && !(*period_ > 0.0)) {
    throw std::invalid_argument("pulse sequence: repetition period must be positive");
  }
  std::stable_sort(pulses_.begin(), pulses_.end(),
                   [](const PulseSpec& a, const PulseSpec& b) { return a.center < b.center; });
}

std::vector<PulseSpec> PulseSequence::expanded() const {
  std::vector<PulseSpec> out = pulses_;
  for (std::size_t r = 1; r <= repetitions(); ++r) {
    for (PulseSpec p : pulses_) {
      p.center += static_cast<double>(r) * *period_;
      out.push_back(p);
    }
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const PulseSpec& a, const PulseSpec& b) { return a.center < b.center; });
  return out;
}

}  // namespace vibronic
