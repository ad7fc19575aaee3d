#pragma once

// Atomic units throughout (hbar = 1, lengths in bohr, masses in electron
// masses). Conversions happen once, at the configuration boundary.

namespace vibronic::units {

inline constexpr double kWavenumbersPerHartree = 219474.6313632;
inline constexpr double kPicosecondsPerAtomicTime = 2.4188843265857e-5;
inline constexpr double kElectronMassesPerAmu = 1822.888486209;
/// hbar expressed in cm^-1 * ps.
inline constexpr double kHbarWavenumberPicoseconds =
    kWavenumbersPerHartree * kPicosecondsPerAtomicTime;
/// Atomic unit of intensity, 0.5 * c * eps0 * E_au^2, in W/cm^2.
inline constexpr double kAtomicIntensityWattsPerCm2 = 3.509445e16;

struct UnitSystem {
  double energy_cm1_per_hartree = kWavenumbersPerHartree;
  double time_ps_per_au = kPicosecondsPerAtomicTime;
  double mass_me_per_amu = kElectronMassesPerAmu;
};

// Each conversion throws std::domain_error on non-finite input.
double energy_to_internal(double wavenumbers_cm1);
double energy_from_internal(double hartree);
double time_to_internal(double picoseconds);
double time_from_internal(double atomic_time);
double mass_to_internal(double amu);
double mass_from_internal(double electron_masses);

/// Rate in 1/ps^2 to 1/au^2.
double chirp_rate_to_internal(double per_ps2);
double chirp_rate_from_internal(double per_au2);

}  // namespace vibronic::units
