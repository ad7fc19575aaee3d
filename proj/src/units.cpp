#include "vibronic/units.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace vibronic::units {
namespace {

double checked(double value, const char* what) {
  if (!std::isfinite(value)) {
    throw std::domain_error(std::string(what) + ": non-finite value");
  }
  return value;
}

}  // namespace

double energy_to_internal(double wavenumbers_cm1) {
  return checked(wavenumbers_cm1, "energy_to_internal") / kWavenumbersPerHartree;
}

double energy_from_internal(double hartree) {
  return checked(hartree, "energy_from_internal") * kWavenumbersPerHartree;
}

double time_to_internal(double picoseconds) {
  return checked(picoseconds, "time_to_internal") / kPicosecondsPerAtomicTime;
}

double time_from_internal(double atomic_time) {
  return checked(atomic_time, "time_from_internal") * kPicosecondsPerAtomicTime;
}

double mass_to_internal(double amu) {
  return checked(amu, "mass_to_internal") * kElectronMassesPerAmu;
}

double mass_from_internal(double electron_masses) {
  return checked(electron_masses, "mass_from_internal") / kElectronMassesPerAmu;
}

double chirp_rate_to_internal(double per_ps2) {
  return checked(per_ps2, "chirp_rate_to_internal") * kPicosecondsPerAtomicTime *
         kPicosecondsPerAtomicTime;
}

double chirp_rate_from_internal(double per_au2) {
  return checked(per_au2, "chirp_rate_from_internal") /
         (kPicosecondsPerAtomicTime * kPicosecondsPerAtomicTime);
}

}  // namespace vibronic::units
