#pragma once

#include <vector>

#include "vibronic/grid.hpp"

namespace vibronic {

/// One vibrational level per channel, coupled by W_L times their overlap F.
/// Population starts in the lower level at t = 0.
struct TwoLevelModel {
  double lower_energy;  // E_vg
  double upper_energy;  // E_ve
  double coupling;      // W_L
  cdouble overlap;      // F = <chi_vg | chi_ve>, |F| <= 1

  /// Throws std::invalid_argument when |F| > 1 or a field is non-finite.
  void validate() const;
};

/// Omega = sqrt(|W F|^2 + ((E_ve - E_vg) / 2)^2) / hbar.
double rabi_frequency(const TwoLevelModel& m);
/// pi / Omega; +inf when Omega = 0.
double beat_period(const TwoLevelModel& m);
/// |W F|^2 / Omega^2 * sin^2(Omega t); zero when W F = 0.
double excited_population(const TwoLevelModel& m, double t);
/// 2 (1 - |F|^2) P_e (1 - P_e).
double linear_entropy_2x2(const TwoLevelModel& m, double t);
/// 1 - 2 (1 - |F|^2) |c_g|^2 |c_e|^2, purity of one level per channel.
double purity_single_level(cdouble overlap, double lower_population, double upper_population);

struct TwoLevelSample {
  double time;
  cdouble lower;
  cdouble upper;
};

/// Classical RK4 for i dx/dt = H x, H = [[E_vg, (W F)*], [W F, E_ve]], in the
/// frame rotating at the mean level energy (populations are unaffected).
/// Returns the initial point and every step. The step is shrunk to land on
/// t_end; throws std::invalid_argument if dt > 0.01 / Omega.
std::vector<TwoLevelSample> integrate_two_level(const TwoLevelModel& m, double t_end, double dt);

}  // namespace vibronic
