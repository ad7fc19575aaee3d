#include "vibronic/rabi_oracle.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace vibronic {

void TwoLevelModel::validate() const {
  if (!std::isfinite(lower_energy) || !std::isfinite(upper_energy) || !std::isfinite(coupling) ||
      !std::isfinite(overlap.real()) || !std::isfinite(overlap.imag())) {
    throw std::invalid_argument("two-level model: non-finite parameter");
  }
  if (std::abs(overlap) > 1.0 + 1e-12) {
    throw std::invalid_argument("two-level model: |F| must not exceed 1");
  }
}

double rabi_frequency(const TwoLevelModel& m) {
  const double half_detuning = 0.5 * (m.upper_energy - m.lower_energy);
  return std::sqrt(std::norm(m.coupling * m.overlap) + half_detuning * half_detuning);
}

double beat_period(const TwoLevelModel& m) {
  const double omega = rabi_frequency(m);
  return omega > 0.0 ? std::numbers::pi / omega : std::numeric_limits<double>::infinity();
}

double excited_population(const TwoLevelModel& m, double t) {
  const double w2 = std::norm(m.coupling * m.overlap);
  if (w2 == 0.0) return 0.0;
  const double omega = rabi_frequency(m);
  const double s = std::sin(omega * t);
  return w2 / (omega * omega) * s * s;
}

double linear_entropy_2x2(const TwoLevelModel& m, double t) {
  const double pe = excited_population(m, t);
  return 2.0 * (1.0 - std::norm(m.overlap)) * pe * (1.0 - pe);
}

double purity_single_level(cdouble overlap, double lower_population, double upper_population) {
  return 1.0 - 2.0 * (1.0 - std::norm(overlap)) * lower_population * upper_population;
}

std::vector<TwoLevelSample> integrate_two_level(const TwoLevelModel& m, double t_end, double dt) {
  m.validate();
  if (!(dt > 0.0) || !(t_end >= 0.0)) {
    throw std::invalid_argument("integrate_two_level: need dt > 0 and t_end >= 0");
  }
  const double omega = rabi_frequency(m);
  if (omega > 0.0 && dt > 0.01 / omega * (1.0 + 1e-12)) {
    throw std::invalid_argument("integrate_two_level: dt must not exceed 0.01 / Omega");
  }
  const auto steps = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;

  const double half = 0.5 * (m.upper_energy - m.lower_energy);
  const cdouble v = m.coupling * m.overlap;
  const cdouble minus_i{0.0, -1.0};
  using State = std::array<cdouble, 2>;
  auto rhs = [&](const State& x) -> State {
    return {minus_i * (-half * x[0] + std::conj(v) * x[1]), minus_i * (v * x[0] + half * x[1])};
  };
  auto axpy = [](const State& x, double a, const State& k) -> State {
    return {x[0] + a * k[0], x[1] + a * k[1]};
  };

  std::vector<TwoLevelSample> out;
  out.reserve(steps + 1);
  State x{cdouble(1.0, 0.0), cdouble(0.0, 0.0)};
  out.push_back({0.0, x[0], x[1]});
  for (std::size_t s = 1; s <= steps; ++s) {
    const State k1 = rhs(x);
    const State k2 = rhs(axpy(x, 0.5 * h, k1));
    const State k3 = rhs(axpy(x, 0.5 * h, k2));
    const State k4 = rhs(axpy(x, h, k3));
    for (int i = 0; i < 2; ++i) x[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    out.push_back({static_cast<double>(s) * h, x[0], x[1]});
  }
  return out;
}

}  // namespace vibronic
