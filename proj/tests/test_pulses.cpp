#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "vibronic/pulses.hpp"
#include "vibronic/units.hpp"

using namespace vibronic;

namespace {

PulseSpec pulse(double tau_l, double tau_c, double chirp = 0.0, double w = 1e-4) {
  return PulseSpec{w, 0.05, 100.0, tau_c, tau_l, chirp, 0, 1};
}

double ps(double t) { return units::time_to_internal(t); }
double cm(double e) { return units::energy_to_internal(e); }

// Composite Simpson rule on [a, b] with n (even) panels.
template <typename F>
double simpson(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = f(a) + f(b);
  for (int i = 1; i < n; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

}  // namespace

TEST_SUITE("pulses") {
  TEST_CASE("envelope peak, FWHM and tails") {
    const auto p = pulse(4.0, 9.0);
    CHECK(envelope(p, p.center) == doctest::Approx(std::sqrt(4.0 / 9.0)).epsilon(1e-15));
    const auto q = pulse(6.0, 6.0);
    CHECK(envelope(q, q.center + 3.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    CHECK(envelope(q, q.center - 3.0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    // exp(-50 ln2) = 2^-50
    CHECK(envelope(q, q.center + 5.0 * q.chirped_width) == doctest::Approx(std::ldexp(1.0, -50)).epsilon(1e-12));
    CHECK(envelope(q, q.center + 10.0 * q.chirped_width) <= 1e-60);
  }

  TEST_CASE("envelope is even and monotone in |t - t_P|") {
    const auto p = pulse(3.0, 7.0);
    double prev = envelope(p, p.center);
    for (double x = 0.1; x < 30.0; x += 0.1) {
      CHECK(envelope(p, p.center + x) == doctest::Approx(envelope(p, p.center - x)).epsilon(1e-15));
      const double now = envelope(p, p.center + x);
      CHECK(now < prev);
      CHECK(now > 0.0);
      prev = now;
    }
  }

  TEST_CASE("chirping preserves the pulse energy") {
    const double tau_l = 5.0;
    const auto energy = [&](double tau_c) {
      const auto p = pulse(tau_l, tau_c);
      return simpson([&](double t) { return std::pow(envelope(p, t), 2); }, p.center - 8.0 * tau_c,
                     p.center + 8.0 * tau_c, 4000);
    };
    const double e0 = energy(tau_l);
    for (double tau_c : {6.0, 11.0, 35.5}) CHECK(energy(tau_c) == doctest::Approx(e0).epsilon(1e-6));
  }

  TEST_CASE("phase") {
    const auto flat = pulse(2.0, 2.0, 0.0);
    for (double t : {-3.0, 50.0, 100.0, 170.0}) CHECK(phase(flat, t) == 0.0);
    const auto p = pulse(2.0, 4.0, 0.8);
    CHECK(phase(p, p.center) == 0.0);
    CHECK(phase(p, p.center + 1.0) == doctest::Approx(0.4));
    for (double x : {0.5, 2.0, 9.0}) {
      CHECK(phase(p, p.center + x) == doctest::Approx(phase(p, p.center - x)));
      CHECK(instantaneous_frequency_shift(p, p.center + x) ==
            doctest::Approx(-instantaneous_frequency_shift(p, p.center - x)));
    }
    // Negative chirp: frequency decreases through t > t_P.
    const auto neg = pulse(2.0, 4.0, -0.8);
    CHECK(instantaneous_frequency_shift(neg, neg.center + 1.0) < 0.0);
    CHECK(instantaneous_frequency_shift(neg, neg.center + 2.0) <
          instantaneous_frequency_shift(neg, neg.center + 1.0));
    // Derivative of the phase, by central difference.
    const double h = 1e-5, t = p.center + 1.7;
    CHECK((phase(p, t + h) - phase(p, t - h)) / (2 * h) ==
          doctest::Approx(instantaneous_frequency_shift(p, t)).epsilon(1e-8));
  }

  TEST_CASE("default chirp rate") {
    CHECK(default_chirp_rate(3.0, 3.0, 1) == 0.0);
    const double tc = 10.0;
    CHECK(default_chirp_rate(5.0, tc, -1) ==
          doctest::Approx(-(4.0 * std::numbers::ln2 / (tc * tc)) * std::sqrt(3.0)).epsilon(1e-15));
    CHECK(default_chirp_rate(5.0, 12.0, 1) == -default_chirp_rate(5.0, 12.0, -1));
    CHECK_THROWS_AS(default_chirp_rate(5.0, 4.0, 1), std::invalid_argument);
  }

  TEST_CASE("Rabi periods") {
    const auto period_ps = [](double w_cm1, double ratio) {
      PulseSpec p{cm(w_cm1), 0.0, 0.0, ps(ratio), ps(1.0), 0.0, 0, 1};
      return units::time_from_internal(chirped_rabi_period(p));
    };
    CHECK(std::abs(period_ps(13.17, 1.0) / 1.27 - 1.0) <= 0.005);
    CHECK(period_ps(0.74, 1.0) == doctest::Approx(std::numbers::pi * 5.30883746 / 0.74).epsilon(1e-8));
    CHECK(period_ps(0.74, 1.0) == doctest::Approx(22.54).epsilon(1e-3));
    CHECK(period_ps(13.17, 4.0) == doctest::Approx(2.0 * period_ps(13.17, 1.0)).epsilon(1e-14));
    CHECK(period_ps(-13.17, 1.0) == period_ps(13.17, 1.0));
    PulseSpec zero{0.0, 0.0, 0.0, 1.0, 1.0, 0.0, 0, 1};
    CHECK_THROWS_AS(chirped_rabi_period(zero), std::invalid_argument);
  }

  TEST_CASE("laser coupling in the rotating frame") {
    const auto p = pulse(2.0, 5.0, 0.3, 2e-4);
    for (double t : {90.0, 100.0, 104.0}) {
      const cdouble w = laser_coupling(p, t);
      CHECK(std::abs(w) == doctest::Approx(2e-4 * envelope(p, t)).epsilon(1e-14));
      CHECK(std::arg(-w) == doctest::Approx(std::remainder(-phase(p, t), 2 * std::numbers::pi)).epsilon(1e-12));
    }
  }

  TEST_CASE("validation") {
    CHECK_THROWS_AS(validate(pulse(5.0, 4.0)), std::invalid_argument);
    CHECK_THROWS_AS(validate(pulse(0.0, 4.0)), std::invalid_argument);
    PulseSpec same = pulse(1.0, 1.0);
    same.upper = same.lower;
    CHECK_THROWS_AS(validate(same), std::invalid_argument);
    CHECK_NOTHROW(validate(pulse(1.0, 1.0)));
  }

  TEST_CASE("intensity helper") {
    // One atomic unit of intensity gives a unit field; W = -E0 D / 2.
    CHECK(coupling_from_intensity(units::kAtomicIntensityWattsPerCm2, 2.0) == doctest::Approx(-1.0));
    CHECK(coupling_from_intensity(0.0, 3.0) == 0.0);
    CHECK_THROWS_AS(coupling_from_intensity(-1.0, 1.0), std::invalid_argument);
  }

  TEST_CASE("sequence ordering and repetition") {
    PulseSpec a = pulse(10.0, 20.0), b = pulse(10.0, 20.0);
    a.center = ps(275.0);
    b.center = ps(150.0);
    const PulseSequence seq({a, b}, ps(1800.0), 1);
    REQUIRE(seq.pulses().size() == 2);
    CHECK(seq.pulses()[0].center == ps(150.0));
    const auto all = seq.expanded();
    REQUIRE(all.size() == 4);
    CHECK(all[2].center - all[0].center == doctest::Approx(ps(1800.0)).epsilon(1e-15));
    CHECK(all[3].center - all[1].center == doctest::Approx(ps(1800.0)).epsilon(1e-15));
    CHECK(PulseSequence({a, b}).expanded().size() == 2);
    CHECK_THROWS_AS(PulseSequence({a}, -1.0, 1), std::invalid_argument);
  }
}
