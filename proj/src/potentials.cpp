#include "vibronic/potentials.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_spline.h>

#include "vibronic/errors.hpp"
#include "vibronic/units.hpp"

namespace vibronic {

struct TabulatedCurve::Spline {
  gsl_spline* handle = nullptr;

  Spline(const std::vector<double>& r, const std::vector<double>& v) {
    static const bool handler_off = [] {
      gsl_set_error_handler_off();
      return true;
    }();
    (void)handler_off;
    handle = gsl_spline_alloc(gsl_interp_cspline, r.size());
    if (handle == nullptr) throw std::bad_alloc();
    if (gsl_spline_init(handle, r.data(), v.data(), r.size()) != GSL_SUCCESS) {
      gsl_spline_free(handle);
      throw std::invalid_argument("TabulatedCurve: spline construction failed");
    }
  }
  ~Spline() { gsl_spline_free(handle); }
  Spline(const Spline&) = delete;
  Spline& operator=(const Spline&) = delete;
};

TabulatedCurve::TabulatedCurve(std::vector<double> r, std::vector<double> v)
    : r_(std::move(r)), v_(std::move(v)) {
  if (r_.size() != v_.size()) throw std::invalid_argument("TabulatedCurve: column length mismatch");
  if (r_.size() < 4) throw std::invalid_argument("TabulatedCurve: need at least 4 samples");
  for (std::size_t i = 0; i < r_.size(); ++i) {
    if (!std::isfinite(r_[i]) || !std::isfinite(v_[i])) {
      throw std::invalid_argument("TabulatedCurve: non-finite sample");
    }
    if (i > 0 && !(r_[i] > r_[i - 1])) {
      throw std::invalid_argument("TabulatedCurve: R must be strictly increasing");
    }
  }
  spline_ = std::make_shared<const Spline>(r_, v_);
}

double TabulatedCurve::operator()(double r) const {
  if (!(r >= r_.front() && r <= r_.back())) {
    throw std::out_of_range("TabulatedCurve: R = " + std::to_string(r) + " outside table [" +
                            std::to_string(r_.front()) + ", " + std::to_string(r_.back()) + "]");
  }
  // A null accelerator keeps evaluation reentrant.
  return gsl_spline_eval(spline_->handle, r, nullptr);
}

PotentialCurve PotentialCurve::morse(const MorseParams& p) {
  if (!(p.well_depth > 0.0) || !(p.range > 0.0) || !(p.equilibrium > 0.0) ||
      !std::isfinite(p.asymptote)) {
    throw std::invalid_argument("morse: require well_depth > 0, range > 0, equilibrium > 0");
  }
  return PotentialCurve(p);
}

PotentialCurve PotentialCurve::harmonic(const HarmonicParams& p) {
  if (!(p.frequency > 0.0) || !std::isfinite(p.equilibrium) || !std::isfinite(p.minimum)) {
    throw std::invalid_argument("harmonic: require frequency > 0 and finite parameters");
  }
  return PotentialCurve(p);
}

PotentialCurve PotentialCurve::tabulated(std::vector<double> r, std::vector<double> v) {
  return PotentialCurve(TabulatedCurve(std::move(r), std::move(v)));
}

PotentialKind PotentialCurve::kind() const noexcept {
  switch (params_.index()) {
    case 0:
      return PotentialKind::kMorse;
    case 1:
      return PotentialKind::kHarmonic;
    default:
      return PotentialKind::kTabulated;
  }
}

double PotentialCurve::evaluate(double r, double mass) const {
  struct Visitor {
    double r;
    double mass;
    double operator()(const MorseParams& p) const {
      const double x = 1.0 - std::exp(-p.range * (r - p.equilibrium));
      return p.asymptote - p.well_depth + p.well_depth * x * x;
    }
    double operator()(const HarmonicParams& p) const {
      if (!(mass > 0.0)) throw std::invalid_argument("harmonic curve needs a positive mass");
      const double x = r - p.equilibrium;
      return p.minimum + 0.5 * mass * p.frequency * p.frequency * x * x;
    }
    double operator()(const TabulatedCurve& t) const { return t(r); }
  };
  return std::visit(Visitor{r, mass}, params_) + shift_;
}

Eigen::VectorXd PotentialCurve::sample(const SpatialGrid& grid, double mass) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) {
    v[static_cast<Eigen::Index>(k)] = evaluate(grid.point(k), mass);
  }
  return v;
}

PotentialCurve PotentialCurve::dressed(double photon_energy) const {
  PotentialCurve out = *this;
  out.shift_ += photon_energy;
  return out;
}

double PotentialCurve::asymptote() const {
  struct Visitor {
    double operator()(const MorseParams& p) const { return p.asymptote; }
    double operator()(const HarmonicParams&) const {
      return std::numeric_limits<double>::infinity();
    }
    double operator()(const TabulatedCurve& t) const { return t.values().back(); }
  };
  return std::visit(Visitor{}, params_) + shift_;
}

CouplingCurve CouplingCurve::constant(double strength) {
  if (!std::isfinite(strength)) throw std::invalid_argument("constant coupling must be finite");
  return CouplingCurve(ConstantCoupling{strength});
}

CouplingCurve CouplingCurve::gaussian(double amplitude, double center, double width) {
  if (!(width > 0.0)) throw std::invalid_argument("gaussian coupling: width must be positive");
  if (!std::isfinite(amplitude) || !std::isfinite(center)) {
    throw std::invalid_argument("gaussian coupling: non-finite parameter");
  }
  return CouplingCurve(GaussianCoupling{amplitude, center, width});
}

double CouplingCurve::value(double r) const {
  if (const auto* c = std::get_if<ConstantCoupling>(&params_)) return c->strength;
  const auto& g = std::get<GaussianCoupling>(params_);
  const double x = (r - g.center) / g.width;
  return g.amplitude * std::exp(-0.5 * x * x);
}

Eigen::VectorXd CouplingCurve::sample(const SpatialGrid& grid) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) v[static_cast<Eigen::Index>(k)] = value(grid.point(k));
  return v;
}

double find_crossing(const PotentialCurve& a, const PotentialCurve& b, double lo, double hi,
                     double mass, double tolerance) {
  auto diff = [&](double r) { return a.evaluate(r, mass) - b.evaluate(r, mass); };
  const double f_lo = diff(lo);
  const double f_hi = diff(hi);
  if (f_lo == 0.0) return lo;
  if (f_hi == 0.0) return hi;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    throw std::invalid_argument("find_crossing: curves do not cross inside the bracket");
  }
  const auto close = [tolerance](double x, double y) { return std::abs(y - x) <= tolerance; };
  const auto [left, right] = boost::math::tools::bisect(diff, lo, hi, close);
  return 0.5 * (left + right);
}

PotentialCurve load_tabulated_potential(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open potential table " + path.string());
  std::vector<double> r;
  std::vector<double> v;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double rr = 0.0;
    double vv = 0.0;
    std::string extra;
    if (!(fields >> rr >> vv) || (fields >> extra)) {
      throw ConfigError(path.string() + ":" + std::to_string(line_no),
                        "expected two numeric columns (R_a0 V_cm1)");
    }
    r.push_back(rr);
    v.push_back(units::energy_to_internal(vv));
  }
  try {
    return PotentialCurve::tabulated(std::move(r), std::move(v));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string(), e.what());
  }
}

}  // namespace vibronic
