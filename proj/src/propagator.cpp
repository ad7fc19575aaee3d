#include "vibronic/propagator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include <boost/math/special_functions/bessel.hpp>

#include "vibronic/errors.hpp"

namespace vibronic {

double ChannelState::total_norm() const {
  double sum = 0.0;
  for (const auto& psi : channels) sum += psi.norm_squared();
  return sum;
}

Eigen::MatrixXcd ChannelState::packed() const {
  const auto n = static_cast<Eigen::Index>(grid().size());
  Eigen::MatrixXcd m(n, static_cast<Eigen::Index>(channels.size()));
  for (std::size_t c = 0; c < channels.size(); ++c) {
    if (!(channels[c].grid() == grid())) throw GridMismatch();
    m.col(static_cast<Eigen::Index>(c)) = channels[c].amplitudes();
  }
  return m;
}

ChannelState ChannelState::unpack(const SpatialGrid& grid, double time, const Eigen::MatrixXcd& m) {
  ChannelState s;
  s.time = time;
  s.channels.reserve(static_cast<std::size_t>(m.cols()));
  for (Eigen::Index c = 0; c < m.cols(); ++c) s.channels.emplace_back(grid, m.col(c));
  return s;
}

void HamiltonianSnapshot::validate(const SpatialGrid& grid) const {
  const std::size_t n_ch = potentials.size();
  if (n_ch == 0) throw std::invalid_argument("hamiltonian: no channels");
  if (!(mass > 0.0)) throw std::invalid_argument("hamiltonian: mass must be positive");
  for (const auto& v : potentials) {
    if (static_cast<std::size_t>(v.size()) != grid.size() || !v.allFinite()) {
      throw std::invalid_argument("hamiltonian: potential size or values invalid");
    }
  }
  auto check_pair = [&](std::size_t r, std::size_t c) {
    if (r >= n_ch || c >= n_ch || r == c) {
      throw std::invalid_argument("hamiltonian: coupling block (" + std::to_string(r) + ", " +
                                  std::to_string(c) + ") is not an off-diagonal block");
    }
  };
  for (const auto& b : radial) {
    check_pair(b.row, b.col);
    if (static_cast<std::size_t>(b.values.size()) != grid.size() || !b.values.allFinite()) {
      throw std::invalid_argument("hamiltonian: radial coupling size or values invalid");
    }
  }
  for (const auto& b : scalar) {
    check_pair(b.row, b.col);
    if (!std::isfinite(b.value.real()) || !std::isfinite(b.value.imag())) {
      throw std::invalid_argument("hamiltonian: non-finite scalar coupling");
    }
  }
}

Eigen::MatrixXcd HamiltonianSnapshot::dense_matrix(const KineticOperator& kinetic) const {
  const auto n = static_cast<Eigen::Index>(kinetic.grid().size());
  const auto n_ch = static_cast<Eigen::Index>(potentials.size());
  const Eigen::MatrixXcd t = kinetic.dense_matrix().cast<cdouble>();
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n * n_ch, n * n_ch);
  for (Eigen::Index m = 0; m < n_ch; ++m) {
    h.block(m * n, m * n, n, n) = t;
    h.block(m * n, m * n, n, n).diagonal() += potentials[static_cast<std::size_t>(m)].cast<cdouble>();
  }
  for (const auto& b : radial) {
    const auto r = static_cast<Eigen::Index>(b.row);
    const auto c = static_cast<Eigen::Index>(b.col);
    h.block(r * n, c * n, n, n).diagonal() += b.values.cast<cdouble>();
    h.block(c * n, r * n, n, n).diagonal() += b.values.cast<cdouble>();
  }
  for (const auto& b : scalar) {
    const auto r = static_cast<Eigen::Index>(b.row);
    const auto c = static_cast<Eigen::Index>(b.col);
    h.block(r * n, c * n, n, n).diagonal().array() += b.value;
    h.block(c * n, r * n, n, n).diagonal().array() += std::conj(b.value);
  }
  return h;
}

SpectralRange spectral_range(const HamiltonianSnapshot& h, const SpatialGrid& grid, double margin) {
  const std::size_t n_ch = h.potentials.size();
  const auto n = static_cast<Eigen::Index>(grid.size());
  // Row sums of |off-diagonal| couplings, per channel and grid point.
  Eigen::MatrixXd coupling_sum = Eigen::MatrixXd::Zero(n, static_cast<Eigen::Index>(n_ch));
  for (const auto& b : h.radial) {
    coupling_sum.col(static_cast<Eigen::Index>(b.row)) += b.values.cwiseAbs();
    coupling_sum.col(static_cast<Eigen::Index>(b.col)) += b.values.cwiseAbs();
  }
  for (const auto& b : h.scalar) {
    coupling_sum.col(static_cast<Eigen::Index>(b.row)).array() += std::abs(b.value);
    coupling_sum.col(static_cast<Eigen::Index>(b.col)).array() += std::abs(b.value);
  }
  double upper = -std::numeric_limits<double>::infinity();
  double lower = std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < n_ch; ++m) {
    const auto col = static_cast<Eigen::Index>(m);
    upper = std::max(upper, (h.potentials[m] + coupling_sum.col(col)).maxCoeff());
    lower = std::min(lower, (h.potentials[m] - coupling_sum.col(col)).minCoeff());
  }
  const double k_max = grid.mode_wavenumber(grid.size());
  upper += k_max * k_max / (2.0 * h.mass);
  const double mid = 0.5 * (upper + lower);
  const double half = 0.5 * (upper - lower) * margin;
  return {mid - half, mid + half};
}

ChebyshevPropagator::ChebyshevPropagator(const SpatialGrid& grid, double mass)
    : kinetic_(grid, mass) {}

void ChebyshevPropagator::apply_hamiltonian(const HamiltonianSnapshot& h, const Eigen::MatrixXcd& in,
                                            Eigen::MatrixXcd& out) const {
  const auto n = in.rows();
  out.resize(n, in.cols());
  for (Eigen::Index m = 0; m < in.cols(); ++m) {
    kinetic_.apply(std::span<const cdouble>(in.col(m).data(), static_cast<std::size_t>(n)),
                   std::span<cdouble>(out.col(m).data(), static_cast<std::size_t>(n)));
    out.col(m).array() += h.potentials[static_cast<std::size_t>(m)].array() * in.col(m).array();
  }
  for (const auto& b : h.radial) {
    const auto r = static_cast<Eigen::Index>(b.row);
    const auto c = static_cast<Eigen::Index>(b.col);
    out.col(r).array() += b.values.array() * in.col(c).array();
    out.col(c).array() += b.values.array() * in.col(r).array();
  }
  for (const auto& b : h.scalar) {
    const auto r = static_cast<Eigen::Index>(b.row);
    const auto c = static_cast<Eigen::Index>(b.col);
    out.col(r) += b.value * in.col(c);
    out.col(c) += std::conj(b.value) * in.col(r);
  }
}

std::size_t chebyshev_order(double alpha, double tolerance) {
  const double cap = 10.0 * alpha + 100.0;
  auto k = static_cast<std::size_t>(std::max(1.0, std::ceil(alpha)));
  while (std::abs(2.0 * boost::math::cyl_bessel_j(static_cast<double>(k), alpha)) >= tolerance) {
    ++k;
    if (static_cast<double>(k) > cap) {
      throw PropagationError("Chebyshev order exceeds " + std::to_string(cap) +
                             "; check dt against the spectral range");
    }
  }
  return k;
}

void ChebyshevPropagator::update_coefficients(double alpha, double tolerance) {
  if (alpha == cached_alpha_ && tolerance == cached_tolerance_) return;
  const std::size_t order = chebyshev_order(alpha, tolerance);
  coefficients_.assign(order + 1, cdouble{});
  coefficients_[0] = boost::math::cyl_bessel_j(0.0, alpha);
  cdouble minus_i_pow{1.0, 0.0};
  for (std::size_t k = 1; k <= order; ++k) {
    minus_i_pow *= cdouble(0.0, -1.0);
    coefficients_[k] = 2.0 * minus_i_pow * boost::math::cyl_bessel_j(static_cast<double>(k), alpha);
  }
  cached_alpha_ = alpha;
  cached_tolerance_ = tolerance;
}

void ChebyshevPropagator::step(ChannelState& state, const HamiltonianSnapshot& h, double dt,
                               SpectralRange range, double tolerance) {
  if (!(dt >= 0.0)) throw std::invalid_argument("chebyshev step: dt must be non-negative");
  if (!(range.max > range.min)) throw std::invalid_argument("chebyshev step: empty spectral range");
#ifndef NDEBUG
  h.validate(state.grid());
#endif
  const double width = range.max - range.min;
  const double center = 0.5 * (range.max + range.min);
  update_coefficients(0.5 * width * dt, tolerance);

  // Normalized operator (2H - (E_max + E_min)) / (E_max - E_min).
  const double scale = 2.0 / width;
  const double shift = -2.0 * center / width;
  auto apply_normalized = [&](const Eigen::MatrixXcd& in, Eigen::MatrixXcd& out) {
    apply_hamiltonian(h, in, out);
    out = scale * out + shift * in;
  };

  phi_prev_ = state.packed();
  accum_ = coefficients_[0] * phi_prev_;
  if (coefficients_.size() > 1) {
    apply_normalized(phi_prev_, phi_curr_);
    accum_ += coefficients_[1] * phi_curr_;
  }
  for (std::size_t k = 2; k < coefficients_.size(); ++k) {
    apply_normalized(phi_curr_, scratch_);
    phi_next_ = 2.0 * scratch_ - phi_prev_;
    accum_ += coefficients_[k] * phi_next_;
    std::swap(phi_prev_, phi_curr_);
    std::swap(phi_curr_, phi_next_);
  }
  accum_ *= std::polar(1.0, -center * dt);
  if (!accum_.allFinite()) {
    throw PropagationError("non-finite amplitudes after Chebyshev step at t = " +
                           std::to_string(state.time) + " (spectral range violated?)");
  }
  for (std::size_t c = 0; c < state.channels.size(); ++c) {
    state.channels[c].amplitudes() = accum_.col(static_cast<Eigen::Index>(c));
  }
  state.time += dt;
}

ChannelState chebyshev_step(const ChannelState& state, const HamiltonianSnapshot& h, double dt,
                            SpectralRange range, double tolerance) {
  ChebyshevPropagator prop(state.grid(), h.mass);
  ChannelState out = state;
  prop.step(out, h, dt, range, tolerance);
  return out;
}

void PropagationConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("propagation: dt must be > 0");
  if (!(chebyshev_tolerance > 0.0 && chebyshev_tolerance < 1.0)) {
    throw std::invalid_argument("propagation: tolerance must lie in (0, 1)");
  }
  if (!(spectral_margin >= 1.0)) throw std::invalid_argument("propagation: margin must be >= 1");
  if (sample_stride == 0) throw std::invalid_argument("propagation: sample_stride must be >= 1");
  if (!(t_end >= t_start)) throw std::invalid_argument("propagation: t_end < t_start");
}

HamiltonianSnapshot Segment::at(double t) const {
  HamiltonianSnapshot h = hamiltonian;
  if (pulse) h.scalar.push_back({pulse->upper, pulse->lower, laser_coupling(*pulse, t)});
  return h;
}

SpectralRange Segment::bounds(const SpatialGrid& grid, double margin) const {
  HamiltonianSnapshot h = hamiltonian;
  if (pulse) {
    const double peak = std::abs(pulse->coupling) * envelope(*pulse, pulse->center);
    h.scalar.push_back({pulse->upper, pulse->lower, cdouble(peak, 0.0)});
  }
  return spectral_range(h, grid, margin);
}

PropagationResult propagate(const ChannelState& initial, const Segment& segment,
                            const PropagationConfig& config, const PropagationObserver& observer) {
  config.validate();
  const SpatialGrid& grid = initial.grid();
  if (initial.channel_count() != segment.hamiltonian.channel_count()) {
    throw std::invalid_argument("propagate: state and Hamiltonian channel counts differ");
  }
  segment.hamiltonian.validate(grid);

  const double span = config.t_end - config.t_start;
  const auto steps =
      span > 0.0 ? static_cast<std::size_t>(std::ceil(span / config.dt - 1e-9)) : std::size_t{0};
  const double dt = steps > 0 ? span / static_cast<double>(steps) : 0.0;

  ChebyshevPropagator prop(grid, segment.hamiltonian.mass);
  const SpectralRange range = segment.bounds(grid, config.spectral_margin);

  // The laser block, if any, is the last scalar block; only its value changes.
  HamiltonianSnapshot h = segment.hamiltonian;
  if (segment.pulse) h.scalar.push_back({segment.pulse->upper, segment.pulse->lower, cdouble{}});

  PropagationResult result{initial, 0, dt, 0.0, 0};
  ChannelState& state = result.state;
  state.time = config.t_start;
  const double norm0 = state.total_norm();
  if (observer.sample_initial && observer.on_sample) observer.on_sample(state);

  for (std::size_t s = 1; s <= steps; ++s) {
    const double t0 = config.t_start + static_cast<double>(s - 1) * dt;
    if (segment.pulse) h.scalar.back().value = laser_coupling(*segment.pulse, t0 + 0.5 * dt);
    prop.step(state, h, dt, range, config.chebyshev_tolerance);
    state.time = config.t_start + static_cast<double>(s) * dt;
    result.chebyshev_order = std::max(result.chebyshev_order, prop.last_order());

    const double drift = std::abs(state.total_norm() - norm0);
    result.max_norm_drift = std::max(result.max_norm_drift, drift);
    if (drift > kNormDriftAbort) {
      throw PropagationError("norm drift " + std::to_string(drift) + " exceeds 1e-6 at t = " +
                             std::to_string(state.time) + " au; reduce dt");
    }
    result.steps = s;
    if (observer.on_step) observer.on_step(state);
    if (observer.on_sample && (s % config.sample_stride == 0 || s == steps)) {
      observer.on_sample(state);
    }
  }
  return result;
}

double default_time_step(const std::vector<PulseSpec>& pulses, SpectralRange range) {
  double dt = 2.0 * std::numbers::pi / (10.0 * (range.max - range.min));
  for (const auto& p : pulses) {
    dt = std::min(dt, p.chirped_width / 2000.0);
    if (p.coupling != 0.0) dt = std::min(dt, chirped_rabi_period(p) / 200.0);
  }
  return dt;
}

}  // namespace vibronic
