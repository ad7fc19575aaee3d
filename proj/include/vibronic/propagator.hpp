#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "vibronic/grid.hpp"
#include "vibronic/pulses.hpp"

namespace vibronic {

/// Channel wavepackets at one instant. All channels share one grid.
struct ChannelState {
  double time = 0.0;
  std::vector<RadialWavefunction> channels;

  std::size_t channel_count() const noexcept { return channels.size(); }
  const SpatialGrid& grid() const { return channels.at(0).grid(); }
  double total_norm() const;

  /// Amplitudes packed column-per-channel (n_points x N).
  Eigen::MatrixXcd packed() const;
  static ChannelState unpack(const SpatialGrid& grid, double time, const Eigen::MatrixXcd& m);
};

/// Static R-dependent coupling: blocks (row, col) and (col, row) both equal `values`.
struct RadialCouplingBlock {
  std::size_t row;
  std::size_t col;
  Eigen::VectorXd values;
};

/// Scalar coupling: block (row, col) = value, block (col, row) = conj(value).
struct ScalarCouplingBlock {
  std::size_t row;
  std::size_t col;
  cdouble value;
};

/// H at one instant: T + V_m on the diagonal, couplings off it. Each coupling
/// is stored once per channel pair and its transpose block is implied as the
/// conjugate, so the operator is Hermitian by construction.
struct HamiltonianSnapshot {
  double mass = 1.0;
  std::vector<Eigen::VectorXd> potentials;
  std::vector<RadialCouplingBlock> radial;
  std::vector<ScalarCouplingBlock> scalar;

  std::size_t channel_count() const noexcept { return potentials.size(); }

  /// Throws std::invalid_argument on bad indices, sizes, self-coupling or
  /// non-finite entries.
  void validate(const SpatialGrid& grid) const;

  /// Dense (N n) x (N n) matrix, channel-major blocks. For tests and small systems.
  Eigen::MatrixXcd dense_matrix(const KineticOperator& kinetic) const;
};

struct SpectralRange {
  double min;
  double max;
};

/// Gershgorin-style bounds, inflated by `margin` about the midpoint:
/// max >= T_max + max_k,m (V_m + sum |couplings|), min <= min_k,m (V_m - sum |couplings|).
SpectralRange spectral_range(const HamiltonianSnapshot& h, const SpatialGrid& grid,
                             double margin = 1.1);

/// Short-time Chebyshev expansion of exp(-i H dt). Holds the kinetic operator
/// and work buffers for one run; not shared between threads.
class ChebyshevPropagator {
 public:
  ChebyshevPropagator(const SpatialGrid& grid, double mass);

  const KineticOperator& kinetic() const noexcept { return kinetic_; }

  /// out = H in, with in/out packed column-per-channel.
  void apply_hamiltonian(const HamiltonianSnapshot& h, const Eigen::MatrixXcd& in,
                         Eigen::MatrixXcd& out) const;

  /// Advances `state` in place by dt (state.time += dt). Throws
  /// PropagationError on non-finite amplitudes or when the expansion order
  /// would exceed 10 alpha + 100.
  void step(ChannelState& state, const HamiltonianSnapshot& h, double dt, SpectralRange range,
            double tolerance);

  /// Number of Chebyshev terms used by the last step.
  std::size_t last_order() const noexcept { return coefficients_.size(); }

 private:
  void update_coefficients(double alpha, double tolerance);

  KineticOperator kinetic_;
  std::vector<cdouble> coefficients_;
  double cached_alpha_ = -1.0;
  double cached_tolerance_ = -1.0;
  Eigen::MatrixXcd phi_prev_, phi_curr_, phi_next_, scratch_, accum_;
};

/// One-shot convenience around ChebyshevPropagator::step.
ChannelState chebyshev_step(const ChannelState& state, const HamiltonianSnapshot& h, double dt,
                            SpectralRange range, double tolerance = 1e-12);

/// Expansion order for argument alpha: first K >= max(1, ceil(alpha)) with
/// |2 J_K(alpha)| < tolerance.
std::size_t chebyshev_order(double alpha, double tolerance);

struct PropagationConfig {
  double dt;
  double t_start;
  double t_end;
  double chebyshev_tolerance = 1e-12;
  double spectral_margin = 1.1;
  std::size_t sample_stride = 1;

  /// Throws std::invalid_argument on dt <= 0, tolerance outside (0, 1),
  /// margin < 1, stride 0 or t_end < t_start.
  void validate() const;
};

/// A time window with one fixed set of dressed potentials and static
/// couplings, plus at most one active laser pulse in its carrier frame.
struct Segment {
  double t_begin = 0.0;
  double t_end = 0.0;
  HamiltonianSnapshot hamiltonian;
  std::optional<PulseSpec> pulse;

  /// H(t) including the laser block -W_L f(t) exp(-i phi(t)) at (upper, lower).
  HamiltonianSnapshot at(double t) const;
  /// Spectral bounds valid for every t (laser block at its peak magnitude).
  SpectralRange bounds(const SpatialGrid& grid, double margin) const;
};

struct PropagationObserver {
  /// Receives the state every sample_stride steps and after the last step.
  std::function<void(const ChannelState&)> on_sample;
  /// Receives the state after every step.
  std::function<void(const ChannelState&)> on_step;
  /// Also sample the initial state before the first step.
  bool sample_initial = true;
};

struct PropagationResult {
  ChannelState state;
  std::size_t steps = 0;
  double dt = 0.0;  // effective step, span / steps
  double max_norm_drift = 0.0;
  std::size_t chebyshev_order = 0;
};

/// Integrates from config.t_start to config.t_end with H frozen at each step
/// midpoint. The step is shrunk to span / ceil(span / dt) so the run ends on
/// t_end. Throws PropagationError if the norm drifts by more than 1e-6.
PropagationResult propagate(const ChannelState& initial, const Segment& segment,
                            const PropagationConfig& config,
                            const PropagationObserver& observer = {});

inline constexpr double kNormDriftAbort = 1e-6;

/// min(tau_C / 2000, T_Rabi^C / 200, 2 pi / (10 (E_max - E_min))) over the
/// given pulses; pulses may be empty.
double default_time_step(const std::vector<PulseSpec>& pulses, SpectralRange range);

}  // namespace vibronic
