#include "vibronic/runner.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>

#include <boost/math/tools/roots.hpp>

#include "vibronic/errors.hpp"
#include "vibronic/units.hpp"
#include "vibronic/vibrational_basis.hpp"

namespace vibronic {

namespace {

double log_envelope(const PulseSpec& p, double t) {
  const double x = (t - p.center) / p.chirped_width;
  return 0.5 * std::log(p.transform_limited / p.chirped_width) - 2.0 * std::numbers::ln2 * x * x;
}

double relative_envelope(const PulseSpec& p, double t) {
  return envelope(p, t) / envelope(p, p.center);
}

HamiltonianSnapshot segment_hamiltonian(const Scenario& s, const std::optional<PulseSpec>& pulse) {
  HamiltonianSnapshot h;
  h.mass = s.mass;
  for (std::size_t i = 0; i < s.potentials.size(); ++i) {
    PotentialCurve curve = s.potentials[i];
    if (pulse && pulse->lower == i) curve = curve.dressed(pulse->photon_energy);
    Eigen::VectorXd v = curve.sample(s.grid, s.mass);
    if (s.J != 0) v += centrifugal_term(s.grid, s.mass, s.J);
    h.potentials.push_back(std::move(v));
  }
  for (const auto& k : s.couplings) {
    h.radial.push_back({k.channel_a, k.channel_b, k.curve.sample(s.grid)});
  }
  return h;
}

std::string ps_text(double t_au) {
  std::ostringstream out;
  out << units::time_from_internal(t_au) << " ps";
  return out.str();
}

}  // namespace

double envelope_split(const PulseSpec& a, const PulseSpec& b) {
  if (!(b.center > a.center)) throw std::invalid_argument("envelope_split: centers not ordered");
  const auto g = [&](double t) { return log_envelope(a, t) - log_envelope(b, t); };
  // g falls monotonically between the centers; without a sign change the
  // smaller of the two endpoint maxima wins.
  const double ga = g(a.center);
  const double gb = g(b.center);
  if (ga <= 0.0) return a.center;
  if (gb >= 0.0) return b.center;
  boost::uintmax_t iterations = 200;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      g, a.center, b.center, ga, gb, boost::math::tools::eps_tolerance<double>(50), iterations);
  return 0.5 * (lo + hi);
}

SegmentPlan build_segments(const Scenario& s) {
  SegmentPlan plan;
  const double t0 = s.propagation.t_start;
  const double t1 = s.propagation.t_end;
  const std::vector<PulseSpec>& base = s.pulses.pulses();

  if (base.empty()) {
    if (t1 > t0) {
      plan.segments.push_back({t0, t1, segment_hamiltonian(s, std::nullopt), std::nullopt});
      plan.info.push_back({t0, t1, std::nullopt, 0.0, 0.0});
    }
    return plan;
  }

  // Boundaries of one period of the sequence; clones shift every entry.
  const std::size_t n = base.size();
  std::vector<double> cuts(n + 1);
  cuts[0] = t0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double split = envelope_split(base[i], base[i + 1]);
    cuts[i + 1] = split;
    const double fa = relative_envelope(base[i], split);
    const double fb = relative_envelope(base[i + 1], split);
    if (fa > kSplitOverlapWarning || fb > kSplitOverlapWarning) {
      std::ostringstream msg;
      msg << "pulses " << i << " and " << i + 1 << " overlap at the split " << ps_text(split)
          << ": envelopes are " << fa << " and " << fb << " of their peaks";
      plan.warnings.push_back(msg.str());
    }
  }
  const auto period = s.pulses.repetition_period();
  const std::size_t clones = 1 + s.pulses.repetitions();
  cuts[n] = period ? t0 + *period : t1;

  // Repetition boundary warnings between the last pulse and the next clone.
  if (period && clones > 1) {
    PulseSpec next = base.front();
    next.center += *period;
    const double boundary = cuts[n];
    const double fa = relative_envelope(base.back(), boundary);
    const double fb = relative_envelope(next, boundary);
    if (fa > kSplitOverlapWarning || fb > kSplitOverlapWarning) {
      std::ostringstream msg;
      msg << "repetition boundary " << ps_text(boundary) << " cuts a pulse: envelopes are "
          << fa << " and " << fb << " of their peaks";
      plan.warnings.push_back(msg.str());
    }
  }

  for (std::size_t r = 0; r < clones; ++r) {
    const double shift = period ? static_cast<double>(r) * *period : 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      PulseSpec p = base[i];
      p.center += shift;
      double begin = cuts[i] + shift;
      double end = cuts[i + 1] + shift;
      if (r + 1 == clones && i + 1 == n) end = t1;
      begin = std::max(begin, t0);
      end = std::min(end, t1);
      if (!(end > begin)) continue;
      plan.segments.push_back({begin, end, segment_hamiltonian(s, p), p});
      plan.info.push_back({begin, end, r * n + i, relative_envelope(p, begin),
                           relative_envelope(p, end)});
    }
  }
  return plan;
}

InitialState prepare_initial_state(const ScenarioConfig& config, const Scenario& s) {
  const std::size_t n_ch = s.channel_names.size();
  InitialState out{ChannelState{s.propagation.t_start, {}}, {}, std::nullopt, std::nullopt};
  for (std::size_t i = 0; i < n_ch; ++i) out.state.channels.emplace_back(s.grid);

  if (const auto* e = std::get_if<EigenstateInit>(&config.initial_state)) {
    const std::size_t ch = config.channel_index(e->channel);
    std::size_t v = 0;
    VibrationalBasis basis =
        e->level ? solve_levels(s.grid, s.potentials[ch], s.mass, s.J, LevelCount{*e->level + 1}, ch)
                 : solve_levels(s.grid, s.potentials[ch], s.mass, s.J, FullSpectrum{}, ch);
    v = e->level ? *e->level : last_bound_level(basis);
    const VibrationalLevel& level = basis.level(v);
    out.state.channels[ch] = level.wavefunction;
    out.level = v;
    out.level_energy = level.energy;
    std::ostringstream d;
    d << "eigenstate v=" << v << (e->level ? "" : " (last bound)") << " of channel " << e->channel;
    out.description = d.str();
  } else {
    const auto& g = std::get<GaussianInit>(config.initial_state);
    const std::size_t ch = config.channel_index(g.channel);
    out.state.channels[ch] = gaussian_wavepacket(s.grid, g.center_a0, g.width_a0, g.momentum_au);
    out.description = "gaussian wavepacket on channel " + g.channel;
  }
  return out;
}

namespace {

// Share of the total population sitting in the outer 5% of points at
// either wall.
double edge_fraction(const ChannelState& state) {
  const std::size_t n = state.grid().size();
  const std::size_t edge = std::max<std::size_t>(1, static_cast<std::size_t>(
                                                        std::ceil(kBoundaryRegionFraction * n)));
  double total = 0.0, outer = 0.0;
  for (const auto& ch : state.channels) {
    const Eigen::VectorXcd& a = ch.amplitudes();
    const auto count = static_cast<Eigen::Index>(edge);
    total += a.squaredNorm();
    outer += a.head(count).squaredNorm() + a.tail(count).squaredNorm();
  }
  return total > 0.0 ? outer / total : 0.0;
}

}  // namespace

TimeSeriesOutput run(const ScenarioConfig& config) {
  const auto wall_start = std::chrono::steady_clock::now();
  const Scenario s = build_scenario(config);
  SegmentPlan plan = build_segments(s);
  InitialState init = prepare_initial_state(config, s);

  TimeSeriesOutput ts;
  ts.channel_names = s.channel_names;
  ts.r_cuts = s.r_cuts;
  RunMetadata& meta = ts.metadata;
  meta.config_hash = scenario_hash(config);
  meta.config_json = serialize_scenario(config, -1);
  meta.initial_state = init.description;
  meta.initial_level = init.level;
  meta.initial_level_energy = init.level_energy;
  meta.segments = plan.info;
  meta.warnings = plan.warnings;

  const double norm0 = init.state.total_norm();
  bool edge_warned = false;
  auto record = [&](const ChannelState& state) {
    ts.records.push_back(measure(state, s.r_cuts));
    if (!edge_warned && edge_fraction(state) > kBoundaryAmplitudeWarning) {
      edge_warned = true;
      meta.warnings.push_back("wavepacket amplitude reaches the grid edge at t = " +
                              ps_text(state.time) + "; enlarge the grid");
    }
  };

  // Snapshots go to the step nearest each requested time.
  std::vector<double> best_gap(s.snapshot_times.size(), std::numeric_limits<double>::infinity());
  for (double t : s.snapshot_times) ts.snapshots.push_back({t, init.state});
  auto consider_snapshots = [&](const ChannelState& state) {
    for (std::size_t i = 0; i < s.snapshot_times.size(); ++i) {
      const double gap = std::abs(state.time - s.snapshot_times[i]);
      if (gap < best_gap[i]) {
        best_gap[i] = gap;
        ts.snapshots[i].state = state;
      }
    }
  };

  ChannelState state = init.state;
  if (plan.segments.empty()) record(state);
  consider_snapshots(state);
  for (std::size_t k = 0; k < plan.segments.size(); ++k) {
    const Segment& seg = plan.segments[k];
    PropagationConfig pc = s.propagation;
    pc.t_start = seg.t_begin;
    pc.t_end = seg.t_end;
    PropagationObserver obs;
    obs.sample_initial = (k == 0);
    obs.on_sample = record;
    if (!s.snapshot_times.empty()) obs.on_step = consider_snapshots;
    state.time = seg.t_begin;
    try {
      PropagationResult r = propagate(state, seg, pc, obs);
      state = std::move(r.state);
      meta.steps += r.steps;
      meta.segment_dt.push_back(r.dt);
      meta.chebyshev_orders.push_back(r.chebyshev_order);
    } catch (const PropagationError& e) {
      throw PropagationError("segment " + std::to_string(k) + " [" + ps_text(seg.t_begin) + ", " +
                             ps_text(seg.t_end) + "]: " + e.what());
    }
    meta.max_norm_drift = std::max(meta.max_norm_drift, std::abs(state.total_norm() - norm0));
  }
  ts.final_state = std::move(state);
  meta.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return ts;
}

std::optional<double> dominant_period(std::span<const double> t, std::span<const double> x) {
  const std::size_t n = std::min(t.size(), x.size());
  if (n < 4) return std::nullopt;
  const double span = t[n - 1] - t[0];
  if (!(span > 0.0)) return std::nullopt;

  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) mean += x[i];
  mean /= static_cast<double>(n);
  double spread = 0.0;
  for (std::size_t i = 0; i < n; ++i) spread = std::max(spread, std::abs(x[i] - mean));
  if (spread < 1e-14) return std::nullopt;

  const auto power = [&](double omega) {
    cdouble acc{};
    for (std::size_t i = 0; i < n; ++i) acc += (x[i] - mean) * std::polar(1.0, -omega * t[i]);
    return std::norm(acc);
  };

  // Scan from one cycle per record to the Nyquist frequency with 8x
  // oversampling, then refine the best bin by golden-section search.
  const double d_omega = 2.0 * std::numbers::pi / span;
  const double nyquist = std::numbers::pi * static_cast<double>(n - 1) / span;
  const double step = d_omega / 8.0;
  double best = d_omega, best_power = -1.0;
  for (double w = d_omega; w <= nyquist; w += step) {
    const double p = power(w);
    if (p > best_power) {
      best_power = p;
      best = w;
    }
  }
  double lo = std::max(best - step, 0.5 * d_omega), hi = best + step;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = hi - phi * (hi - lo), b = lo + phi * (hi - lo);
  double pa = power(a), pb = power(b);
  for (int it = 0; it < 60; ++it) {
    if (pa > pb) {
      hi = b;
      b = a;
      pb = pa;
      a = hi - phi * (hi - lo);
      pa = power(a);
    } else {
      lo = a;
      a = b;
      pa = pb;
      b = lo + phi * (hi - lo);
      pb = power(b);
    }
  }
  return 2.0 * std::numbers::pi / (0.5 * (lo + hi));
}

}  // namespace vibronic
