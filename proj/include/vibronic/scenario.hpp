#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "vibronic/grid.hpp"
#include "vibronic/potentials.hpp"
#include "vibronic/propagator.hpp"
#include "vibronic/pulses.hpp"

namespace vibronic {

// Scenario documents are JSON with the unit carried in each key name
// (`_cm1`, `_ps`, `_a0`, `_amu`). ScenarioConfig mirrors the document in
// those units so that parse -> serialize -> parse is exact; build_scenario()
// converts everything to atomic units once.

struct GridConfig {
  double r_min_a0 = 0.0;
  double r_max_a0 = 0.0;
  std::size_t n_points = 0;
  friend bool operator==(const GridConfig&, const GridConfig&) = default;
};

struct MorseConfig {
  double d_e_cm1 = 0.0;
  double a_inv_a0 = 0.0;
  double r_e_a0 = 0.0;
  double v_asym_cm1 = 0.0;
  friend bool operator==(const MorseConfig&, const MorseConfig&) = default;
};

struct HarmonicConfig {
  double omega_cm1 = 0.0;
  double r_e_a0 = 0.0;
  double v_min_cm1 = 0.0;
  friend bool operator==(const HarmonicConfig&, const HarmonicConfig&) = default;
};

/// Either a file (relative paths resolve against the scenario's directory)
/// or inline (R_a0, V_cm1) rows.
struct TabulatedConfig {
  std::string file;
  std::vector<std::pair<double, double>> points;
  friend bool operator==(const TabulatedConfig&, const TabulatedConfig&) = default;
};

using PotentialConfig = std::variant<MorseConfig, HarmonicConfig, TabulatedConfig>;

struct ChannelConfig {
  std::string name;
  PotentialConfig potential;
  friend bool operator==(const ChannelConfig&, const ChannelConfig&) = default;
};

struct ConstantCouplingConfig {
  double w_cm1 = 0.0;
  friend bool operator==(const ConstantCouplingConfig&, const ConstantCouplingConfig&) = default;
};

struct GaussianCouplingConfig {
  double a_cm1 = 0.0;
  double r0_a0 = 0.0;
  double sigma_a0 = 0.0;
  friend bool operator==(const GaussianCouplingConfig&, const GaussianCouplingConfig&) = default;
};

struct CouplingConfig {
  std::string channel_a;
  std::string channel_b;
  std::variant<ConstantCouplingConfig, GaussianCouplingConfig> shape;
  friend bool operator==(const CouplingConfig&, const CouplingConfig&) = default;
};

struct PulseConfig {
  double w_l_cm1 = 0.0;
  double photon_energy_cm1 = 0.0;
  double t_p_ps = 0.0;
  double tau_c_ps = 0.0;
  double tau_l_ps = 0.0;
  double chirp_rate_per_ps2 = 0.0;
  std::string lower;
  std::string upper;
  friend bool operator==(const PulseConfig&, const PulseConfig&) = default;
};

struct PulseSequenceConfig {
  std::vector<PulseConfig> sequence;
  std::optional<double> repetition_period_ps;
  std::size_t repetitions = 0;
  friend bool operator==(const PulseSequenceConfig&, const PulseSequenceConfig&) = default;
};

struct EigenstateInit {
  std::string channel;
  /// Empty selects the last bound level.
  std::optional<std::size_t> level;
  friend bool operator==(const EigenstateInit&, const EigenstateInit&) = default;
};

struct GaussianInit {
  std::string channel;
  double center_a0 = 0.0;
  double width_a0 = 0.0;
  double momentum_au = 0.0;
  friend bool operator==(const GaussianInit&, const GaussianInit&) = default;
};

using InitialStateConfig = std::variant<EigenstateInit, GaussianInit>;

struct PropagationSettings {
  double t_start_ps = 0.0;
  double t_end_ps = 0.0;
  double dt_ps = 0.0;
  double chebyshev_tolerance = 1e-12;
  double spectral_margin = 1.1;
  friend bool operator==(const PropagationSettings&, const PropagationSettings&) = default;
};

struct ObservableConfig {
  std::size_t sample_stride = 1;
  std::vector<double> r_cut_a0;
  std::vector<double> snapshot_times_ps;
  friend bool operator==(const ObservableConfig&, const ObservableConfig&) = default;
};

struct OutputConfig {
  std::string directory = ".";
  std::string prefix = "run";
  friend bool operator==(const OutputConfig&, const OutputConfig&) = default;
};

struct ScenarioConfig {
  GridConfig grid;
  double reduced_mass_amu = 0.0;
  int rotational_j = 0;
  std::vector<ChannelConfig> channels;
  std::vector<CouplingConfig> couplings;
  PulseSequenceConfig pulses;
  InitialStateConfig initial_state;
  PropagationSettings propagation;
  ObservableConfig observables;
  OutputConfig output;
  /// Directory that relative table paths resolve against; not serialized.
  std::filesystem::path base_directory;

  std::size_t channel_index(std::string_view name) const;

  friend bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
    return a.grid == b.grid && a.reduced_mass_amu == b.reduced_mass_amu &&
           a.rotational_j == b.rotational_j && a.channels == b.channels &&
           a.couplings == b.couplings && a.pulses == b.pulses &&
           a.initial_state == b.initial_state && a.propagation == b.propagation &&
           a.observables == b.observables && a.output == b.output;
  }
};

struct StaticCoupling {
  std::size_t channel_a;
  std::size_t channel_b;
  CouplingCurve curve;
};

/// A scenario in atomic units with curves built and tables loaded.
struct Scenario {
  SpatialGrid grid;
  double mass;
  int J;
  std::vector<std::string> channel_names;
  std::vector<PotentialCurve> potentials;
  std::vector<StaticCoupling> couplings;
  PulseSequence pulses;
  PropagationConfig propagation;
  std::vector<double> r_cuts;
  std::vector<double> snapshot_times;
};

/// Parses and validates a scenario document. Every default is materialized in
/// the result (including dt_ps when omitted). Unknown fields are rejected.
/// Throws ConfigError naming the offending field path.
ScenarioConfig load_scenario(std::string_view document,
                             const std::filesystem::path& base_directory = {});
ScenarioConfig load_scenario_file(const std::filesystem::path& path);

/// Canonical JSON text of a config (keys sorted, units in key names).
std::string serialize_scenario(const ScenarioConfig& config, int indent = 2);

/// Throws ConfigError for invalid content.
Scenario build_scenario(const ScenarioConfig& config);

/// FNV-1a 64 of the canonical compact serialization, as 16 hex digits.
std::string scenario_hash(const ScenarioConfig& config);

}  // namespace vibronic
