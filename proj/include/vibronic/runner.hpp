#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vibronic/entanglement.hpp"
#include "vibronic/propagator.hpp"
#include "vibronic/scenario.hpp"

namespace vibronic {

inline constexpr const char* kVersion = "0.1.0";

/// Envelope fraction of either peak above which a split point is reported.
inline constexpr double kSplitOverlapWarning = 0.05;
/// Population share near either wall that counts as reaching the edge.
inline constexpr double kBoundaryAmplitudeWarning = 1e-6;
inline constexpr double kBoundaryRegionFraction = 0.05;

struct SegmentInfo {
  double t_begin;
  double t_end;
  std::optional<std::size_t> pulse;  // index into the expanded pulse list
  double envelope_begin = 0.0;       // f / f(t_P) of the active pulse at t_begin
  double envelope_end = 0.0;
};

struct SegmentPlan {
  std::vector<Segment> segments;
  std::vector<SegmentInfo> info;
  std::vector<std::string> warnings;
};

/// Time where two consecutive envelopes cross, i.e. where max(f_a, f_b) is
/// smallest between the two centers.
double envelope_split(const PulseSpec& a, const PulseSpec& b);

/// One RWA segment per pulse, dressed by that pulse's carrier, plus the
/// static couplings. Repetitions are clones shifted by the period.
SegmentPlan build_segments(const Scenario& scenario);

struct InitialState {
  ChannelState state;
  std::string description;
  std::optional<std::size_t> level;
  std::optional<double> level_energy;  // hartree
};

InitialState prepare_initial_state(const ScenarioConfig& config, const Scenario& scenario);

struct Snapshot {
  double requested_time;
  ChannelState state;
};

struct RunMetadata {
  std::string config_hash;
  std::string config_json;
  std::string initial_state;
  std::optional<std::size_t> initial_level;
  std::optional<double> initial_level_energy;
  std::vector<SegmentInfo> segments;
  std::vector<double> segment_dt;
  std::vector<std::size_t> chebyshev_orders;
  std::size_t steps = 0;
  double max_norm_drift = 0.0;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;
};

struct TimeSeriesOutput {
  std::vector<std::string> channel_names;
  std::vector<double> r_cuts;
  std::vector<EntanglementRecord> records;
  std::vector<Snapshot> snapshots;
  ChannelState final_state;
  RunMetadata metadata;
};

/// Propagates the scenario, measuring at every sample. Throws PropagationError
/// with the failing segment named if the propagator aborts.
TimeSeriesOutput run(const ScenarioConfig& config);

struct OutputPaths {
  std::filesystem::path time_series;
  std::filesystem::path metadata;
  std::vector<std::filesystem::path> snapshots;
};

OutputPaths output_paths(const ScenarioConfig& config, const TimeSeriesOutput& ts,
                         const std::filesystem::path& directory);

/// Writes the time-series CSV, the metadata JSON and one CSV per snapshot.
/// Throws IoError naming the path on failure.
OutputPaths write_outputs(const TimeSeriesOutput& ts, const ScenarioConfig& config,
                          const std::filesystem::path& directory);

std::vector<std::string> time_series_header(std::size_t channels, std::size_t r_cuts);
void write_time_series_csv(std::ostream& out, const TimeSeriesOutput& ts);
void write_snapshot_csv(std::ostream& out, const ChannelState& state,
                        const std::vector<std::string>& channel_names);

/// Period of the strongest periodogram peak of a uniformly or nearly
/// uniformly sampled signal (mean removed). Returns nullopt when the signal
/// is flat or too short.
std::optional<double> dominant_period(std::span<const double> times, std::span<const double> values);

}  // namespace vibronic
