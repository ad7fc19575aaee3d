#include <charconv>
#include <fstream>
#include <ostream>
#include <system_error>

#include <json.hpp>

#include "vibronic/errors.hpp"
#include "vibronic/format.hpp"
#include "vibronic/runner.hpp"
#include "vibronic/units.hpp"

namespace vibronic {

std::string format_double(double value) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

std::string pair_label(std::size_t m, std::size_t n, std::size_t channels) {
  if (channels < 10) return std::to_string(m + 1) + std::to_string(n + 1);
  return std::to_string(m + 1) + "_" + std::to_string(n + 1);
}

}  // namespace

std::vector<std::string> time_series_header(std::size_t channels, std::size_t r_cuts) {
  std::vector<std::string> h{"t_ps"};
  for (std::size_t n = 0; n < channels; ++n) h.push_back("P_" + std::to_string(n + 1));
  for (std::size_t j = 0; j < r_cuts; ++j) {
    const std::string suffix = r_cuts > 1 ? "_r" + std::to_string(j + 1) : "";
    for (std::size_t n = 0; n < channels; ++n) {
      h.push_back("Ppart_" + std::to_string(n + 1) + suffix);
    }
  }
  for (std::size_t m = 0; m < channels; ++m) {
    for (std::size_t n = m + 1; n < channels; ++n) h.push_back("ov2_" + pair_label(m, n, channels));
  }
  for (std::size_t n = 0; n < channels; ++n) h.push_back("lambda_" + std::to_string(n + 1));
  for (const char* c : {"svn_exact_bits", "svn_pop_bits", "purity", "linear_entropy", "renyi2_bits"}) {
    h.emplace_back(c);
  }
  return h;
}

void write_time_series_csv(std::ostream& out, const TimeSeriesOutput& ts) {
  const std::size_t n_ch = ts.channel_names.size();
  const auto header = time_series_header(n_ch, ts.r_cuts.size());
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& r : ts.records) {
    out << format_double(units::time_from_internal(r.time));
    const auto put = [&](double v) { out << ',' << format_double(v); };
    for (double p : r.populations) put(p);
    for (const auto& cut : r.partial_populations) {
      for (double p : cut) put(p);
    }
    for (double o : r.overlap_squared) put(o);
    for (double l : r.schmidt) put(l);
    put(r.svn_exact);
    put(r.svn_population);
    put(r.purity);
    put(r.linear_entropy);
    put(r.renyi2);
    out << '\n';
  }
}

void write_snapshot_csv(std::ostream& out, const ChannelState& state,
                        const std::vector<std::string>& names) {
  out << "R_a0";
  for (const auto& n : names) out << ",re_" << n << ",im_" << n << ",abs2_" << n;
  out << '\n';
  const SpatialGrid& grid = state.grid();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    out << format_double(grid.point(k));
    for (const auto& ch : state.channels) {
      const cdouble a = ch.amplitudes()[static_cast<Eigen::Index>(k)];
      out << ',' << format_double(a.real()) << ',' << format_double(a.imag()) << ','
          << format_double(std::norm(a));
    }
    out << '\n';
  }
}

OutputPaths output_paths(const ScenarioConfig& config, const TimeSeriesOutput& ts,
                         const std::filesystem::path& dir) {
  const std::string& prefix = config.output.prefix;
  OutputPaths p{dir / (prefix + "_timeseries.csv"), dir / (prefix + "_metadata.json"), {}};
  for (std::size_t i = 0; i < ts.snapshots.size(); ++i) {
    const double t = units::time_from_internal(ts.snapshots[i].requested_time);
    p.snapshots.push_back(dir / (prefix + "_snapshot_" + std::to_string(i) + "_t" +
                                 format_double(t) + "ps.csv"));
  }
  return p;
}

namespace {

std::ofstream open_for_writing(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void close_checked(std::ofstream& out, const std::filesystem::path& path) {
  out.close();
  if (!out) throw IoError("failed while writing " + path.string());
}

nlohmann::ordered_json metadata_json(const TimeSeriesOutput& ts, const OutputPaths& paths) {
  using units::time_from_internal;
  const RunMetadata& m = ts.metadata;
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["config_hash"] = m.config_hash;
  j["config"] = nlohmann::ordered_json::parse(m.config_json);
  j["channels"] = ts.channel_names;
  j["initial_state"] = {{"description", m.initial_state}};
  if (m.initial_level) j["initial_state"]["level"] = *m.initial_level;
  if (m.initial_level_energy) {
    j["initial_state"]["energy_cm1"] = units::energy_from_internal(*m.initial_level_energy);
  }
  j["segments"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m.segments.size(); ++i) {
    const SegmentInfo& s = m.segments[i];
    nlohmann::ordered_json sj = {{"t_begin_ps", time_from_internal(s.t_begin)},
                                 {"t_end_ps", time_from_internal(s.t_end)}};
    if (s.pulse) {
      sj["pulse"] = *s.pulse;
      sj["envelope_begin"] = s.envelope_begin;
      sj["envelope_end"] = s.envelope_end;
    } else {
      sj["pulse"] = nullptr;
    }
    if (i < m.segment_dt.size()) sj["dt_ps"] = time_from_internal(m.segment_dt[i]);
    if (i < m.chebyshev_orders.size()) sj["chebyshev_order"] = m.chebyshev_orders[i];
    j["segments"].push_back(sj);
  }
  j["steps"] = m.steps;
  j["samples"] = ts.records.size();
  j["max_norm_drift"] = m.max_norm_drift;
  j["wall_seconds"] = m.wall_seconds;
  j["warnings"] = m.warnings;
  j["time_series"] = paths.time_series.filename().string();
  j["snapshots"] = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < paths.snapshots.size(); ++i) {
    j["snapshots"].push_back(
        {{"requested_t_ps", time_from_internal(ts.snapshots[i].requested_time)},
         {"t_ps", time_from_internal(ts.snapshots[i].state.time)},
         {"file", paths.snapshots[i].filename().string()}});
  }
  return j;
}

}  // namespace

OutputPaths write_outputs(const TimeSeriesOutput& ts, const ScenarioConfig& config,
                          const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());

  const OutputPaths paths = output_paths(config, ts, dir);
  {
    auto out = open_for_writing(paths.time_series);
    write_time_series_csv(out, ts);
    close_checked(out, paths.time_series);
  }
  for (std::size_t i = 0; i < paths.snapshots.size(); ++i) {
    auto out = open_for_writing(paths.snapshots[i]);
    write_snapshot_csv(out, ts.snapshots[i].state, ts.channel_names);
    close_checked(out, paths.snapshots[i]);
  }
  {
    auto out = open_for_writing(paths.metadata);
    out << metadata_json(ts, paths).dump(2) << '\n';
    close_checked(out, paths.metadata);
  }
  return paths;
}

}  // namespace vibronic
