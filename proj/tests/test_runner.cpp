#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vibronic/errors.hpp"
#include "vibronic/runner.hpp"
#include "vibronic/units.hpp"

using namespace vibronic;
using nlohmann::json;

namespace {

json scenario_json(const std::string& name) {
  std::ifstream in(std::filesystem::path(VIBRONIC_SCENARIO_DIR) / name);
  REQUIRE(in);
  return json::parse(in);
}

ScenarioConfig shortened(const std::string& name, double t_end_ps) {
  json j = scenario_json(name);
  j["propagation"]["t_end_ps"] = t_end_ps;
  j["observables"].erase("snapshot_times_ps");
  return load_scenario(j.dump());
}

// Two pulses at 150 and 275 ps, optionally repeated after 1800 ps.
json pulse_pair(double tau_c, std::optional<double> period) {
  json j = scenario_json("rabi_two_channel.json");
  j.erase("couplings");
  j["pulses"] = {{"sequence",
                  {{{"w_l_cm1", 13.17}, {"photon_energy_cm1", 100.0}, {"t_p_ps", 150.0}, {"tau_c_ps", tau_c},
                    {"tau_l_ps", 10.0}, {"chirp_sign", "negative"}, {"lower", "g"}, {"upper", "e"}},
                   {{"w_l_cm1", 13.17}, {"photon_energy_cm1", 100.0}, {"t_p_ps", 275.0}, {"tau_c_ps", tau_c},
                    {"tau_l_ps", 10.0}, {"chirp_sign", "negative"}, {"lower", "e"}, {"upper", "g"}}}}};
  if (period) j["pulses"]["repetition_period_ps"] = *period;
  j["propagation"] = {{"t_end_ps", period ? 3700.0 : 500.0}, {"dt_ps", 0.01}};
  j["observables"] = json::object();
  return j;
}

double ps(double t_au) { return units::time_from_internal(t_au); }

}  // namespace

TEST_SUITE("simulation_runner") {
  TEST_CASE("single pulse gives one segment") {
    json j = pulse_pair(40.0, std::nullopt);
    j["pulses"]["sequence"].erase(1);
    const Scenario s = build_scenario(load_scenario(j.dump()));
    const SegmentPlan plan = build_segments(s);
    REQUIRE(plan.segments.size() == 1);
    CHECK(plan.segments[0].t_begin == s.propagation.t_start);
    CHECK(plan.segments[0].t_end == s.propagation.t_end);
    REQUIRE(plan.segments[0].pulse.has_value());
    CHECK(plan.warnings.empty());

    const Scenario free = build_scenario(shortened("zero_coupling.json", 0.1));
    const SegmentPlan none = build_segments(free);
    REQUIRE(none.segments.size() == 1);
    CHECK_FALSE(none.segments[0].pulse.has_value());
  }

  TEST_CASE("two pulses split where the envelopes cross") {
    const Scenario s = build_scenario(load_scenario(pulse_pair(40.0, std::nullopt).dump()));
    const SegmentPlan plan = build_segments(s);
    REQUIRE(plan.segments.size() == 2);
    const double split = ps(plan.segments[0].t_end);
    CHECK(split > 150.0);
    CHECK(split < 275.0);
    // Equal widths: the crossing is the midpoint, where the product f1 f2 is also extremal.
    CHECK(split == doctest::Approx(212.5).epsilon(1e-9));
    CHECK(plan.segments[1].t_begin == plan.segments[0].t_end);
    CHECK(plan.segments[0].pulse->lower == 0);
    CHECK(plan.segments[1].pulse->lower == 1);
    // The first segment raises g by the photon energy, the second raises e.
    const double shift = units::energy_to_internal(100.0);
    const auto& h0 = plan.segments[0].hamiltonian;
    const auto& h1 = plan.segments[1].hamiltonian;
    CHECK(h0.potentials[0][10] - h1.potentials[0][10] == doctest::Approx(shift).epsilon(1e-12));
    CHECK(h1.potentials[1][10] - h0.potentials[1][10] == doctest::Approx(shift).epsilon(1e-12));
    CHECK(plan.warnings.empty());
    CHECK(plan.info[0].envelope_end < kSplitOverlapWarning);

    // Unequal widths move the crossing toward the narrower pulse.
    const PulseSpec a{1.0, 0.0, 0.0, 2.0, 1.0}, b{1.0, 0.0, 10.0, 4.0, 1.0};
    const double t = envelope_split(a, b);
    CHECK(envelope(a, t) == doctest::Approx(envelope(b, t)).epsilon(1e-10));
    CHECK(t < 5.0);
  }

  TEST_CASE("overlapping pulses are reported, not rejected") {
    const Scenario s = build_scenario(load_scenario(pulse_pair(150.0, std::nullopt).dump()));
    const SegmentPlan plan = build_segments(s);
    CHECK(plan.segments.size() == 2);
    CHECK_FALSE(plan.warnings.empty());
  }

  TEST_CASE("repetition clones the segments shifted by the period") {
    const Scenario s = build_scenario(load_scenario(pulse_pair(40.0, 1800.0).dump()));
    const SegmentPlan plan = build_segments(s);
    REQUIRE(plan.segments.size() == 4);
    const double period = units::time_to_internal(1800.0);
    CHECK(plan.segments[2].pulse->center - plan.segments[0].pulse->center == doctest::Approx(period).epsilon(1e-15));
    CHECK(plan.segments[3].pulse->center - plan.segments[1].pulse->center == doctest::Approx(period).epsilon(1e-15));
    CHECK(ps(plan.segments[2].t_begin) == doctest::Approx(1800.0).epsilon(1e-12));
    CHECK(plan.segments[2].t_end - plan.segments[0].t_end == doctest::Approx(period).epsilon(1e-12));
    CHECK(ps(plan.segments[2].pulse->center) == doctest::Approx(1950.0).epsilon(1e-12));
    CHECK(ps(plan.segments[3].pulse->center) == doctest::Approx(2075.0).epsilon(1e-12));
    CHECK(plan.segments.back().t_end == s.propagation.t_end);
    for (std::size_t i = 1; i < plan.segments.size(); ++i) {
      CHECK(plan.segments[i].t_begin == plan.segments[i - 1].t_end);
    }
  }

  TEST_CASE("zero coupling keeps the state separable") {
    const TimeSeriesOutput ts = run(load_scenario(scenario_json("zero_coupling.json").dump()));
    REQUIRE(ts.records.size() > 10);
    for (const auto& r : ts.records) {
      CHECK(std::abs(r.svn_exact) <= 1e-12);
      CHECK(std::abs(r.linear_entropy) <= 1e-12);
      CHECK(r.populations[1] == 0.0);
    }
    CHECK(ts.metadata.initial_level == 1u);
    CHECK(ts.metadata.warnings.empty());
  }

  TEST_CASE("coupled run conserves norm and keeps times increasing") {
    const TimeSeriesOutput ts = run(shortened("rabi_two_channel.json", 0.3));
    const auto& last = ts.records.back();
    CHECK(std::abs(last.populations[0] + last.populations[1] - 1.0) <= 1e-9);
    CHECK(ps(last.time) == doctest::Approx(0.3).epsilon(1e-12));
    for (std::size_t i = 1; i < ts.records.size(); ++i) CHECK(ts.records[i].time > ts.records[i - 1].time);
    CHECK(ts.metadata.max_norm_drift <= 1e-9);
    CHECK(ts.records.front().time == 0.0);
    // Every fourth step, plus the initial state and the final step.
    CHECK(ts.records.size() == ts.metadata.steps / 4 + 1 + (ts.metadata.steps % 4 != 0));
  }

  TEST_CASE("segment handoff conserves norm") {
    json j = scenario_json("rabi_two_channel.json");
    j["pulses"] = {{"sequence",
                    {{{"w_l_cm1", 60.0}, {"photon_energy_cm1", 84.7}, {"t_p_ps", 0.1}, {"tau_c_ps", 0.08},
                      {"tau_l_ps", 0.05}, {"chirp_sign", "negative"}, {"lower", "g"}, {"upper", "e"}},
                     {{"w_l_cm1", 60.0}, {"photon_energy_cm1", 84.7}, {"t_p_ps", 0.25}, {"tau_c_ps", 0.08},
                      {"tau_l_ps", 0.05}, {"chirp_sign", "positive"}, {"lower", "g"}, {"upper", "e"}}}},
                   {"repetition_period_ps", 0.35}};
    j["propagation"] = {{"t_end_ps", 0.7}, {"dt_ps", 0.001}};
    j["observables"] = {{"sample_stride", 5}};
    const TimeSeriesOutput ts = run(load_scenario(j.dump()));
    CHECK(ts.metadata.segments.size() == 4);
    CHECK(ts.metadata.max_norm_drift <= 1e-9);
    for (std::size_t i = 1; i < ts.records.size(); ++i) CHECK(ts.records[i].time > ts.records[i - 1].time);
    double peak = 0.0;
    for (const auto& r : ts.records) peak = std::max(peak, r.populations[1]);
    CHECK(peak > 1e-3);
    CHECK(std::abs(ts.final_state.total_norm() - 1.0) <= 1e-9);
  }

  TEST_CASE("three channels stay under the L bound") {
    const TimeSeriesOutput ts = run(shortened("three_channel.json", 0.5));
    double peak = 0.0;
    for (const auto& r : ts.records) {
      CHECK(r.linear_entropy <= 2.0 / 3.0);
      CHECK(r.purity >= 1.0 / 3.0);
      CHECK(r.schmidt.size() == 3);
      CHECK(r.partial_populations.size() == 2);
      peak = std::max(peak, r.linear_entropy);
    }
    CHECK(peak > 1e-3);
  }

  TEST_CASE("initial states") {
    json j = scenario_json("zero_coupling.json");
    j["initial_state"] = {{"kind", "eigenstate"}, {"channel", "e"}, {"level", "last_bound"}};
    const ScenarioConfig c = load_scenario(j.dump());
    const InitialState init = prepare_initial_state(c, build_scenario(c));
    REQUIRE(init.level.has_value());
    CHECK(*init.level > 0u);
    CHECK(init.state.channels[0].norm_squared() == 0.0);
    CHECK(init.state.channels[1].norm_squared() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(init.description.find("last") != std::string::npos);

    j["initial_state"] = {{"kind", "gaussian"}, {"channel", "g"}, {"center_a0", 5.5}, {"width_a0", 0.2}, {"momentum_au", 3.0}};
    const ScenarioConfig g = load_scenario(j.dump());
    const InitialState gi = prepare_initial_state(g, build_scenario(g));
    CHECK_FALSE(gi.level.has_value());
    CHECK(gi.state.total_norm() == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("CSV schema") {
    TimeSeriesOutput empty;
    empty.channel_names = {"g", "e"};
    std::ostringstream out;
    write_time_series_csv(out, empty);
    CHECK(out.str() ==
          "t_ps,P_1,P_2,ov2_12,lambda_1,lambda_2,svn_exact_bits,svn_pop_bits,purity,linear_entropy,renyi2_bits\n");

    const auto three = time_series_header(3, 2);
    const std::vector<std::string> expected{"t_ps", "P_1", "P_2", "P_3", "Ppart_1_r1", "Ppart_2_r1", "Ppart_3_r1",
                                            "Ppart_1_r2", "Ppart_2_r2", "Ppart_3_r2", "ov2_12", "ov2_13", "ov2_23",
                                            "lambda_1", "lambda_2", "lambda_3", "svn_exact_bits", "svn_pop_bits",
                                            "purity", "linear_entropy", "renyi2_bits"};
    CHECK(three == expected);
    const auto one_cut = time_series_header(2, 1);
    CHECK(one_cut[3] == "Ppart_1");

    const TimeSeriesOutput ts = run(shortened("rabi_two_channel.json", 0.05));
    std::ostringstream csv;
    write_time_series_csv(csv, ts);
    std::istringstream lines(csv.str());
    std::string line;
    std::size_t rows = 0;
    std::getline(lines, line);
    const auto columns = std::count(line.begin(), line.end(), ',') + 1;
    while (std::getline(lines, line)) {
      ++rows;
      CHECK(std::count(line.begin(), line.end(), ',') + 1 == columns);
    }
    CHECK(rows == ts.records.size());
  }

  TEST_CASE("outputs on disk") {
    const auto dir = std::filesystem::temp_directory_path() / "vibronic_runner_test";
    std::filesystem::remove_all(dir);
    json j = scenario_json("rabi_two_channel.json");
    j["propagation"]["t_end_ps"] = 0.1;
    j["observables"]["snapshot_times_ps"] = {0.0, 0.05};
    const ScenarioConfig c = load_scenario(j.dump());
    const TimeSeriesOutput ts = run(c);
    REQUIRE(ts.snapshots.size() == 2);
    CHECK(ps(ts.snapshots[1].state.time) == doctest::Approx(0.05).epsilon(0.03));
    const OutputPaths paths = write_outputs(ts, c, dir);
    CHECK(std::filesystem::exists(paths.time_series));
    CHECK(paths.time_series.filename() == "rabi_timeseries.csv");
    REQUIRE(paths.snapshots.size() == 2);
    std::ifstream snap(paths.snapshots[1]);
    std::string header;
    std::getline(snap, header);
    CHECK(header == "R_a0,re_g,im_g,abs2_g,re_e,im_e,abs2_e");
    std::size_t rows = 0;
    for (std::string line; std::getline(snap, line);) ++rows;
    CHECK(rows == 128);

    std::ifstream meta_in(paths.metadata);
    const json meta = json::parse(meta_in);
    CHECK(meta["config_hash"] == scenario_hash(c));
    CHECK(meta["config"]["propagation"]["dt_ps"] == 0.0012);
    CHECK(meta["segments"].size() == 1);
    CHECK(meta["initial_state"]["level"] == 0);
    CHECK(meta["samples"] == ts.records.size());
    CHECK(load_scenario(meta["config"].dump()) == c);
    std::filesystem::remove_all(dir);

    CHECK_THROWS_AS(write_outputs(ts, c, "/proc/vibronic/denied"), IoError);
  }

  TEST_CASE("identical configs give bit-identical CSV") {
    const ScenarioConfig c = shortened("three_channel.json", 0.05);
    std::ostringstream a, b;
    write_time_series_csv(a, run(c));
    write_time_series_csv(b, run(c));
    CHECK(a.str() == b.str());
  }

  TEST_CASE("dominant period of a sampled signal") {
    std::vector<double> t, v;
    for (int k = 0; k < 400; ++k) {
      t.push_back(0.05 * k);
      v.push_back(0.3 + std::sin(2 * std::numbers::pi * t.back() / 3.0) + 0.2 * std::sin(2 * std::numbers::pi * t.back() / 0.7));
    }
    const auto p = dominant_period(t, v);
    REQUIRE(p.has_value());
    CHECK(*p == doctest::Approx(3.0).epsilon(1e-3));
    const std::vector<double> flat(t.size(), 0.25);
    CHECK_FALSE(dominant_period(t, flat).has_value());
    CHECK_FALSE(dominant_period(std::span(t).first(3), std::span(v).first(3)).has_value());
  }
}
