#include <doctest.h>

#include <fstream>
#include <string>

#include <json.hpp>

#include "vibronic/errors.hpp"
#include "vibronic/pulses.hpp"
#include "vibronic/scenario.hpp"
#include "vibronic/units.hpp"

using namespace vibronic;
using nlohmann::json;

namespace {

json minimal() {
  return json::parse(R"({
    "grid": {"r_min_a0": 1.0, "r_max_a0": 6.0, "n_points": 64},
    "reduced_mass_amu": 1.0,
    "channels": [{"name": "g", "potential": {"kind": "morse", "d_e_cm1": 20000, "a_inv_a0": 1.0, "r_e_a0": 2.5}}],
    "initial_state": {"kind": "eigenstate", "channel": "g", "level": 0},
    "propagation": {"t_end_ps": 0.1}
  })");
}

json two_channel() {
  json j = minimal();
  j["channels"].push_back(
      {{"name", "e"}, {"potential", {{"kind", "harmonic"}, {"omega_cm1", 3000}, {"r_e_a0", 3.0}, {"v_min_cm1", 15000}}}});
  j["couplings"] = json::array({{{"channels", {"g", "e"}}, {"kind", "gaussian"}, {"a_cm1", 50}, {"r0_a0", 2.8}, {"sigma_a0", 0.3}}});
  j["pulses"] = {{"sequence",
                  {{{"w_l_cm1", 20.0}, {"photon_energy_cm1", 16000}, {"t_p_ps", 0.04}, {"tau_c_ps", 0.02},
                    {"tau_l_ps", 0.01}, {"chirp_sign", "negative"}, {"lower", "g"}, {"upper", "e"}},
                   {{"w_l_cm1", 10.0}, {"photon_energy_cm1", 15000}, {"t_p_ps", 0.08}, {"tau_c_ps", 0.01},
                    {"tau_l_ps", 0.01}, {"chirp_rate_per_ps2", 0.0}, {"lower", "g"}, {"upper", "e"}}}}};
  j["observables"] = {{"sample_stride", 3}, {"r_cut_a0", {2.7}}, {"snapshot_times_ps", {0.05}}};
  j["output"] = {{"directory", "results"}, {"prefix", "pair"}};
  return j;
}

std::string error_of(const json& j) {
  try {
    load_scenario(j.dump());
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_SUITE("scenario") {
  TEST_CASE("minimal document gets every default") {
    const ScenarioConfig c = load_scenario(minimal().dump());
    CHECK(c.channels.size() == 1);
    CHECK(c.rotational_j == 0);
    CHECK(c.couplings.empty());
    CHECK(c.pulses.sequence.empty());
    CHECK_FALSE(c.pulses.repetition_period_ps.has_value());
    CHECK(c.propagation.t_start_ps == 0.0);
    CHECK(c.propagation.dt_ps > 0.0);
    CHECK(c.propagation.chebyshev_tolerance == 1e-12);
    CHECK(c.propagation.spectral_margin == 1.1);
    CHECK(c.observables.sample_stride == 1);
    CHECK(c.output.prefix == "run");
    CHECK(std::get<EigenstateInit>(c.initial_state).level == 0u);
    CHECK(std::get<MorseConfig>(c.channels[0].potential).v_asym_cm1 == 0.0);

    // The materialized dt is the one the built scenario uses.
    const Scenario s = build_scenario(c);
    CHECK(s.propagation.dt == doctest::Approx(units::time_to_internal(c.propagation.dt_ps)).epsilon(1e-14));
    CHECK(s.grid.size() == 64);
    CHECK(s.mass == doctest::Approx(units::kElectronMassesPerAmu));
  }

  TEST_CASE("chirp sign becomes an explicit rate") {
    const ScenarioConfig c = load_scenario(two_channel().dump());
    const double expected = default_chirp_rate(0.01, 0.02, -1);
    CHECK(c.pulses.sequence[0].chirp_rate_per_ps2 == doctest::Approx(expected).epsilon(1e-14));
    CHECK(c.pulses.sequence[0].chirp_rate_per_ps2 < 0.0);
    const Scenario s = build_scenario(c);
    CHECK(s.pulses.pulses().size() == 2);
    CHECK(s.pulses.pulses()[0].chirp_rate ==
          doctest::Approx(default_chirp_rate(units::time_to_internal(0.01), units::time_to_internal(0.02), -1))
              .epsilon(1e-12));
    CHECK(s.couplings.size() == 1);
    CHECK(s.r_cuts.size() == 1);
    CHECK(s.snapshot_times.size() == 1);
  }

  TEST_CASE("unknown channel is named") {
    json j = two_channel();
    j["pulses"]["sequence"][1]["upper"] = "x";
    const std::string err = error_of(j);
    CHECK(err.find("'x'") != std::string::npos);
    CHECK(err.find("pulses.sequence[1].upper") != std::string::npos);

    json k = two_channel();
    k["couplings"][0]["channels"][1] = "x";
    CHECK(error_of(k).find("'x'") != std::string::npos);
    json m = minimal();
    m["initial_state"]["channel"] = "x";
    CHECK(error_of(m).find("'x'") != std::string::npos);
  }

  TEST_CASE("tau_C below tau_L cites the pulse index") {
    json j = two_channel();
    j["pulses"]["sequence"][1]["tau_c_ps"] = 0.005;
    const std::string err = error_of(j);
    CHECK(err.find("pulses.sequence[1]") != std::string::npos);
  }

  TEST_CASE("unknown fields are rejected with their path") {
    json j = minimal();
    j["grid"]["spacing"] = 0.1;
    CHECK(error_of(j).find("grid.spacing") != std::string::npos);
    json k = two_channel();
    k["pulses"]["sequence"][0]["colour"] = "red";
    CHECK(error_of(k).find("pulses.sequence[0].colour") != std::string::npos);
    json top = minimal();
    top["comment"] = "hi";
    CHECK(error_of(top).find("comment") != std::string::npos);
  }

  TEST_CASE("schema violations") {
    json j = minimal();
    j["grid"].erase("n_points");
    CHECK(error_of(j).find("grid.n_points") != std::string::npos);
    json bad_type = minimal();
    bad_type["reduced_mass_amu"] = "heavy";
    CHECK(error_of(bad_type).find("reduced_mass_amu") != std::string::npos);
    json dup = two_channel();
    dup["channels"][1]["name"] = "g";
    CHECK(error_of(dup).find("duplicate") != std::string::npos);
    json self = two_channel();
    self["couplings"][0]["channels"] = {"g", "g"};
    CHECK_FALSE(error_of(self).empty());
    json cut = two_channel();
    cut["observables"]["r_cut_a0"] = {7.0};
    CHECK(error_of(cut).find("observables.r_cut_a0[0]") != std::string::npos);
    json snap = two_channel();
    snap["observables"]["snapshot_times_ps"] = {0.5};
    CHECK(error_of(snap).find("observables.snapshot_times_ps[0]") != std::string::npos);
    json rep = two_channel();
    rep["pulses"]["repetitions"] = 2;
    CHECK(error_of(rep).find("pulses.repetitions") != std::string::npos);
    json level = minimal();
    level["initial_state"]["level"] = "top";
    CHECK(error_of(level).find("initial_state.level") != std::string::npos);
    CHECK_THROWS_AS(load_scenario("{not json"), ConfigError);
    CHECK_THROWS_AS(load_scenario_file("/nonexistent/scenario.json"), IoError);
  }

  TEST_CASE("parse, serialize, parse is the identity") {
    for (const json& doc : {minimal(), two_channel()}) {
      const ScenarioConfig a = load_scenario(doc.dump());
      const std::string text = serialize_scenario(a);
      const ScenarioConfig b = load_scenario(text);
      CHECK(a == b);
      CHECK(serialize_scenario(b) == text);
      CHECK(scenario_hash(a) == scenario_hash(b));
    }
    json last = two_channel();
    last["initial_state"] = {{"kind", "eigenstate"}, {"channel", "g"}, {"level", "last_bound"}};
    last["pulses"]["repetition_period_ps"] = 0.1;
    last["propagation"]["t_end_ps"] = 0.2;
    const ScenarioConfig a = load_scenario(last.dump());
    CHECK_FALSE(std::get<EigenstateInit>(a.initial_state).level.has_value());
    CHECK(a.pulses.repetitions == 1);
    CHECK(load_scenario(serialize_scenario(a)) == a);

    json gauss = minimal();
    gauss["initial_state"] = {{"kind", "gaussian"}, {"channel", "g"}, {"center_a0", 2.5}, {"width_a0", 0.2}};
    gauss["channels"][0]["potential"] = {{"kind", "tabulated"}, {"points", {{1.0, 9000.0}, {2.0, 0.0}, {3.0, 2000.0}, {6.0, 9000.0}}}};
    const ScenarioConfig g = load_scenario(gauss.dump());
    CHECK(load_scenario(serialize_scenario(g)) == g);
  }

  TEST_CASE("hash tracks content") {
    const ScenarioConfig a = load_scenario(minimal().dump());
    const std::string h = scenario_hash(a);
    CHECK(h.size() == 16);
    CHECK(h == scenario_hash(load_scenario(minimal().dump())));
    json j = minimal();
    j["propagation"]["t_end_ps"] = 0.2;
    CHECK(scenario_hash(load_scenario(j.dump())) != h);
  }

  TEST_CASE("tabulated files resolve against the scenario directory") {
    const auto dir = std::filesystem::temp_directory_path() / "vibronic_scenario_test";
    std::filesystem::create_directories(dir);
    {
      std::ofstream t(dir / "curve.csv");
      t << "# R_a0 V_cm1\n1.0 9000\n2.0 0\n3.0 2000\n6.0 9000\n";
    }
    json j = minimal();
    j["channels"][0]["potential"] = {{"kind", "tabulated"}, {"file", "curve.csv"}};
    {
      std::ofstream s(dir / "s.json");
      s << j.dump();
    }
    const ScenarioConfig c = load_scenario_file(dir / "s.json");
    CHECK(std::get<TabulatedConfig>(c.channels[0].potential).file == "curve.csv");
    CHECK_THROWS(load_scenario(j.dump(), "/nonexistent"));
    std::filesystem::remove_all(dir);
  }
}
