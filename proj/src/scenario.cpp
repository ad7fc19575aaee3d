#include "vibronic/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "vibronic/errors.hpp"
#include "vibronic/units.hpp"

namespace vibronic {

using nlohmann::json;

namespace {

// Tracks which keys of an object were consumed so leftovers can be rejected.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  [[noreturn]] static void fail(const std::string& path, const std::string& msg) {
    throw ConfigError(path.empty() ? "<root>" : path, msg);
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  bool has(const std::string& key) const { return j_.contains(key); }

  const json& raw(const std::string& key) {
    if (!j_.contains(key)) fail(at(key), "required field is missing");
    seen_.insert(key);
    return j_.at(key);
  }

  const json* optional_raw(const std::string& key) {
    if (!j_.contains(key)) return nullptr;
    seen_.insert(key);
    return &j_.at(key);
  }

  double number(const std::string& key) { return as_number(raw(key), at(key)); }

  double number_or(const std::string& key, double fallback) {
    const json* v = optional_raw(key);
    return v ? as_number(*v, at(key)) : fallback;
  }

  std::optional<double> optional_number(const std::string& key) {
    const json* v = optional_raw(key);
    if (!v) return std::nullopt;
    return as_number(*v, at(key));
  }

  std::size_t count(const std::string& key) { return as_count(raw(key), at(key)); }

  std::size_t count_or(const std::string& key, std::size_t fallback) {
    const json* v = optional_raw(key);
    return v ? as_count(*v, at(key)) : fallback;
  }

  std::string string(const std::string& key) { return as_string(raw(key), at(key)); }

  std::string string_or(const std::string& key, const std::string& fallback) {
    const json* v = optional_raw(key);
    return v ? as_string(*v, at(key)) : fallback;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) fail(at(it.key()), "unknown field");
    }
  }

  static double as_number(const json& v, const std::string& path) {
    if (!v.is_number()) fail(path, "expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) fail(path, "must be finite");
    return x;
  }

  static std::size_t as_count(const json& v, const std::string& path) {
    if (v.is_number_unsigned()) return v.get<std::size_t>();
    if (v.is_number_integer()) fail(path, "must be non-negative");
    fail(path, "expected an integer");
  }

  static std::string as_string(const json& v, const std::string& path) {
    if (!v.is_string()) fail(path, "expected a string");
    return v.get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

std::string indexed(const std::string& path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

const json& array_field(Reader& r, const std::string& key) {
  const json& v = r.raw(key);
  if (!v.is_array()) Reader::fail(r.at(key), "expected an array");
  return v;
}

std::vector<double> number_list(Reader& r, const std::string& key) {
  std::vector<double> out;
  const json* v = r.optional_raw(key);
  if (!v) return out;
  if (!v->is_array()) Reader::fail(r.at(key), "expected an array");
  for (std::size_t i = 0; i < v->size(); ++i) {
    out.push_back(Reader::as_number((*v)[i], indexed(r.at(key), i)));
  }
  return out;
}

PotentialConfig parse_potential(const json& j, const std::string& path) {
  Reader r(j, path);
  const std::string kind = r.string("kind");
  PotentialConfig out;
  if (kind == "morse") {
    MorseConfig m;
    m.d_e_cm1 = r.number("d_e_cm1");
    m.a_inv_a0 = r.number("a_inv_a0");
    m.r_e_a0 = r.number("r_e_a0");
    m.v_asym_cm1 = r.number_or("v_asym_cm1", 0.0);
    if (m.d_e_cm1 <= 0.0) Reader::fail(r.at("d_e_cm1"), "must be positive");
    if (m.a_inv_a0 <= 0.0) Reader::fail(r.at("a_inv_a0"), "must be positive");
    out = m;
  } else if (kind == "harmonic") {
    HarmonicConfig h;
    h.omega_cm1 = r.number("omega_cm1");
    h.r_e_a0 = r.number("r_e_a0");
    h.v_min_cm1 = r.number_or("v_min_cm1", 0.0);
    if (h.omega_cm1 <= 0.0) Reader::fail(r.at("omega_cm1"), "must be positive");
    out = h;
  } else if (kind == "tabulated") {
    TabulatedConfig t;
    t.file = r.string_or("file", "");
    if (const json* pts = r.optional_raw("points")) {
      const std::string pp = r.at("points");
      if (!pts->is_array()) Reader::fail(pp, "expected an array of [R_a0, V_cm1] pairs");
      for (std::size_t i = 0; i < pts->size(); ++i) {
        const json& row = (*pts)[i];
        if (!row.is_array() || row.size() != 2) {
          Reader::fail(indexed(pp, i), "expected [R_a0, V_cm1]");
        }
        t.points.emplace_back(Reader::as_number(row[0], indexed(pp, i) + "[0]"),
                              Reader::as_number(row[1], indexed(pp, i) + "[1]"));
      }
    }
    if (t.file.empty() == t.points.empty()) {
      Reader::fail(path, "tabulated potential needs exactly one of 'file' or 'points'");
    }
    out = t;
  } else {
    Reader::fail(r.at("kind"), "unknown potential kind '" + kind + "'");
  }
  r.finish();
  return out;
}

CouplingConfig parse_coupling(const json& j, const std::string& path) {
  Reader r(j, path);
  CouplingConfig c;
  const json& pair = r.raw("channels");
  if (!pair.is_array() || pair.size() != 2) {
    Reader::fail(r.at("channels"), "expected two channel names");
  }
  c.channel_a = Reader::as_string(pair[0], r.at("channels") + "[0]");
  c.channel_b = Reader::as_string(pair[1], r.at("channels") + "[1]");
  const std::string kind = r.string("kind");
  if (kind == "constant") {
    c.shape = ConstantCouplingConfig{r.number("w_cm1")};
  } else if (kind == "gaussian") {
    GaussianCouplingConfig g;
    g.a_cm1 = r.number("a_cm1");
    g.r0_a0 = r.number("r0_a0");
    g.sigma_a0 = r.number("sigma_a0");
    if (g.sigma_a0 <= 0.0) Reader::fail(r.at("sigma_a0"), "must be positive");
    c.shape = g;
  } else {
    Reader::fail(r.at("kind"), "unknown coupling kind '" + kind + "'");
  }
  r.finish();
  return c;
}

PulseConfig parse_pulse(const json& j, const std::string& path) {
  Reader r(j, path);
  PulseConfig p;
  p.w_l_cm1 = r.number("w_l_cm1");
  p.photon_energy_cm1 = r.number("photon_energy_cm1");
  p.t_p_ps = r.number("t_p_ps");
  p.tau_c_ps = r.number("tau_c_ps");
  p.tau_l_ps = r.number("tau_l_ps");
  p.lower = r.string("lower");
  p.upper = r.string("upper");
  if (p.tau_l_ps <= 0.0) Reader::fail(r.at("tau_l_ps"), "must be positive");
  if (p.tau_c_ps < p.tau_l_ps) {
    Reader::fail(path, "tau_c_ps must be at least tau_l_ps");
  }
  const bool has_rate = r.has("chirp_rate_per_ps2");
  const bool has_sign = r.has("chirp_sign");
  if (has_rate && has_sign) Reader::fail(path, "give either chirp_rate_per_ps2 or chirp_sign");
  if (has_rate) {
    p.chirp_rate_per_ps2 = r.number("chirp_rate_per_ps2");
  } else if (has_sign) {
    const std::string s = r.string("chirp_sign");
    int sign = 0;
    if (s == "negative") sign = -1;
    else if (s == "positive") sign = 1;
    else Reader::fail(r.at("chirp_sign"), "expected 'negative' or 'positive'");
    p.chirp_rate_per_ps2 = default_chirp_rate(p.tau_l_ps, p.tau_c_ps, sign);
  }
  r.finish();
  return p;
}

InitialStateConfig parse_initial(const json& j, const std::string& path) {
  Reader r(j, path);
  const std::string kind = r.string("kind");
  InitialStateConfig out;
  if (kind == "eigenstate") {
    EigenstateInit e;
    e.channel = r.string("channel");
    const json& level = r.raw("level");
    if (level.is_string()) {
      if (level.get<std::string>() != "last_bound") {
        Reader::fail(r.at("level"), "expected a level index or \"last_bound\"");
      }
    } else {
      e.level = Reader::as_count(level, r.at("level"));
    }
    out = e;
  } else if (kind == "gaussian") {
    GaussianInit g;
    g.channel = r.string("channel");
    g.center_a0 = r.number("center_a0");
    g.width_a0 = r.number("width_a0");
    g.momentum_au = r.number_or("momentum_au", 0.0);
    if (g.width_a0 <= 0.0) Reader::fail(r.at("width_a0"), "must be positive");
    out = g;
  } else {
    Reader::fail(r.at("kind"), "unknown initial state kind '" + kind + "'");
  }
  r.finish();
  return out;
}

void check_channel(const ScenarioConfig& c, const std::string& name, const std::string& path) {
  const auto& ch = c.channels;
  if (std::none_of(ch.begin(), ch.end(), [&](const ChannelConfig& x) { return x.name == name; })) {
    throw ConfigError(path, "unknown channel '" + name + "'");
  }
}

const std::string& initial_channel(const InitialStateConfig& s) {
  return std::visit([](const auto& x) -> const std::string& { return x.channel; }, s);
}

void check_references(const ScenarioConfig& c) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < c.channels.size(); ++i) {
    const std::string& n = c.channels[i].name;
    const std::string path = indexed("channels", i) + ".name";
    if (n.empty()) throw ConfigError(path, "channel name must not be empty");
    if (!names.insert(n).second) throw ConfigError(path, "duplicate channel name '" + n + "'");
  }
  for (std::size_t i = 0; i < c.couplings.size(); ++i) {
    const auto& k = c.couplings[i];
    const std::string path = indexed("couplings", i) + ".channels";
    check_channel(c, k.channel_a, path);
    check_channel(c, k.channel_b, path);
    if (k.channel_a == k.channel_b) throw ConfigError(path, "a coupling needs two distinct channels");
  }
  for (std::size_t i = 0; i < c.pulses.sequence.size(); ++i) {
    const auto& p = c.pulses.sequence[i];
    const std::string path = indexed("pulses.sequence", i);
    check_channel(c, p.lower, path + ".lower");
    check_channel(c, p.upper, path + ".upper");
    if (p.lower == p.upper) throw ConfigError(path, "lower and upper must differ");
  }
  check_channel(c, initial_channel(c.initial_state), "initial_state.channel");
}

PotentialCurve build_potential(const PotentialConfig& p, const std::filesystem::path& base,
                               const std::string& path) {
  using namespace units;
  if (const auto* m = std::get_if<MorseConfig>(&p)) {
    return PotentialCurve::morse({energy_to_internal(m->d_e_cm1),
                                  m->a_inv_a0, m->r_e_a0,
                                  energy_to_internal(m->v_asym_cm1)});
  }
  if (const auto* h = std::get_if<HarmonicConfig>(&p)) {
    return PotentialCurve::harmonic({energy_to_internal(h->omega_cm1),
                                     h->r_e_a0,
                                     energy_to_internal(h->v_min_cm1)});
  }
  const auto& t = std::get<TabulatedConfig>(p);
  try {
    if (!t.file.empty()) {
      std::filesystem::path file(t.file);
      if (file.is_relative()) file = base / file;
      return load_tabulated_potential(file);
    }
    std::vector<double> r, v;
    for (const auto& [x, y] : t.points) {
      r.push_back(x);
      v.push_back(energy_to_internal(y));
    }
    return PotentialCurve::tabulated(std::move(r), std::move(v));
  } catch (const IoError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(path, e.what());
  }
}

}  // namespace

std::size_t ScenarioConfig::channel_index(std::string_view name) const {
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].name == name) return i;
  }
  throw ConfigError("channels", "unknown channel '" + std::string(name) + "'");
}

ScenarioConfig load_scenario(std::string_view document, const std::filesystem::path& base) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError("<root>", std::string("malformed JSON: ") + e.what());
  }

  ScenarioConfig c;
  c.base_directory = base;
  Reader root(doc, "");

  {
    Reader g(root.raw("grid"), "grid");
    c.grid.r_min_a0 = g.number("r_min_a0");
    c.grid.r_max_a0 = g.number("r_max_a0");
    c.grid.n_points = g.count("n_points");
    g.finish();
    if (c.grid.r_max_a0 <= c.grid.r_min_a0) {
      throw ConfigError("grid.r_max_a0", "must exceed r_min_a0");
    }
    if (c.grid.n_points < 8) throw ConfigError("grid.n_points", "must be at least 8");
  }

  c.reduced_mass_amu = root.number("reduced_mass_amu");
  if (c.reduced_mass_amu <= 0.0) throw ConfigError("reduced_mass_amu", "must be positive");
  c.rotational_j = static_cast<int>(root.count_or("rotational_j", 0));

  {
    const json& chans = array_field(root, "channels");
    if (chans.empty()) throw ConfigError("channels", "at least one channel is required");
    for (std::size_t i = 0; i < chans.size(); ++i) {
      const std::string path = indexed("channels", i);
      Reader ch(chans[i], path);
      ChannelConfig cc;
      cc.name = ch.string("name");
      cc.potential = parse_potential(ch.raw("potential"), ch.at("potential"));
      ch.finish();
      c.channels.push_back(std::move(cc));
    }
  }

  if (root.has("couplings")) {
    const json& list = array_field(root, "couplings");
    for (std::size_t i = 0; i < list.size(); ++i) {
      c.couplings.push_back(parse_coupling(list[i], indexed("couplings", i)));
    }
  }

  if (const json* pj = root.optional_raw("pulses")) {
    Reader p(*pj, "pulses");
    const json& seq = array_field(p, "sequence");
    for (std::size_t i = 0; i < seq.size(); ++i) {
      c.pulses.sequence.push_back(parse_pulse(seq[i], indexed("pulses.sequence", i)));
    }
    c.pulses.repetition_period_ps = p.optional_number("repetition_period_ps");
    c.pulses.repetitions = p.count_or("repetitions", c.pulses.repetition_period_ps ? 1 : 0);
    p.finish();
    if (c.pulses.repetition_period_ps) {
      if (*c.pulses.repetition_period_ps <= 0.0) {
        throw ConfigError("pulses.repetition_period_ps", "must be positive");
      }
    } else if (c.pulses.repetitions != 0) {
      throw ConfigError("pulses.repetitions", "requires repetition_period_ps");
    }
  }

  c.initial_state = parse_initial(root.raw("initial_state"), "initial_state");

  {
    Reader p(root.raw("propagation"), "propagation");
    c.propagation.t_start_ps = p.number_or("t_start_ps", 0.0);
    c.propagation.t_end_ps = p.number("t_end_ps");
    const std::optional<double> dt = p.optional_number("dt_ps");
    c.propagation.chebyshev_tolerance = p.number_or("chebyshev_tolerance", 1e-12);
    c.propagation.spectral_margin = p.number_or("spectral_margin", 1.1);
    p.finish();
    if (c.propagation.t_end_ps < c.propagation.t_start_ps) {
      throw ConfigError("propagation.t_end_ps", "must not precede t_start_ps");
    }
    if (dt && *dt <= 0.0) throw ConfigError("propagation.dt_ps", "must be positive");
    if (!(c.propagation.chebyshev_tolerance > 0.0 && c.propagation.chebyshev_tolerance < 1.0)) {
      throw ConfigError("propagation.chebyshev_tolerance", "must lie in (0, 1)");
    }
    if (c.propagation.spectral_margin < 1.0) {
      throw ConfigError("propagation.spectral_margin", "must be at least 1");
    }
    c.propagation.dt_ps = dt.value_or(0.0);
  }

  if (const json* oj = root.optional_raw("observables")) {
    Reader o(*oj, "observables");
    c.observables.sample_stride = o.count_or("sample_stride", 1);
    c.observables.r_cut_a0 = number_list(o, "r_cut_a0");
    c.observables.snapshot_times_ps = number_list(o, "snapshot_times_ps");
    o.finish();
    if (c.observables.sample_stride == 0) {
      throw ConfigError("observables.sample_stride", "must be at least 1");
    }
    for (std::size_t i = 0; i < c.observables.r_cut_a0.size(); ++i) {
      const double r = c.observables.r_cut_a0[i];
      if (r < c.grid.r_min_a0 || r > c.grid.r_max_a0) {
        throw ConfigError(indexed("observables.r_cut_a0", i), "outside the grid");
      }
    }
    for (std::size_t i = 0; i < c.observables.snapshot_times_ps.size(); ++i) {
      const double t = c.observables.snapshot_times_ps[i];
      if (t < c.propagation.t_start_ps || t > c.propagation.t_end_ps) {
        throw ConfigError(indexed("observables.snapshot_times_ps", i),
                          "outside the propagation window");
      }
    }
  }

  if (const json* oj = root.optional_raw("output")) {
    Reader o(*oj, "output");
    c.output.directory = o.string_or("directory", ".");
    c.output.prefix = o.string_or("prefix", "run");
    o.finish();
    if (c.output.prefix.empty()) throw ConfigError("output.prefix", "must not be empty");
  }

  root.finish();
  check_references(c);

  // Building validates curve parameters and pulse invariants, and supplies
  // the default time step when none was given.
  const Scenario built = build_scenario(c);
  if (c.propagation.dt_ps == 0.0) {
    c.propagation.dt_ps = units::time_from_internal(built.propagation.dt);
  }
  return c;
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open scenario file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_scenario(buffer.str(), path.parent_path());
}

namespace {

json to_json(const PotentialConfig& p) {
  if (const auto* m = std::get_if<MorseConfig>(&p)) {
    return {{"kind", "morse"}, {"d_e_cm1", m->d_e_cm1}, {"a_inv_a0", m->a_inv_a0},
            {"r_e_a0", m->r_e_a0}, {"v_asym_cm1", m->v_asym_cm1}};
  }
  if (const auto* h = std::get_if<HarmonicConfig>(&p)) {
    return {{"kind", "harmonic"}, {"omega_cm1", h->omega_cm1}, {"r_e_a0", h->r_e_a0},
            {"v_min_cm1", h->v_min_cm1}};
  }
  const auto& t = std::get<TabulatedConfig>(p);
  json j = {{"kind", "tabulated"}};
  if (!t.file.empty()) {
    j["file"] = t.file;
  } else {
    json pts = json::array();
    for (const auto& [r, v] : t.points) pts.push_back({r, v});
    j["points"] = pts;
  }
  return j;
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["grid"] = {{"r_min_a0", c.grid.r_min_a0},
               {"r_max_a0", c.grid.r_max_a0},
               {"n_points", c.grid.n_points}};
  j["reduced_mass_amu"] = c.reduced_mass_amu;
  j["rotational_j"] = c.rotational_j;

  j["channels"] = json::array();
  for (const auto& ch : c.channels) {
    j["channels"].push_back({{"name", ch.name}, {"potential", to_json(ch.potential)}});
  }

  j["couplings"] = json::array();
  for (const auto& k : c.couplings) {
    json kj = {{"channels", {k.channel_a, k.channel_b}}};
    if (const auto* s = std::get_if<ConstantCouplingConfig>(&k.shape)) {
      kj["kind"] = "constant";
      kj["w_cm1"] = s->w_cm1;
    } else {
      const auto& g = std::get<GaussianCouplingConfig>(k.shape);
      kj["kind"] = "gaussian";
      kj["a_cm1"] = g.a_cm1;
      kj["r0_a0"] = g.r0_a0;
      kj["sigma_a0"] = g.sigma_a0;
    }
    j["couplings"].push_back(kj);
  }

  json seq = json::array();
  for (const auto& p : c.pulses.sequence) {
    seq.push_back({{"w_l_cm1", p.w_l_cm1},
                   {"photon_energy_cm1", p.photon_energy_cm1},
                   {"t_p_ps", p.t_p_ps},
                   {"tau_c_ps", p.tau_c_ps},
                   {"tau_l_ps", p.tau_l_ps},
                   {"chirp_rate_per_ps2", p.chirp_rate_per_ps2},
                   {"lower", p.lower},
                   {"upper", p.upper}});
  }
  j["pulses"] = {{"sequence", seq}, {"repetitions", c.pulses.repetitions}};
  if (c.pulses.repetition_period_ps) {
    j["pulses"]["repetition_period_ps"] = *c.pulses.repetition_period_ps;
  }

  if (const auto* e = std::get_if<EigenstateInit>(&c.initial_state)) {
    j["initial_state"] = {{"kind", "eigenstate"}, {"channel", e->channel}};
    if (e->level) j["initial_state"]["level"] = *e->level;
    else j["initial_state"]["level"] = "last_bound";
  } else {
    const auto& g = std::get<GaussianInit>(c.initial_state);
    j["initial_state"] = {{"kind", "gaussian"},
                          {"channel", g.channel},
                          {"center_a0", g.center_a0},
                          {"width_a0", g.width_a0},
                          {"momentum_au", g.momentum_au}};
  }

  j["propagation"] = {{"t_start_ps", c.propagation.t_start_ps},
                      {"t_end_ps", c.propagation.t_end_ps},
                      {"dt_ps", c.propagation.dt_ps},
                      {"chebyshev_tolerance", c.propagation.chebyshev_tolerance},
                      {"spectral_margin", c.propagation.spectral_margin}};
  j["observables"] = {{"sample_stride", c.observables.sample_stride},
                      {"r_cut_a0", c.observables.r_cut_a0},
                      {"snapshot_times_ps", c.observables.snapshot_times_ps}};
  j["output"] = {{"directory", c.output.directory}, {"prefix", c.output.prefix}};
  return j;
}

}  // namespace

std::string serialize_scenario(const ScenarioConfig& config, int indent) {
  return to_json(config).dump(indent);
}

std::string scenario_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : serialize_scenario(config, -1)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

Scenario build_scenario(const ScenarioConfig& c) {
  using namespace units;
  const auto ps = [](double t) { return time_to_internal(t); };
  const auto cm = [](double e) { return energy_to_internal(e); };

  Scenario s{SpatialGrid(c.grid.r_min_a0, c.grid.r_max_a0, c.grid.n_points),
             mass_to_internal(c.reduced_mass_amu),
             c.rotational_j,
             {},
             {},
             {},
             {},
             {},
             {},
             {}};

  for (std::size_t i = 0; i < c.channels.size(); ++i) {
    s.channel_names.push_back(c.channels[i].name);
    s.potentials.push_back(build_potential(c.channels[i].potential, c.base_directory,
                                           indexed("channels", i) + ".potential"));
  }

  for (const auto& k : c.couplings) {
    CouplingCurve curve = CouplingCurve::constant(0.0);
    if (const auto* w = std::get_if<ConstantCouplingConfig>(&k.shape)) {
      curve = CouplingCurve::constant(cm(w->w_cm1));
    } else {
      const auto& g = std::get<GaussianCouplingConfig>(k.shape);
      curve = CouplingCurve::gaussian(cm(g.a_cm1), g.r0_a0, g.sigma_a0);
    }
    s.couplings.push_back({c.channel_index(k.channel_a), c.channel_index(k.channel_b), curve});
  }

  std::vector<PulseSpec> pulses;
  for (std::size_t i = 0; i < c.pulses.sequence.size(); ++i) {
    const auto& p = c.pulses.sequence[i];
    PulseSpec spec{cm(p.w_l_cm1),
                   cm(p.photon_energy_cm1),
                   ps(p.t_p_ps),
                   ps(p.tau_c_ps),
                   ps(p.tau_l_ps),
                   chirp_rate_to_internal(p.chirp_rate_per_ps2),
                   c.channel_index(p.lower),
                   c.channel_index(p.upper)};
    try {
      validate(spec);
    } catch (const std::exception& e) {
      throw ConfigError(indexed("pulses.sequence", i), e.what());
    }
    pulses.push_back(spec);
  }
  std::optional<double> period;
  if (c.pulses.repetition_period_ps) period = ps(*c.pulses.repetition_period_ps);
  s.pulses = PulseSequence(std::move(pulses), period, c.pulses.repetitions);

  s.propagation.t_start = ps(c.propagation.t_start_ps);
  s.propagation.t_end = ps(c.propagation.t_end_ps);
  s.propagation.chebyshev_tolerance = c.propagation.chebyshev_tolerance;
  s.propagation.spectral_margin = c.propagation.spectral_margin;
  s.propagation.sample_stride = c.observables.sample_stride;
  if (c.propagation.dt_ps > 0.0) {
    s.propagation.dt = ps(c.propagation.dt_ps);
  } else {
    // Widest spectral range any segment can see: every channel dressed by
    // every photon it may absorb is bounded by the undressed range plus
    // the largest photon energy, and every coupling at full strength.
    HamiltonianSnapshot h;
    h.mass = s.mass;
    for (const auto& v : s.potentials) {
      Eigen::VectorXd sampled = v.sample(s.grid, s.mass);
      if (s.J != 0) sampled += centrifugal_term(s.grid, s.mass, s.J);
      h.potentials.push_back(sampled);
    }
    for (const auto& k : s.couplings) h.radial.push_back({k.channel_a, k.channel_b, k.curve.sample(s.grid)});
    double photon = 0.0, peak = 0.0;
    for (const auto& p : s.pulses.pulses()) {
      photon = std::max(photon, std::abs(p.photon_energy));
      peak = std::max(peak, std::abs(p.coupling) * envelope(p, p.center));
    }
    SpectralRange range = spectral_range(h, s.grid, c.propagation.spectral_margin);
    range.min -= photon + peak;
    range.max += photon + peak;
    s.propagation.dt = default_time_step(s.pulses.pulses(), range);
  }
  try {
    s.propagation.validate();
  } catch (const std::exception& e) {
    throw ConfigError("propagation", e.what());
  }

  s.r_cuts = c.observables.r_cut_a0;
  for (double t : c.observables.snapshot_times_ps) s.snapshot_times.push_back(ps(t));
  return s;
}

}  // namespace vibronic
