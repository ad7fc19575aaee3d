#include "vibronic/cli.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "vibronic/entanglement.hpp"
#include "vibronic/errors.hpp"
#include "vibronic/format.hpp"
#include "vibronic/rabi_oracle.hpp"
#include "vibronic/runner.hpp"
#include "vibronic/scenario.hpp"
#include "vibronic/units.hpp"
#include "vibronic/vibrational_basis.hpp"

namespace vibronic::cli {

namespace {

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw IoError("failed while writing " + path);
}

std::size_t channel_or_first(const ScenarioConfig& c, const std::string& name) {
  return name.empty() ? 0 : c.channel_index(name);
}

struct LevelsOptions {
  std::string config;
  std::string channel;
  std::size_t n_levels = 10;
  std::string out;
};

int cmd_levels(const LevelsOptions& o, std::ostream& out) {
  const ScenarioConfig c = load_scenario_file(o.config);
  const Scenario s = build_scenario(c);
  const std::size_t ch = channel_or_first(c, o.channel);
  const VibrationalBasis basis =
      solve_levels(s.grid, s.potentials[ch], s.mass, s.J, LevelCount{o.n_levels}, ch);
  if (!o.out.empty()) {
    auto f = open_output(o.out);
    write_levels_csv(f, basis);
    finish_output(f, o.out);
  }
  const double lo = units::energy_from_internal(basis.levels().front().energy);
  const double hi = units::energy_from_internal(basis.levels().back().energy);
  out << "channel " << s.channel_names[ch] << ": " << basis.size() << " levels, E from "
      << format_double(lo) << " to " << format_double(hi) << " cm^-1\n";
  if (basis.size() > 1) {
    out << "first spacing " << format_double(units::energy_from_internal(
                                   basis.level(1).energy - basis.level(0).energy))
        << " cm^-1\n";
  }
  return kSuccess;
}

struct PropagateOptions {
  std::string config;
  std::string out_dir;
};

int cmd_propagate(const PropagateOptions& o, std::ostream& out) {
  const ScenarioConfig c = load_scenario_file(o.config);
  const TimeSeriesOutput ts = run(c);
  const std::filesystem::path dir = o.out_dir.empty() ? c.output.directory : o.out_dir;
  const OutputPaths paths = write_outputs(ts, c, dir);

  const EntanglementRecord& last = ts.records.back();
  out << "initial state: " << ts.metadata.initial_state << '\n';
  out << "samples: " << ts.records.size() << ", steps: " << ts.metadata.steps
      << ", max norm drift: " << format_double(ts.metadata.max_norm_drift) << '\n';
  out << "final t = " << format_double(units::time_from_internal(last.time)) << " ps\n";
  for (std::size_t n = 0; n < ts.channel_names.size(); ++n) {
    out << "  P_" << ts.channel_names[n] << " = " << format_double(last.populations[n]) << '\n';
  }
  out << "final L = " << format_double(last.linear_entropy)
      << ", S_vN = " << format_double(last.svn_exact) << " bits\n";

  std::vector<double> t, l;
  for (const auto& r : ts.records) {
    t.push_back(units::time_from_internal(r.time));
    l.push_back(r.linear_entropy);
  }
  if (const auto period = dominant_period(t, l)) {
    out << "dominant L period = " << format_double(*period) << " ps\n";
  } else {
    out << "dominant L period = none (L is flat)\n";
  }
  for (const auto& w : ts.metadata.warnings) out << "warning: " << w << '\n';
  out << "wrote " << paths.time_series.string() << '\n';
  out << "wrote " << paths.metadata.string() << '\n';
  for (const auto& p : paths.snapshots) out << "wrote " << p.string() << '\n';
  return kSuccess;
}

struct RabiOptions {
  double wl_cm1 = 0.0;
  double f = 1.0;
  double evg_cm1 = 0.0;
  double eve_cm1 = 0.0;
  std::optional<double> t_end_ps;
  std::string out;
};

int cmd_oracle_rabi(const RabiOptions& o, std::ostream& out) {
  const TwoLevelModel m{units::energy_to_internal(o.evg_cm1), units::energy_to_internal(o.eve_cm1),
                        units::energy_to_internal(o.wl_cm1), cdouble(o.f, 0.0)};
  m.validate();
  const double omega = rabi_frequency(m);
  const double period = beat_period(m);
  double t_end = 0.0;
  if (o.t_end_ps) {
    if (!(*o.t_end_ps > 0.0)) throw std::invalid_argument("--t-end-ps must be positive");
    t_end = units::time_to_internal(*o.t_end_ps);
  } else if (std::isfinite(period)) {
    t_end = 10.0 * period;
  } else {
    throw std::invalid_argument("--t-end-ps is required when the Rabi frequency is zero");
  }
  const double dt = omega > 0.0 ? std::min(0.01 / omega, t_end / 1000.0) : t_end / 1000.0;
  const auto samples = integrate_two_level(m, t_end, dt);

  double max_dev = 0.0;
  std::ofstream file;
  if (!o.out.empty()) {
    file = open_output(o.out);
    file << "t_ps,pe_formula,pe_ode,abs_diff\n";
  }
  for (const auto& s : samples) {
    const double formula = excited_population(m, s.time);
    const double ode = std::norm(s.upper);
    const double dev = std::abs(formula - ode);
    max_dev = std::max(max_dev, dev);
    if (file.is_open()) {
      file << format_double(units::time_from_internal(s.time)) << ',' << format_double(formula)
           << ',' << format_double(ode) << ',' << format_double(dev) << '\n';
    }
  }
  if (file.is_open()) finish_output(file, o.out);

  if (std::isfinite(period)) {
    out << "T^R = " << format_double(units::time_from_internal(period)) << " ps\n";
  } else {
    out << "T^R = inf (no coupling)\n";
  }
  out << "Omega = " << format_double(units::energy_from_internal(omega)) << " cm^-1\n";
  out << "samples: " << samples.size() << ", dt = " << format_double(units::time_from_internal(dt))
      << " ps\n";
  out << "max |formula - ODE| = " << format_double(max_dev) << '\n';
  return kSuccess;
}

struct FcfOptions {
  std::string config;
  std::string channel_a;
  std::string channel_b;
  std::size_t na = 5;
  std::size_t nb = 5;
  std::string out;
};

int cmd_fcf(const FcfOptions& o, std::ostream& out) {
  const ScenarioConfig c = load_scenario_file(o.config);
  const Scenario s = build_scenario(c);
  const std::size_t a = channel_or_first(c, o.channel_a);
  const std::size_t b = o.channel_b.empty() ? (c.channels.size() > 1 ? 1 : 0)
                                             : c.channel_index(o.channel_b);
  const VibrationalBasis ba = solve_levels(s.grid, s.potentials[a], s.mass, s.J, LevelCount{o.na}, a);
  const VibrationalBasis bb = solve_levels(s.grid, s.potentials[b], s.mass, s.J, LevelCount{o.nb}, b);
  const Eigen::MatrixXd fcf = overlap_matrix(ba, bb).cwiseAbs2();

  if (!o.out.empty()) {
    auto f = open_output(o.out);
    f << "v_a";
    for (std::size_t j = 0; j < o.nb; ++j) f << ",vb_" << j;
    f << '\n';
    for (Eigen::Index i = 0; i < fcf.rows(); ++i) {
      f << i;
      for (Eigen::Index j = 0; j < fcf.cols(); ++j) f << ',' << format_double(fcf(i, j));
      f << '\n';
    }
    finish_output(f, o.out);
  }
  Eigen::Index bi = 0, bj = 0;
  const double best = fcf.maxCoeff(&bi, &bj);
  out << "Franck-Condon factors " << s.channel_names[a] << " x " << s.channel_names[b] << ": "
      << fcf.rows() << " x " << fcf.cols() << '\n';
  out << "largest " << format_double(best) << " at (" << bi << ", " << bj << ")\n";
  out << "max column sum " << format_double(fcf.colwise().sum().maxCoeff()) << '\n';
  return kSuccess;
}

int cmd_validate(const std::string& path, std::ostream& out) {
  const ScenarioConfig c = load_scenario_file(path);
  out << "valid scenario, hash " << scenario_hash(c) << '\n';
  out << c.channels.size() << " channel(s), " << c.pulses.sequence.size() << " pulse(s), dt = "
      << format_double(c.propagation.dt_ps) << " ps\n";
  return kSuccess;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Electronic-vibrational entanglement simulator"};
  app.require_subcommand(1);

  LevelsOptions lv;
  auto* levels = app.add_subcommand("levels", "Solve and export vibrational levels");
  levels->add_option("config", lv.config, "Scenario JSON")->required();
  levels->add_option("--channel", lv.channel, "Channel name (default: first)");
  levels->add_option("--n-levels", lv.n_levels, "Number of levels")->check(CLI::PositiveNumber);
  levels->add_option("--out", lv.out, "Output CSV (v,E_cm1)");

  PropagateOptions pr;
  auto* propagate = app.add_subcommand("propagate", "Run a scenario and write its time series");
  propagate->add_option("config", pr.config, "Scenario JSON")->required();
  propagate->add_option("--out-dir", pr.out_dir, "Output directory (default: from scenario)");

  RabiOptions ro;
  auto* oracle = app.add_subcommand("oracle", "Analytic reference models");
  oracle->require_subcommand(1);
  auto* rabi = oracle->add_subcommand("rabi", "Two-level Rabi formula against direct integration");
  rabi->add_option("--wl-cm1", ro.wl_cm1, "Laser coupling W_L in cm^-1")->required();
  rabi->add_option("--f", ro.f, "Franck-Condon overlap F, |F| <= 1");
  rabi->add_option("--evg-cm1", ro.evg_cm1, "Lower level energy in cm^-1 (dressed)");
  rabi->add_option("--eve-cm1", ro.eve_cm1, "Upper level energy in cm^-1");
  rabi->add_option("--t-end-ps", ro.t_end_ps, "End time in ps (default: 10 Rabi periods)");
  rabi->add_option("--out", ro.out, "Output CSV (t_ps,pe_formula,pe_ode,abs_diff)");

  FcfOptions fo;
  auto* fcf = app.add_subcommand("fcf", "Franck-Condon factor matrix between two channels");
  fcf->add_option("config", fo.config, "Scenario JSON")->required();
  fcf->add_option("--channel-a", fo.channel_a, "First channel (default: first)");
  fcf->add_option("--channel-b", fo.channel_b, "Second channel (default: second)");
  fcf->add_option("--na", fo.na, "Levels of channel a")->check(CLI::PositiveNumber);
  fcf->add_option("--nb", fo.nb, "Levels of channel b")->check(CLI::PositiveNumber);
  fcf->add_option("--out", fo.out, "Output CSV");

  std::string validate_path;
  auto* validate = app.add_subcommand("validate", "Check a scenario document");
  validate->add_option("config", validate_path, "Scenario JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kValidation;
  }

  try {
    if (*levels) return cmd_levels(lv, out);
    if (*propagate) return cmd_propagate(pr, out);
    if (*rabi) return cmd_oracle_rabi(ro, out);
    if (*fcf) return cmd_fcf(fo, out);
    if (*validate) return cmd_validate(validate_path, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kValidation;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    err << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kNumerical;
  }
  err << "error: no command given\n";
  return kValidation;
}

CommandResult run(const std::vector<std::string>& args) {
  std::vector<const char*> argv{"vibronic"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  CommandResult r;
  r.exit_code = main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

}  // namespace vibronic::cli
