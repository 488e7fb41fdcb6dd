// Copyright 2026 The eacp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "eacp/bath.hpp"
#include "eacp/circuits.hpp"
#include "eacp/ensemble.hpp"
#include "eacp/experiment.hpp"
#include "eacp/mclachlan.hpp"
#include "eacp/system_model.hpp"

/// Command-line front end: discretize | single | ensemble | shot-stats |
/// convergence. Exit codes: 0 success, 2 configuration error, 3 numerical
/// abort.
namespace eacp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

namespace detail {

/// Output directory that records a checksum for every file it writes.
class RunOutput {
 public:
  RunOutput(const experiment::ExperimentConfig& config, std::string command)
      : dir_(config.out), command_(std::move(command)) {
    std::filesystem::create_directories(dir_);
    config_text_ = experiment::to_ini(config);
    seed_ = config.seed;
    write("resolved_config.ini", config_text_);
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream f(dir_ / name, std::ios::binary);
    if (!f) throw ConfigError("cannot write " + (dir_ / name).string());
    f << content;
    files_[name] = experiment::hex(experiment::fnv1a(content));
  }

  template <typename Fn>
  void write_with(const std::string& name, Fn&& fn) {
    std::ostringstream s;
    fn(s);
    write(name, s.str());
  }

  void time(const std::string& label, double seconds) { timings_[label] = seconds; }

  /// manifest.json: everything needed to replay the run. Wall-clock
  /// timings go to timings.json, the one file that differs between runs.
  void finish() {
    nlohmann::json j;
    j["command"] = command_;
    j["version"] = experiment::kVersion;
    j["config_hash"] = experiment::hex(experiment::fnv1a(config_text_));
    j["seed"] = seed_;
    j["config_file"] = "resolved_config.ini";
    j["files"] = files_;
    std::ofstream f(dir_ / "manifest.json", std::ios::binary);
    f << j.dump(2) << '\n';
    std::ofstream t(dir_ / "timings.json", std::ios::binary);
    t << nlohmann::json(timings_).dump(2) << '\n';
  }

  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::string command_;
  std::string config_text_;
  std::uint64_t seed_ = 0;
  std::map<std::string, std::string> files_;
  std::map<std::string, double> timings_;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_)
        .count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

inline bath::BathSpec make_bath(const experiment::ExperimentConfig& c) {
  if (!c.bath_csv.empty()) {
    std::ifstream f(c.bath_csv);
    if (!f) throw ConfigError("cannot open bath csv " + c.bath_csv);
    return bath::read_bath_csv(f);
  }
  return bath::discretize(c.spectral_density, c.n_modes);
}

inline bath::BathInitialCondition make_initial_condition(
    const experiment::ExperimentConfig& c, const bath::BathSpec& spec) {
  if (!c.ic_csv.empty()) {
    std::ifstream f(c.ic_csv);
    if (!f) throw ConfigError("cannot open initial condition csv " + c.ic_csv);
    auto ic = bath::read_initial_condition_csv(f);
    ic.validate(spec);
    return ic;
  }
  return ensemble::initial_condition(spec, c.thermal, c.seed, 0);
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace detail

inline int cmd_discretize(const experiment::ExperimentConfig& c, std::ostream& log) {
  detail::RunOutput out(c, "discretize");
  const auto spec = detail::make_bath(c);
  out.write_with("bath.csv", [&](std::ostream& s) { bath::write_bath_csv(s, spec); });
  const double n = static_cast<double>(spec.size());
  log << "modes: " << spec.size() << '\n'
      << "reorganization_energy: " << csv::format(bath::reorganization_energy(spec))
      << '\n'
      << "discrete_expected: "
      << csv::format(n / (n + 1.0) *
                     bath::continuum_reorganization_energy(c.spectral_density))
      << '\n'
      << "continuum: "
      << csv::format(bath::continuum_reorganization_energy(c.spectral_density))
      << '\n';
  out.finish();
  return kExitOk;
}

inline int cmd_single(const experiment::ExperimentConfig& c, bool dump_circuits,
                      std::ostream& log) {
  detail::RunOutput out(c, "single");
  const auto spec = detail::make_bath(c);
  const auto ic = detail::make_initial_condition(c, spec);
  out.write_with("bath.csv", [&](std::ostream& s) { bath::write_bath_csv(s, spec); });
  out.write_with("initial_condition.csv",
                 [&](std::ostream& s) { bath::write_initial_condition_csv(s, ic); });

  const std::size_t n = c.evolution.n_steps();
  const auto force = bath::tabulate_driving_force(spec, ic, 0.5 * c.evolution.dt, 2 * n);

  detail::Stopwatch sw;
  const auto exact = system::propagate_exact(
      c.system, [&](std::size_t k, double) { return force[2 * k + 1]; },
      c.evolution.t_max, c.evolution.dt);
  out.time("exact", sw.seconds());

  detail::Stopwatch sw2;
  const auto tdva = ensemble::run_trajectory(
      c.evolution, {ensemble::BackendKind::analytic, 0, {}}, c.system, force,
      substream(c.seed, 0, Stream::circuits));
  out.time("tdva", sw2.seconds());

  ensemble::BackendConfig circuit = c.backend_config();
  if (circuit.kind != ensemble::BackendKind::noisy) {
    circuit.kind = c.shots > 0 ? ensemble::BackendKind::shots
                               : ensemble::BackendKind::statevector;
  }
  detail::Stopwatch sw3;
  const auto circ = ensemble::run_trajectory(c.evolution, circuit, c.system, force,
                                             substream(c.seed, 0, Stream::circuits));
  out.time("circuit", sw3.seconds());

  std::vector<double> p_exact, p_tdva, p_circ;
  for (std::size_t k = 0; k <= n; ++k) {
    p_exact.push_back(exact[k].p1);
    p_tdva.push_back(tdva[k].populations.p1);
    p_circ.push_back(circ[k].populations.p1);
  }
  out.write_with("single.csv", [&](std::ostream& s) {
    csv::Writer w(s, {"t", "p1_exact", "p1_tdva", "p1_shots"});
    for (std::size_t k = 0; k <= n; ++k) w.row(exact[k].t, p_exact[k], p_tdva[k], p_circ[k]);
  });
  out.write_with("populations_exact.csv", [&](std::ostream& s) {
    system::write_populations_csv(s, exact, "exact");
  });
  out.write_with("trajectory_tdva.csv",
                 [&](std::ostream& s) { mclachlan::write_trajectory_csv(s, tdva); });
  out.write_with("trajectory_circuit.csv",
                 [&](std::ostream& s) { mclachlan::write_trajectory_csv(s, circ); });

  if (dump_circuits) {
    out.write_with("circuits.txt", [&](std::ostream& s) {
      const auto& th = c.evolution.theta0;
      for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i; j < 4; ++j)
          s << "# A" << i + 1 << j + 1 << " real\n"
            << circuits::to_text(circuits::build_a_circuit(th, i, j, circuits::Part::real));
      for (std::size_t i = 0; i < 4; ++i)
        for (auto p : {circuits::Pauli::x, circuits::Pauli::z})
          s << "# C" << i + 1 << (p == circuits::Pauli::x ? " X" : " Z") << " imag\n"
            << circuits::to_text(circuits::build_c_circuit(th, i, p, circuits::Part::imag));
    });
  }

  log << "max|p1_tdva - p1_exact|: " << csv::format(detail::max_abs_diff(p_tdva, p_exact))
      << '\n'
      << "max|p1_shots - p1_exact| (" << ensemble::to_string(circuit.kind)
      << "): " << csv::format(detail::max_abs_diff(p_circ, p_exact)) << '\n';
  out.finish();
  return kExitOk;
}

inline int cmd_ensemble(const experiment::ExperimentConfig& c, std::ostream& log) {
  detail::RunOutput out(c, "ensemble");
  const auto spec = detail::make_bath(c);
  detail::Stopwatch sw;
  const auto result = ensemble::run_ensemble(c.ensemble_config(), c.system, spec);
  out.time("ensemble", sw.seconds());
  out.write_with("ensemble.csv",
                 [&](std::ostream& s) { ensemble::write_ensemble_csv(s, result); });
  log << "trajectories: " << result.n_samples << " (excluded " << result.failed.size()
      << ")\n"
      << "mean_p1(t_max): " << csv::format(result.mean_p1.back()) << '\n';
  out.finish();
  return kExitOk;
}

inline int cmd_shot_stats(const experiment::ExperimentConfig& c, std::ostream& log) {
  detail::RunOutput out(c, "shot-stats");
  const auto spec = detail::make_bath(c);
  const auto ic = detail::make_initial_condition(c, spec);
  mclachlan::AnalyticBackend backend(c.system);
  const auto reference = mclachlan::evolve(c.evolution, spec, ic, backend);
  detail::Stopwatch sw;
  const auto stats =
      ensemble::shot_error_stats(reference, c.system, spec, ic, c.shots_list, c.seed);
  out.time("shot_stats", sw.seconds());
  out.write_with("shot_stats.csv",
                 [&](std::ostream& s) { ensemble::write_error_stats_csv(s, stats); });
  for (const auto& r : stats) {
    log << r.element << " S=" << r.shots << " median|err|=" << csv::format(r.median_abs)
        << (r.deterministic ? " (deterministic)" : "") << '\n';
  }
  out.finish();
  return kExitOk;
}

inline int cmd_convergence(const experiment::ExperimentConfig& c, std::ostream& log) {
  detail::RunOutput out(c, "convergence");
  const auto spec = detail::make_bath(c);
  std::vector<std::size_t> checkpoints;
  for (auto m : c.checkpoints)
    if (m < c.n_samples) checkpoints.push_back(m);
  checkpoints.push_back(c.n_samples);
  auto config = c.ensemble_config();
  config.keep_trajectories = true;
  detail::Stopwatch sw;
  const auto result = ensemble::run_ensemble(config, c.system, spec);
  const auto points = ensemble::convergence_scan(result, checkpoints);
  out.time("convergence", sw.seconds());
  out.write_with("convergence.csv",
                 [&](std::ostream& s) { ensemble::write_convergence_csv(s, points); });
  out.write_with("ensemble.csv",
                 [&](std::ostream& s) { ensemble::write_ensemble_csv(s, result); });
  for (const auto& p : points) {
    log << "m=" << p.m << " max|dP1|=" << csv::format(p.max_abs_deviation) << '\n';
  }
  if (points.size() >= 3) {
    log << "fit exponent: " << csv::format(ensemble::fit_exponent(points)) << '\n';
  }
  out.finish();
  return kExitOk;
}

/// Parses argv and runs one subcommand.
inline int main(int argc, const char* const* argv, std::ostream& log = std::cout,
                std::ostream& err = std::cerr) {
  CLI::App app{"Ensemble-averaged classical path variational dynamics"};
  app.require_subcommand(1);

  struct Flags {
    std::string config;
    std::uint64_t seed = 0;
    std::uint64_t shots = 0;
    std::string backend;
    double dt = 0.0;
    double t_max = 0.0;
    std::size_t n_modes = 0;
    std::size_t n_samples = 0;
    unsigned workers = 0;
    std::string out;
    bool dump_circuits = false;
  } flags;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", flags.config, "INI configuration file");
    sub->add_option("--seed", flags.seed, "Base random seed");
    sub->add_option("--shots", flags.shots, "Shots per circuit (0 = exact)");
    sub->add_option("--backend", flags.backend, "analytic|statevector|shots|noisy")
                          ->check(CLI::IsMember({"analytic", "statevector", "shots", "noisy"}));
    sub->add_option("--dt", flags.dt, "Time step");
    sub->add_option("--t-max", flags.t_max, "Propagation horizon");
    sub->add_option("--n-modes", flags.n_modes, "Number of bath modes");
    sub->add_option("--n-samples", flags.n_samples, "Monte Carlo samples");
    sub->add_option("--workers", flags.workers, "Trajectory worker threads");
    sub->add_option("--out", flags.out, "Output directory");
  };

  auto* discretize = app.add_subcommand("discretize", "Write the discretized bath");
  auto* single = app.add_subcommand("single", "One bath initial condition: exact vs variational");
  auto* ens = app.add_subcommand("ensemble", "Monte Carlo ensemble average");
  auto* shot_stats = app.add_subcommand("shot-stats", "Shot-noise error statistics of A and C");
  auto* convergence = app.add_subcommand("convergence", "Monte Carlo convergence scan");
  for (auto* sub : {discretize, single, ens, shot_stats, convergence}) add_common(sub);
  single->add_flag("--dump-circuits", flags.dump_circuits,
                   "Write the Hadamard-test circuits at theta0");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, log, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, log, err);
    return kExitConfig;
  }

  CLI::App* sub = app.get_subcommands().front();
  auto given = [&](const std::string& name) {
    return sub->get_option("--" + name)->count() > 0;
  };

  try {
    experiment::ExperimentConfig config;
    if (!flags.config.empty()) {
      std::ifstream f(flags.config);
      if (!f) throw ConfigError("cannot open config file " + flags.config);
      config = experiment::load(f, config);
    }
    if (given("seed")) config.seed = flags.seed;
    if (given("shots")) config.shots = flags.shots;
    if (given("backend")) config.backend = ensemble::parse_backend(flags.backend);
    if (given("dt")) config.evolution.dt = flags.dt;
    if (given("t-max")) config.evolution.t_max = flags.t_max;
    if (given("n-modes")) config.n_modes = flags.n_modes;
    if (given("n-samples")) config.n_samples = flags.n_samples;
    if (given("workers")) config.workers = flags.workers;
    if (given("out")) config.out = flags.out;
    config.validate();

    const std::string name = sub->get_name();
    if (name == "discretize") return cmd_discretize(config, log);
    if (name == "single") return cmd_single(config, flags.dump_circuits, log);
    if (name == "ensemble") return cmd_ensemble(config, log);
    if (name == "shot-stats") return cmd_shot_stats(config, log);
    return cmd_convergence(config, log);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  }
}

}  // namespace eacp::cli
