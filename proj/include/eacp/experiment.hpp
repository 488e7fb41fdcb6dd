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
#include <cstdint>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "eacp/bath.hpp"
#include "eacp/circuits.hpp"
#include "eacp/csv.hpp"
#include "eacp/ensemble.hpp"
#include "eacp/mclachlan.hpp"
#include "eacp/system_model.hpp"

/// Experiment configuration: INI sections mirroring the parameter types,
/// validation, and the resolved echo written next to every run's output.
namespace eacp::experiment {

inline constexpr const char* kVersion = "0.1.0";

struct ExperimentConfig {
  system::SystemParams system;
  bath::SpectralDensityParams spectral_density;
  std::size_t n_modes = 60;
  std::string bath_csv;  // optional: replay a stored bath
  std::string ic_csv;    // optional: replay a stored initial condition
  bath::ThermalParams thermal;
  mclachlan::EvolutionConfig evolution;
  ensemble::BackendKind backend = ensemble::BackendKind::analytic;
  std::size_t n_samples = 10'000;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  std::uint64_t shots = 50'000;
  std::vector<std::uint64_t> shots_list{100, 10'000, 1'000'000};
  circuits::NoiseParams noise{1e-3, 1e-2, 1e-2};
  std::vector<std::size_t> checkpoints{100, 300, 1'000, 3'000, 10'000};
  std::string out = "out";

  void validate() const {
    system.validate();
    spectral_density.validate();
    if (n_modes < 1) throw ConfigError("bath.n_modes must be >= 1");
    thermal.validate();
    evolution.validate();
    if (n_samples < 1) throw ConfigError("ensemble.n_samples must be >= 1");
    noise.validate();
    if (shots_list.empty()) throw ConfigError("shots.shots_list must not be empty");
    if (checkpoints.empty() || !std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
        checkpoints.front() < 1) {
      throw ConfigError("convergence.checkpoints must be ascending and >= 1");
    }
    if (out.empty()) throw ConfigError("output.out must not be empty");
  }

  ensemble::BackendConfig backend_config() const {
    return {backend, shots, noise};
  }

  ensemble::EnsembleConfig ensemble_config() const {
    ensemble::EnsembleConfig c;
    c.n_samples = n_samples;
    c.base_seed = seed;
    c.evolution = evolution;
    c.backend = backend_config();
    c.thermal = thermal;
    c.workers = workers;
    return c;
  }
};

namespace detail {

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  if (std::is_unsigned_v<T> && text.find('-') != std::string::npos) {
    throw ConfigError("config: " + key + " must be non-negative");
  }
  std::istringstream in(text);
  T v{};
  in >> v;
  if (!in || !(in >> std::ws).eof()) {
    throw ConfigError("config: bad value for " + key + ": '" + text + "'");
  }
  return v;
}

template <>
inline double parse_number<double>(const std::string& key, const std::string& text) {
  try {
    return csv::parse_double(text);
  } catch (const ConfigError&) {
    throw ConfigError("config: bad value for " + key + ": '" + text + "'");
  }
}

template <typename T>
std::vector<T> parse_list(const std::string& key, const std::string& text) {
  std::vector<T> out;
  for (const auto& cell : csv::split(text)) {
    std::string trimmed = cell;
    trimmed.erase(0, trimmed.find_first_not_of(" \t"));
    trimmed.erase(trimmed.find_last_not_of(" \t") + 1);
    out.push_back(parse_number<T>(key, trimmed));
  }
  return out;
}

template <typename T>
std::string join(const std::vector<T>& values) {
  std::string s;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ",";
    if constexpr (std::is_floating_point_v<T>) {
      s += csv::format(values[i]);
    } else {
      s += std::to_string(values[i]);
    }
  }
  return s;
}

inline std::string noise_method_name(circuits::NoiseMethod m) {
  return m == circuits::NoiseMethod::per_shot ? "per_shot" : "channel_average";
}

}  // namespace detail

/// Applies one "section.key = value" setting; unknown keys are rejected.
inline void set_value(ExperimentConfig& c, const std::string& key,
                      const std::string& value) {
  using detail::parse_number;
  if (key == "system.omega_rabi") c.system.omega_rabi = parse_number<double>(key, value);
  else if (key == "system.epsilon") c.system.epsilon = parse_number<double>(key, value);
  else if (key == "spectral_density.xi") c.spectral_density.xi = parse_number<double>(key, value);
  else if (key == "spectral_density.omega_c") c.spectral_density.omega_c = parse_number<double>(key, value);
  else if (key == "bath.n_modes") c.n_modes = parse_number<std::size_t>(key, value);
  else if (key == "bath.bath_csv") c.bath_csv = value;
  else if (key == "bath.ic_csv") c.ic_csv = value;
  else if (key == "thermal.beta") c.thermal.beta = parse_number<double>(key, value);
  else if (key == "evolution.dt") c.evolution.dt = parse_number<double>(key, value);
  else if (key == "evolution.t_max") c.evolution.t_max = parse_number<double>(key, value);
  else if (key == "evolution.lambda_reg") {
    if (value == "auto") c.evolution.lambda_reg.reset();
    else c.evolution.lambda_reg = parse_number<double>(key, value);
  }
  else if (key == "evolution.backend") c.backend = ensemble::parse_backend(value);
  else if (key == "evolution.theta0") {
    const auto v = detail::parse_list<double>(key, value);
    if (v.size() != 4) throw ConfigError("config: evolution.theta0 needs 4 values");
    c.evolution.theta0 = ansatz::ThetaVector(v[0], v[1], v[2], v[3]);
  } else if (key == "ensemble.n_samples") c.n_samples = parse_number<std::size_t>(key, value);
  else if (key == "ensemble.seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "ensemble.workers") c.workers = parse_number<unsigned>(key, value);
  else if (key == "shots.shots") c.shots = parse_number<std::uint64_t>(key, value);
  else if (key == "shots.shots_list") c.shots_list = detail::parse_list<std::uint64_t>(key, value);
  else if (key == "noise.p1") c.noise.p1 = parse_number<double>(key, value);
  else if (key == "noise.p2") c.noise.p2 = parse_number<double>(key, value);
  else if (key == "noise.ro") c.noise.ro = parse_number<double>(key, value);
  else if (key == "noise.method") {
    if (value == "channel_average") c.noise.method = circuits::NoiseMethod::channel_average;
    else if (value == "per_shot") c.noise.method = circuits::NoiseMethod::per_shot;
    else throw ConfigError("config: noise.method must be channel_average or per_shot");
  } else if (key == "convergence.checkpoints") c.checkpoints = detail::parse_list<std::size_t>(key, value);
  else if (key == "output.out") c.out = value;
  else throw ConfigError("config: unknown key '" + key + "'");
}

/// Overlays an INI document onto `base`.
inline ExperimentConfig load(std::istream& in, ExperimentConfig base = {}) {
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) {
      throw ConfigError("config: key '" + section + "' outside a section");
    }
    for (const auto& [key, value] : body) {
      set_value(base, section + "." + key, value.data());
    }
  }
  return base;
}

/// Fully resolved configuration. Loading it back yields the same config
/// apart from the output directory, which is not part of the experiment.
inline std::string to_ini(const ExperimentConfig& c) {
  using csv::format;
  std::ostringstream o;
  o << "[system]\nomega_rabi = " << format(c.system.omega_rabi)
    << "\nepsilon = " << format(c.system.epsilon) << "\n\n";
  o << "[spectral_density]\nxi = " << format(c.spectral_density.xi)
    << "\nomega_c = " << format(c.spectral_density.omega_c) << "\n\n";
  o << "[bath]\nn_modes = " << c.n_modes << "\n";
  if (!c.bath_csv.empty()) o << "bath_csv = " << c.bath_csv << "\n";
  if (!c.ic_csv.empty()) o << "ic_csv = " << c.ic_csv << "\n";
  o << "\n[thermal]\nbeta = " << format(c.thermal.beta) << "\n\n";
  const auto& th = c.evolution.theta0;
  o << "[evolution]\ndt = " << format(c.evolution.dt)
    << "\nt_max = " << format(c.evolution.t_max)
    << "\nlambda_reg = "
    << (c.evolution.lambda_reg ? format(*c.evolution.lambda_reg) : std::string("auto"))
    << "\nbackend = " << ensemble::to_string(c.backend) << "\ntheta0 = "
    << detail::join(std::vector<double>{th(0), th(1), th(2), th(3)}) << "\n\n";
  o << "[ensemble]\nn_samples = " << c.n_samples << "\nseed = " << c.seed
    << "\nworkers = " << c.workers << "\n\n";
  o << "[shots]\nshots = " << c.shots
    << "\nshots_list = " << detail::join(c.shots_list) << "\n\n";
  o << "[noise]\np1 = " << format(c.noise.p1) << "\np2 = " << format(c.noise.p2)
    << "\nro = " << format(c.noise.ro)
    << "\nmethod = " << detail::noise_method_name(c.noise.method) << "\n\n";
  o << "[convergence]\ncheckpoints = " << detail::join(c.checkpoints) << "\n";
  return o.str();
}

/// 64-bit FNV-1a, used for config hashes and file checksums.
inline std::uint64_t fnv1a(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : data) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[i] = digits[v & 0xf];
  return s;
}

}  // namespace eacp::experiment
