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

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "eacp/csv.hpp"
#include "eacp/numeric.hpp"
#include "eacp/random.hpp"

/// Harmonic bath: Ohmic spectral density, its discretization into modes,
/// thermal Wigner sampling of initial conditions and the free classical
/// trajectories that drive the system.
namespace eacp::bath {

struct SpectralDensityParams {
  double xi = 2.0;       // Kondo parameter
  double omega_c = 1.5;  // cutoff frequency

  void validate() const {
    if (!(xi > 0.0) || !std::isfinite(xi)) {
      throw ConfigError("spectral density: xi must be positive");
    }
    if (!(omega_c > 0.0) || !std::isfinite(omega_c)) {
      throw ConfigError("spectral density: omega_c must be positive");
    }
  }
};

struct ThermalParams {
  double beta = 1.0;

  void validate() const {
    if (!(beta > 0.0)) throw ConfigError("thermal: beta must be positive");
  }
};

struct BathMode {
  double omega = 0.0;
  double coupling = 0.0;
  double mass = 1.0;
};

/// Immutable list of discretized oscillators, frequencies strictly increasing.
class BathSpec {
 public:
  explicit BathSpec(std::vector<BathMode> modes) : modes_(std::move(modes)) {
    if (modes_.empty()) throw ConfigError("bath: at least one mode required");
    for (std::size_t j = 0; j < modes_.size(); ++j) {
      const auto& m = modes_[j];
      if (!(m.omega > 0.0) || !(m.coupling > 0.0) || !(m.mass > 0.0) ||
          !std::isfinite(m.omega) || !std::isfinite(m.coupling) ||
          !std::isfinite(m.mass)) {
        throw ConfigError("bath: mode " + std::to_string(j + 1) +
                          " has non-positive or non-finite parameters");
      }
      if (j > 0 && !(m.omega > modes_[j - 1].omega)) {
        throw ConfigError("bath: frequencies must be strictly increasing");
      }
    }
  }

  std::size_t size() const { return modes_.size(); }
  const BathMode& operator[](std::size_t j) const { return modes_[j]; }
  std::span<const BathMode> modes() const { return modes_; }

 private:
  std::vector<BathMode> modes_;
};

/// One phase-space point (x0, p0) per mode.
struct BathInitialCondition {
  std::vector<double> x0;
  std::vector<double> p0;

  void validate(const BathSpec& spec) const {
    if (x0.size() != spec.size() || p0.size() != spec.size()) {
      throw ConfigError("initial condition: length does not match the bath");
    }
    for (std::size_t j = 0; j < x0.size(); ++j) {
      if (!std::isfinite(x0[j]) || !std::isfinite(p0[j])) {
        throw ConfigError("initial condition: non-finite entry");
      }
    }
  }
};

/// J(omega) = (pi/2) xi omega exp(-omega / omega_c).
inline double spectral_density(const SpectralDensityParams& params,
                               double omega) {
  if (omega < 0.0) throw ConfigError("spectral_density: omega must be >= 0");
  return 0.5 * std::numbers::pi * params.xi * omega *
         std::exp(-omega / params.omega_c);
}

/// Equal-weight quadrature of J(omega)/omega: every mode carries the same
/// share xi * omega_c / (2 (N+1)) of the reorganization energy.
inline BathSpec discretize(const SpectralDensityParams& params,
                           std::size_t n_modes) {
  params.validate();
  if (n_modes < 1) throw ConfigError("discretize: n_modes must be >= 1");
  const double n1 = static_cast<double>(n_modes + 1);
  std::vector<BathMode> modes;
  modes.reserve(n_modes);
  for (std::size_t j = 1; j <= n_modes; ++j) {
    BathMode m;
    m.mass = 1.0;
    m.omega = -params.omega_c * std::log1p(-static_cast<double>(j) / n1);
    m.coupling = m.omega * std::sqrt(params.xi * m.mass * params.omega_c / n1);
    modes.push_back(m);
  }
  return BathSpec(std::move(modes));
}

/// sum_j c_j^2 / (2 m_j omega_j^2).
inline double reorganization_energy(const BathSpec& spec) {
  double sum = 0.0;
  for (const auto& m : spec.modes()) {
    sum += m.coupling * m.coupling / (2.0 * m.mass * m.omega * m.omega);
  }
  return sum;
}

/// Continuum value (1/pi) int J(omega)/omega domega.
inline double continuum_reorganization_energy(
    const SpectralDensityParams& params) {
  return 0.5 * params.xi * params.omega_c;
}

// Widths of the thermal Wigner Gaussian for a single oscillator.
inline double position_variance(const BathMode& m, double beta) {
  return 1.0 / (2.0 * m.mass * m.omega * std::tanh(0.5 * m.omega * beta));
}

inline double momentum_variance(const BathMode& m, double beta) {
  return m.mass * m.omega / (2.0 * std::tanh(0.5 * m.omega * beta));
}

/// Direct sampling of the product-Gaussian Wigner distribution.
inline BathInitialCondition sample_wigner(const BathSpec& spec,
                                          const ThermalParams& thermal,
                                          Engine& engine) {
  thermal.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  BathInitialCondition ic;
  ic.x0.resize(spec.size());
  ic.p0.resize(spec.size());
  for (std::size_t j = 0; j < spec.size(); ++j) {
    ic.x0[j] = std::sqrt(position_variance(spec[j], thermal.beta)) * normal(engine);
    ic.p0[j] = std::sqrt(momentum_variance(spec[j], thermal.beta)) * normal(engine);
  }
  return ic;
}

inline BathInitialCondition sample_wigner(const BathSpec& spec,
                                          const ThermalParams& thermal,
                                          std::uint64_t seed) {
  Engine engine = substream(seed, 0, Stream::bath);
  return sample_wigner(spec, thermal, engine);
}

/// Random-walk Metropolis chain targeting the same Wigner distribution.
///
/// Slower than sample_wigner and correlated between draws; kept as an
/// alternative for distributions without a closed-form sampler.
class WignerMetropolis {
 public:
  WignerMetropolis(const BathSpec& spec, const ThermalParams& thermal,
                   Engine engine, double step_scale = 1.0)
      : spec_(spec), beta_(thermal.beta), engine_(std::move(engine)) {
    thermal.validate();
    state_.x0.assign(spec.size(), 0.0);
    state_.p0.assign(spec.size(), 0.0);
    for (const auto& m : spec.modes()) {
      sx_.push_back(step_scale * std::sqrt(position_variance(m, beta_)));
      sp_.push_back(step_scale * std::sqrt(momentum_variance(m, beta_)));
    }
  }

  /// One sweep: a single-mode proposal for each mode in turn.
  const BathInitialCondition& sweep() {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    for (std::size_t j = 0; j < spec_.size(); ++j) {
      const double x = state_.x0[j] + sx_[j] * normal(engine_);
      const double p = state_.p0[j] + sp_[j] * normal(engine_);
      const double log_ratio =
          log_density(j, x, p) - log_density(j, state_.x0[j], state_.p0[j]);
      ++proposed_;
      if (log_ratio >= 0.0 || uniform(engine_) < std::exp(log_ratio)) {
        state_.x0[j] = x;
        state_.p0[j] = p;
        ++accepted_;
      }
    }
    return state_;
  }

  double acceptance_rate() const {
    return proposed_ ? static_cast<double>(accepted_) / proposed_ : 0.0;
  }

 private:
  double log_density(std::size_t j, double x, double p) const {
    const auto& m = spec_[j];
    const double t = std::tanh(0.5 * m.omega * beta_);
    return -t * (m.mass * m.omega * x * x + p * p / (m.mass * m.omega));
  }

  const BathSpec& spec_;
  double beta_;
  Engine engine_;
  BathInitialCondition state_;
  std::vector<double> sx_, sp_;
  std::size_t accepted_ = 0, proposed_ = 0;
};

/// Free oscillator positions x_j(t), back-reaction omitted.
inline std::vector<double> trajectory(const BathSpec& spec,
                                      const BathInitialCondition& ic,
                                      double t) {
  std::vector<double> x(spec.size());
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const auto& m = spec[j];
    x[j] = ic.x0[j] * std::cos(m.omega * t) +
           ic.p0[j] / (m.mass * m.omega) * std::sin(m.omega * t);
  }
  return x;
}

/// Momenta p_j(t) along the same free trajectories.
inline std::vector<double> trajectory_momenta(const BathSpec& spec,
                                              const BathInitialCondition& ic,
                                              double t) {
  std::vector<double> p(spec.size());
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const auto& m = spec[j];
    p[j] = -ic.x0[j] * m.mass * m.omega * std::sin(m.omega * t) +
           ic.p0[j] * std::cos(m.omega * t);
  }
  return p;
}

/// f(t) = sum_j c_j x_j(t).
inline double driving_force(const BathSpec& spec,
                            const BathInitialCondition& ic, double t) {
  double f = 0.0;
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const auto& m = spec[j];
    f += m.coupling * (ic.x0[j] * std::cos(m.omega * t) +
                       ic.p0[j] / (m.mass * m.omega) * std::sin(m.omega * t));
  }
  return f;
}

/// f(k h) for k = 0..n_steps.
///
/// Each mode is advanced by a complex phase rotation and re-anchored to the
/// direct evaluation every `kReanchor` samples, which keeps the table within
/// a few ulps of driving_force at a fraction of the cost.
inline std::vector<double> tabulate_driving_force(
    const BathSpec& spec, const BathInitialCondition& ic, double h,
    std::size_t n_steps) {
  constexpr std::size_t kReanchor = 64;
  std::vector<double> f(n_steps + 1, 0.0);
  for (std::size_t j = 0; j < spec.size(); ++j) {
    const auto& m = spec[j];
    // x_j(t) = Re[amp * e^{i omega t}]
    const std::complex<double> amp(ic.x0[j], -ic.p0[j] / (m.mass * m.omega));
    const std::complex<double> rot = std::polar(1.0, m.omega * h);
    std::complex<double> w;
    for (std::size_t k = 0; k <= n_steps; ++k) {
      if (k % kReanchor == 0) {
        w = amp * std::polar(1.0, m.omega * h * static_cast<double>(k));
      } else {
        w *= rot;
      }
      f[k] += m.coupling * w.real();
    }
  }
  return f;
}

inline void write_bath_csv(std::ostream& out, const BathSpec& spec) {
  csv::Writer w(out, {"j", "omega_j", "c_j", "m_j"});
  for (std::size_t j = 0; j < spec.size(); ++j) {
    w.row(j + 1, spec[j].omega, spec[j].coupling, spec[j].mass);
  }
}

inline BathSpec read_bath_csv(std::istream& in) {
  auto table = csv::read(in, {"j", "omega_j", "c_j", "m_j"});
  std::vector<BathMode> modes;
  for (const auto& r : table.rows) modes.push_back({r[1], r[2], r[3]});
  return BathSpec(std::move(modes));
}

inline void write_initial_condition_csv(std::ostream& out,
                                        const BathInitialCondition& ic) {
  csv::Writer w(out, {"j", "x0_j", "p0_j"});
  for (std::size_t j = 0; j < ic.x0.size(); ++j) {
    w.row(j + 1, ic.x0[j], ic.p0[j]);
  }
}

inline BathInitialCondition read_initial_condition_csv(std::istream& in) {
  auto table = csv::read(in, {"j", "x0_j", "p0_j"});
  BathInitialCondition ic;
  for (const auto& r : table.rows) {
    ic.x0.push_back(r[1]);
    ic.p0.push_back(r[2]);
  }
  return ic;
}

}  // namespace eacp::bath
