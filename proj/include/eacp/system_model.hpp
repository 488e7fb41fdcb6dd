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
#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "eacp/bath.hpp"
#include "eacp/csv.hpp"
#include "eacp/numeric.hpp"

/// The driven two-level system H(t) = Omega sigma_x + (epsilon - f(t)) sigma_z
/// and its exact wavefunction propagator.
///
/// The reactant state is |0>, the +1 eigenstate of sigma_z.
namespace eacp::system {

struct SystemParams {
  double omega_rabi = 1.0;
  double epsilon = 0.0;

  void validate() const {
    if (!std::isfinite(omega_rabi) || !std::isfinite(epsilon)) {
      throw ConfigError("system: omega_rabi and epsilon must be finite");
    }
  }
};

struct PopulationSample {
  double t = 0.0;
  double p1 = 1.0;  // reactant
  double p2 = 0.0;  // product
};

inline ComplexMatrix2 hamiltonian(const SystemParams& params, double f) {
  return params.omega_rabi * pauli::x() + (params.epsilon - f) * pauli::z();
}

inline PopulationSample populations(const StateVector2& psi, double t = 0.0) {
  return {t, std::norm(psi(0)), std::norm(psi(1))};
}

inline StateVector2 reactant_state() { return StateVector2(1.0, 0.0); }

/// Midpoint-exponential propagation of i d/dt psi = H(t) psi.
///
/// Each step applies exp(-i H(t + dt/2) dt), so the propagator is unitary
/// and second order in dt. `force_at` maps a time to f(t).
template <typename Force>
std::vector<PopulationSample> propagate_exact(const SystemParams& params,
                                              Force&& force_at, double t_max,
                                              double dt,
                                              StateVector2 psi = reactant_state()) {
  params.validate();
  if (!(dt > 0.0)) throw ConfigError("propagate_exact: dt must be positive");
  if (!(t_max >= 0.0)) throw ConfigError("propagate_exact: t_max must be >= 0");
  const auto n_steps = static_cast<std::size_t>(std::llround(t_max / dt));
  std::vector<PopulationSample> out;
  out.reserve(n_steps + 1);
  out.push_back(populations(psi, 0.0));
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    const double f = force_at(k, t + 0.5 * dt);
    psi = matrix_exp_2x2(hamiltonian(params, f), dt) * psi;
    const double norm2 = psi.squaredNorm();
    if (!std::isfinite(norm2) || std::abs(norm2 - 1.0) > 1e-8) {
      throw NumericalError("propagate_exact: norm drift at step " +
                           std::to_string(k + 1));
    }
    out.push_back(populations(psi, static_cast<double>(k + 1) * dt));
  }
  return out;
}

/// Exact propagation for one bath initial condition.
inline std::vector<PopulationSample> propagate_exact(
    const SystemParams& params, const bath::BathSpec& spec,
    const bath::BathInitialCondition& ic, double t_max, double dt,
    StateVector2 psi = reactant_state()) {
  ic.validate(spec);
  const auto n_steps = static_cast<std::size_t>(std::llround(t_max / dt));
  // Half-step grid: the midpoint of step k is entry 2k + 1.
  const auto table = bath::tabulate_driving_force(spec, ic, 0.5 * dt, 2 * n_steps);
  return propagate_exact(
      params, [&](std::size_t k, double) { return table[2 * k + 1]; }, t_max, dt,
      psi);
}

inline void write_populations_csv(std::ostream& out,
                                  const std::vector<PopulationSample>& samples,
                                  const std::string& method) {
  csv::Writer w(out, {"t", "p1", "p2", "method"});
  for (const auto& s : samples) w.row(s.t, s.p1, s.p2, method);
}

}  // namespace eacp::system
