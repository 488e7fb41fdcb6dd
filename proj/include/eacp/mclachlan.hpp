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
#include <concepts>
#include <cstddef>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "eacp/ansatz.hpp"
#include "eacp/bath.hpp"
#include "eacp/csv.hpp"
#include "eacp/numeric.hpp"
#include "eacp/system_model.hpp"

/// McLachlan equation of motion Re(A) theta' = Im(C) for the ZXZ ansatz,
/// with A_ij = <d_i psi|d_j psi> and C_i = <d_i psi|H|psi>.
namespace eacp::mclachlan {

using ansatz::ThetaVector;

struct McLachlanSystem {
  Eigen::Matrix4d a_real = Eigen::Matrix4d::Zero();
  Eigen::Vector4d c_imag = Eigen::Vector4d::Zero();
  double t = 0.0;

  RealLinearSystem<4> linear_system() const { return {a_real, c_imag}; }
};

inline McLachlanSystem assemble_analytic(const ThetaVector& theta,
                                         const system::SystemParams& params,
                                         double f, double t = 0.0) {
  const auto jet = ansatz::jet(theta);
  const StateVector2 h_psi = system::hamiltonian(params, f) * jet.psi;
  McLachlanSystem sys;
  sys.t = t;
  for (std::size_t i = 0; i < ansatz::kNumParams; ++i) {
    sys.a_real(i, i) = jet.d[i].squaredNorm();
    for (std::size_t j = i + 1; j < ansatz::kNumParams; ++j) {
      const double v = jet.d[i].dot(jet.d[j]).real();
      sys.a_real(i, j) = v;
      sys.a_real(j, i) = v;
    }
    sys.c_imag(i) = jet.d[i].dot(h_psi).imag();
  }
  return sys;
}

inline ThetaVector theta_dot(const McLachlanSystem& sys, double lambda_reg) {
  return solve_regularized(sys.linear_system(), lambda_reg);
}

struct EvolutionConfig {
  double dt = 0.01;
  double t_max = 10.0;
  /// Unset: the backend's own default.
  std::optional<double> lambda_reg;
  ThetaVector theta0 = ThetaVector::Zero();

  std::size_t n_steps() const {
    return static_cast<std::size_t>(std::llround(t_max / dt));
  }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
      throw ConfigError("evolution: dt must be positive");
    }
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) {
      throw ConfigError("evolution: t_max must be >= 0");
    }
    if (lambda_reg && (!(*lambda_reg >= 0.0) || !std::isfinite(*lambda_reg))) {
      throw ConfigError("evolution: lambda_reg must be >= 0");
    }
    if (!theta0.allFinite()) throw ConfigError("evolution: theta0 must be finite");
  }
};

/// Anything that can produce the McLachlan system at (theta, f, t).
template <typename B>
concept ACBackend = requires(B b, const ThetaVector& theta, double f, double t) {
  { b.assemble(theta, f, t) } -> std::convertible_to<McLachlanSystem>;
};

class AnalyticBackend {
 public:
  explicit AnalyticBackend(system::SystemParams params) : params_(params) {}

  McLachlanSystem assemble(const ThetaVector& theta, double f, double t) const {
    return assemble_analytic(theta, params_, f, t);
  }

  double default_regularization() const { return kExactRegularization; }

 private:
  system::SystemParams params_;
};

/// config.lambda_reg if set, else the backend's default, else
/// kDefaultRegularization.
template <ACBackend Backend>
double resolve_regularization(const EvolutionConfig& config, const Backend& backend) {
  if (config.lambda_reg) return *config.lambda_reg;
  if constexpr (requires { { backend.default_regularization() } -> std::convertible_to<double>; }) {
    return backend.default_regularization();
  } else {
    return kDefaultRegularization;
  }
}

struct EvolutionSample {
  double t = 0.0;
  ThetaVector theta = ThetaVector::Zero();
  system::PopulationSample populations;
};

/// RK4 over theta on a fixed grid. `force` holds f on the half-step grid
/// (entry m is f(m dt / 2)), so every RK4 stage sees the force at its own
/// time.
template <ACBackend Backend>
std::vector<EvolutionSample> evolve(const EvolutionConfig& config,
                                    const std::vector<double>& force,
                                    Backend& backend) {
  config.validate();
  const std::size_t n_steps = config.n_steps();
  if (force.size() < 2 * n_steps + 1) {
    throw ConfigError("evolve: force table shorter than the time grid");
  }
  const double dt = config.dt;
  const double lambda = resolve_regularization(config, backend);
  auto deriv = [&](double t, const ThetaVector& theta) -> ThetaVector {
    const auto m = static_cast<std::size_t>(std::llround(2.0 * t / dt));
    return theta_dot(backend.assemble(theta, force[m], t), lambda);
  };

  std::vector<EvolutionSample> out;
  out.reserve(n_steps + 1);
  ThetaVector theta = config.theta0;
  out.push_back({0.0, theta, system::populations(ansatz::state(theta), 0.0)});
  for (std::size_t k = 0; k < n_steps; ++k) {
    const double t = static_cast<double>(k) * dt;
    try {
      theta = rk4_step(deriv, t, theta, dt);
    } catch (const NumericalError& e) {
      throw NumericalError("evolve: aborted after step " + std::to_string(k) +
                           " (t = " + csv::format(t) + "): " + e.what());
    }
    if (!theta.allFinite()) {
      throw NumericalError("evolve: non-finite theta after step " +
                           std::to_string(k + 1) + "; last good t = " +
                           csv::format(t));
    }
    const double t_next = static_cast<double>(k + 1) * dt;
    out.push_back(
        {t_next, theta, system::populations(ansatz::state(theta), t_next)});
  }
  return out;
}

/// Convenience overload: tabulates the bath force for one initial condition.
template <ACBackend Backend>
std::vector<EvolutionSample> evolve(const EvolutionConfig& config,
                                    const bath::BathSpec& spec,
                                    const bath::BathInitialCondition& ic,
                                    Backend& backend) {
  config.validate();
  ic.validate(spec);
  const std::size_t n = config.n_steps();
  return evolve(config,
                bath::tabulate_driving_force(spec, ic, 0.5 * config.dt, 2 * n),
                backend);
}

inline void write_trajectory_csv(std::ostream& out,
                                 const std::vector<EvolutionSample>& samples) {
  csv::Writer w(out,
                {"t", "theta1", "theta2", "theta3", "theta4", "p1", "p2"});
  for (const auto& s : samples) {
    w.row(s.t, s.theta(0), s.theta(1), s.theta(2), s.theta(3),
          s.populations.p1, s.populations.p2);
  }
}

}  // namespace eacp::mclachlan
