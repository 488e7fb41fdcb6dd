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
#include <atomic>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iostream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "eacp/bath.hpp"
#include "eacp/circuits.hpp"
#include "eacp/csv.hpp"
#include "eacp/mclachlan.hpp"
#include "eacp/numeric.hpp"
#include "eacp/random.hpp"
#include "eacp/system_model.hpp"

/// Monte Carlo averaging over bath initial conditions, convergence scans and
/// shot-noise statistics.
namespace eacp::ensemble {

enum class BackendKind { analytic, statevector, shots, noisy };

inline std::string to_string(BackendKind k) {
  switch (k) {
    case BackendKind::analytic: return "analytic";
    case BackendKind::statevector: return "statevector";
    case BackendKind::shots: return "shots";
    case BackendKind::noisy: return "noisy";
  }
  return "?";
}

inline BackendKind parse_backend(const std::string& s) {
  if (s == "analytic") return BackendKind::analytic;
  if (s == "statevector") return BackendKind::statevector;
  if (s == "shots") return BackendKind::shots;
  if (s == "noisy") return BackendKind::noisy;
  throw ConfigError("unknown backend '" + s + "'");
}

struct BackendConfig {
  BackendKind kind = BackendKind::analytic;
  std::uint64_t shots = 50'000;
  circuits::NoiseParams noise;
};

/// One variational trajectory with the configured backend. The circuit
/// engine is only consumed by the shot and noisy backends.
inline std::vector<mclachlan::EvolutionSample> run_trajectory(
    const mclachlan::EvolutionConfig& evolution, const BackendConfig& backend,
    const system::SystemParams& params, const std::vector<double>& force,
    Engine circuit_engine) {
  switch (backend.kind) {
    case BackendKind::analytic: {
      mclachlan::AnalyticBackend b(params);
      return mclachlan::evolve(evolution, force, b);
    }
    case BackendKind::statevector: {
      circuits::CircuitBackend b(params, 0, std::nullopt, std::move(circuit_engine));
      return mclachlan::evolve(evolution, force, b);
    }
    case BackendKind::shots: {
      circuits::CircuitBackend b(params, backend.shots, std::nullopt,
                                 std::move(circuit_engine));
      return mclachlan::evolve(evolution, force, b);
    }
    case BackendKind::noisy: {
      circuits::CircuitBackend b(params, backend.shots, backend.noise,
                                 std::move(circuit_engine));
      return mclachlan::evolve(evolution, force, b);
    }
  }
  throw ConfigError("run_trajectory: unknown backend");
}

struct EnsembleConfig {
  std::size_t n_samples = 10'000;
  std::uint64_t base_seed = 1;
  mclachlan::EvolutionConfig evolution;
  BackendConfig backend;
  bath::ThermalParams thermal;
  unsigned workers = 0;  // 0 = hardware concurrency
  bool keep_trajectories = false;
  double max_failure_fraction = 0.01;

  void validate() const {
    if (n_samples < 1) throw ConfigError("ensemble: n_samples must be >= 1");
    evolution.validate();
    thermal.validate();
    backend.noise.validate();
  }
};

struct EnsembleResult {
  std::vector<double> times;
  std::vector<double> mean_p1;
  std::vector<double> mean_p2;
  std::vector<double> stderr_p1;
  std::size_t n_samples = 0;  // trajectories that contributed
  std::vector<std::size_t> failed;
  /// P1(t) of every successful trajectory in index order, when requested.
  std::vector<std::vector<double>> per_trajectory_p1;
};

namespace detail {

/// Elementwise pairwise sum of rows[lo, hi); a fixed recursion tree so the
/// result does not depend on how the rows were produced.
inline std::vector<double> pairwise_sum(
    std::span<const std::vector<double>* const> rows) {
  if (rows.size() <= 8) {
    std::vector<double> acc(rows.front()->size(), 0.0);
    for (const auto* r : rows)
      for (std::size_t t = 0; t < acc.size(); ++t) acc[t] += (*r)[t];
    return acc;
  }
  const std::size_t mid = rows.size() / 2;
  auto left = pairwise_sum(rows.first(mid));
  const auto right = pairwise_sum(rows.subspan(mid));
  for (std::size_t t = 0; t < left.size(); ++t) left[t] += right[t];
  return left;
}

inline std::vector<double> pairwise_mean(
    std::span<const std::vector<double>* const> rows) {
  auto s = pairwise_sum(rows);
  for (auto& v : s) v /= static_cast<double>(rows.size());
  return s;
}

template <typename Fn>
void parallel_for(std::size_t n, unsigned workers, Fn&& fn) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
  if (workers <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t k = next++; k < n; k = next++) fn(k);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace detail

/// Bath initial condition of trajectory `index`.
inline bath::BathInitialCondition initial_condition(const bath::BathSpec& spec,
                                                    const bath::ThermalParams& thermal,
                                                    std::uint64_t base_seed,
                                                    std::size_t index) {
  Engine engine = substream(base_seed, index, Stream::bath);
  return bath::sample_wigner(spec, thermal, engine);
}

/// Trajectory `index` of an ensemble, returned as P1 and P2 series.
inline std::vector<mclachlan::EvolutionSample> ensemble_member(
    const EnsembleConfig& config, const system::SystemParams& params,
    const bath::BathSpec& spec, std::size_t index) {
  const auto ic = initial_condition(spec, config.thermal, config.base_seed, index);
  const std::size_t n = config.evolution.n_steps();
  const auto force =
      bath::tabulate_driving_force(spec, ic, 0.5 * config.evolution.dt, 2 * n);
  return run_trajectory(config.evolution, config.backend, params, force,
                        substream(config.base_seed, index, Stream::circuits));
}

/// Averages P1/P2 over trajectories produced by `member(k)` for
/// k in [0, n_samples).
///
/// Results land in per-index slots and are reduced with a fixed pairwise
/// tree, so the output is identical for any worker count. Trajectories that
/// throw NumericalError are excluded with a warning; more than
/// `max_failure_fraction` of them fails the run.
template <typename Member>
EnsembleResult aggregate(const EnsembleConfig& config, Member&& member) {
  const std::size_t m = config.n_samples;
  const std::size_t n_times = config.evolution.n_steps() + 1;
  std::vector<std::vector<double>> p1(m), p2(m);
  std::vector<char> ok(m, 0);
  std::vector<std::string> errors(m);

  detail::parallel_for(m, config.workers, [&](std::size_t k) {
    try {
      const std::vector<mclachlan::EvolutionSample> samples = member(k);
      if (samples.size() != n_times) {
        throw NumericalError("trajectory has " + std::to_string(samples.size()) +
                             " samples, expected " + std::to_string(n_times));
      }
      p1[k].resize(n_times);
      p2[k].resize(n_times);
      for (std::size_t t = 0; t < n_times; ++t) {
        p1[k][t] = samples[t].populations.p1;
        p2[k][t] = samples[t].populations.p2;
      }
      ok[k] = 1;
    } catch (const NumericalError& e) {
      errors[k] = e.what();
    }
  });

  EnsembleResult result;
  std::vector<const std::vector<double>*> rows1, rows2;
  for (std::size_t k = 0; k < m; ++k) {
    if (ok[k]) {
      rows1.push_back(&p1[k]);
      rows2.push_back(&p2[k]);
    } else {
      result.failed.push_back(k);
      std::cerr << "warning: trajectory " << k << " excluded: " << errors[k]
                << '\n';
    }
  }
  if (static_cast<double>(result.failed.size()) >
          config.max_failure_fraction * static_cast<double>(m) ||
      rows1.empty()) {
    throw NumericalError("run_ensemble: " + std::to_string(result.failed.size()) +
                         " of " + std::to_string(m) +
                         " trajectories aborted (cap exceeded)");
  }

  result.n_samples = rows1.size();
  result.times.resize(n_times);
  for (std::size_t t = 0; t < n_times; ++t) {
    result.times[t] = static_cast<double>(t) * config.evolution.dt;
  }
  result.mean_p1 = detail::pairwise_mean(rows1);
  result.mean_p2 = detail::pairwise_mean(rows2);

  result.stderr_p1.assign(n_times, 0.0);
  if (rows1.size() > 1) {
    std::vector<std::vector<double>> sq(rows1.size(), std::vector<double>(n_times));
    std::vector<const std::vector<double>*> sq_rows;
    for (std::size_t k = 0; k < rows1.size(); ++k) {
      for (std::size_t t = 0; t < n_times; ++t) {
        const double d = (*rows1[k])[t] - result.mean_p1[t];
        sq[k][t] = d * d;
      }
      sq_rows.push_back(&sq[k]);
    }
    const auto ss = detail::pairwise_sum(sq_rows);
    const double n = static_cast<double>(rows1.size());
    for (std::size_t t = 0; t < n_times; ++t) {
      result.stderr_p1[t] = std::sqrt(ss[t] / (n - 1.0) / n);
    }
  }
  if (config.keep_trajectories) {
    for (std::size_t k = 0; k < m; ++k)
      if (ok[k]) result.per_trajectory_p1.push_back(std::move(p1[k]));
  }
  return result;
}

/// Monte Carlo average over `n_samples` Wigner-sampled bath initial
/// conditions; trajectory k uses the substreams (base_seed, k).
inline EnsembleResult run_ensemble(const EnsembleConfig& config,
                                   const system::SystemParams& params,
                                   const bath::BathSpec& spec) {
  config.validate();
  params.validate();
  return aggregate(config, [&](std::size_t k) {
    return ensemble_member(config, params, spec, k);
  });
}

struct ConvergencePoint {
  std::size_t m = 0;
  double max_abs_deviation = 0.0;
};

/// Max over t of |running mean of the first m trajectories - full mean|.
inline std::vector<ConvergencePoint> convergence_scan(
    const EnsembleResult& result, const std::vector<std::size_t>& checkpoints) {
  const std::size_t total = result.per_trajectory_p1.size();
  if (total == 0) {
    throw ConfigError("convergence_scan: ensemble was run without trajectories");
  }
  if (!std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      checkpoints.empty() || checkpoints.back() > total || checkpoints.front() < 1) {
    throw ConfigError("convergence_scan: checkpoints must be ascending in [1, M]");
  }
  std::vector<const std::vector<double>*> rows;
  for (const auto& r : result.per_trajectory_p1) rows.push_back(&r);
  const auto full = detail::pairwise_mean(rows);
  std::vector<ConvergencePoint> out;
  for (std::size_t m : checkpoints) {
    const auto partial = detail::pairwise_mean(std::span(rows).first(m));
    double dev = 0.0;
    for (std::size_t t = 0; t < full.size(); ++t) {
      dev = std::max(dev, std::abs(partial[t] - full[t]));
    }
    out.push_back({m, dev});
  }
  return out;
}

inline std::vector<ConvergencePoint> convergence_scan(
    EnsembleConfig config, const system::SystemParams& params,
    const bath::BathSpec& spec, const std::vector<std::size_t>& checkpoints) {
  if (checkpoints.empty() || checkpoints.back() != config.n_samples) {
    throw ConfigError("convergence_scan: last checkpoint must equal n_samples");
  }
  config.keep_trajectories = true;
  return convergence_scan(run_ensemble(config, params, spec), checkpoints);
}

/// Least-squares slope of log(deviation) against log(m), skipping zero
/// deviations (the final checkpoint).
inline double fit_exponent(const std::vector<ConvergencePoint>& points) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double n = 0;
  for (const auto& p : points) {
    if (!(p.max_abs_deviation > 0.0)) continue;
    const double x = std::log(static_cast<double>(p.m));
    const double y = std::log(p.max_abs_deviation);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    n += 1;
  }
  if (n < 2) throw ConfigError("fit_exponent: need two nonzero deviations");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------------------
// Shot-noise statistics

/// Linear-interpolation quantile (q in [0, 1]) of a sorted sample.
inline double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = pos - static_cast<double>(lo);
  return sorted[lo] + w * (sorted[hi] - sorted[lo]);
}

struct ErrorStatsRow {
  std::string element;  // "A12", "C3", 1-based
  std::uint64_t shots = 0;
  double median = 0, q1 = 0, q3 = 0, p0_5 = 0, p99_5 = 0;
  double median_abs = 0;
  double mean = 0;
  double stddev = 0;
  std::size_t n = 0;
  bool deterministic = false;  // every circuit has outcome probability 0 or 1
};

using ErrorStats = std::vector<ErrorStatsRow>;

/// Signed circuit-estimate errors of every nonzero Re(A) / Im(C) element
/// along a reference trajectory, summarized per element and shot count.
inline ErrorStats shot_error_stats(
    const std::vector<mclachlan::EvolutionSample>& reference,
    const system::SystemParams& params, const bath::BathSpec& spec,
    const bath::BathInitialCondition& ic,
    const std::vector<std::uint64_t>& shots_list, std::uint64_t seed) {
  if (reference.empty()) throw ConfigError("shot_error_stats: empty trajectory");
  using circuits::Part;
  using circuits::Pauli;
  struct Element {
    std::string name;
    std::function<double(const mclachlan::McLachlanSystem&)> exact;
    std::function<double(const ansatz::ThetaVector&, double, std::uint64_t,
                         Engine&)>
        estimate;
    std::function<bool(const ansatz::ThetaVector&)> deterministic;
  };
  constexpr double kUnit = 1.0 - 1e-12;
  std::vector<Element> elements;
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i; j < 4; ++j) {
      elements.push_back(
          {"A" + std::to_string(i + 1) + std::to_string(j + 1),
           [i, j](const mclachlan::McLachlanSystem& s) { return s.a_real(i, j); },
           [i, j](const ansatz::ThetaVector& th, double, std::uint64_t shots,
                  Engine& e) {
             return circuits::estimate(circuits::build_a_circuit(th, i, j, Part::real),
                                       shots, std::nullopt, e);
           },
           [i, j, kUnit](const ansatz::ThetaVector& th) {
             return std::abs(circuits::exact_expectation(
                        circuits::build_a_circuit(th, i, j, Part::real))) >= kUnit;
           }});
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    elements.push_back(
        {"C" + std::to_string(i + 1),
         [i](const mclachlan::McLachlanSystem& s) { return s.c_imag(i); },
         [i, &params](const ansatz::ThetaVector& th, double f, std::uint64_t shots,
                      Engine& e) {
           const double x = circuits::estimate(
               circuits::build_c_circuit(th, i, Pauli::x, Part::imag), shots,
               std::nullopt, e);
           const double z = circuits::estimate(
               circuits::build_c_circuit(th, i, Pauli::z, Part::imag), shots,
               std::nullopt, e);
           return params.omega_rabi * x + (params.epsilon - f) * z;
         },
         [i, kUnit](const ansatz::ThetaVector& th) {
           for (auto p : {Pauli::x, Pauli::z}) {
             if (std::abs(circuits::exact_expectation(
                     circuits::build_c_circuit(th, i, p, Part::imag))) < kUnit)
               return false;
           }
           return true;
         }});
  }

  std::vector<double> forces;
  std::vector<mclachlan::McLachlanSystem> exact;
  for (const auto& s : reference) {
    forces.push_back(bath::driving_force(spec, ic, s.t));
    exact.push_back(mclachlan::assemble_analytic(s.theta, params, forces.back(), s.t));
  }

  ErrorStats stats;
  for (std::size_t e = 0; e < elements.size(); ++e) {
    const auto& el = elements[e];
    double max_abs = 0.0;
    bool deterministic = true;
    for (std::size_t k = 0; k < reference.size(); ++k) {
      max_abs = std::max(max_abs, std::abs(el.exact(exact[k])));
      deterministic = deterministic && el.deterministic(reference[k].theta);
    }
    if (max_abs <= 1e-12) continue;  // structurally zero

    for (std::size_t si = 0; si < shots_list.size(); ++si) {
      const std::uint64_t shots = shots_list[si];
      Engine engine = substream(seed, e * 1000 + si, Stream::circuits);
      std::vector<double> err;
      err.reserve(reference.size());
      for (std::size_t k = 0; k < reference.size(); ++k) {
        err.push_back(el.estimate(reference[k].theta, forces[k], shots, engine) -
                      el.exact(exact[k]));
      }
      ErrorStatsRow row;
      row.element = el.name;
      row.shots = shots;
      row.n = err.size();
      row.deterministic = deterministic;
      double sum = 0.0;
      for (double v : err) sum += v;
      row.mean = sum / static_cast<double>(err.size());
      double ss = 0.0;
      for (double v : err) ss += (v - row.mean) * (v - row.mean);
      row.stddev = err.size() > 1 ? std::sqrt(ss / static_cast<double>(err.size() - 1)) : 0.0;
      std::vector<double> abs_err;
      for (double v : err) abs_err.push_back(std::abs(v));
      std::sort(err.begin(), err.end());
      std::sort(abs_err.begin(), abs_err.end());
      row.median = quantile_sorted(err, 0.5);
      row.q1 = quantile_sorted(err, 0.25);
      row.q3 = quantile_sorted(err, 0.75);
      row.p0_5 = quantile_sorted(err, 0.005);
      row.p99_5 = quantile_sorted(err, 0.995);
      row.median_abs = quantile_sorted(abs_err, 0.5);
      stats.push_back(row);
    }
  }
  return stats;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_ensemble_csv(std::ostream& out, const EnsembleResult& r) {
  csv::Writer w(out, {"t", "mean_p1", "mean_p2", "stderr_p1", "n_samples"});
  for (std::size_t t = 0; t < r.times.size(); ++t) {
    w.row(r.times[t], r.mean_p1[t], r.mean_p2[t], r.stderr_p1[t], r.n_samples);
  }
}

inline void write_error_stats_csv(std::ostream& out, const ErrorStats& stats) {
  csv::Writer w(out, {"element", "shots", "median", "q1", "q3", "p0_5", "p99_5",
                      "median_abs"});
  for (const auto& r : stats) {
    w.row(r.element, r.shots, r.median, r.q1, r.q3, r.p0_5, r.p99_5, r.median_abs);
  }
}

inline void write_convergence_csv(std::ostream& out,
                                  const std::vector<ConvergencePoint>& points) {
  csv::Writer w(out, {"m", "max_abs_dev_p1"});
  for (const auto& p : points) w.row(p.m, p.max_abs_deviation);
}

}  // namespace eacp::ensemble
