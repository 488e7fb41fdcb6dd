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
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "eacp/ansatz.hpp"
#include "eacp/bath.hpp"
#include "eacp/csv.hpp"
#include "eacp/mclachlan.hpp"
#include "eacp/numeric.hpp"
#include "eacp/random.hpp"
#include "eacp/system_model.hpp"

/// Two-qubit (system + ancilla) simulator for the modified Hadamard tests that
/// estimate Re(A) and Im(C).
///
/// Amplitude index is 2 * ancilla + system. An A-circuit prepares the ancilla
/// in |+>, runs the ansatz gates, inserts P_i controlled on ancilla = 0 and
/// P_j controlled on ancilla = 1 at the depths of parameters i and j, and
/// stops after the last insertion (later gates are common to both branches
/// and cancel). The ancilla Z expectation after a final H equals
/// Re<phi_0|phi_1>, or Im<phi_0|phi_1> when an S-dagger precedes the H.
namespace eacp::circuits {

using ansatz::Pauli;
using ansatz::ThetaVector;

enum class Part { real, imag };

inline constexpr int kSystem = 0;
inline constexpr int kAncilla = 1;

enum class OpKind { h, sdg, rz, rx, global_phase, controlled_pauli };

struct Operation {
  OpKind kind;
  int target = kSystem;
  int control_value = -1;  // ancilla value that enables a controlled op
  Pauli pauli = Pauli::z;
  double angle = 0.0;
};

struct HadamardTestCircuit {
  std::vector<Operation> ops;
  bool imag_overlap = false;  // S-dagger inserted before the final H
  double scale = 1.0;         // multiplies the ancilla expectation
};

struct ShotConfig {
  std::uint64_t shots = 0;  // 0 = exact expectation
  std::uint64_t rng_seed = 0;
};

enum class NoiseMethod {
  channel_average,  // exact Pauli-channel outcome probability, then shots
  per_shot,         // sample an error pattern for every shot
};

/// Stochastic Pauli noise: after each single-qubit gate a uniformly chosen
/// X/Y/Z with probability p1, after each controlled gate one of the 15
/// non-identity two-qubit Paulis with probability p2, and a readout flip with
/// probability ro.
struct NoiseParams {
  double p1 = 0.0;
  double p2 = 0.0;
  double ro = 0.0;
  NoiseMethod method = NoiseMethod::channel_average;

  void validate() const {
    for (double p : {p1, p2, ro}) {
      if (!(p >= 0.0 && p <= 0.5)) {
        throw ConfigError("noise: probabilities must lie in [0, 1/2]");
      }
    }
  }
  bool is_zero() const { return p1 == 0.0 && p2 == 0.0 && ro == 0.0; }
};

namespace detail {

inline std::size_t depth_of(std::size_t param) {
  // application order is 3, 2, 1
  return 3 - param;
}

struct Insertion {
  std::size_t param;
  int control_value;
  Pauli pauli;
};

inline void emit_gate(std::vector<Operation>& ops, const ansatz::Gate& g) {
  switch (g.kind) {
    case ansatz::GateKind::rz:
      ops.push_back({OpKind::rz, kSystem, -1, Pauli::z, g.angle});
      break;
    case ansatz::GateKind::rx:
      ops.push_back({OpKind::rx, kSystem, -1, Pauli::x, g.angle});
      break;
    case ansatz::GateKind::global_phase:
      ops.push_back({OpKind::global_phase, kSystem, -1, Pauli::z, g.angle});
      break;
  }
}

/// Ansatz gates through `last_depth` (inclusive) with insertions after the
/// gate of their parameter.
inline void emit_body(std::vector<Operation>& ops, const ThetaVector& theta,
                      int last_depth, const std::vector<Insertion>& inserts) {
  const auto seq = ansatz::gate_sequence(theta);
  for (int d = 0; d <= last_depth && d < 3; ++d) {
    const std::size_t p = ansatz::GateSequence::application_order[d];
    emit_gate(ops, seq.gates[p]);
    for (const auto& ins : inserts) {
      if (ins.param == p) {
        ops.push_back({OpKind::controlled_pauli, kSystem, ins.control_value,
                       ins.pauli, 0.0});
      }
    }
  }
}

inline void finish(HadamardTestCircuit& c) {
  if (c.imag_overlap) c.ops.push_back({OpKind::sdg, kAncilla});
  c.ops.push_back({OpKind::h, kAncilla});
}

}  // namespace detail

/// Circuit for Re or Im of A_ij (0-based, i <= j); value = scale * <Z_anc>.
///
/// d_0 psi = i psi carries no insertion, which gives the prefactor -1/2 for
/// A_0j and 1 for A_00; rotation pairs carry (1/2)^2.
inline HadamardTestCircuit build_a_circuit(const ThetaVector& theta,
                                           std::size_t i, std::size_t j,
                                           Part part) {
  if (i > j || j >= ansatz::kNumParams) {
    throw ConfigError("build_a_circuit: need 0 <= i <= j <= 3");
  }
  HadamardTestCircuit c;
  c.imag_overlap = part == Part::imag;
  c.ops.push_back({OpKind::h, kAncilla});
  std::vector<detail::Insertion> inserts;
  int last_depth = -1;
  const auto seq = ansatz::gate_sequence(theta);
  if (i >= 1) {
    inserts.push_back({i, 0, ansatz::generator(seq.gates[i].kind)});
    last_depth = std::max(last_depth, static_cast<int>(detail::depth_of(i)));
  }
  if (j >= 1) {
    inserts.push_back({j, 1, ansatz::generator(seq.gates[j].kind)});
    last_depth = std::max(last_depth, static_cast<int>(detail::depth_of(j)));
  }
  detail::emit_body(c.ops, theta, last_depth, inserts);
  c.scale = i >= 1 ? 0.25 : (j >= 1 ? -0.5 : 1.0);
  detail::finish(c);
  return c;
}

/// Circuit for Re or Im of <d_i psi|P|psi> with P the Hamiltonian term
/// (X or Z); the caller weights the X term by Omega and the Z term by
/// (epsilon - f).
inline HadamardTestCircuit build_c_circuit(const ThetaVector& theta,
                                           std::size_t i, Pauli term,
                                           Part part) {
  if (i >= ansatz::kNumParams) throw ConfigError("build_c_circuit: need i <= 3");
  if (term == Pauli::y) throw ConfigError("build_c_circuit: term must be X or Z");
  HadamardTestCircuit c;
  c.ops.push_back({OpKind::h, kAncilla});
  std::vector<detail::Insertion> inserts;
  const auto seq = ansatz::gate_sequence(theta);
  if (i >= 1) inserts.push_back({i, 0, ansatz::generator(seq.gates[i].kind)});
  detail::emit_body(c.ops, theta, 2, inserts);
  detail::emit_gate(c.ops, seq.gates[0]);
  c.ops.push_back({OpKind::controlled_pauli, kSystem, 1, term, 0.0});
  // <d_i psi| = (i/2)<phi_0| for rotations and -i<psi| for the phase.
  if (i >= 1) {
    c.imag_overlap = part == Part::real;
    c.scale = part == Part::real ? -0.5 : 0.5;
  } else {
    c.imag_overlap = part == Part::real;
    c.scale = part == Part::real ? 1.0 : -1.0;
  }
  detail::finish(c);
  return c;
}

// ---------------------------------------------------------------------------
// Simulation

using State4 = Eigen::Vector4cd;
using Matrix4c = Eigen::Matrix4cd;

namespace detail {

inline ComplexMatrix2 op_matrix(const Operation& op) {
  const double r = 1.0 / std::sqrt(2.0);
  ComplexMatrix2 m;
  switch (op.kind) {
    case OpKind::h:
      m << r, r, r, -r;
      return m;
    case OpKind::sdg:
      m << 1.0, 0.0, 0.0, -kI;
      return m;
    case OpKind::rz: return ansatz::rz(op.angle);
    case OpKind::rx: return ansatz::rx(op.angle);
    case OpKind::global_phase:
      return std::polar(1.0, op.angle) * ComplexMatrix2::Identity();
    case OpKind::controlled_pauli: return ansatz::pauli_matrix(op.pauli);
  }
  return ComplexMatrix2::Identity();
}

inline Matrix4c kron(const ComplexMatrix2& anc, const ComplexMatrix2& sys) {
  Matrix4c out;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b)
      for (int s = 0; s < 2; ++s)
        for (int t = 0; t < 2; ++t) out(2 * a + s, 2 * b + t) = anc(a, b) * sys(s, t);
  return out;
}

inline Matrix4c full_unitary(const Operation& op) {
  const ComplexMatrix2 u = op_matrix(op);
  const ComplexMatrix2 id = ComplexMatrix2::Identity();
  if (op.kind == OpKind::controlled_pauli) {
    ComplexMatrix2 on = ComplexMatrix2::Zero(), off = ComplexMatrix2::Zero();
    on(op.control_value, op.control_value) = 1.0;
    off(1 - op.control_value, 1 - op.control_value) = 1.0;
    return kron(on, u) + kron(off, id);
  }
  if (op.kind == OpKind::global_phase) return u(0, 0) * Matrix4c::Identity();
  return op.target == kAncilla ? kron(u, id) : kron(id, u);
}

inline void apply(State4& psi, const Operation& op) {
  const ComplexMatrix2 u = op_matrix(op);
  switch (op.kind) {
    case OpKind::global_phase:
      psi *= u(0, 0);
      return;
    case OpKind::controlled_pauli: {
      const int a = op.control_value;
      const Complex s0 = psi(2 * a), s1 = psi(2 * a + 1);
      psi(2 * a) = u(0, 0) * s0 + u(0, 1) * s1;
      psi(2 * a + 1) = u(1, 0) * s0 + u(1, 1) * s1;
      return;
    }
    default:
      break;
  }
  const int stride = op.target == kAncilla ? 2 : 1;
  for (int base : {0, op.target == kAncilla ? 1 : 2}) {
    const Complex v0 = psi(base), v1 = psi(base + stride);
    psi(base) = u(0, 0) * v0 + u(0, 1) * v1;
    psi(base + stride) = u(1, 0) * v0 + u(1, 1) * v1;
  }
}

inline bool is_two_qubit(const Operation& op) {
  return op.kind == OpKind::controlled_pauli;
}

inline bool is_noisy_gate(const Operation& op) {
  return op.kind != OpKind::global_phase;
}

inline const std::array<ComplexMatrix2, 4>& paulis() {
  static const std::array<ComplexMatrix2, 4> p{pauli::identity(), pauli::x(),
                                               pauli::y(), pauli::z()};
  return p;
}

/// Pauli string index k in 0..15 as (anc = k / 4, sys = k % 4).
inline Matrix4c two_qubit_pauli(int k) {
  return kron(paulis()[k / 4], paulis()[k % 4]);
}

inline Matrix4c single_qubit_pauli(int target, int k) {
  return target == kAncilla ? two_qubit_pauli(4 * k) : two_qubit_pauli(k);
}

inline double ancilla_z(const State4& psi) {
  return std::norm(psi(0)) + std::norm(psi(1)) - std::norm(psi(2)) -
         std::norm(psi(3));
}

inline double sample_mean(double expectation, std::uint64_t shots,
                          Engine& engine) {
  const double p = std::clamp(0.5 * (1.0 + expectation), 0.0, 1.0);
  std::binomial_distribution<std::uint64_t> binom(shots, p);
  const auto k = binom(engine);
  return (2.0 * static_cast<double>(k) - static_cast<double>(shots)) /
         static_cast<double>(shots);
}

}  // namespace detail

/// Noiseless ancilla <Z> from the four-amplitude statevector.
inline double exact_expectation(const HadamardTestCircuit& c) {
  State4 psi = State4::Zero();
  psi(0) = 1.0;
  for (const auto& op : c.ops) detail::apply(psi, op);
  return detail::ancilla_z(psi);
}

/// Noisy ancilla <Z> averaged over the Pauli channel, including readout flips.
inline double noisy_expectation(const HadamardTestCircuit& c,
                                const NoiseParams& noise) {
  Matrix4c rho = Matrix4c::Zero();
  rho(0, 0) = 1.0;
  for (const auto& op : c.ops) {
    const Matrix4c u = detail::full_unitary(op);
    rho = u * rho * u.adjoint();
    if (!detail::is_noisy_gate(op)) continue;
    if (detail::is_two_qubit(op)) {
      if (noise.p2 > 0.0) {
        Matrix4c acc = Matrix4c::Zero();
        for (int k = 1; k < 16; ++k) {
          const Matrix4c p = detail::two_qubit_pauli(k);
          acc += p * rho * p;
        }
        rho = (1.0 - noise.p2) * rho + (noise.p2 / 15.0) * acc;
      }
    } else if (noise.p1 > 0.0) {
      Matrix4c acc = Matrix4c::Zero();
      for (int k = 1; k < 4; ++k) {
        const Matrix4c p = detail::single_qubit_pauli(op.target, k);
        acc += p * rho * p;
      }
      rho = (1.0 - noise.p1) * rho + (noise.p1 / 3.0) * acc;
    }
  }
  const double z = rho(0, 0).real() + rho(1, 1).real() - rho(2, 2).real() -
                   rho(3, 3).real();
  return (1.0 - 2.0 * noise.ro) * z;
}

/// Ancilla <Z> estimate.
///
/// shots == 0 returns the exact (or channel-averaged noisy) expectation;
/// otherwise the mean of `shots` +-1 outcomes.
inline double run(const HadamardTestCircuit& c, std::uint64_t shots,
                  const std::optional<NoiseParams>& noise, Engine& engine) {
  if (!noise || noise->is_zero()) {
    const double z = exact_expectation(c);
    return shots == 0 ? z : detail::sample_mean(z, shots, engine);
  }
  noise->validate();
  if (noise->method == NoiseMethod::channel_average || shots == 0) {
    const double z = noisy_expectation(c, *noise);
    return shots == 0 ? z : detail::sample_mean(z, shots, engine);
  }
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  std::uniform_int_distribution<int> pick3(1, 3), pick15(1, 15);
  std::int64_t total = 0;
  for (std::uint64_t s = 0; s < shots; ++s) {
    State4 psi = State4::Zero();
    psi(0) = 1.0;
    for (const auto& op : c.ops) {
      detail::apply(psi, op);
      if (!detail::is_noisy_gate(op)) continue;
      if (detail::is_two_qubit(op)) {
        if (u01(engine) < noise->p2) psi = detail::two_qubit_pauli(pick15(engine)) * psi;
      } else if (u01(engine) < noise->p1) {
        psi = detail::single_qubit_pauli(op.target, pick3(engine)) * psi;
      }
    }
    const double p0 = std::norm(psi(0)) + std::norm(psi(1));
    bool zero = u01(engine) < p0;
    if (u01(engine) < noise->ro) zero = !zero;
    total += zero ? 1 : -1;
  }
  return static_cast<double>(total) / static_cast<double>(shots);
}

inline double run(const HadamardTestCircuit& c, const ShotConfig& shots,
                  const std::optional<NoiseParams>& noise = std::nullopt) {
  Engine engine = substream(shots.rng_seed, 0, Stream::circuits);
  return run(c, shots.shots, noise, engine);
}

/// scale * run(...): the A element or C term the circuit encodes.
inline double estimate(const HadamardTestCircuit& c, std::uint64_t shots,
                       const std::optional<NoiseParams>& noise, Engine& engine) {
  return c.scale * run(c, shots, noise, engine);
}

/// All 10 upper-triangle Re(A) entries and 4 Im(C) entries (two Pauli terms
/// each) from circuit estimates; Re(A) mirrored.
inline mclachlan::McLachlanSystem assemble_from_circuits(
    const ThetaVector& theta, const system::SystemParams& params, double f,
    double t, std::uint64_t shots, const std::optional<NoiseParams>& noise,
    Engine& engine) {
  mclachlan::McLachlanSystem sys;
  sys.t = t;
  for (std::size_t i = 0; i < ansatz::kNumParams; ++i) {
    for (std::size_t j = i; j < ansatz::kNumParams; ++j) {
      const double v =
          estimate(build_a_circuit(theta, i, j, Part::real), shots, noise, engine);
      sys.a_real(i, j) = v;
      sys.a_real(j, i) = v;
    }
  }
  const double g = params.epsilon - f;
  for (std::size_t i = 0; i < ansatz::kNumParams; ++i) {
    const double x =
        estimate(build_c_circuit(theta, i, Pauli::x, Part::imag), shots, noise, engine);
    const double z =
        estimate(build_c_circuit(theta, i, Pauli::z, Part::imag), shots, noise, engine);
    sys.c_imag(i) = params.omega_rabi * x + g * z;
  }
  return sys;
}

inline mclachlan::McLachlanSystem assemble_circuit_backend(
    const ThetaVector& theta, double t, const system::SystemParams& params,
    const bath::BathSpec& spec, const bath::BathInitialCondition& ic,
    std::uint64_t shots, const std::optional<NoiseParams>& noise,
    Engine& engine) {
  return assemble_from_circuits(theta, params, bath::driving_force(spec, ic, t),
                                t, shots, noise, engine);
}

/// ACBackend over simulated circuits; owns its random stream.
class CircuitBackend {
 public:
  CircuitBackend(system::SystemParams params, std::uint64_t shots,
                 std::optional<NoiseParams> noise, Engine engine)
      : params_(params), shots_(shots), noise_(noise), engine_(std::move(engine)) {
    if (noise_) noise_->validate();
  }

  mclachlan::McLachlanSystem assemble(const ThetaVector& theta, double f,
                                      double t) {
    return assemble_from_circuits(theta, params_, f, t, shots_, noise_, engine_);
  }

  /// kExactRegularization at zero shots, else kDefaultRegularization.
  double default_regularization() const {
    return shots_ == 0 ? kExactRegularization : kDefaultRegularization;
  }

 private:
  system::SystemParams params_;
  std::uint64_t shots_;
  std::optional<NoiseParams> noise_;
  Engine engine_;
};

/// One gate per line: name, target, control, angle ("-" when absent).
inline std::string to_text(const HadamardTestCircuit& c) {
  auto qubit = [](int q) { return q == kAncilla ? "anc" : "sys"; };
  std::ostringstream out;
  for (const auto& op : c.ops) {
    std::string name;
    std::string angle = "-";
    switch (op.kind) {
      case OpKind::h: name = "h"; break;
      case OpKind::sdg: name = "sdg"; break;
      case OpKind::rz: name = "rz"; angle = csv::format(op.angle); break;
      case OpKind::rx: name = "rx"; angle = csv::format(op.angle); break;
      case OpKind::global_phase: name = "gphase"; angle = csv::format(op.angle); break;
      case OpKind::controlled_pauli:
        name = op.pauli == Pauli::x ? "cx" : op.pauli == Pauli::y ? "cy" : "cz";
        break;
    }
    const std::string control =
        op.control_value < 0 ? "-" : "anc=" + std::to_string(op.control_value);
    out << name << ' ' << qubit(op.target) << ' ' << control << ' ' << angle
        << '\n';
  }
  out << "measure anc z scale=" << csv::format(c.scale) << '\n';
  return out.str();
}

}  // namespace eacp::circuits
