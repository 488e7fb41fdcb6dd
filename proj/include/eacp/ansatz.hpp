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

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>

#include "eacp/numeric.hpp"

/// Single-qubit ZXZ ansatz |psi(theta)> = e^{i theta_0} Rz(theta_1) Rx(theta_2)
/// Rz(theta_3) |0>, with R_P(a) = exp(-i a P / 2).
///
/// Parameters are indexed 0..3 here; 0 is the global phase. Gates are applied
/// to |0> in the order 3, 2, 1, then the phase.
namespace eacp::ansatz {

using ThetaVector = Eigen::Vector4d;

inline constexpr std::size_t kNumParams = 4;

enum class GateKind { global_phase, rz, rx };

struct Gate {
  GateKind kind;
  std::size_t param;  // index into ThetaVector
  double angle;
};

/// Generator Pauli of a rotation gate.
enum class Pauli { x, y, z };

inline Pauli generator(GateKind kind) {
  return kind == GateKind::rx ? Pauli::x : Pauli::z;
}

inline ComplexMatrix2 pauli_matrix(Pauli p) {
  switch (p) {
    case Pauli::x: return pauli::x();
    case Pauli::y: return pauli::y();
    case Pauli::z: return pauli::z();
  }
  return pauli::identity();
}

/// Gates listed as in the product e^{i theta_0} Rz Rx Rz, so `gates.back()`
/// acts first on |0>.
struct GateSequence {
  std::array<Gate, kNumParams> gates;

  /// Indices in the order the gates act on the state.
  static constexpr std::array<std::size_t, 3> application_order{3, 2, 1};
};

inline GateSequence gate_sequence(const ThetaVector& theta) {
  return {{{{GateKind::global_phase, 0, theta(0)},
            {GateKind::rz, 1, theta(1)},
            {GateKind::rx, 2, theta(2)},
            {GateKind::rz, 3, theta(3)}}}};
}

inline ComplexMatrix2 rz(double a) {
  ComplexMatrix2 m = ComplexMatrix2::Zero();
  m(0, 0) = std::polar(1.0, -0.5 * a);
  m(1, 1) = std::polar(1.0, 0.5 * a);
  return m;
}

inline ComplexMatrix2 rx(double a) {
  const double c = std::cos(0.5 * a);
  const double s = std::sin(0.5 * a);
  ComplexMatrix2 m;
  m << c, Complex(0.0, -s), Complex(0.0, -s), c;
  return m;
}

inline ComplexMatrix2 gate_matrix(const Gate& g) {
  switch (g.kind) {
    case GateKind::global_phase: return std::polar(1.0, g.angle) * pauli::identity();
    case GateKind::rz: return rz(g.angle);
    case GateKind::rx: return rx(g.angle);
  }
  return pauli::identity();
}

inline StateVector2 state(const ThetaVector& theta) {
  StateVector2 psi(1.0, 0.0);
  psi = rz(theta(3)) * psi;
  psi = rx(theta(2)) * psi;
  psi = rz(theta(1)) * psi;
  return std::polar(1.0, theta(0)) * psi;
}

/// The state and all four parameter derivatives.
struct Jet {
  StateVector2 psi;
  std::array<StateVector2, kNumParams> d;
};

inline Jet jet(const ThetaVector& theta) {
  const ComplexMatrix2 g3 = rz(theta(3));
  const ComplexMatrix2 g2 = rx(theta(2));
  const ComplexMatrix2 g1 = rz(theta(1));
  const Complex phase = std::polar(1.0, theta(0));
  const Complex half = -0.5 * kI * phase;
  const StateVector2 s0(1.0, 0.0);
  const StateVector2 s3 = g3 * s0;
  const StateVector2 s2 = g2 * s3;
  const StateVector2 s1 = g1 * s2;

  const ComplexMatrix2 z = pauli::z();
  const ComplexMatrix2 x = pauli::x();
  Jet out;
  out.psi = phase * s1;
  out.d[0] = kI * out.psi;
  out.d[1] = half * (z * s1);
  out.d[2] = half * (g1 * (x * s2));
  out.d[3] = half * (g1 * (g2 * (z * s3)));
  return out;
}

/// d|psi>/d theta_i (not normalized).
inline StateVector2 derivative(const ThetaVector& theta, std::size_t i) {
  if (i >= kNumParams) throw ConfigError("ansatz: parameter index out of range");
  return jet(theta).d[i];
}

/// Closed-form ZXZ angles reproducing a normalized target state, with the
/// gauge choice theta_3 = 0 and theta_2 in [0, pi].
inline ThetaVector angles_for_state(const StateVector2& target) {
  const double a = std::abs(target(0));
  const double b = std::abs(target(1));
  ThetaVector theta = ThetaVector::Zero();
  theta(2) = 2.0 * std::atan2(b, a);
  constexpr double kTiny = 1e-300;
  const double half_pi = 0.5 * std::numbers::pi;
  if (b <= kTiny) {
    theta(0) = std::arg(target(0));
  } else if (a <= kTiny) {
    theta(0) = std::arg(target(1)) + half_pi;
  } else {
    // amp0 = e^{i(t0 - t1/2)} cos, amp1 = -i e^{i(t0 + t1/2)} sin
    const double phase0 = std::arg(target(0));
    const double phase1 = std::arg(target(1)) + half_pi;
    theta(0) = 0.5 * (phase0 + phase1);
    theta(1) = phase1 - phase0;
  }
  return theta;
}

}  // namespace eacp::ansatz
