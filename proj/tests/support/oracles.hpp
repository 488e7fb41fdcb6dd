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

// Reference implementations written independently of the library: closed
// forms by hand, brute-force series, plain loops.

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using C = std::complex<double>;
using M2 = Eigen::Matrix2cd;
using V2 = Eigen::Vector2cd;
using Theta = Eigen::Vector4d;

inline constexpr C I{0.0, 1.0};

/// exp(-i H dt) by scaling and squaring a 40-term Taylor series.
inline M2 expm_series(const M2& h, double dt) {
  int squarings = 0;
  double scale = dt * h.cwiseAbs().maxCoeff();
  while (scale > 0.5) {
    scale *= 0.5;
    ++squarings;
  }
  const M2 a = (-I * dt / std::pow(2.0, squarings)) * h;
  M2 term = M2::Identity();
  M2 sum = M2::Identity();
  for (int k = 1; k <= 40; ++k) {
    term = term * a / static_cast<double>(k);
    sum += term;
  }
  for (int s = 0; s < squarings; ++s) sum = sum * sum;
  return sum;
}

/// exp(-i H dt) through an eigendecomposition.
inline M2 expm_eigen(const M2& h, double dt) {
  Eigen::SelfAdjointEigenSolver<M2> es(h);
  M2 d = M2::Zero();
  for (int k = 0; k < 2; ++k) d(k, k) = std::exp(-I * es.eigenvalues()(k) * dt);
  return es.eigenvectors() * d * es.eigenvectors().adjoint();
}

/// Hand-expanded e^{i t0} Rz(t1) Rx(t2) Rz(t3)|0>.
inline V2 ansatz_state(const Theta& t) {
  const double c = std::cos(0.5 * t(2));
  const double s = std::sin(0.5 * t(2));
  const C pre = std::exp(I * (t(0) - 0.5 * t(3)));
  return V2(pre * std::exp(-0.5 * I * t(1)) * c,
            pre * (-I) * std::exp(0.5 * I * t(1)) * s);
}

/// Hand-differentiated partial derivatives of ansatz_state.
inline std::array<V2, 4> ansatz_derivatives(const Theta& t) {
  const double c = std::cos(0.5 * t(2));
  const double s = std::sin(0.5 * t(2));
  const C pre = std::exp(I * (t(0) - 0.5 * t(3)));
  const C em = std::exp(-0.5 * I * t(1));
  const C ep = std::exp(0.5 * I * t(1));
  const V2 psi = ansatz_state(t);
  std::array<V2, 4> d;
  d[0] = I * psi;
  d[1] = V2(pre * (-0.5 * I) * em * c, pre * (-I) * (0.5 * I) * ep * s);
  d[2] = V2(pre * em * (-0.5 * s), pre * (-I) * ep * (0.5 * c));
  d[3] = -0.5 * I * psi;
  return d;
}

struct AC {
  Eigen::Matrix4d a;
  Eigen::Vector4d c;
};

/// Re<d_i|d_j> and Im<d_i|H|psi> for H = omega X + (eps - f) Z, from the
/// hand derivatives.
inline AC mclachlan(const Theta& t, double omega, double eps, double f) {
  const auto d = ansatz_derivatives(t);
  const V2 psi = ansatz_state(t);
  M2 h;
  h << eps - f, omega, omega, -(eps - f);
  const V2 hpsi = h * psi;
  AC out;
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out.a(i, j) = d[i].dot(d[j]).real();
    out.c(i) = d[i].dot(hpsi).imag();
  }
  return out;
}

/// P1(t) for H = omega X + g Z from |0>: Rabi formula.
inline double rabi_p1(double omega, double g, double t) {
  const double w = std::hypot(omega, g);
  if (w == 0.0) return 1.0;
  const double s = std::sin(w * t);
  return 1.0 - (omega * omega) / (w * w) * s * s;
}

/// Sum of c^2 / (2 m w^2) for equal-share modes: N/(N+1) xi wc / 2.
inline double reorganization(std::size_t n, double xi, double omega_c) {
  return static_cast<double>(n) / static_cast<double>(n + 1) * 0.5 * xi * omega_c;
}

/// <x^2> of a thermal oscillator in its Wigner function.
inline double thermal_x2(double omega, double beta, double mass = 1.0) {
  return 0.5 / (mass * omega) / std::tanh(0.5 * beta * omega);
}

inline double thermal_p2(double omega, double beta, double mass = 1.0) {
  return 0.5 * mass * omega / std::tanh(0.5 * beta * omega);
}

/// Naive left-to-right elementwise mean.
inline std::vector<double> naive_mean(const std::vector<std::vector<double>>& rows) {
  std::vector<double> out(rows.front().size(), 0.0);
  for (const auto& r : rows)
    for (std::size_t t = 0; t < out.size(); ++t) out[t] += r[t];
  for (auto& v : out) v /= static_cast<double>(rows.size());
  return out;
}

}  // namespace oracle
