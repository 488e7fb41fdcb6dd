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
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

/// Small dense linear algebra and integrators shared by every module.
///
/// All quantities are in atomic units with hbar = 1.
namespace eacp {

using Complex = std::complex<double>;
using ComplexMatrix2 = Eigen::Matrix2cd;
using StateVector2 = Eigen::Vector2cd;

inline constexpr Complex kI{0.0, 1.0};

/// Raised when a propagation produces non-finite values or loses norm.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for invalid parameters and malformed inputs.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

namespace pauli {

inline ComplexMatrix2 identity() { return ComplexMatrix2::Identity(); }

inline ComplexMatrix2 x() {
  ComplexMatrix2 m;
  m << 0.0, 1.0, 1.0, 0.0;
  return m;
}

inline ComplexMatrix2 y() {
  ComplexMatrix2 m;
  m << 0.0, -kI, kI, 0.0;
  return m;
}

inline ComplexMatrix2 z() {
  ComplexMatrix2 m;
  m << 1.0, 0.0, 0.0, -1.0;
  return m;
}

}  // namespace pauli

inline bool is_hermitian(const ComplexMatrix2& m, double tol = 1e-12) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

inline bool is_unitary(const ComplexMatrix2& m, double tol = 1e-12) {
  return (m.adjoint() * m - ComplexMatrix2::Identity()).cwiseAbs().maxCoeff() <=
         tol;
}

template <typename Derived>
bool all_finite(const Eigen::DenseBase<Derived>& v) {
  return v.allFinite();
}

inline bool all_finite(double v) { return std::isfinite(v); }

/// Classical fourth-order Runge-Kutta step for y' = deriv(t, y).
///
/// `State` must support `State + State` and `double * State`; scalars and
/// Eigen vectors both qualify. Throws NumericalError if any stage rate is
/// non-finite.
template <typename State, typename Deriv>
State rk4_step(Deriv&& deriv, double t, const State& y, double dt) {
  if (!(dt > 0.0)) throw ConfigError("rk4_step: dt must be positive");
  auto checked = [&](double ts, const State& ys) -> State {
    State k = deriv(ts, ys);
    if (!all_finite(k)) {
      throw NumericalError("rk4_step: non-finite derivative at t = " +
                           std::to_string(ts));
    }
    return k;
  };
  const double half = 0.5 * dt;
  const State k1 = checked(t, y);
  const State k2 = checked(t + half, State(y + half * k1));
  const State k3 = checked(t + half, State(y + half * k2));
  const State k4 = checked(t + dt, State(y + dt * k3));
  return State(y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// A x = c for a small square real system.
template <int N>
struct RealLinearSystem {
  Eigen::Matrix<double, N, N> matrix;
  Eigen::Matrix<double, N, 1> rhs;
};

/// Tikhonov weight for metrics estimated from sampled measurements.
inline constexpr double kDefaultRegularization = 1e-6;
/// Tikhonov weight for exactly evaluated metrics. Only breaks the tie along
/// exact null directions.
inline constexpr double kExactRegularization = 1e-12;

/// argmin_x |A x - c|^2 + lambda |x|^2.
///
/// For lambda > 0 this solves the normal equations (A^T A + lambda I) x = A^T c.
/// For lambda == 0 the system is solved directly and a numerically singular
/// A is reported as an error.
template <int N>
Eigen::Matrix<double, N, 1> solve_regularized(const RealLinearSystem<N>& sys,
                                              double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw ConfigError("solve_regularized: lambda must be finite and >= 0");
  }
  if (lambda == 0.0) {
    Eigen::FullPivLU<Eigen::Matrix<double, N, N>> lu(sys.matrix);
    lu.setThreshold(1e-12);
    if (!lu.isInvertible()) {
      throw NumericalError(
          "solve_regularized: matrix is numerically singular; use lambda > 0");
    }
    return lu.solve(sys.rhs);
  }
  const Eigen::Matrix<double, N, N> normal =
      sys.matrix.transpose() * sys.matrix +
      lambda * Eigen::Matrix<double, N, N>::Identity();
  return normal.ldlt().solve(sys.matrix.transpose() * sys.rhs);
}

/// exp(-i H dt) for a Hermitian 2x2 H.
///
/// Writes H = a I + b.sigma so the exponential is
/// e^{-i a dt} (cos(|b| dt) I - i sin(|b| dt) b.sigma / |b|).
inline ComplexMatrix2 matrix_exp_2x2(const ComplexMatrix2& h, double dt) {
  if (!is_hermitian(h)) throw ConfigError("matrix_exp_2x2: H is not Hermitian");
  const double a = 0.5 * (h(0, 0).real() + h(1, 1).real());
  const double bz = 0.5 * (h(0, 0).real() - h(1, 1).real());
  const double bx = h(1, 0).real();
  const double by = h(1, 0).imag();
  const double norm = std::sqrt(bx * bx + by * by + bz * bz);
  const double angle = norm * dt;
  ComplexMatrix2 out = std::cos(angle) * ComplexMatrix2::Identity();
  if (norm > 0.0) {
    const double s = std::sin(angle) / norm;
    out += -kI * s * (bx * pauli::x() + by * pauli::y() + bz * pauli::z());
  }
  return std::exp(-kI * (a * dt)) * out;
}

}  // namespace eacp
