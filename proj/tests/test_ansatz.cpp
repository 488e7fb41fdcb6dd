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

#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "eacp/ansatz.hpp"
#include "oracles.hpp"

namespace {

using eacp::ansatz::ThetaVector;
constexpr double kPi = std::numbers::pi;

ThetaVector random_theta(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2 * kPi, 2 * kPi);
  return ThetaVector(u(rng), u(rng), u(rng), u(rng));
}

TEST(AnsatzState, ZeroAnglesGiveReactant) {
  const auto psi = eacp::ansatz::state(ThetaVector::Zero());
  EXPECT_LT((psi - eacp::StateVector2(1.0, 0.0)).norm(), 1e-15);
}

TEST(AnsatzState, HalfTurnOfRx) {
  const auto psi = eacp::ansatz::state(ThetaVector(0, 0, kPi, 0));
  EXPECT_NEAR(std::abs(psi(0)), 0.0, 1e-15);
  EXPECT_NEAR(psi(1).imag(), -1.0, 1e-15);
  const auto plus = eacp::ansatz::state(ThetaVector(0, 0, kPi / 2, 0));
  EXPECT_NEAR(std::norm(plus(0)), 0.5, 1e-15);
}

TEST(AnsatzState, MatchesHandExpansionAndIsNormalized) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 1000; ++k) {
    const auto th = random_theta(rng);
    const auto psi = eacp::ansatz::state(th);
    EXPECT_LT((psi - oracle::ansatz_state(th)).norm(), 1e-14);
    EXPECT_NEAR(psi.squaredNorm(), 1.0, 1e-14);
    EXPECT_NEAR(std::norm(psi(0)), std::pow(std::cos(0.5 * th(2)), 2), 1e-14);
  }
}

TEST(AnsatzState, GateSequenceProductReproducesState) {
  const ThetaVector th(0.3, -1.2, 0.7, 2.2);
  const auto seq = eacp::ansatz::gate_sequence(th);
  eacp::StateVector2 psi(1.0, 0.0);
  for (std::size_t i : eacp::ansatz::GateSequence::application_order) {
    psi = eacp::ansatz::gate_matrix(seq.gates[i]) * psi;
  }
  psi = eacp::ansatz::gate_matrix(seq.gates[0]) * psi;
  EXPECT_LT((psi - eacp::ansatz::state(th)).norm(), 1e-15);
}

TEST(AnsatzDerivative, ExamplesAtZero) {
  const auto jet = eacp::ansatz::jet(ThetaVector::Zero());
  const eacp::Complex i(0.0, 1.0);
  EXPECT_LT((jet.d[0] - eacp::StateVector2(i, 0.0)).norm(), 1e-15);
  EXPECT_LT((jet.d[1] - eacp::StateVector2(-0.5 * i, 0.0)).norm(), 1e-15);
  EXPECT_LT((jet.d[2] - eacp::StateVector2(0.0, -0.5 * i)).norm(), 1e-15);
  EXPECT_LT((jet.d[3] - eacp::StateVector2(-0.5 * i, 0.0)).norm(), 1e-15);
}

TEST(AnsatzDerivative, MatchesHandDerivatives) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 1000; ++k) {
    const auto th = random_theta(rng);
    const auto want = oracle::ansatz_derivatives(th);
    for (std::size_t i = 0; i < 4; ++i) {
      EXPECT_LT((eacp::ansatz::derivative(th, i) - want[i]).norm(), 1e-14);
    }
  }
}

TEST(AnsatzDerivative, CentralDifferences) {
  std::mt19937_64 rng(3);
  const double h = 1e-5;
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const auto th = random_theta(rng);
    const auto jet = eacp::ansatz::jet(th);
    for (std::size_t i = 0; i < 4; ++i) {
      ThetaVector up = th, dn = th;
      up(i) += h;
      dn(i) -= h;
      const eacp::StateVector2 fd =
          (eacp::ansatz::state(up) - eacp::ansatz::state(dn)) / (2 * h);
      worst = std::max(worst, (fd - jet.d[i]).cwiseAbs().maxCoeff());
    }
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(AnsatzDerivative, RejectsBadIndex) {
  EXPECT_THROW(eacp::ansatz::derivative(ThetaVector::Zero(), 4), eacp::ConfigError);
}

TEST(AnsatzGauge, ThirdAngleOnlyShiftsPhaseFromReactant) {
  // Rz acting on |0> is a phase, so theta_3 and theta_0 are redundant there.
  std::mt19937_64 rng(4);
  for (int k = 0; k < 100; ++k) {
    const auto th = random_theta(rng);
    ThetaVector shifted = th;
    shifted(3) += 0.8;
    shifted(0) += 0.4;
    EXPECT_LT((eacp::ansatz::state(shifted) - eacp::ansatz::state(th)).norm(), 1e-14);
  }
}

TEST(AnglesForState, RoundTrip) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 500; ++k) {
    const auto target = eacp::ansatz::state(random_theta(rng));
    const auto th = eacp::ansatz::angles_for_state(target);
    EXPECT_LT((eacp::ansatz::state(th) - target).norm(), 1e-12);
    EXPECT_EQ(th(3), 0.0);
    EXPECT_GE(th(2), 0.0);
    EXPECT_LE(th(2), kPi);
  }
}

TEST(AnglesForState, Examples) {
  const double r = std::sqrt(0.5);
  const auto plus = eacp::ansatz::angles_for_state(eacp::StateVector2(r, r));
  EXPECT_NEAR(plus(2), kPi / 2, 1e-15);
  EXPECT_LT((eacp::ansatz::state(plus) - eacp::StateVector2(r, r)).norm(), 1e-15);
  const auto one = eacp::ansatz::angles_for_state(eacp::StateVector2(0.0, 1.0));
  EXPECT_NEAR(one(2), kPi, 1e-15);
  EXPECT_LT((eacp::ansatz::state(one) - eacp::StateVector2(0.0, 1.0)).norm(), 1e-15);
}

}  // namespace
