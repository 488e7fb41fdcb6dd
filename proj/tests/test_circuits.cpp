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

#include "eacp/circuits.hpp"
#include "oracles.hpp"

namespace {

using namespace eacp::circuits;
using eacp::ansatz::ThetaVector;

ThetaVector random_theta(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-2 * std::numbers::pi, 2 * std::numbers::pi);
  return ThetaVector(u(rng), u(rng), u(rng), u(rng));
}

TEST(ACircuit, ExamplesAtZeroAngles) {
  const ThetaVector zero = ThetaVector::Zero();
  EXPECT_NEAR(build_a_circuit(zero, 0, 0, Part::real).scale *
                  exact_expectation(build_a_circuit(zero, 0, 0, Part::real)),
              1.0, 1e-15);
  const auto a11 = build_a_circuit(zero, 1, 1, Part::real);
  EXPECT_NEAR(a11.scale * exact_expectation(a11), 0.25, 1e-15);
  const auto a01 = build_a_circuit(zero, 0, 1, Part::real);
  EXPECT_NEAR(a01.scale * exact_expectation(a01), -0.5, 1e-15);
  const auto a12 = build_a_circuit(zero, 1, 2, Part::real);
  EXPECT_NEAR(a12.scale * exact_expectation(a12), 0.0, 1e-15);
  EXPECT_THROW(build_a_circuit(zero, 2, 1, Part::real), eacp::ConfigError);
}

TEST(CCircuit, ExamplesAtZeroAngles) {
  const ThetaVector zero = ThetaVector::Zero();
  const auto x2 = build_c_circuit(zero, 2, Pauli::x, Part::imag);
  EXPECT_NEAR(x2.scale * exact_expectation(x2), 0.5, 1e-15);
  const auto z0 = build_c_circuit(zero, 0, Pauli::z, Part::imag);
  EXPECT_NEAR(z0.scale * exact_expectation(z0), -1.0, 1e-15);
  EXPECT_THROW(build_c_circuit(zero, 0, Pauli::y, Part::imag), eacp::ConfigError);
}

TEST(Circuits, EveryOverlapPartMatchesHandOracle) {
  std::mt19937_64 rng(20);
  for (int k = 0; k < 300; ++k) {
    const auto th = random_theta(rng);
    const auto d = oracle::ansatz_derivatives(th);
    const auto psi = oracle::ansatz_state(th);
    for (std::size_t i = 0; i < 4; ++i) {
      for (std::size_t j = i; j < 4; ++j) {
        const auto want = d[i].dot(d[j]);
        const auto re = build_a_circuit(th, i, j, Part::real);
        const auto im = build_a_circuit(th, i, j, Part::imag);
        EXPECT_NEAR(re.scale * exact_expectation(re), want.real(), 1e-12);
        EXPECT_NEAR(im.scale * exact_expectation(im), want.imag(), 1e-12);
      }
      for (auto term : {Pauli::x, Pauli::z}) {
        const auto want = d[i].dot(eacp::ansatz::pauli_matrix(term) * psi);
        const auto re = build_c_circuit(th, i, term, Part::real);
        const auto im = build_c_circuit(th, i, term, Part::imag);
        EXPECT_NEAR(re.scale * exact_expectation(re), want.real(), 1e-12);
        EXPECT_NEAR(im.scale * exact_expectation(im), want.imag(), 1e-12);
      }
    }
  }
}

TEST(Circuits, StatevectorStaysNormalized) {
  std::mt19937_64 rng(21);
  for (int k = 0; k < 100; ++k) {
    const auto c = build_a_circuit(random_theta(rng), 1, 3, Part::imag);
    State4 psi = State4::Zero();
    psi(0) = 1.0;
    for (const auto& op : c.ops) {
      detail::apply(psi, op);
      EXPECT_NEAR(psi.squaredNorm(), 1.0, 1e-12);
    }
  }
}

TEST(Circuits, InPlaceApplyMatchesFullUnitary) {
  std::mt19937_64 rng(22);
  const auto c = build_c_circuit(random_theta(rng), 2, Pauli::x, Part::real);
  State4 a = State4::Zero(), b = State4::Zero();
  a(0) = b(0) = 1.0;
  for (const auto& op : c.ops) {
    detail::apply(a, op);
    b = detail::full_unitary(op) * b;
    EXPECT_LT((a - b).norm(), 1e-14);
  }
}

TEST(Assemble, StatevectorBackendEqualsAnalytic) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  eacp::Engine engine(1);
  for (int k = 0; k < 200; ++k) {
    const auto th = random_theta(rng);
    const eacp::system::SystemParams params{u(rng), u(rng)};
    const double f = u(rng);
    const auto got = assemble_from_circuits(th, params, f, 0.0, 0, std::nullopt, engine);
    const auto want = eacp::mclachlan::assemble_analytic(th, params, f);
    EXPECT_LT((got.a_real - want.a_real).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((got.c_imag - want.c_imag).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Shots, EstimateIsBoundedAndScalesAsBinomial) {
  std::mt19937_64 rng(24);
  const auto c = build_a_circuit(random_theta(rng), 1, 2, Part::real);
  const double z = exact_expectation(c);
  eacp::Engine engine = eacp::substream(3, 0, eacp::Stream::circuits);
  const int reps = 4000;
  const std::uint64_t shots = 400;
  double sum = 0, sum2 = 0;
  for (int r = 0; r < reps; ++r) {
    const double v = run(c, shots, std::nullopt, engine);
    EXPECT_LE(std::abs(v), 1.0);
    sum += v;
    sum2 += v * v;
  }
  const double mean = sum / reps;
  const double var = sum2 / reps - mean * mean;
  const double want_var = (1 - z * z) / shots;
  EXPECT_NEAR(mean, z, 4 * std::sqrt(want_var / reps));
  EXPECT_NEAR(var / want_var, 1.0, 0.1);
}

TEST(Shots, SeededRunsRepeat) {
  const auto c = build_c_circuit(ThetaVector(0.1, 0.2, 0.3, 0.4), 1, Pauli::x, Part::imag);
  EXPECT_EQ(run(c, ShotConfig{1000, 9}), run(c, ShotConfig{1000, 9}));
  EXPECT_EQ(run(c, ShotConfig{0, 9}), exact_expectation(c));
}

TEST(Shots, BackendRegularizationFollowsShotCount) {
  using eacp::circuits::CircuitBackend;
  const eacp::system::SystemParams params{1.0, 0.0};
  const CircuitBackend exact(params, 0, std::nullopt, eacp::Engine(1));
  const CircuitBackend sampled(params, 1000, std::nullopt, eacp::Engine(1));
  EXPECT_EQ(exact.default_regularization(), eacp::kExactRegularization);
  EXPECT_EQ(sampled.default_regularization(), eacp::kDefaultRegularization);
}

TEST(Noise, ZeroNoiseIsTheNoiselessPath) {
  const auto c = build_a_circuit(ThetaVector(0.3, 1.1, 0.4, -0.2), 1, 2, Part::real);
  eacp::Engine a(5), b(5);
  EXPECT_EQ(run(c, 1000, NoiseParams{}, a), run(c, 1000, std::nullopt, b));
  EXPECT_EQ(run(c, 0, NoiseParams{}, a), exact_expectation(c));
}

TEST(Noise, ChannelContractsTowardZero) {
  std::mt19937_64 rng(25);
  const NoiseParams noise{1e-2, 5e-2, 2e-2};
  for (int k = 0; k < 100; ++k) {
    const auto c = build_c_circuit(random_theta(rng), 3, Pauli::z, Part::imag);
    const double clean = exact_expectation(c);
    const double noisy = noisy_expectation(c, noise);
    EXPECT_LE(std::abs(noisy), std::abs(clean) + 1e-12);
  }
  const auto c = build_a_circuit(ThetaVector::Zero(), 0, 0, Part::real);
  EXPECT_NEAR(noisy_expectation(c, {0, 0, 0.1}), 0.8, 1e-14);
  EXPECT_NEAR(noisy_expectation(c, {0.5, 0.5, 0.5}), 0.0, 1e-14);
}

TEST(Noise, PerShotUnravelingAgreesWithChannelAverage) {
  const auto c = build_a_circuit(ThetaVector(0.2, 0.9, 1.3, 0.4), 1, 3, Part::real);
  NoiseParams noise{0.05, 0.1, 0.05, NoiseMethod::per_shot};
  const double want = noisy_expectation(c, noise);
  eacp::Engine engine = eacp::substream(6, 0, eacp::Stream::circuits);
  const std::uint64_t shots = 200000;
  const double got = run(c, shots, noise, engine);
  EXPECT_NEAR(got, want, 4 * std::sqrt((1 - want * want) / shots));
}

TEST(Noise, RejectsOutOfRangeProbabilities) {
  EXPECT_THROW((NoiseParams{-0.1, 0, 0}.validate()), eacp::ConfigError);
  EXPECT_THROW((NoiseParams{0, 0.6, 0}.validate()), eacp::ConfigError);
}

TEST(Text, ListsGatesAndMeasurement) {
  const auto text = to_text(build_a_circuit(ThetaVector::Zero(), 1, 2, Part::real));
  EXPECT_EQ(text,
            "h anc - -\n"
            "rz sys - 0\n"
            "rx sys - 0\n"
            "cx sys anc=1 -\n"
            "rz sys - 0\n"
            "cz sys anc=0 -\n"
            "h anc - -\n"
            "measure anc z scale=0.25\n");
}

}  // namespace
