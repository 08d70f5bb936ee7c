// Copyright 2026 The donorq Authors
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
#include <doctest.h>

#include <random>

#include "donorq/gates.hpp"
#include "oracles.hpp"

using namespace donorq;

namespace {

EvolveOptions effective() {
  EvolveOptions o;
  o.frame = EvolutionFrame::Effective;
  return o;
}

// Global-phase-insensitive distance.
double phase_distance(const Mat2& a, const Mat2& b) {
  const cd ov = (a.adjoint() * b).trace();
  const cd ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cd(1.0);
  return (a * ph - b).cwiseAbs().maxCoeff();
}

const LambdaCalibration& sweep_table() {
  static const LambdaCalibration table = [] {
    SystemParams p;
    return calibrate_lambda(p, [p](double l) { return make_rx_sweep_schedule(p, l); }, effective());
  }();
  return table;
}

}  // namespace

TEST_CASE("rotation matrices") {
  CHECK(phase_distance(rz(kPi) * rx(kPi), rx(kPi) * rz(-kPi)) < 1e-14);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-7, 7);
  for (int k = 0; k < 100; ++k) {
    const double a = u(rng);
    CHECK((rz(a) * rx(kPi) - rx(kPi) * rz(-a)).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("canonical qubit gate") {
  const QubitGate g = QubitGate::from(std::exp(cd(0, 1.3)) * rx(0.7));
  CHECK(std::abs(g.matrix.determinant() - 1.0) < 1e-12);
  CHECK(std::abs(std::arg(g.matrix(0, 0))) <= kPi / 2 + 1e-12);
  CHECK(unitarity_defect(g.matrix) < 1e-9);
}

TEST_CASE("Euler decomposition") {
  auto close = [](const EulerAngles& e, double z1, double x, double z2) {
    return std::abs(wrap_pi(e.theta_z1 - z1)) < 1e-9 && std::abs(e.theta_x - x) < 1e-9 &&
           std::abs(wrap_pi(e.theta_z2 - z2)) < 1e-9;
  };
  CHECK(close(euler_decompose(Mat2::Identity()), 0, 0, 0));
  CHECK(close(euler_decompose(rx(kPi)), 0, kPi, 0));
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> ang(0, kTwoPi), half(0, kPi), ph(-kPi, kPi);
  for (int k = 0; k < 1000; ++k) {
    const Mat2 u = std::exp(cd(0, ph(rng))) * rz(ang(rng)) * rx(half(rng)) * rz(ang(rng));
    const EulerAngles e = euler_decompose(u);
    CHECK(e.theta_z1 >= 0);
    CHECK(e.theta_z1 < kTwoPi);
    CHECK(e.theta_z2 >= 0);
    CHECK(e.theta_z2 < kTwoPi);
    CHECK(e.theta_x >= 0);
    CHECK(e.theta_x <= kPi);
    CHECK(phase_distance(e.compose(), u) < 1e-8);
  }
}

TEST_CASE("gate infidelity") {
  CHECK(gate_infidelity(rx(0.3), rx(0.3)) == doctest::Approx(0.0));
  CHECK(gate_infidelity(std::exp(cd(0, 0.9)) * rx(0.3), rx(0.3)) < 1e-15);
  Mat2 x;
  x << 0, 1, 1, 0;
  CHECK(gate_infidelity(x, Mat2::Identity()) == doctest::Approx(2.0 / 3.0));
  // a leaky block is penalized
  CHECK(gate_infidelity(0.9 * rx(0.3), rx(0.3)) > 0.1);
}

TEST_CASE("Rz prediction") {
  SystemParams p;
  CHECK(std::abs(predict_rz_angle(p, 1e-12).unreduced) < 1e-4);
  CHECK(std::abs(std::abs(predict_rz_angle(p, 13.56e-9).unreduced) - kPi) < 0.08);
  CHECK(std::abs(std::abs(predict_rz_angle(p, 22.116e-9).unreduced) - kTwoPi) < 0.08);
  const RzPrediction r = predict_rz_angle(p, 22.116e-9);
  CHECK(r.reduced == doctest::Approx(wrap_2pi(r.unreduced)));
}

TEST_CASE("simulated Rz gates") {
  SystemParams p;
  for (double T : {13.56e-9, 22.116e-9}) {
    const ExtractedGate g = extract_qubit_gate(evolve(p, make_rz_schedule(p, T), 0.0, effective()), p);
    const double pred = predict_rz_angle(p, T).unreduced;
    CHECK(std::abs(wrap_pi(rz_angle_of(g.block) - pred)) < 0.08);
    CHECK(g.leakage < 1e-4);
  }
  const ExtractedGate g = extract_qubit_gate(evolve(p, make_rz_schedule(p, 13.56e-9), 0.0, effective()), p);
  CHECK(gate_infidelity(g.gate.matrix, rz(kPi)) < 2e-3);
}

TEST_CASE("Monte Carlo is deterministic and exact at zero sigma") {
  SystemParams p;
  const GateSequence seq{GateStep::pulse(make_rz_schedule(p, 13.56e-9))};
  const NoiseModel m{100.0, 24, 77};
  const auto a = run_noise_monte_carlo(p, seq, rz(kPi), m, effective());
  const auto b = run_noise_monte_carlo(p, seq, rz(kPi), m, effective());
  CHECK(a.noise == b.noise);
  CHECK(a.infidelity == b.infidelity);
  CHECK(a.mean_infidelity == b.mean_infidelity);
  const auto c = run_noise_monte_carlo(p, seq, rz(kPi), NoiseModel{100.0, 24, 78}, effective());
  CHECK(c.noise != a.noise);

  const auto zero = run_noise_monte_carlo(p, seq, rz(kPi), NoiseModel{0.0, 5, 1}, effective());
  const double exact = gate_infidelity(simulate_sequence(p, seq, 0.0, effective()).block, rz(kPi));
  CHECK(zero.mean_infidelity == exact);

  // antithetic pairing
  const auto draws = draw_noise_samples(NoiseModel{50.0, 10, 3});
  REQUIRE(draws.size() == 10);
  for (std::size_t k = 0; k + 1 < draws.size(); k += 2) CHECK(draws[k] == -draws[k + 1]);
}

TEST_CASE("noise Monte Carlo on an analytic infidelity") {
  // 1 - F = s^2 gives the second moment of the draw distribution.
  const auto r = run_noise_monte_carlo([](double s) { return s * s; }, NoiseModel{10.0, 4000, 9});
  CHECK(r.mean_infidelity == doctest::Approx(100.0).epsilon(0.08));
}

TEST_CASE("sequence algebra") {
  SystemParams p;
  const GateSequence v{GateStep::virtual_rz(0.4), GateStep::virtual_rz(-0.4)};
  const SequenceResult r = simulate_sequence(p, v, 0.0, effective());
  CHECK(gate_infidelity(r.block, Mat2::Identity()) < 1e-14);
  CHECK(sequence_duration(v) == 0.0);
}

TEST_CASE("sweep gate sensitivity and calibration") {
  SystemParams p;
  const LambdaCalibration& table = sweep_table();
  for (std::size_t k = 1; k < table.theta_x.size(); ++k) CHECK(table.theta_x[k] > table.theta_x[k - 1]);
  CHECK(table.max_theta() > 3.0);

  const NoiseSensitivity ns = noise_sensitivity(p, {GateStep::pulse(make_rx_sweep_schedule(p, 1.0))}, effective());
  CHECK(ns.residual < 0.05);
  CHECK_FALSE(ns.ambiguous);
  CHECK(ns.theta_z1_prime == doctest::Approx(ns.theta_z2_prime).epsilon(0.1));
  CHECK(std::abs(ns.theta_x_prime) < 0.1 * std::abs(ns.theta_z1_prime));

  const GateSequence bare = corrected_pulse(p, make_rx_sweep_schedule(p, 1.0), effective());
  const SequenceResult r = simulate_sequence(p, bare, 0.0, effective());
  CHECK(gate_infidelity(r.block, rx(table.max_theta())) < 5e-3);
  CHECK(r.leakage < 1e-4);
}

TEST_CASE("linear sensitivity fit on a synthetic gate") {
  const NoiseSensitivity ns =
      noise_sensitivity([](double e) { return Mat2(rz(0.3 + 2e-3 * e) * rx(1.1 + 1e-4 * e) * rz(2.0 - 3e-3 * e)); });
  CHECK(ns.theta_z1_prime == doctest::Approx(2e-3).epsilon(1e-6));
  CHECK(ns.theta_z2_prime == doctest::Approx(-3e-3).epsilon(1e-6));
  CHECK(ns.theta_x_prime == doctest::Approx(1e-4).epsilon(1e-6));
  CHECK(ns.residual < 1e-9);
}

TEST_CASE("echo Rz slope matches the dephasing rate") {
  SystemParams p;
  // rate A d e / (4 hbar Vt); hold for theta' = 3.6e-3 rad per V/m
  const double rate = p.hyperfine_A * oracle::field_rate(p) / (4 * p.Vt);
  const double hold = 3.6e-3 / rate;
  CHECK(hold == doctest::Approx(30e-9).epsilon(0.02));
  const PulseSchedule s = make_echo_rz_schedule(p, hold);
  const double h = 5.0;
  const double plus = rz_angle_of(extract_qubit_gate(evolve(p, s, h, effective()), p).block);
  const double minus = rz_angle_of(extract_qubit_gate(evolve(p, s, -h, effective()), p).block);
  const double slope = std::abs(wrap_pi(plus - minus)) / (2 * h);
  CHECK(slope == doctest::Approx(3.6e-3).epsilon(0.15));  // ramps add to the flat segment
}

TEST_CASE("sweep-and-echo composite") {
  SystemParams p;
  const SweepEchoRx g = build_sweep_echo_rx(p, kPi / 2, sweep_table(), effective());
  const SequenceResult r = simulate_sequence(p, g.sequence, 0.0, effective());
  CHECK(gate_infidelity(r.block, rx(kPi / 2)) < 5e-3);
  CHECK(std::abs(g.composite.theta_z1_prime) < 0.01 * std::abs(g.core.theta_z1_prime));
  CHECK(std::abs(g.composite.theta_z2_prime) < 0.01 * std::abs(g.core.theta_z2_prime));
  CHECK(g.total_time == doctest::Approx(450e-9).epsilon(0.1));
  CHECK_THROWS_AS(build_sweep_echo_rx(p, 3.5, sweep_table(), effective()), std::invalid_argument);
}

TEST_CASE("gate report serialization") {
  GateReport r;
  r.target = "Rx(pi)";
  r.target_matrix = rx(kPi);
  r.noise_curve = {{0.0, 1e-5}, {100.0, 7e-4}};
  r.seed = 42;
  const std::string text = r.serialize();
  CHECK(text.find("Rx(pi)") != std::string::npos);
  CHECK(text.find("42") != std::string::npos);
}
