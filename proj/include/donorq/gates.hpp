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


#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "donorq/core_model.hpp"
#include "donorq/linalg.hpp"
#include "donorq/propagation.hpp"
#include "donorq/pulses.hpp"

namespace donorq {

/// Qubit rotations in the (|up~>, |down~>) basis with sigma_z = diag(1, -1).
Mat2 rz(double theta);
Mat2 rx(double theta);

/// A 2x2 unitary modulo global phase: determinant 1 and the phase of the
/// top-left entry (top-right if that vanishes) in (-pi/2, pi/2].
struct QubitGate {
  Mat2 matrix = Mat2::Identity();

  static QubitGate from(const Mat2& u);
};

struct EulerAngles {
  double theta_z1 = 0.0;  // [0, 2 pi)
  double theta_x = 0.0;   // [0, pi]
  double theta_z2 = 0.0;  // [0, 2 pi)

  Mat2 compose() const { return rz(theta_z1) * rx(theta_x) * rz(theta_z2); }
};

/// U = e^{i phi} Rz(z1) Rx(x) Rz(z2). At gimbal lock theta_z2 is set to 0.
EulerAngles euler_decompose(const Mat2& u);

/// 1 - [Tr(U^dagger U) + |Tr(U0^dagger U)|^2] / (n (n + 1)); U may be subnormalized.
double gate_infidelity(const MatX& U, const MatX& U0);

/// Qubit block of a propagator in the idle frame:
/// B_ab = exp(i E_a T) <a|U|b>, with |a>, E_a from idle_qubit_frame.
Mat2 idle_frame_block(const EvolutionResult& result, const QubitFrame& frame);

struct ExtractedGate {
  Mat2 block;      // subnormalized idle-frame block (global phase kept)
  QubitGate gate;  // nearest unitary, canonicalized
  double leakage;  // 1 - |B|_F^2 / 2
};

/// Throws SimulationError if leakage exceeds `max_leakage`.
ExtractedGate extract_qubit_gate(const EvolutionResult& result, const SystemParams& params,
                                 double max_leakage = 0.01);

/// Relative phase angle theta of a diagonal-dominant block: B11 / B00 = e^{i theta}.
double rz_angle_of(const Mat2& block);

struct RzPrediction {
  double unreduced;  // -int (dq - dq0) dt with the approximate splitting
  double reduced;    // wrapped to [0, 2 pi)
};
RzPrediction predict_rz_angle(const SystemParams& params, double T);

// ---------------------------------------------------------------------------
// Gate sequences: physical pulses interleaved with ideal (virtual) Z rotations,
// listed in time order.

struct GateStep {
  enum class Kind { Pulse, VirtualRz } kind = Kind::Pulse;
  PulseSchedule schedule;
  double angle = 0.0;

  static GateStep pulse(PulseSchedule s) { return {Kind::Pulse, std::move(s), 0.0}; }
  static GateStep virtual_rz(double theta) { return {Kind::VirtualRz, {}, theta}; }
};
using GateSequence = std::vector<GateStep>;

double sequence_duration(const GateSequence& seq);

struct SequenceResult {
  Mat2 block;  // product of the idle-frame blocks, later steps on the left
  double leakage;
};
SequenceResult simulate_sequence(const SystemParams& params, const GateSequence& seq,
                                 double noise_dE, const EvolveOptions& options);

// ---------------------------------------------------------------------------
// Charge noise

struct NoiseModel {
  double sigma_dE = 0.0;  // V/m r.m.s.
  int sample_count = 200;
  std::uint64_t seed = 1;
};

/// Antithetic Gaussian draws: pairs (x, -x), plus one unpaired draw for odd counts.
std::vector<double> draw_noise_samples(const NoiseModel& model);

struct MonteCarloResult {
  double mean_infidelity = 0.0;
  double std_error = 0.0;
  std::vector<double> noise;
  std::vector<double> infidelity;
};

MonteCarloResult run_noise_monte_carlo(const std::function<double(double)>& infidelity_at,
                                       const NoiseModel& model);
MonteCarloResult run_noise_monte_carlo(const SystemParams& params, const GateSequence& seq,
                                       const Mat2& target, const NoiseModel& model,
                                       const EvolveOptions& options);

struct NoiseSensitivity {
  double theta_z1_0 = 0.0, theta_z1_prime = 0.0;
  double theta_z2_0 = 0.0, theta_z2_prime = 0.0;
  double theta_x_0 = 0.0, theta_x_prime = 0.0;
  double residual = 0.0;   // largest |fit - data| over probes and angles
  bool ambiguous = false;  // an unwrapping step was close to pi
  std::vector<double> probes;
};

inline const std::vector<double> kDefaultProbes{-40.0, -20.0, 0.0, 20.0, 40.0};

/// Linear fit of unwrapped Euler angles of gate_at(dE) over the probes.
NoiseSensitivity noise_sensitivity(const std::function<Mat2(double)>& gate_at,
                                   const std::vector<double>& probes = kDefaultProbes);
NoiseSensitivity noise_sensitivity(const SystemParams& params, const GateSequence& seq,
                                   const EvolveOptions& options,
                                   const std::vector<double>& probes = kDefaultProbes);

// ---------------------------------------------------------------------------
// X rotations

using RxFactory = std::function<PulseSchedule(double lambda)>;

/// Monotone lambda -> theta_x table.
struct LambdaCalibration {
  std::vector<double> lambda;
  std::vector<double> theta_x;

  double max_theta() const { return theta_x.back(); }
  double interpolate(double theta) const;
};

LambdaCalibration calibrate_lambda(const SystemParams& params, const RxFactory& factory,
                                   const EvolveOptions& options, int points = 11);

/// Root-refines lambda so the pulse's theta_x equals theta (1-D secant on the table).
double solve_lambda(const SystemParams& params, const RxFactory& factory,
                    const LambdaCalibration& table, double theta, const EvolveOptions& options,
                    double tol = 1e-6);

/// Virtual Rz corrections around one physical pulse so that its zero-noise
/// gate is Rz(0) Rx(theta_x) Rz(0).
GateSequence corrected_pulse(const SystemParams& params, const PulseSchedule& pulse,
                             const EvolveOptions& options, EulerAngles* raw = nullptr);

struct SweepEchoRx {
  GateSequence sequence;
  double lambda = 0.0;
  double echo_hold_first = 0.0;   // hold time of the echo applied first
  double echo_hold_last = 0.0;
  NoiseSensitivity core;          // X' S X' before echoes
  NoiseSensitivity composite;     // full physical part (echoes included)
  double total_time = 0.0;
};

/// Corrective-Rz . echo . X . sweep(theta_x) . X . echo . corrective-Rz.
SweepEchoRx build_sweep_echo_rx(const SystemParams& params, double theta_x,
                                const LambdaCalibration& sweep_table,
                                const EvolveOptions& options, const SweepConfig& config = {});

/// Naive-gate working point at dE = 0: joint amplitude scale on (Ea_max, Ba_max)
/// and shift of detuning_B that put the lambda = 1 pulse on the Raman resonance
/// with theta_x as close to pi as the scan allows.
struct NaiveRxCalibration {
  double amplitude_scale = 1.0;
  double detuning_B_shift = 0.0;  // rad/s, added to SweepConfig::detuning_B
  double theta_x = 0.0;           // theta_x at lambda = 1
  SweepConfig config;             // base config with both adjustments applied
};

NaiveRxCalibration calibrate_naive_rx(const SystemParams& params, const EvolveOptions& options,
                                      const SweepConfig& base = {});

// ---------------------------------------------------------------------------

struct GateReport {
  std::string target;
  Mat2 target_matrix = Mat2::Identity();
  EulerAngles angles;
  double leakage = 0.0;
  double zero_noise_infidelity = 0.0;
  std::vector<std::pair<double, double>> noise_curve;  // (sigma, mean infidelity)
  int sample_count = 0;
  std::uint64_t seed = 0;

  std::string serialize() const;
};

}  // namespace donorq
