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

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "donorq/core_model.hpp"

namespace donorq {

/// Cosine window: rises over [0, tau), flat to T - tau, falls to 0 at T.
/// Requires 0 < tau <= T / 2.
double window(double t, double tau, double T);
double window_derivative(double t, double tau, double T);

/// Piecewise-linear excursion 0 -> y1 (at tau1) -> y2 (at tau2) -> 0 (at T).
/// Requires 0 < tau1 < tau2 < T.
double ramp(double t, double tau1, double y1, double tau2, double y2, double T);
double ramp_derivative(double t, double tau1, double y1, double tau2, double y2, double T);

/// A control envelope built symbolically from primitives, so any integrator
/// step can query exact values and slopes. Immutable and cheap to copy.
class Envelope {
 public:
  Envelope();  // identically zero

  static Envelope constant(double value);
  static Envelope window(double tau, double T);
  static Envelope ramp(double tau1, double y1, double tau2, double y2, double T);

  Envelope shifted(double t0) const;  // t -> f(t - t0)
  Envelope scaled(double k) const;
  Envelope squared() const;
  friend Envelope operator+(const Envelope& a, const Envelope& b);

  double operator()(double t) const;
  double derivative(double t) const;
  bool is_zero() const;

  /// Text form, e.g. `sum(const(10000), scale(-20000, window(5e-09, 2e-08)))`.
  std::string to_string() const;
  static Envelope parse(std::string_view text);

  struct Node;

 private:
  explicit Envelope(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

struct PulseSchedule {
  std::string kind;
  Envelope dE;  // absolute dE(t) trajectory, V/m
  Envelope Ea;  // AC electric amplitude, V/m
  Envelope Ba;  // AC magnetic amplitude, T
  double omega_E = 0.0;
  double omega_B = 0.0;
  double total_time = 0.0;

  std::string serialize() const;
  static PulseSchedule deserialize(std::string_view text);
};

/// Throws std::invalid_argument unless the schedule starts and ends at the idle
/// field with both AC envelopes off.
void check_schedule_invariants(const SystemParams& params, const PulseSchedule& schedule);

/// Two-photon guard: true (and a warning) if eps0(dE(t)) crosses 2 wE while Ea != 0
/// and the Landau-Zener transfer probability of that crossing exceeds `threshold`.
/// The two-photon coupling is estimated as g = Omega_x Omega_z / wE with
/// Omega_x = Ea k Vt / (2 eps0) and Omega_z = Ea k^2 dE / (2 eps0), k = d e / hbar.
bool two_photon_resonance_crossed(const SystemParams& params, const PulseSchedule& schedule,
                                  int samples = 4000, double threshold = 1e-6);

/// Landau-Zener probability 2 pi g^2 / |d(eps0 - 2 wE)/dt| for the crossing at time t.
double two_photon_crossing_probability(const SystemParams& params, const PulseSchedule& schedule,
                                       double t);

/// Rz gate: dE(t) = dE_idle - S w(t, tau, T), tau = min(5 ns, T/2),
/// S = 2e4 V/m * min(1, T / 10 ns); no AC drive.
PulseSchedule make_rz_schedule(const SystemParams& params, double T);

/// Noise-vulnerable echo idle: ramp from idle to `hold_field` over `ramp_time`,
/// hold for `hold_time`, ramp back.
PulseSchedule make_echo_rz_schedule(const SystemParams& params, double hold_time,
                                    double hold_field = 0.0, double ramp_time = 5e-9);

struct SweepConfig {
  double sweep_start = -2000.0;  // V/m, dE at the start of the sweep
  double sweep_end = 2000.0;     // V/m
  double setup_time = 5e-9;      // tau1
  double sweep_time = 110e-9;    // tau_s
  double Ea_max = 255.2;         // V/m at lambda = 1
  double Ba_max = 33.26e-3;      // T at lambda = 1
  double detuning_E = kTwoPi * 232.428e6;  // wE = eps0(ref) - detuning_E
  double detuning_B = kTwoPi * 217.096e6;  // wB = B0 gamma_e - A/4 - detuning_B
  double omega_E_reference_field = 0.0;    // dE at which eps0 is evaluated for wE
};

/// Sweep Rx gate: dE sweeps linearly through the transition while squared-window
/// AC fields scaled by lambda are on. Total time 2 tau1 + tau_s.
PulseSchedule make_rx_sweep_schedule(const SystemParams& params, double lambda,
                                     const SweepConfig& config = {});

/// Naive Rx gate: like the sweep gate but dE is held at `hold_field` while the AC is on.
PulseSchedule make_naive_rx_schedule(const SystemParams& params, double lambda,
                                     const SweepConfig& config = {}, double hold_field = 0.0);

struct CphaseConfig {
  double hold_field = 2000.0;        // D, V/m
  double setup_time = 5e-9;          // tau1
  double E_max = 40.0;               // V/m for T >= amplitude_time
  double amplitude_time = 300e-9;    // E_max scales as (T / amplitude_time)^2 below this
  double max_rise_time = 300e-9;     // tau2 = min(max_rise_time, tau_ac / 2)
  double detuning = -kTwoPi * 10e6;  // wE = eps0 + A/4 - <A>/2 + detuning
  double omega_E_shift = 0.0;        // extra offset, e.g. the two-qubit dipole correction
};

PulseSchedule make_cphase_schedule(const SystemParams& params, double T,
                                   const CphaseConfig& config = {});

}  // namespace donorq
