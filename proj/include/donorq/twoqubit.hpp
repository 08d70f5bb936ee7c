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

// Two donors coupled by the dipole-dipole interaction of their interface
// charge: C |i1 i2><i1 i2| with C = e^2 d^2 / (4 pi eps0 epsr r^3).

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "donorq/core_model.hpp"
#include "donorq/effective.hpp"
#include "donorq/linalg.hpp"
#include "donorq/pulses.hpp"

namespace donorq {

struct TwoQubitLayout {
  double separation_r = 5e-7;  // m; dipoles perpendicular to the array
  SystemParams qubit1;
  SystemParams qubit2;

  void validate() const;
};

/// Coefficient of |i1 i2><i1 i2| in rad/s (p_i = d e, p_d = 0).
double dipole_coupling_strength(const TwoQubitLayout& layout);

/// |<i|psi>|^2 of an orbital-basis state at total field `field`, averaged over
/// the drive period (the g-e coherence oscillates at wE in the lab).
double interface_weight(const SystemParams& params, double field, const Vec8& state);

/// Dressed qubit eigenstate of H' (state_index is basis::kQubitUp or
/// basis::kQubitDown) continued from `previous` by maximal overlap.
/// Throws SimulationError if the best overlap drops below 0.5.
Vec8 dressed_qubit_state(const Mat8& h_eff, const Vec8& previous, double* energy = nullptr);

/// Convenience single-sample form: continues from the bare basis state.
double interface_weight(const SystemParams& params, const EnvelopeSample& sample,
                        const DriveFrequencies& w, double noise_dE, int state_index);

/// Time-averaged dipole-dipole operator in the product rotating frame
/// (orbital bases at dE1, dE2). The flip-flop part survives only when both
/// drives share wE.
MatX dipole_interaction_rwa(const TwoQubitLayout& layout, double dE1, double dE2,
                            bool same_drive_frequency);

/// Shift of the |g> -> |e> splitting of qubit 1 (nuclear Down, electron down)
/// caused by qubit 2 sitting in |g down Down> at the same hold field, from the
/// coupled zero-AC Hamiltonian.
double dipole_frequency_shift(const TwoQubitLayout& layout, double hold_field);

/// CPHASE schedules for both qubits with wE re-referenced to the dipole-shifted
/// splitting.
struct CphasePair {
  PulseSchedule qubit1;
  PulseSchedule qubit2;
};
CphasePair make_cphase_pair(const TwoQubitLayout& layout, double T, CphaseConfig config = {},
                            bool calibrate_shift = true);

/// Computational-state order: up-up, up-down, down-up, down-down.
struct CphaseReport {
  double alpha = 0.0, beta = 0.0, gamma = 0.0, delta = 0.0;
  double phi = 0.0;  // alpha - beta - gamma + delta, unwrapped
  double local_rz1 = 0.0;  // gamma - alpha
  double local_rz2 = 0.0;  // beta - alpha
  double nonadiabaticity = 0.0;
  double duration = 0.0;

  std::string serialize() const;
};

struct QuadratureOptions {
  double dt = 0.5e-9;
  bool mean_field = true;  // include the other qubit's static dipole field in H'
};

/// First-order adiabatic-energy quadrature of the entangling phase:
/// phi = -C int (W_up1 - W_down1)(W_up2 - W_down2) dt on tracked H' eigenstates.
/// The nonadiabaticity diagnostic is max_t (|<m|dH/dt|n>| / (E_m - E_n)^2)^2.
CphaseReport cphase_angle(const TwoQubitLayout& layout, const PulseSchedule& schedule1,
                          const PulseSchedule& schedule2, const QuadratureOptions& options = {});

/// Same phases from the tracked eigenvalues of the full coupled 64-dim H'
/// (all orders in C). phi is unwrapped.
CphaseReport adiabatic_cphase_angle(const TwoQubitLayout& layout, const PulseSchedule& schedule1,
                                    const PulseSchedule& schedule2, double dt = 0.5e-9,
                                    bool flip_flop = true);

struct TwoQubitOptions {
  double dt = 0.5e-9;
  bool check_convergence = false;
  double noise_dE1 = 0.0;
  double noise_dE2 = 0.0;
  double coupling_scale = 1.0;  // multiplies the dipole coefficient
  bool flip_flop = true;        // keep the static tau+ tau- part when both wE agree
};

struct TwoQubitResult {
  MatX propagator;             // 64 x 64, effective frame
  Eigen::Matrix4cd block;      // idle-frame computational block
  CphaseReport report;
  double leakage = 0.0;        // 1 - |block|_F^2 / 4
  double block_unitarity_defect = 0.0;
  std::optional<double> convergence_change;
  bool adiabatic = true;       // nonadiabaticity <= 1e-3 (1 - min_j |B_jj|^2)
};

/// 64-dim effective-frame evolution: H'_1 x 1 + 1 x H'_2 + dipole_interaction_rwa.
TwoQubitResult simulate_two_qubit(const TwoQubitLayout& layout, const PulseSchedule& schedule1,
                                  const PulseSchedule& schedule2,
                                  const TwoQubitOptions& options = {});

struct PhiCurvePoint {
  double T;
  double phi;
};
std::vector<PhiCurvePoint> phi_curve(const TwoQubitLayout& layout, const std::vector<double>& durations,
                                     const CphaseConfig& config = {},
                                     const QuadratureOptions& options = {});
void write_phi_curve(std::ostream& os, const std::vector<PhiCurvePoint>& curve);

/// Shortest T in [t_min, t_max] with |phi(T)| = target, by bracketing on a
/// grid and Illinois refinement. Throws SimulationError when no root exists
/// or |phi| is not monotone on the bracket.
double cz_duration_search(const TwoQubitLayout& layout, double target = kPi,
                          const CphaseConfig& config = {}, double t_min = 100e-9,
                          double t_max = 750e-9, const QuadratureOptions& options = {});

}  // namespace donorq
