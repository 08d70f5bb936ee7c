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

#include <array>
#include <string>
#include <vector>

#include "donorq/core_model.hpp"
#include "donorq/linalg.hpp"

namespace donorq {

/// Instantaneous control values.
struct EnvelopeSample {
  double dE = 0.0;  // V/m
  double Ea = 0.0;  // V/m
  double Ba = 0.0;  // T
};

struct DriveFrequencies {
  double omega_E = 0.0;
  double omega_B = 0.0;
};

/// A frequency n_E wE + n_B wB.
struct FrequencyLabel {
  int nE = 0;
  int nB = 0;

  double value(const DriveFrequencies& w) const { return nE * w.omega_E + nB * w.omega_B; }
  std::string name() const;
  friend bool operator==(const FrequencyLabel&, const FrequencyLabel&) = default;
  friend FrequencyLabel operator-(FrequencyLabel a, FrequencyLabel b) {
    return {a.nE - b.nE, a.nB - b.nB};
  }
};

/// The nine labels present in the rotating-frame Hamiltonian, in Floquet block
/// order: -2wE, -2wB, -wE, -2wB+wE, 0, 2wB-wE, wE, 2wB, 2wE.
const std::array<FrequencyLabel, 9>& floquet_shifts();

struct FrequencyComponent {
  FrequencyLabel label;
  Mat8 matrix;
};

/// Rotating-frame generator K = wE (tau_z/2 + I_z) - wB (S_z + I_z), diagonal in
/// the orbital basis; the frame unitary is exp(-i K t).
Eigen::Matrix<double, 8, 1> rotating_frame_generator(const DriveFrequencies& w);

/// Static rotating-wave Hamiltonian in the orbital basis of dE + noise.
/// Warns when a drive is on and its detuning exceeds a tenth of the splitting.
Mat8 rwa_hamiltonian(const SystemParams& params, const EnvelopeSample& sample,
                     const DriveFrequencies& w, double noise_dE = 0.0);

/// All components H_j of the rotating-frame Hamiltonian, with
/// H(t) = sum_j H_j exp(i w_j t). Returned in floquet_shifts() order, so
/// components[k].label == floquet_shifts()[k]. A nonzero dE_rate adds the
/// moving-basis correction.
std::vector<FrequencyComponent> frequency_components(const SystemParams& params,
                                                     const EnvelopeSample& sample,
                                                     const DriveFrequencies& w,
                                                     double noise_dE = 0.0,
                                                     double dE_rate = 0.0);

/// Sum of the components at time t.
Mat8 reconstruct_rotating_hamiltonian(const std::vector<FrequencyComponent>& components,
                                      const DriveFrequencies& w, double t);

struct FloquetBlock {
  MatX floquet_matrix;                      // 72 x 72
  std::array<double, 9> shift_frequencies;  // rad/s, floquet_shifts() order
  int target_block = 4;
  Mat8 effective_hamiltonian = Mat8::Zero();
};

/// Block (n, m) holds the component at shift_n - shift_m (zero if absent);
/// diagonal blocks are H_0 + shift_n.
FloquetBlock floquet_hamiltonian(const std::vector<FrequencyComponent>& components,
                                 const DriveFrequencies& w);

inline constexpr double kDegeneracyGuard = kTwoPi * 10e6;

/// Second-order reduction of the target block. Throws SimulationError if a
/// coupled exterior state lies within `guard` of a target state.
Mat8 schrieffer_wolff(FloquetBlock& block, double guard = kDegeneracyGuard);

/// H' at one envelope sample (components -> Floquet -> Schrieffer-Wolff).
Mat8 effective_hamiltonian(const SystemParams& params, const EnvelopeSample& sample,
                           const DriveFrequencies& w, double noise_dE = 0.0,
                           double dE_rate = 0.0);

/// Plain-text matrix dump with orbital basis labels.
std::string format_matrix(const Mat8& m, double unit = kTwoPi * 1e6);

}  // namespace donorq
