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

#include <optional>
#include <ostream>
#include <vector>

#include "donorq/core_model.hpp"
#include "donorq/effective.hpp"
#include "donorq/linalg.hpp"
#include "donorq/pulses.hpp"

namespace donorq {

enum class Basis { Position, Orbital };
enum class Frame { Lab, Rotating, Effective };

/// Dense operator with its basis and frame tags.
struct OperatorMatrix {
  MatX data;
  Basis basis = Basis::Orbital;
  Frame frame = Frame::Lab;
};

/// How a schedule is integrated.
///   LabPosition  full oscillating Hamiltonian in the {i, d} basis
///   LabOrbital   same, in the instantaneous {g, e} basis (plus moving-basis term)
///   Effective    H'(t) in the rotating frame
enum class EvolutionFrame { LabPosition, LabOrbital, Effective };

const char* to_string(EvolutionFrame frame);
EvolutionFrame parse_evolution_frame(const std::string& text);

inline constexpr double kDefaultLabStep = 0.1e-12;
inline constexpr double kDefaultEffectiveStep = 0.1e-9;

struct EvolveOptions {
  EvolutionFrame frame = EvolutionFrame::LabPosition;
  double dt = 0.0;                  // 0 selects the frame default
  bool include_correction = true;   // moving-basis term (orbital and effective frames)
  bool check_convergence = false;   // rerun at dt/2 and compare
  int trace_points = 0;             // >0 records this many leakage samples
  double t_begin = 0.0;
  double t_end = -1.0;              // <0 means schedule.total_time
};

struct TraceSample {
  double t;
  std::array<double, 8> populations;  // |<k|U(t)|up~>|^2
  double leakage;
};

struct EvolutionResult {
  OperatorMatrix propagator;
  EvolutionFrame frame = EvolutionFrame::LabPosition;
  double t_begin = 0.0;
  double t_end = 0.0;
  DriveFrequencies drive;
  long step_count = 0;
  double dt = 0.0;
  double max_unitarity_defect = 0.0;
  bool valid = true;
  std::optional<double> convergence_change;  // min_a |U(dt) - e^{ia} U(dt/2)| when checked
  bool converged = true;
  std::vector<TraceSample> leakage_trace;
};

/// Lab Hamiltonian at time t. Position basis follows the device equations
/// directly; the orbital basis conjugates by Lambda(dE + noise) and optionally
/// adds the moving-basis term.
OperatorMatrix lab_hamiltonian(const SystemParams& params, const PulseSchedule& schedule, double t,
                               double noise_dE = 0.0, Basis basis = Basis::Position,
                               bool include_correction = true);

/// Lambda(dE) on the 8-dim space: position coordinates -> orbital coordinates.
OperatorMatrix orbital_transform(const SystemParams& params, double dE);

/// Hermitian moving-basis correction for a field changing at dE_rate (V/m/s).
OperatorMatrix basis_change_correction(const SystemParams& params, double dE, double dE_rate);

/// Rotating-frame unitary exp(-i K t) (diagonal, orbital basis).
Mat8 rotating_frame_unitary(const DriveFrequencies& w, double t);

/// Idle qubit states and energies of the model used by `frame`: the columns are
/// |up~>, |down~> in the frame's basis.
struct QubitFrame {
  Mat8x2 vectors;
  Eigen::Vector2d energies;
  EvolutionFrame frame;
};
QubitFrame idle_qubit_frame(const SystemParams& params, const DriveFrequencies& w,
                            EvolutionFrame frame);

EvolutionResult evolve(const SystemParams& params, const PulseSchedule& schedule,
                       double noise_dE = 0.0, const EvolveOptions& options = {});

/// 1 - Tr(P U P U^dagger P) / dim P for the subspace spanned by the
/// orthonormal columns of `subspace`.
double leakage(const MatX& U, const MatX& subspace);
double leakage(const MatX& U, const std::vector<int>& indices);

/// Columnar (t, populations, leakage) dump of a recorded trace.
void write_trace(std::ostream& os, const EvolutionResult& result);

}  // namespace donorq
