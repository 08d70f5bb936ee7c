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

#include "donorq/core_model.hpp"
#include "donorq/linalg.hpp"

namespace donorq {

/// Single-donor operators on the 8-dim space, in the fixed basis ordering.
/// The orbital operators act on whichever orbital basis the caller is in:
/// tau_z = |0><0| - |1><1|, tau_x = |0><1| + |1><0|, tau_y = -i|0><1| + i|1><0|.
struct Operators {
  Mat8 identity;
  Mat8 tau_x, tau_y, tau_z;
  Mat8 tau_plus;   // |0><1| on the orbital factor (|g><e| or |i><d|)
  Mat8 sx, sy, sz, s_plus, s_minus;
  Mat8 ix, iy, iz, i_plus, i_minus;
  Mat8 s_dot_i;

  static const Operators& get();
};

/// Instantaneous lab Hamiltonian in the position basis {i, d}.
///   field        total static field dE + noise (V/m)
///   ac_electric  Ea(t) cos(wE t) (V/m)
///   ac_magnetic  Ba(t) cos(wB t) (T)
Mat8 position_hamiltonian(const SystemParams& params, double field, double ac_electric,
                          double ac_magnetic);

/// Unitary taking position-basis coordinates to orbital-basis coordinates,
/// Lambda = sqrt((1 + a)/2) 1 - i sqrt((1 - a)/2) sigma_y with a = d e dE / (hbar eps0).
Mat2 orbital_rotation(const SystemParams& params, double field);
Mat8 orbital_rotation8(const SystemParams& params, double field);

/// Moving-basis term i dLambda/dt Lambda^dagger in the orbital basis for a
/// field changing at `rate` (V/m/s): -(d e Vt / (2 hbar eps0^2)) rate tau_y.
Mat8 moving_basis_term(const SystemParams& params, double field, double rate);

/// Orbital weights |<i|g>|^2 and |<i|e>|^2.
struct InterfaceWeights {
  double ground;
  double excited;
};
InterfaceWeights interface_weights(const SystemParams& params, double field);

/// Index of the eigenvector (column of `vectors`) with the largest overlap with `target`.
int max_overlap_column(const MatX& vectors, const VecX& target, double* overlap = nullptr);

}  // namespace donorq
