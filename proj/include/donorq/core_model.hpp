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

// Physical constants, device parameters and the closed-form energy scales of a
// donor electron shared between the phosphorus nucleus and the Si/SiO2
// interface.
//
// Every energy is an angular frequency in rad/s (hbar = 1). Electric fields
// are the offset dE from the ionization point, in V/m.

#include <array>
#include <string>
#include <vector>

#include "donorq/linalg.hpp"

namespace donorq {

struct PhysicalConstants {
  static constexpr double electron_charge = 1.602176634e-19;        // C
  static constexpr double hbar = 1.054571817e-34;                   // J s
  static constexpr double vacuum_permittivity = 8.8541878128e-12;   // F/m
  static constexpr double silicon_relative_permittivity = 11.7;
};

struct SystemParams {
  double hyperfine_A = kTwoPi * 117e6;      // rad/s
  double gamma_e = kTwoPi * 27.97e9;        // rad/s/T
  double gamma_n = kTwoPi * 17.23e6;        // rad/s/T
  double delta_gamma = -0.002;
  double donor_depth_d = 15e-9;             // m
  double B0 = 0.2;                          // T
  double Vt = 0.2 * kTwoPi * (27.97e9 + 17.23e6);  // rad/s
  double dE_idle = 1e4;                     // V/m

  /// d e / hbar: rad/s of orbital detuning per V/m of field.
  double field_coupling() const {
    return donor_depth_d * PhysicalConstants::electron_charge / PhysicalConstants::hbar;
  }
  double electron_zeeman() const { return B0 * gamma_e; }
  double nuclear_zeeman() const { return B0 * gamma_n; }

  /// The default device with Vt re-derived from B0 (gamma_e + gamma_n).
  static SystemParams defaults() { return SystemParams{}; }
};

/// Throws std::invalid_argument on a non-physical parameter set. Returns
/// advisory warnings (also routed through the warning sink).
std::vector<std::string> validate(const SystemParams& params);

/// Fixed ordering: index = 4 * orbital + 2 * electron + nuclear with
/// orbital {g, e} (or {i, d} in the position basis), electron {down, up},
/// nuclear {Down, Up}.
namespace basis {
inline constexpr int kOrbitalG = 0, kOrbitalE = 1;
inline constexpr int kOrbitalI = 0, kOrbitalD = 1;
inline constexpr int kSpinDown = 0, kSpinUp = 1;

constexpr int index(int orbital, int electron, int nuclear) {
  return 4 * orbital + 2 * electron + nuclear;
}

/// |g down Up> carries the qubit |Up~>, |g down Down> carries |Down~>.
inline constexpr int kQubitUp = index(kOrbitalG, kSpinDown, kSpinUp);
inline constexpr int kQubitDown = index(kOrbitalG, kSpinDown, kSpinDown);
inline constexpr std::array<int, 2> kQubitSubspace{kQubitUp, kQubitDown};

std::string label(int idx, bool position_basis = false);
}  // namespace basis

/// eps0 = sqrt(Vt^2 + (d e dE / hbar)^2).
double charge_splitting(const SystemParams& params, double dE);

/// <A> = (A / 2) (1 - d e dE / (hbar eps0)).
double hyperfine_expectation(const SystemParams& params, double dE);

/// delta_q ~ B0 gamma_n + <A> / 2.
double qubit_splitting_approx(const SystemParams& params, double dE);

/// d delta_q / d dE = -A (d e / hbar) Vt^2 / (4 eps0^3), in rad/s per V/m.
double dephasing_sensitivity(const SystemParams& params, double dE);

/// Large-field form -A Vt^2 / (4 (d e / hbar)^2 dE^3); only meaningful when
/// |d e dE / hbar| >> Vt.
double dephasing_sensitivity_large_field(const SystemParams& params, double dE);

struct TransitionEnergies {
  double down;  // E(g up Down) - E(g down Down)
  double up;    // E(e down Up) - E(g down Up)
  double mid;   // E(e down Up) - E(g up Down)
};

TransitionEnergies transition_energies(const SystemParams& params, double dE);

/// Exact zero-drive lab-frame qubit splitting E(Down~) - E(Up~) from the full
/// static 8x8 Hamiltonian.
double qubit_splitting_exact(const SystemParams& params, double dE);

}  // namespace donorq
