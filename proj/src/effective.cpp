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


#include "donorq/effective.hpp"

#include <cstdio>
#include <sstream>

#include "donorq/diagnostics.hpp"
#include "donorq/operators.hpp"

namespace donorq {

namespace {

// Integer frame charges: K_i = wE kE_i + wB kB_i.
struct FrameCharges {
  std::array<int, 8> twice_kE;
  std::array<int, 8> twice_kB;
};

const FrameCharges& frame_charges() {
  static const FrameCharges charges = [] {
    FrameCharges c{};
    for (int i = 0; i < 8; ++i) {
      const int orbital = i / 4, electron = (i / 2) % 2, nuclear = i % 2;
      const int tau = orbital == basis::kOrbitalG ? 1 : -1;
      const int twice_sz = electron == basis::kSpinUp ? 1 : -1;
      const int twice_iz = nuclear == basis::kSpinUp ? 1 : -1;
      c.twice_kE[i] = tau + twice_iz;
      c.twice_kB[i] = -(twice_sz + twice_iz);
    }
    return c;
  }();
  return charges;
}

int shift_index(FrequencyLabel label) {
  const auto& shifts = floquet_shifts();
  for (int k = 0; k < 9; ++k)
    if (shifts[k] == label) return k;
  return -1;
}

}  // namespace

std::string FrequencyLabel::name() const {
  std::ostringstream os;
  auto term = [&](int n, const char* sym, bool first) {
    if (n == 0) return;
    if (n < 0) os << '-';
    else if (!first) os << '+';
    if (std::abs(n) != 1) os << std::abs(n);
    os << sym;
  };
  if (nE == 0 && nB == 0) return "0";
  term(nB, "wB", true);
  term(nE, "wE", nB == 0);
  return os.str();
}

const std::array<FrequencyLabel, 9>& floquet_shifts() {
  static const std::array<FrequencyLabel, 9> shifts{{
      {-2, 0}, {0, -2}, {-1, 0}, {1, -2}, {0, 0}, {-1, 2}, {1, 0}, {0, 2}, {2, 0}}};
  return shifts;
}

Eigen::Matrix<double, 8, 1> rotating_frame_generator(const DriveFrequencies& w) {
  const FrameCharges& c = frame_charges();
  Eigen::Matrix<double, 8, 1> k;
  for (int i = 0; i < 8; ++i) k(i) = 0.5 * (w.omega_E * c.twice_kE[i] + w.omega_B * c.twice_kB[i]);
  return k;
}

Mat8 rwa_hamiltonian(const SystemParams& p, const EnvelopeSample& s, const DriveFrequencies& w,
                     double noise_dE) {
  const Operators& op = Operators::get();
  const double field = s.dE + noise_dE;
  const double eps = charge_splitting(p, field);
  const double a = p.field_coupling() * field / eps;
  const double b = p.Vt / eps;
  const double ez = p.electron_zeeman();

  if ((s.Ea != 0.0 && std::abs(eps - w.omega_E) > 0.1 * eps) ||
      (s.Ba != 0.0 && std::abs(ez - w.omega_B) > 0.1 * eps)) {
    warn("rotating-wave picture questionable: drive detuning exceeds eps0/10 at dE = " +
         std::to_string(field) + " V/m");
  }

  Mat8 h = (0.5 * (w.omega_E - eps)) * op.tau_z;
  h -= (s.Ea * p.field_coupling() * b / 4.0) * op.tau_x;
  h += (ez - w.omega_B) * op.sz;
  h -= (p.nuclear_zeeman() + w.omega_B - w.omega_E) * op.iz;
  h += (ez * p.delta_gamma) * ((0.5 * op.identity - (0.5 * a) * op.tau_z) * op.sz);
  h += (0.5 * s.Ba * p.gamma_e) * op.sx;
  h += (0.5 * p.hyperfine_A) * ((op.identity - a * op.tau_z) * op.sz * op.iz);
  const int g_up_down = basis::index(basis::kOrbitalG, basis::kSpinUp, basis::kSpinDown);
  const int e_down_up = basis::index(basis::kOrbitalE, basis::kSpinDown, basis::kSpinUp);
  const double flip_flop = -p.hyperfine_A * b / 4.0;
  h(g_up_down, e_down_up) += flip_flop;
  h(e_down_up, g_up_down) += flip_flop;
  return h;
}

std::vector<FrequencyComponent> frequency_components(const SystemParams& p,
                                                     const EnvelopeSample& s,
                                                     const DriveFrequencies& w,
                                                     double noise_dE, double dE_rate) {
  const Operators& op = Operators::get();
  const double field = s.dE + noise_dE;
  const Mat8 lam = orbital_rotation8(p, field);

  // Lab-frame pieces in the orbital basis.
  Mat8 h_static = lam * position_hamiltonian(p, field, 0.0, 0.0) * lam.adjoint();
  if (dE_rate != 0.0) h_static += moving_basis_term(p, field, dE_rate);
  const Mat8 electric = (-0.5 * p.field_coupling() * s.Ea) * (lam * op.tau_z * lam.adjoint());
  const Mat8 magnetic = s.Ba * (p.gamma_e * op.sx - p.gamma_n * op.ix);

  std::vector<FrequencyComponent> out;
  for (const FrequencyLabel& label : floquet_shifts()) out.push_back({label, Mat8::Zero()});

  auto deposit = [&](FrequencyLabel label, int i, int j, cd value) {
    const int k = shift_index(label);
    if (k < 0) {
      if (std::abs(value) > 1e-6)
        throw std::logic_error("frequency component outside the truncated set: " + label.name());
      return;
    }
    out[k].matrix(i, j) += value;
  };

  const FrameCharges& c = frame_charges();
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 8; ++j) {
      // Entry (i, j) of any lab operator picks up exp(-i (K_i - K_j) t).
      const FrequencyLabel base{-(c.twice_kE[i] - c.twice_kE[j]) / 2,
                                -(c.twice_kB[i] - c.twice_kB[j]) / 2};
      if (h_static(i, j) != 0.0) deposit(base, i, j, h_static(i, j));
      if (electric(i, j) != 0.0) {
        deposit(base - FrequencyLabel{1, 0}, i, j, 0.5 * electric(i, j));
        deposit(base - FrequencyLabel{-1, 0}, i, j, 0.5 * electric(i, j));
      }
      if (magnetic(i, j) != 0.0) {
        deposit(base - FrequencyLabel{0, 1}, i, j, 0.5 * magnetic(i, j));
        deposit(base - FrequencyLabel{0, -1}, i, j, 0.5 * magnetic(i, j));
      }
    }
  }
  out[shift_index({0, 0})].matrix.diagonal() += rotating_frame_generator(w).cast<cd>();
  return out;
}

Mat8 reconstruct_rotating_hamiltonian(const std::vector<FrequencyComponent>& components,
                                      const DriveFrequencies& w, double t) {
  Mat8 h = Mat8::Zero();
  for (const auto& comp : components)
    h += std::exp(kI * (comp.label.value(w) * t)) * comp.matrix;
  return h;
}

FloquetBlock floquet_hamiltonian(const std::vector<FrequencyComponent>& components,
                                 const DriveFrequencies& w) {
  const auto& shifts = floquet_shifts();
  FloquetBlock block;
  block.floquet_matrix = MatX::Zero(72, 72);
  for (int n = 0; n < 9; ++n) block.shift_frequencies[n] = shifts[n].value(w);

  auto find = [&](FrequencyLabel label) -> const Mat8* {
    for (const auto& comp : components)
      if (comp.label == label) return &comp.matrix;
    return nullptr;
  };
  for (int n = 0; n < 9; ++n) {
    for (int m = 0; m < 9; ++m) {
      if (const Mat8* h = find(shifts[n] - shifts[m]))
        block.floquet_matrix.block<8, 8>(8 * n, 8 * m) = *h;
    }
    block.floquet_matrix.block<8, 8>(8 * n, 8 * n).diagonal().array() += block.shift_frequencies[n];
  }
  return block;
}

Mat8 schrieffer_wolff(FloquetBlock& block, double guard) {
  const MatX& f = block.floquet_matrix;
  const int first = 8 * block.target_block;
  const Eigen::VectorXd energy = f.diagonal().real();
  Mat8 second = Mat8::Zero();
  for (int l = 0; l < f.rows(); ++l) {
    if (l >= first && l < first + 8) continue;
    for (int m = 0; m < 8; ++m) {
      const cd coupling = f(first + m, l);
      if (coupling == 0.0) continue;
      const double gap = energy(first + m) - energy(l);
      if (std::abs(gap) < guard) {
        std::ostringstream os;
        os << "Schrieffer-Wolff near-degeneracy: target state " << basis::label(m)
           << " and Floquet state " << basis::label(l % 8) << " in block " << l / 8
           << " are " << gap / kTwoPi * 1e-6 << " MHz apart";
        throw SimulationError(os.str());
      }
    }
  }
  for (int m = 0; m < 8; ++m) {
    for (int mp = 0; mp < 8; ++mp) {
      cd acc = 0.0;
      for (int l = 0; l < f.rows(); ++l) {
        if (l >= first && l < first + 8) continue;
        const cd num = f(first + m, l) * f(l, first + mp);
        if (num == 0.0) continue;
        acc += 0.5 * num *
               (1.0 / (energy(first + m) - energy(l)) + 1.0 / (energy(first + mp) - energy(l)));
      }
      second(m, mp) = acc;
    }
  }
  block.effective_hamiltonian = f.block<8, 8>(first, first) + second;
  // Remove rounding asymmetry.
  block.effective_hamiltonian = 0.5 * (block.effective_hamiltonian +
                                       Mat8(block.effective_hamiltonian.adjoint()));
  return block.effective_hamiltonian;
}

Mat8 effective_hamiltonian(const SystemParams& p, const EnvelopeSample& s,
                           const DriveFrequencies& w, double noise_dE, double dE_rate) {
  FloquetBlock block = floquet_hamiltonian(frequency_components(p, s, w, noise_dE, dE_rate), w);
  return schrieffer_wolff(block);
}

std::string format_matrix(const Mat8& m, double unit) {
  std::ostringstream os;
  char buf[64];
  os << "#" << std::string(8, ' ');
  for (int j = 0; j < 8; ++j) {
    std::snprintf(buf, sizeof buf, "%-25s", basis::label(j).c_str());
    os << buf;
  }
  os << '\n';
  for (int i = 0; i < 8; ++i) {
    std::snprintf(buf, sizeof buf, "%-9s", basis::label(i).c_str());
    os << buf;
    for (int j = 0; j < 8; ++j) {
      std::snprintf(buf, sizeof buf, "%+.6e%+.6ei ", m(i, j).real() / unit, m(i, j).imag() / unit);
      os << buf;
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace donorq
