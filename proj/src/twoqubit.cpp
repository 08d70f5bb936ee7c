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

#include "donorq/twoqubit.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "donorq/diagnostics.hpp"
#include "donorq/operators.hpp"
#include "donorq/parallel.hpp"

namespace donorq {

void TwoQubitLayout::validate() const {
  if (!(separation_r > 0.0)) throw std::invalid_argument("TwoQubitLayout: separation_r must be > 0");
  donorq::validate(qubit1);
  donorq::validate(qubit2);
}

double dipole_coupling_strength(const TwoQubitLayout& layout) {
  if (!(layout.separation_r > 0.0))
    throw std::invalid_argument("dipole_coupling_strength: separation_r must be > 0");
  using PC = PhysicalConstants;
  const double e = PC::electron_charge;
  const double r = layout.separation_r;
  const double p1 = e * layout.qubit1.donor_depth_d;
  const double p2 = e * layout.qubit2.donor_depth_d;
  return p1 * p2 /
         (4.0 * kPi * PC::vacuum_permittivity * PC::silicon_relative_permittivity * r * r * r *
          PC::hbar);
}

double interface_weight(const SystemParams& p, double field, const Vec8& v) {
  const InterfaceWeights w = interface_weights(p, field);
  double out = 0.0;
  for (int k = 0; k < 4; ++k) out += w.ground * std::norm(v(k)) + w.excited * std::norm(v(k + 4));
  return out / v.squaredNorm();
}

Vec8 dressed_qubit_state(const Mat8& h, const Vec8& previous, double* energy) {
  Eigen::SelfAdjointEigenSolver<Mat8> es(h);
  double overlap = 0.0;
  const int k = max_overlap_column(es.eigenvectors(), previous, &overlap);
  if (overlap < 0.5)
    throw SimulationError("eigenstate tracking lost continuity (overlap " +
                          std::to_string(overlap) + ")");
  Vec8 v = es.eigenvectors().col(k);
  const cd amp = previous.dot(v);
  if (std::abs(amp) > 0.0) v *= std::conj(amp) / std::abs(amp);
  if (energy) *energy = es.eigenvalues()(k);
  return v;
}

double interface_weight(const SystemParams& p, const EnvelopeSample& sample,
                        const DriveFrequencies& w, double noise_dE, int state_index) {
  if (state_index != basis::kQubitUp && state_index != basis::kQubitDown)
    throw std::invalid_argument("interface_weight: state_index must be a qubit state");
  const Mat8 h = effective_hamiltonian(p, sample, w, noise_dE);
  const Vec8 v = dressed_qubit_state(h, Vec8::Unit(state_index));
  return interface_weight(p, sample.dE + noise_dE, v);
}

MatX dipole_interaction_rwa(const TwoQubitLayout& layout, double dE1, double dE2,
                            bool same_drive_frequency) {
  const Operators& op = Operators::get();
  const double c = dipole_coupling_strength(layout);
  const InterfaceWeights w1 = interface_weights(layout.qubit1, dE1);
  const InterfaceWeights w2 = interface_weights(layout.qubit2, dE2);
  const double a1 = w1.ground - w1.excited, a2 = w2.ground - w2.excited;
  const Mat8 n1 = op.identity + a1 * op.tau_z;
  const Mat8 n2 = op.identity + a2 * op.tau_z;
  MatX v = kron(n1, n2);
  if (same_drive_frequency) {
    const double b1 = 2.0 * std::sqrt(w1.ground * w1.excited);
    const double b2 = 2.0 * std::sqrt(w2.ground * w2.excited);
    v += (0.5 * b1 * b2) * (kron(op.tau_x, op.tau_x) + kron(op.tau_y, op.tau_y));
  }
  return (0.25 * c) * v;
}

namespace {

constexpr double kSameFrequencyTolerance = kTwoPi * 1e3;

int product_index(int q1, int q2) { return 8 * q1 + q2; }

MatX two_qubit_hamiltonian(const Mat8& h1, const Mat8& h2, const MatX& v) {
  const Mat8 id = Mat8::Identity();
  return kron(h1, id) + kron(id, h2) + v;
}

DriveFrequencies drive_of(const PulseSchedule& s) { return {s.omega_E, s.omega_B}; }

Mat8 effective_at(const SystemParams& p, const PulseSchedule& s, double t, double noise) {
  return effective_hamiltonian(p, {s.dE(t), s.Ea(t), s.Ba(t)}, drive_of(s), noise,
                               s.dE.derivative(t));
}

void check_pair(const PulseSchedule& s1, const PulseSchedule& s2) {
  if (std::abs(s1.total_time - s2.total_time) > 1e-15)
    throw std::invalid_argument("two-qubit schedules must share the same total_time");
}

// Order: up-up, up-down, down-up, down-down.
constexpr int kQ[2] = {basis::kQubitUp, basis::kQubitDown};

}  // namespace

double dipole_frequency_shift(const TwoQubitLayout& layout, double hold_field) {
  const auto zero_ac = [&](const SystemParams& p) {
    const DriveFrequencies w{charge_splitting(p, hold_field), p.electron_zeeman()};
    return effective_hamiltonian(p, {hold_field, 0.0, 0.0}, w);
  };
  const Mat8 h1 = zero_ac(layout.qubit1), h2 = zero_ac(layout.qubit2);
  const int ground = basis::kQubitDown;
  const int excited = basis::index(basis::kOrbitalE, basis::kSpinDown, basis::kSpinDown);
  auto splitting = [&](const MatX& h) {
    Eigen::SelfAdjointEigenSolver<MatX> es(h);
    double e[2];
    const int idx[2] = {product_index(ground, ground), product_index(excited, ground)};
    for (int k = 0; k < 2; ++k) {
      double ov = 0.0;
      const int c = max_overlap_column(es.eigenvectors(), VecX::Unit(64, idx[k]), &ov);
      if (ov < 0.5) throw SimulationError("dipole_frequency_shift: state not identifiable");
      e[k] = es.eigenvalues()(c);
    }
    return e[1] - e[0];
  };
  const MatX v = dipole_interaction_rwa(layout, hold_field, hold_field, false);
  const MatX zero = MatX::Zero(64, 64);
  return splitting(two_qubit_hamiltonian(h1, h2, v)) - splitting(two_qubit_hamiltonian(h1, h2, zero));
}

CphasePair make_cphase_pair(const TwoQubitLayout& layout, double T, CphaseConfig config,
                            bool calibrate_shift) {
  CphaseConfig c1 = config, c2 = config;
  if (calibrate_shift) {
    TwoQubitLayout swapped = layout;
    std::swap(swapped.qubit1, swapped.qubit2);
    c1.omega_E_shift += dipole_frequency_shift(layout, config.hold_field);
    c2.omega_E_shift += dipole_frequency_shift(swapped, config.hold_field);
  }
  return {make_cphase_schedule(layout.qubit1, T, c1), make_cphase_schedule(layout.qubit2, T, c2)};
}

std::string CphaseReport::serialize() const {
  std::ostringstream os;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "target = cphase\nduration = %.12g\nalpha = %.12g\nbeta = %.12g\ngamma = %.12g\n"
                "delta = %.12g\nphi = %.12g\nlocal_rz1 = %.12g\nlocal_rz2 = %.12g\n"
                "nonadiabaticity = %.6e\n",
                duration, alpha, beta, gamma, delta, phi, local_rz1, local_rz2, nonadiabaticity);
  os << buf;
  return os.str();
}

CphaseReport cphase_angle(const TwoQubitLayout& layout, const PulseSchedule& s1,
                          const PulseSchedule& s2, const QuadratureOptions& o) {
  layout.validate();
  check_pair(s1, s2);
  if (!(o.dt > 0.0)) throw std::invalid_argument("cphase_angle: dt must be > 0");
  const double T = s1.total_time;
  const double C = dipole_coupling_strength(layout);
  const SystemParams* params[2] = {&layout.qubit1, &layout.qubit2};
  const PulseSchedule* sched[2] = {&s1, &s2};
  const long n = std::max<long>(2, static_cast<long>(std::ceil(T / o.dt - 1e-9)));
  const double h = T / n;

  Vec8 track[2][2];
  for (int k = 0; k < 2; ++k)
    for (int q = 0; q < 2; ++q) track[k][q] = Vec8::Unit(kQ[q]);
  Mat8 h_prev[2];
  double phase[4] = {0, 0, 0, 0};
  double e_ref[4] = {0, 0, 0, 0};
  double e_prev[4] = {0, 0, 0, 0};
  double nonadiabatic = 0.0;

  for (long j = 0; j <= n; ++j) {
    const double t = j * h;
    double bare_g[2];
    for (int k = 0; k < 2; ++k) bare_g[k] = interface_weights(*params[k], sched[k]->dE(t)).ground;
    double E[2][2], W[2][2];
    for (int k = 0; k < 2; ++k) {
      const double mf = o.mean_field ? -C * bare_g[1 - k] / params[k]->field_coupling() : 0.0;
      const Mat8 hk = effective_at(*params[k], *sched[k], t, mf);
      Eigen::SelfAdjointEigenSolver<Mat8> es(hk);
      for (int q = 0; q < 2; ++q) {
        track[k][q] = dressed_qubit_state(hk, track[k][q], &E[k][q]);
        W[k][q] = interface_weight(*params[k], sched[k]->dE(t) + mf, track[k][q]);
        if (j > 0) {
          const Vec8 dh = (hk - h_prev[k]) / h * track[k][q];
          for (int m = 0; m < 8; ++m) {
            const double gap = es.eigenvalues()(m) - E[k][q];
            if (std::abs(gap) < 1e-6 * kTwoPi) continue;
            const double amp = std::abs(es.eigenvectors().col(m).dot(dh)) / (gap * gap);
            nonadiabatic = std::max(nonadiabatic, amp * amp);
          }
        }
      }
      h_prev[k] = hk;
    }
    const double wbar1 = o.mean_field ? bare_g[0] : 0.0;
    const double wbar2 = o.mean_field ? bare_g[1] : 0.0;
    double e_now[4];
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b)
        e_now[2 * a + b] = E[0][a] + E[1][b] + C * (W[0][a] - wbar1) * (W[1][b] - wbar2);
    if (j == 0) std::copy(e_now, e_now + 4, e_ref);
    if (j > 0)
      for (int s = 0; s < 4; ++s)
        phase[s] -= 0.5 * h * ((e_now[s] - e_ref[s]) + (e_prev[s] - e_ref[s]));
    std::copy(e_now, e_now + 4, e_prev);
  }

  CphaseReport r;
  r.duration = T;
  r.alpha = phase[0];
  r.beta = phase[1];
  r.gamma = phase[2];
  r.delta = phase[3];
  r.phi = r.alpha - r.beta - r.gamma + r.delta;
  r.local_rz1 = r.gamma - r.alpha;
  r.local_rz2 = r.beta - r.alpha;
  r.nonadiabaticity = nonadiabatic;
  if (nonadiabatic > 1e-2)
    warn("cphase_angle: nonadiabaticity " + std::to_string(nonadiabatic) + " exceeds 1e-2");
  return r;
}

CphaseReport adiabatic_cphase_angle(const TwoQubitLayout& layout, const PulseSchedule& s1,
                                    const PulseSchedule& s2, double dt, bool flip_flop) {
  layout.validate();
  check_pair(s1, s2);
  if (!(dt > 0.0)) throw std::invalid_argument("adiabatic_cphase_angle: dt must be > 0");
  const double T = s1.total_time;
  const bool same = flip_flop && std::abs(s1.omega_E - s2.omega_E) < kSameFrequencyTolerance;
  const long n = std::max<long>(2, static_cast<long>(std::ceil(T / dt - 1e-9)));
  const double h = T / n;
  VecX track[4];
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) track[2 * a + b] = VecX::Unit(64, product_index(kQ[a], kQ[b]));
  double phase[4] = {0, 0, 0, 0}, e_ref[4] = {0, 0, 0, 0}, e_prev[4] = {0, 0, 0, 0};
  for (long j = 0; j <= n; ++j) {
    const double t = j * h;
    const MatX hm = two_qubit_hamiltonian(effective_at(layout.qubit1, s1, t, 0.0),
                                          effective_at(layout.qubit2, s2, t, 0.0),
                                          dipole_interaction_rwa(layout, s1.dE(t), s2.dE(t), same));
    Eigen::SelfAdjointEigenSolver<MatX> es(hm);
    double e_now[4];
    for (int s = 0; s < 4; ++s) {
      double ov = 0.0;
      const int c = max_overlap_column(es.eigenvectors(), track[s], &ov);
      if (ov < 0.5)
        throw SimulationError("adiabatic_cphase_angle: eigenstate tracking lost continuity");
      track[s] = es.eigenvectors().col(c);
      e_now[s] = es.eigenvalues()(c);
    }
    if (j == 0) std::copy(e_now, e_now + 4, e_ref);
    if (j > 0)
      for (int s = 0; s < 4; ++s)
        phase[s] -= 0.5 * h * ((e_now[s] - e_ref[s]) + (e_prev[s] - e_ref[s]));
    std::copy(e_now, e_now + 4, e_prev);
  }
  CphaseReport r;
  r.duration = T;
  r.alpha = phase[0];
  r.beta = phase[1];
  r.gamma = phase[2];
  r.delta = phase[3];
  r.phi = r.alpha - r.beta - r.gamma + r.delta;
  r.local_rz1 = r.gamma - r.alpha;
  r.local_rz2 = r.beta - r.alpha;
  return r;
}

namespace {

MatX integrate_two_qubit(const TwoQubitLayout& layout, const PulseSchedule& s1,
                         const PulseSchedule& s2, const TwoQubitOptions& o, double dt) {
  const double T = s1.total_time;
  const long n = std::max<long>(1, static_cast<long>(std::ceil(T / dt - 1e-9)));
  const double h = T / n;
  const bool same = o.flip_flop && std::abs(s1.omega_E - s2.omega_E) < kSameFrequencyTolerance;
  MatX u = MatX::Identity(64, 64);
  for (long j = 0; j < n; ++j) {
    const double tm = (j + 0.5) * h;
    const Mat8 h1 = effective_at(layout.qubit1, s1, tm, o.noise_dE1);
    const Mat8 h2 = effective_at(layout.qubit2, s2, tm, o.noise_dE2);
    const MatX v = o.coupling_scale *
                   dipole_interaction_rwa(layout, s1.dE(tm) + o.noise_dE1, s2.dE(tm) + o.noise_dE2, same);
    u = propagator_eigen(two_qubit_hamiltonian(h1, h2, v), h) * u;
  }
  return u;
}

}  // namespace

TwoQubitResult simulate_two_qubit(const TwoQubitLayout& layout, const PulseSchedule& s1,
                                  const PulseSchedule& s2, const TwoQubitOptions& o) {
  layout.validate();
  check_pair(s1, s2);
  if (!(o.dt > 0.0)) throw std::invalid_argument("simulate_two_qubit: dt must be > 0");
  const double T = s1.total_time;
  const bool same = o.flip_flop && std::abs(s1.omega_E - s2.omega_E) < kSameFrequencyTolerance;

  TwoQubitResult r;
  r.propagator = integrate_two_qubit(layout, s1, s2, o, o.dt);
  if (o.check_convergence) {
    const MatX half = integrate_two_qubit(layout, s1, s2, o, 0.5 * o.dt);
    r.convergence_change = (r.propagator - half).cwiseAbs().maxCoeff();
  }

  // Idle frame: eigenstates of the coupled Hamiltonian at t = 0.
  const Mat8 h1 = effective_at(layout.qubit1, s1, 0.0, o.noise_dE1);
  const Mat8 h2 = effective_at(layout.qubit2, s2, 0.0, o.noise_dE2);
  const MatX v = o.coupling_scale *
                 dipole_interaction_rwa(layout, s1.dE(0.0) + o.noise_dE1, s2.dE(0.0) + o.noise_dE2, same);
  Eigen::SelfAdjointEigenSolver<MatX> es(two_qubit_hamiltonian(h1, h2, v));
  MatX frame(64, 4);
  Eigen::Vector4d energy;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) {
      const int s = 2 * a + b;
      const VecX ref = VecX::Unit(64, product_index(kQ[a], kQ[b]));
      double ov = 0.0;
      const int c = max_overlap_column(es.eigenvectors(), ref, &ov);
      if (ov < 0.5) throw SimulationError("simulate_two_qubit: idle state not identifiable");
      VecX col = es.eigenvectors().col(c);
      const cd amp = ref.dot(col);
      col *= std::conj(amp) / std::abs(amp);
      frame.col(s) = col;
      energy(s) = es.eigenvalues()(c);
    }
  const MatX block = frame.adjoint() * r.propagator * frame;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) r.block(i, j) = std::exp(kI * (energy(i) * T)) * block(i, j);

  r.leakage = std::max(0.0, 1.0 - r.block.squaredNorm() / 4.0);
  r.block_unitarity_defect = unitarity_defect(r.block);
  double off = 0.0;
  for (int j = 0; j < 4; ++j) off = std::max(off, 1.0 - std::norm(r.block(j, j)));
  CphaseReport& rep = r.report;
  rep.duration = T;
  rep.alpha = std::arg(r.block(0, 0));
  rep.beta = std::arg(r.block(1, 1));
  rep.gamma = std::arg(r.block(2, 2));
  rep.delta = std::arg(r.block(3, 3));
  rep.phi = wrap_pi(rep.alpha - rep.beta - rep.gamma + rep.delta);
  rep.local_rz1 = wrap_pi(rep.gamma - rep.alpha);
  rep.local_rz2 = wrap_pi(rep.beta - rep.alpha);
  rep.nonadiabaticity = off;
  r.adiabatic = off <= 1e-3;
  if (!r.adiabatic)
    warn("simulate_two_qubit: nonadiabaticity " + std::to_string(off) + " exceeds 1e-3");
  return r;
}

std::vector<PhiCurvePoint> phi_curve(const TwoQubitLayout& layout, const std::vector<double>& durations,
                                     const CphaseConfig& config, const QuadratureOptions& options) {
  TwoQubitLayout swapped = layout;
  std::swap(swapped.qubit1, swapped.qubit2);
  CphaseConfig c1 = config, c2 = config;
  c1.omega_E_shift += dipole_frequency_shift(layout, config.hold_field);
  c2.omega_E_shift += dipole_frequency_shift(swapped, config.hold_field);
  std::vector<PhiCurvePoint> out(durations.size());
  parallel_for(durations.size(), [&](std::size_t i) {
    const double T = durations[i];
    const PulseSchedule s1 = make_cphase_schedule(layout.qubit1, T, c1);
    const PulseSchedule s2 = make_cphase_schedule(layout.qubit2, T, c2);
    out[i] = {T, cphase_angle(layout, s1, s2, options).phi};
  });
  return out;
}

void write_phi_curve(std::ostream& os, const std::vector<PhiCurvePoint>& curve) {
  char buf[96];
  os << "# T_s phi_rad abs_phi_mod_2pi\n";
  for (const auto& pt : curve) {
    std::snprintf(buf, sizeof buf, "%.9e %.12e %.12e\n", pt.T, pt.phi, wrap_2pi(std::abs(pt.phi)));
    os << buf;
  }
}

double cz_duration_search(const TwoQubitLayout& layout, double target, const CphaseConfig& config,
                          double t_min, double t_max, const QuadratureOptions& options) {
  if (!(target > 0.0) || !(t_max > t_min))
    throw std::invalid_argument("cz_duration_search: need target > 0 and t_max > t_min");
  constexpr double kGrid = 10e-9;
  std::vector<double> grid;
  for (double T = t_min; T < t_max + 1e-15; T += kGrid) grid.push_back(std::min(T, t_max));
  const std::vector<PhiCurvePoint> curve = phi_curve(layout, grid, config, options);
  std::size_t hi = 0;
  while (hi < curve.size() && std::abs(curve[hi].phi) < target) ++hi;
  if (hi == curve.size() || hi == 0)
    throw SimulationError("cz_duration_search: no root of |phi(T)| = target in [" +
                          std::to_string(t_min) + ", " + std::to_string(t_max) + "] s (max |phi| " +
                          std::to_string(std::abs(curve.back().phi)) + ")");
  for (std::size_t k = 1; k <= hi; ++k)
    if (std::abs(curve[k].phi) < std::abs(curve[k - 1].phi))
      throw SimulationError("cz_duration_search: |phi(T)| not monotone below the root");

  TwoQubitLayout swapped = layout;
  std::swap(swapped.qubit1, swapped.qubit2);
  CphaseConfig c1 = config, c2 = config;
  c1.omega_E_shift += dipole_frequency_shift(layout, config.hold_field);
  c2.omega_E_shift += dipole_frequency_shift(swapped, config.hold_field);
  auto f = [&](double T) {
    return std::abs(cphase_angle(layout, make_cphase_schedule(layout.qubit1, T, c1),
                                 make_cphase_schedule(layout.qubit2, T, c2), options)
                        .phi) -
           target;
  };
  double a = curve[hi - 1].T, b = curve[hi].T;
  double fa = std::abs(curve[hi - 1].phi) - target, fb = std::abs(curve[hi].phi) - target;
  int side = 0;
  for (int it = 0; it < 60 && b - a > 1e-12; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = f(c);
    if (fc * fb > 0) {
      b = c, fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c, fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
    if (std::abs(fc) < 1e-9) return c;
  }
  return 0.5 * (a + b);
}

}  // namespace donorq
