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

// Acceptance runner: one line per criterion, pinned tolerances, nonzero exit
// status if any criterion fails.
#include <chrono>
#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "donorq/diagnostics.hpp"
#include "donorq/effective.hpp"
#include "donorq/gates.hpp"
#include "donorq/parallel.hpp"
#include "donorq/twoqubit.hpp"

using namespace donorq;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const char* fmt, ...) __attribute__((format(printf, 3, 4)));
};

void Outcome::require(bool ok, const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  if (!detail.empty()) detail += "; ";
  detail += buf;
  if (!ok) {
    detail += " [x]";
    pass = false;
  }
}

constexpr double kMHz = kTwoPi * 1e6;

EvolveOptions frame(EvolutionFrame f) {
  EvolveOptions o;
  o.frame = f;
  return o;
}

double phase_distance(const Mat2& a, const Mat2& b) {
  const cd ov = (a.adjoint() * b).trace();
  const cd ph = std::abs(ov) > 0 ? ov / std::abs(ov) : cd(1.0);
  return (a * ph - b).cwiseAbs().maxCoeff();
}

PulseSchedule idle_like(const SystemParams& p, PulseSchedule s) {
  s.dE = Envelope::constant(p.dE_idle);
  s.Ea = Envelope();
  s.Ba = Envelope();
  return s;
}

std::vector<PulseSchedule> factory_schedules(const SystemParams& p) {
  return {make_rz_schedule(p, 6.632e-9),    make_rz_schedule(p, 13.56e-9),   make_rz_schedule(p, 22.116e-9),
          make_echo_rz_schedule(p, 20e-9),  make_rx_sweep_schedule(p, 0.5),  make_rx_sweep_schedule(p, 1.0),
          make_naive_rx_schedule(p, 0.4),   make_cphase_schedule(p, 200e-9), make_cphase_schedule(p, 494e-9)};
}

// 1. Splitting shift and exact-vs-approximate agreement.
Outcome splitting() {
  SystemParams p;
  Outcome o;
  const double shift = qubit_splitting_exact(p, -2e4) - qubit_splitting_exact(p, 2e4);
  o.require(std::abs(shift / kMHz - 60.0) <= 6.0, "shift %.3f MHz (60 +- 10%%)", shift / kMHz);
  double gap = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    const double dE = -2e4 + 10.0 * i;
    gap = std::max(gap, std::abs(qubit_splitting_exact(p, dE) - qubit_splitting_approx(p, dE)));
  }
  o.require(gap <= 0.5 * kMHz, "max |exact - approx| %.4f MHz (<= 0.5)", gap / kMHz);
  return o;
}

// 2. Dephasing sensitivity at the idle point.
Outcome sensitivity() {
  SystemParams p;
  Outcome o;
  const double s = std::abs(dephasing_sensitivity(p, p.dE_idle)) / kTwoPi;
  o.require(std::abs(s - 70.0) <= 3.5, "|d dq/d dE| %.2f Hz per V/m (70 +- 5%%)", s);
  return o;
}

// 3. Rz angle curve against the phase-integral prediction.
Outcome rz_curve() {
  SystemParams p;
  Outcome o;
  const int n = 47;
  std::vector<double> gap(n);
  parallel_for(n, [&](std::size_t i) {
    const double T = 2e-9 + 23e-9 * i / (n - 1);
    const ExtractedGate g = extract_qubit_gate(evolve(p, make_rz_schedule(p, T), 0.0, frame(EvolutionFrame::Effective)), p);
    gap[i] = std::abs(wrap_pi(rz_angle_of(g.block) - predict_rz_angle(p, T).unreduced));
  });
  const double worst = *std::max_element(gap.begin(), gap.end());
  o.require(worst <= 0.08, "effective-frame max gap %.4f rad over 2-25 ns (<= 0.08)", worst);
  for (auto f : {EvolutionFrame::Effective, EvolutionFrame::LabPosition}) {
    for (auto [T, target] : {std::pair{13.56e-9, kPi}, std::pair{22.116e-9, kTwoPi}}) {
      const double theta = rz_angle_of(extract_qubit_gate(evolve(p, make_rz_schedule(p, T), 0.0, frame(f)), p).block);
      const double err = std::abs(wrap_pi(theta - target));
      o.require(err <= 0.08, "%s theta(%.3f ns) off %s by %.4f rad", to_string(f), T * 1e9,
                target == kPi ? "pi" : "2pi", err);
    }
  }
  return o;
}

// 4. Rz gates under quasi-static charge noise.
Outcome rz_noise() {
  SystemParams p;
  Outcome o;
  const EvolveOptions e = frame(EvolutionFrame::Effective);
  for (double T : {6.632e-9, 13.56e-9, 22.116e-9}) {
    const GateSequence seq{GateStep::pulse(make_rz_schedule(p, T))};
    const Mat2 target = QubitGate::from(simulate_sequence(p, seq, 0.0, e).block).matrix;
    const MonteCarloResult mc = run_noise_monte_carlo(p, seq, target, NoiseModel{100.0, 200, 20260}, e);
    o.require(mc.mean_infidelity < 1e-4, "T %.3f ns: %.2e", T * 1e9, mc.mean_infidelity);
  }
  return o;
}

// 5. Lab frame against the effective Hamiltonian for the sweep gate.
Outcome effective_validity() {
  SystemParams p;
  Outcome o;
  const PulseSchedule s = make_rx_sweep_schedule(p, 1.0);
  const Mat2 lab = extract_qubit_gate(evolve(p, s, 0.0, frame(EvolutionFrame::LabPosition)), p).block;
  const Mat2 eff = extract_qubit_gate(evolve(p, s, 0.0, frame(EvolutionFrame::Effective)), p).block;
  const double fidelity = std::norm((QubitGate::from(lab).matrix.adjoint() * QubitGate::from(eff).matrix).trace()) / 4.0;
  o.require(fidelity > 0.9999, "gate fidelity %.6f (> 0.9999)", fidelity);
  return o;
}

// 6. Sweep leakage and the two-photon guard.
Outcome sweep_leakage() {
  SystemParams p;
  Outcome o;
  const ExtractedGate g = extract_qubit_gate(evolve(p, make_rx_sweep_schedule(p, 1.0), 0.0, frame(EvolutionFrame::Effective)), p);
  o.require(g.leakage <= 1e-4, "leakage %.2e (<= 1e-4)", g.leakage);
  o.require(!two_photon_resonance_crossed(p, make_rx_sweep_schedule(p, 1.0)), "default sweep guard silent");
  SweepConfig wide;
  wide.sweep_start = -3000;
  wide.sweep_end = 3000;
  o.require(two_photon_resonance_crossed(p, make_rx_sweep_schedule(p, 1.0, wide)), "+-3000 V/m sweep guard fires");
  return o;
}

// 7. Noise-resistance ordering of the X rotations.
Outcome rx_ordering() {
  SystemParams p;
  Outcome o;
  const EvolveOptions e = frame(EvolutionFrame::Effective);
  const NoiseModel noise{100.0, 200, 20261};
  const RxFactory sweep = [&](double l) { return make_rx_sweep_schedule(p, l); };
  const LambdaCalibration sweep_table = calibrate_lambda(p, sweep, e);
  const NaiveRxCalibration naive_cal = calibrate_naive_rx(p, e);
  const RxFactory naive = [&](double l) { return make_naive_rx_schedule(p, l, naive_cal.config); };
  const LambdaCalibration naive_table = calibrate_lambda(p, naive, e);
  for (double theta : {kPi / 4, kPi / 2, 3 * kPi / 4}) {
    const SweepEchoRx se = build_sweep_echo_rx(p, theta, sweep_table, e);
    const double echo = run_noise_monte_carlo(p, se.sequence, rx(theta), noise, e).mean_infidelity;
    const GateSequence nv = corrected_pulse(p, naive(solve_lambda(p, naive, naive_table, theta, e)), e);
    const double nai = run_noise_monte_carlo(p, nv, rx(theta), noise, e).mean_infidelity;
    o.require(echo <= 2e-3 && 10 * echo <= nai, "theta %.3f: echo %.2e naive %.2e", theta, echo, nai);
  }
  const GateSequence bare = corrected_pulse(p, sweep(1.0), e);
  const double bare_inf = run_noise_monte_carlo(p, bare, rx(kPi), noise, e).mean_infidelity;
  o.require(bare_inf <= 2e-3, "bare sweep pi %.2e (theta_x(1) = %.4f)", bare_inf, sweep_table.max_theta());

  // Lab-frame spot checks of the bare sweep gate at three noise values.
  const EvolveOptions lab = frame(EvolutionFrame::LabPosition);
  const GateSequence bare_lab = corrected_pulse(p, sweep(1.0), lab);
  double worst = 0.0;
  for (double dE : {-100.0, 0.0, 100.0}) {
    const double a = gate_infidelity(simulate_sequence(p, bare_lab, dE, lab).block, rx(kPi));
    const double b = gate_infidelity(simulate_sequence(p, bare, dE, e).block, rx(kPi));
    worst = std::max(worst, std::abs(a - b));
  }
  o.require(worst < 1e-3, "lab vs effective infidelity spread %.2e at dE = -100, 0, 100", worst);
  return o;
}

// 8. CPHASE rate, CZ duration, idle partner, reachable phases.
Outcome cphase() {
  Outcome o;
  TwoQubitLayout L;
  const SystemParams& p = L.qubit1;
  const double D = 2000;
  // Square pulse: constant rate C (W_up1 - W_down1)(W_up2 - W_down2) on the dressed states.
  const DriveFrequencies w{charge_splitting(p, D) + p.hyperfine_A / 4 - hyperfine_expectation(p, D) / 2 + kTwoPi * 5e6,
                           p.electron_zeeman() - p.hyperfine_A / 4};
  const Mat8 h = effective_hamiltonian(p, {D, 30.0, 0.0}, w);
  const double dw = interface_weight(p, D, dressed_qubit_state(h, Vec8::Unit(basis::kQubitUp))) -
                    interface_weight(p, D, dressed_qubit_state(h, Vec8::Unit(basis::kQubitDown)));
  const double rate = dipole_coupling_strength(L) * dw * dw / kMHz;
  o.require(std::abs(rate - 1.9) <= 0.19, "square phi/T %.3f MHz (1.9 +- 10%%)", rate);

  try {
    const double tcz = cz_duration_search(L);
    o.require(std::abs(tcz - 494e-9) <= 0.05 * 494e-9, "CZ at %.1f ns (494 +- 5%%)", tcz * 1e9);
  } catch (const SimulationError& err) {
    o.require(false, "no CZ below 750 ns");
  }

  const CphasePair pair = make_cphase_pair(L, 494e-9);
  const PulseSchedule i1 = idle_like(L.qubit1, pair.qubit1), i2 = idle_like(L.qubit2, pair.qubit2);
  const double idle = std::max({std::abs(cphase_angle(L, pair.qubit1, i2).phi),
                                std::abs(cphase_angle(L, i1, pair.qubit2).phi),
                                std::abs(simulate_two_qubit(L, pair.qubit1, i2).report.phi)});
  o.require(idle <= 1e-6, "idle partner |phi| %.1e rad", idle);

  double reach = 0.0;
  for (const PhiCurvePoint& pt : phi_curve(L, {100e-9, 200e-9, 300e-9, 400e-9, 500e-9, 600e-9, 700e-9, 750e-9}))
    reach = std::max(reach, std::abs(pt.phi));
  o.require(reach >= kPi, "max |phi| under 750 ns %.3f rad (>= pi)", reach);

  const double q = cphase_angle(L, pair.qubit1, pair.qubit2).phi;
  const double sim = simulate_two_qubit(L, pair.qubit1, pair.qubit2).report.phi;
  o.detail += "; info: phi(494 ns) quadrature " + std::to_string(q) + ", 64-dim " + std::to_string(sim);
  return o;
}

double angle_change(const SystemParams& p, const EvolutionResult& a, const EvolutionResult& b) {
  const ExtractedGate ga = extract_qubit_gate(a, p, 1.0), gb = extract_qubit_gate(b, p, 1.0);
  const EulerAngles ea = euler_decompose(ga.gate.matrix), eb = euler_decompose(gb.gate.matrix);
  double d = std::abs(ea.theta_x - eb.theta_x);
  if (std::min(ea.theta_x, eb.theta_x) > 1e-3 && std::max(ea.theta_x, eb.theta_x) < kPi - 1e-3) {
    d = std::max({d, std::abs(wrap_pi(ea.theta_z1 - eb.theta_z1)), std::abs(wrap_pi(ea.theta_z2 - eb.theta_z2))});
  } else {
    d = std::max(d, std::abs(wrap_pi(rz_angle_of(ga.block) - rz_angle_of(gb.block))));
  }
  return d;
}

// 9. Property suites.
Outcome properties() {
  SystemParams p;
  Outcome o;
  const EvolveOptions e = frame(EvolutionFrame::Effective);
  double unitarity = 0.0, hermiticity = 0.0, semigroup = 0.0, convergence = 0.0;
  std::mt19937_64 rng(9);
  for (const PulseSchedule& s : factory_schedules(p)) {
    // even step count so the midpoint is a grid point
    const long n = 2 * static_cast<long>(std::ceil(s.total_time / kDefaultEffectiveStep / 2));
    EvolveOptions ev = frame(EvolutionFrame::Effective);
    ev.dt = s.total_time / n;
    const EvolutionResult full = evolve(p, s, 0.0, ev);
    unitarity = std::max(unitarity, full.max_unitarity_defect);
    EvolveOptions a = ev, b = ev;
    a.t_end = b.t_begin = s.total_time / 2;
    const MatX composed = evolve(p, s, 0.0, b).propagator.data * evolve(p, s, 0.0, a).propagator.data;
    semigroup = std::max(semigroup, operator_norm(full.propagator.data - composed));
    EvolveOptions fine = ev;
    fine.dt = ev.dt / 2;
    convergence = std::max(convergence, angle_change(p, full, evolve(p, s, 0.0, fine)));
    std::uniform_real_distribution<double> u(0.0, s.total_time);
    const DriveFrequencies w{s.omega_E, s.omega_B};
    for (int k = 0; k < 20; ++k) {
      const double t = u(rng);
      const Mat8 h = effective_hamiltonian(p, {s.dE(t), s.Ea(t), s.Ba(t)}, w, 0.0, s.dE.derivative(t));
      hermiticity = std::max(hermiticity, hermiticity_defect(h));
    }
  }
  o.require(unitarity < 1e-8, "unitarity %.1e", unitarity);
  o.require(hermiticity < 1e-12, "Hermiticity %.1e", hermiticity);
  o.require(semigroup < 1e-9, "semigroup %.1e", semigroup);
  o.require(convergence < 1e-4, "dt/2 angle change %.1e rad", convergence);

  std::uniform_real_distribution<double> ang(0, kTwoPi), half(0, kPi), ph(-kPi, kPi);
  double euler = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const Mat2 g = std::exp(cd(0, ph(rng))) * rz(ang(rng)) * rx(half(rng)) * rz(ang(rng));
    euler = std::max(euler, phase_distance(euler_decompose(g).compose(), g));
  }
  o.require(euler < 1e-8, "Euler round trip %.1e", euler);

  const GateSequence seq{GateStep::pulse(make_rz_schedule(p, 13.56e-9))};
  const NoiseModel m{100.0, 24, 77};
  const MonteCarloResult r1 = run_noise_monte_carlo(p, seq, rz(kPi), m, e);
  const MonteCarloResult r2 = run_noise_monte_carlo(p, seq, rz(kPi), m, e);
  o.require(r1.infidelity == r2.infidelity, "Monte Carlo repeatable");

  const PulseSchedule s = make_rx_sweep_schedule(p, 1.0);
  const DriveFrequencies w{s.omega_E, s.omega_B};
  const auto K = rotating_frame_generator(w);
  std::uniform_real_distribution<double> u(0.0, s.total_time);
  double recon = 0.0;
  for (int k = 0; k < 100; ++k) {
    const double t = u(rng);
    const auto comps = frequency_components(p, {s.dE(t), s.Ea(t), s.Ba(t)}, w, 0.0, s.dE.derivative(t));
    const Mat8 R = rotating_frame_unitary(w, t);
    Mat8 direct = R * lab_hamiltonian(p, s, t, 0.0, Basis::Orbital, true).data * R.adjoint();
    direct.diagonal() += K.cast<cd>();
    recon = std::max(recon, (reconstruct_rotating_hamiltonian(comps, w, t) - direct).cwiseAbs().maxCoeff() /
                                direct.cwiseAbs().maxCoeff());
  }
  o.require(recon < 1e-9, "reconstruction %.1e", recon);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  // Optional arguments select criteria by number.
  std::vector<int> only;
  for (int i = 1; i < argc; ++i) only.push_back(std::atoi(argv[i]));
  int warnings = 0;
  set_warning_sink([&](std::string_view) { ++warnings; });
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"1 splitting", splitting},         {"2 sensitivity", sensitivity},
      {"3 rz-curve", rz_curve},           {"4 rz-noise", rz_noise},
      {"5 effective-validity", effective_validity}, {"6 sweep-leakage", sweep_leakage},
      {"7 rx-ordering", rx_ordering},     {"8 cphase", cphase},
      {"9 properties", properties}};
  int failed = 0, ran = 0;
  for (std::size_t c = 0; c < criteria.size(); ++c) {
    const auto& [name, run] = criteria[c];
    if (!only.empty() && std::find(only.begin(), only.end(), static_cast<int>(c + 1)) == only.end()) continue;
    ++ran;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = run();
    } catch (const std::exception& err) {
      out.pass = false;
      out.detail = std::string("exception: ") + err.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %-22s %s (%.0f s)\n", out.pass ? "PASS" : "FAIL", name, out.detail.c_str(), secs);
    std::fflush(stdout);
    failed += out.pass ? 0 : 1;
  }
  std::printf("%d of %d criteria passed; %d warnings suppressed\n", ran - failed, ran, warnings);
  return failed == 0 ? 0 : 1;
}
