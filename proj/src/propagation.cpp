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


#include "donorq/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "donorq/diagnostics.hpp"
#include "donorq/operators.hpp"

namespace donorq {

const char* to_string(EvolutionFrame frame) {
  switch (frame) {
    case EvolutionFrame::LabPosition: return "lab-position";
    case EvolutionFrame::LabOrbital: return "lab-orbital";
    case EvolutionFrame::Effective: return "effective";
  }
  return "?";
}

EvolutionFrame parse_evolution_frame(const std::string& text) {
  if (text == "lab-position" || text == "lab") return EvolutionFrame::LabPosition;
  if (text == "lab-orbital") return EvolutionFrame::LabOrbital;
  if (text == "effective") return EvolutionFrame::Effective;
  throw std::invalid_argument("unknown frame '" + text + "'");
}

namespace {

// Field-independent part of the position-basis Hamiltonian and the operators
// multiplying the time-dependent controls.
struct PositionPieces {
  Mat8 constant;
  Mat8 field;     // multiplies dE + noise + Ea cos(wE t)
  Mat8 magnetic;  // multiplies Ba cos(wB t)
};

PositionPieces position_pieces(const SystemParams& p) {
  PositionPieces pieces;
  pieces.constant = position_hamiltonian(p, 0.0, 0.0, 0.0);
  pieces.field = position_hamiltonian(p, 1.0, 0.0, 0.0) - pieces.constant;
  pieces.magnetic = position_hamiltonian(p, 0.0, 0.0, 1.0) - pieces.constant;
  return pieces;
}

Mat8 position_at(const PositionPieces& pc, const PulseSchedule& s, double t, double noise) {
  const double field = s.dE(t) + noise + s.Ea(t) * std::cos(s.omega_E * t);
  Mat8 h = pc.constant + field * pc.field;
  const double ba = s.Ba(t);
  if (ba != 0.0) h += (ba * std::cos(s.omega_B * t)) * pc.magnetic;
  return h;
}

Mat8 orbital_at(const SystemParams& p, const PositionPieces& pc, const PulseSchedule& s, double t,
                double noise, bool correction) {
  const double field = s.dE(t) + noise;
  const Mat8 lam = orbital_rotation8(p, field);
  Mat8 h = lam * position_at(pc, s, t, noise) * lam.adjoint();
  if (correction) h += moving_basis_term(p, field, s.dE.derivative(t));
  return h;
}

Mat8 effective_at(const SystemParams& p, const PulseSchedule& s, double t, double noise,
                  bool correction) {
  const EnvelopeSample sample{s.dE(t), s.Ea(t), s.Ba(t)};
  return effective_hamiltonian(p, sample, {s.omega_E, s.omega_B}, noise,
                               correction ? s.dE.derivative(t) : 0.0);
}

Mat8 integrate(const SystemParams& p, const PulseSchedule& s, double noise,
               const EvolveOptions& o, double dt, double t0, double t1, long* steps,
               std::vector<TraceSample>* trace, const Mat8x2* qubit) {
  const long n = std::max<long>(1, static_cast<long>(std::ceil((t1 - t0) / dt - 1e-9)));
  const double h = (t1 - t0) / n;
  const PositionPieces pc = position_pieces(p);
  Mat8 u = Mat8::Identity();
  long next_trace = 0;
  auto record = [&](long k) {
    if (!trace || o.trace_points <= 0) return;
    const long target = o.trace_points > 1 ? next_trace * n / (o.trace_points - 1) : 0;
    if (k < target) return;
    ++next_trace;
    TraceSample sample;
    sample.t = t0 + k * h;
    const Vec8 psi = u * qubit->col(0);
    for (int i = 0; i < 8; ++i) sample.populations[i] = std::norm(psi(i));
    sample.leakage = leakage(u, MatX(*qubit));
    trace->push_back(sample);
  };
  record(0);
  for (long k = 0; k < n; ++k) {
    const double tm = t0 + (k + 0.5) * h;
    Mat8 hm;
    switch (o.frame) {
      case EvolutionFrame::LabPosition: hm = position_at(pc, s, tm, noise); break;
      case EvolutionFrame::LabOrbital: hm = orbital_at(p, pc, s, tm, noise, o.include_correction); break;
      case EvolutionFrame::Effective: hm = effective_at(p, s, tm, noise, o.include_correction); break;
    }
    u = propagator_step(hm, h) * u;
    record(k + 1);
  }
  if (steps) *steps = n;
  return u;
}

}  // namespace

OperatorMatrix lab_hamiltonian(const SystemParams& p, const PulseSchedule& s, double t,
                               double noise_dE, Basis basis, bool include_correction) {
  const PositionPieces pc = position_pieces(p);
  if (basis == Basis::Position) return {position_at(pc, s, t, noise_dE), Basis::Position, Frame::Lab};
  return {orbital_at(p, pc, s, t, noise_dE, include_correction), Basis::Orbital, Frame::Lab};
}

OperatorMatrix orbital_transform(const SystemParams& p, double dE) {
  return {orbital_rotation8(p, dE), Basis::Orbital, Frame::Lab};
}

OperatorMatrix basis_change_correction(const SystemParams& p, double dE, double dE_rate) {
  return {moving_basis_term(p, dE, dE_rate), Basis::Orbital, Frame::Lab};
}

Mat8 rotating_frame_unitary(const DriveFrequencies& w, double t) {
  const Eigen::Matrix<double, 8, 1> k = rotating_frame_generator(w);
  Mat8 u = Mat8::Zero();
  for (int i = 0; i < 8; ++i) u(i, i) = std::exp(-kI * (k(i) * t));
  return u;
}

QubitFrame idle_qubit_frame(const SystemParams& p, const DriveFrequencies& w,
                            EvolutionFrame frame) {
  Mat8 h;
  Mat8 reference = Mat8::Identity();
  switch (frame) {
    case EvolutionFrame::LabPosition:
      h = position_hamiltonian(p, p.dE_idle, 0.0, 0.0);
      reference = orbital_rotation8(p, p.dE_idle).adjoint();
      break;
    case EvolutionFrame::LabOrbital: {
      const Mat8 lam = orbital_rotation8(p, p.dE_idle);
      h = lam * position_hamiltonian(p, p.dE_idle, 0.0, 0.0) * lam.adjoint();
      break;
    }
    case EvolutionFrame::Effective:
      h = effective_hamiltonian(p, {p.dE_idle, 0.0, 0.0}, w);
      break;
  }
  Eigen::SelfAdjointEigenSolver<Mat8> es(h);
  const MatX vecs = es.eigenvectors();
  QubitFrame out;
  out.frame = frame;
  const int targets[2] = {basis::kQubitUp, basis::kQubitDown};
  for (int q = 0; q < 2; ++q) {
    double overlap = 0.0;
    const int k = max_overlap_column(vecs, reference.col(targets[q]), &overlap);
    if (overlap < 0.5)
      throw SimulationError("idle qubit state not identifiable (overlap " + std::to_string(overlap) + ")");
    Vec8 v = es.eigenvectors().col(k);
    // Fix the phase so the reference amplitude is real and positive.
    const cd amp = reference.col(targets[q]).dot(v);
    v *= std::conj(amp) / std::abs(amp);
    out.vectors.col(q) = v;
    out.energies(q) = es.eigenvalues()(k);
  }
  return out;
}

EvolutionResult evolve(const SystemParams& p, const PulseSchedule& s, double noise_dE,
                       const EvolveOptions& o) {
  const double t0 = o.t_begin;
  const double t1 = o.t_end < 0.0 ? s.total_time : o.t_end;
  if (!(t1 >= t0) || t0 < 0.0 || t1 > s.total_time * (1.0 + 1e-12))
    throw std::invalid_argument("evolve: time window outside the schedule");
  const double dt = o.dt > 0.0 ? o.dt
                               : (o.frame == EvolutionFrame::Effective ? kDefaultEffectiveStep
                                                                       : kDefaultLabStep);
  EvolutionResult r;
  r.frame = o.frame;
  r.dt = dt;
  r.t_begin = t0;
  r.t_end = t1;
  r.drive = {s.omega_E, s.omega_B};
  r.propagator.basis = o.frame == EvolutionFrame::LabPosition ? Basis::Position : Basis::Orbital;
  r.propagator.frame = o.frame == EvolutionFrame::Effective ? Frame::Effective : Frame::Lab;

  two_photon_resonance_crossed(p, s);

  std::optional<QubitFrame> qf;
  if (o.trace_points > 0) qf = idle_qubit_frame(p, {s.omega_E, s.omega_B}, o.frame);
  const Mat8x2* qubit = qf ? &qf->vectors : nullptr;

  const Mat8 u = integrate(p, s, noise_dE, o, dt, t0, t1, &r.step_count,
                           o.trace_points > 0 ? &r.leakage_trace : nullptr, qubit);
  r.propagator.data = u;
  r.max_unitarity_defect = unitarity_defect(u);
  r.valid = r.max_unitarity_defect < 1e-8;
  if (!r.valid) warn("propagator unitarity defect " + std::to_string(r.max_unitarity_defect));

  if (o.check_convergence) {
    EvolveOptions half = o;
    half.trace_points = 0;
    const Mat8 u_half = integrate(p, s, noise_dE, half, 0.5 * dt, t0, t1, nullptr, nullptr, nullptr);
    // Compared modulo a global phase, which is unobservable.
    const cd overlap = (u_half.adjoint() * u).trace();
    const cd phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : cd(1.0);
    r.convergence_change = operator_norm(u - phase * u_half);
    r.converged = *r.convergence_change <= 1e-6;
    if (!r.converged)
      warn("evolution not converged: halving dt changed the propagator by " +
           std::to_string(*r.convergence_change));
  }
  return r;
}

double leakage(const MatX& U, const MatX& subspace) {
  const MatX block = subspace.adjoint() * U * subspace;
  return std::clamp(1.0 - block.squaredNorm() / static_cast<double>(subspace.cols()), 0.0, 1.0);
}

double leakage(const MatX& U, const std::vector<int>& indices) {
  MatX v = MatX::Zero(U.rows(), static_cast<Eigen::Index>(indices.size()));
  for (std::size_t k = 0; k < indices.size(); ++k) v(indices[k], static_cast<Eigen::Index>(k)) = 1.0;
  return leakage(U, v);
}

void write_trace(std::ostream& os, const EvolutionResult& r) {
  os << "# t_s";
  for (int i = 0; i < 8; ++i) os << ' ' << "pop" << i;
  os << " leakage\n";
  char buf[32];
  for (const TraceSample& s : r.leakage_trace) {
    std::snprintf(buf, sizeof buf, "%.9e", s.t);
    os << buf;
    for (double v : s.populations) {
      std::snprintf(buf, sizeof buf, " %.9e", v);
      os << buf;
    }
    std::snprintf(buf, sizeof buf, " %.9e\n", s.leakage);
    os << buf;
  }
}

}  // namespace donorq
