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
#include <doctest.h>

#include <random>

#include "donorq/diagnostics.hpp"
#include "donorq/effective.hpp"
#include "donorq/operators.hpp"
#include "donorq/propagation.hpp"

using namespace donorq;

namespace {

const FrequencyComponent& component(const std::vector<FrequencyComponent>& cs, FrequencyLabel label) {
  for (const auto& c : cs)
    if (c.label == label) return c;
  throw std::runtime_error("missing component " + label.name());
}

double h_scale(const std::vector<FrequencyComponent>& cs) {
  double m = 0;
  for (const auto& c : cs) m = std::max(m, c.matrix.cwiseAbs().maxCoeff());
  return m;
}

struct SweepPoint {
  SystemParams p;
  PulseSchedule s = make_rx_sweep_schedule(p, 1.0);
  DriveFrequencies w{s.omega_E, s.omega_B};
};

}  // namespace

TEST_CASE("frequency components reconstruct the rotating-frame Hamiltonian") {
  SweepPoint sp;
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, sp.s.total_time);
  const auto K = rotating_frame_generator(sp.w);
  for (int k = 0; k < 100; ++k) {
    const double t = u(rng);
    const EnvelopeSample es{sp.s.dE(t), sp.s.Ea(t), sp.s.Ba(t)};
    const double rate = sp.s.dE.derivative(t);
    const auto comps = frequency_components(sp.p, es, sp.w, 0.0, rate);
    const Mat8 rebuilt = reconstruct_rotating_hamiltonian(comps, sp.w, t);
    // Direct construction: R H_lab R^dagger - i R dR^dagger/dt, with R diagonal.
    const Mat8 R = rotating_frame_unitary(sp.w, t);
    Mat8 direct = R * lab_hamiltonian(sp.p, sp.s, t, 0.0, Basis::Orbital, true).data * R.adjoint();
    direct.diagonal() += K.cast<cd>();
    const double scale = direct.cwiseAbs().maxCoeff();
    CHECK((rebuilt - direct).cwiseAbs().maxCoeff() < 1e-9 * scale);
    CHECK(hermiticity_defect(rebuilt) < 1e-12);
  }
}

TEST_CASE("component symmetry and the static component") {
  SweepPoint sp;
  const EnvelopeSample es{300.0, 200.0, 0.02};
  const auto comps = frequency_components(sp.p, es, sp.w);
  for (const auto& c : comps) {
    const FrequencyLabel neg{-c.label.nE, -c.label.nB};
    CHECK((component(comps, neg).matrix - c.matrix.adjoint()).cwiseAbs().maxCoeff() <
          1e-12 * h_scale(comps));
  }
  const Mat8 h0 = component(comps, {0, 0}).matrix;
  CHECK(hermiticity_defect(h0) < 1e-14);
  CHECK((h0 - rwa_hamiltonian(sp.p, es, sp.w)).cwiseAbs().maxCoeff() < 1e-6 * h0.cwiseAbs().maxCoeff());

  // The 2 wB spin drive is (Ba gamma_e / 4) S_-, under the label that rotates as e^{-2 i wB t}
  // in the e^{+i w t} expansion used here.
  const Operators& op = Operators::get();
  const Mat8 expected = (es.Ba * sp.p.gamma_e / 4.0) * op.s_minus;
  const Mat8 got = component(comps, {0, -2}).matrix;
  const Mat8 got_conj = component(comps, {0, 2}).matrix;
  const double err = std::min((got - expected).cwiseAbs().maxCoeff(), (got_conj - expected).cwiseAbs().maxCoeff());
  CHECK(err < 1e-6 * expected.cwiseAbs().maxCoeff() * (1 + std::abs(sp.p.delta_gamma) * 10));
}

TEST_CASE("drive-dependent components vanish without drives") {
  SweepPoint sp;
  const auto comps = frequency_components(sp.p, {500.0, 0.0, 0.0}, sp.w);
  CHECK(component(comps, {0, 2}).matrix.cwiseAbs().maxCoeff() == 0.0);
  CHECK(component(comps, {-1, 2}).matrix.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("RWA Hamiltonian structure") {
  SweepPoint sp;
  const EnvelopeSample es{1500.0, 0.0, 0.0};
  const Mat8 h = rwa_hamiltonian(sp.p, es, sp.w);
  const int a = basis::index(0, 1, 0), b = basis::index(1, 0, 1);  // |g up Down>, |e down Up>
  const double eps = charge_splitting(sp.p, es.dE);
  CHECK(std::abs(h(a, b)) == doctest::Approx(sp.p.hyperfine_A * sp.p.Vt / (4 * eps)).epsilon(1e-9));
  Mat8 off = h;
  off.diagonal().setZero();
  off(a, b) = off(b, a) = 0;
  CHECK(off.cwiseAbs().maxCoeff() < 1e-9 * std::abs(h(a, b)));

  // Ea drive amplitude on tau_x
  const Mat8 hd = rwa_hamiltonian(sp.p, {1500.0, 100.0, 0.0}, sp.w) - h;
  const double amp = 100.0 * sp.p.field_coupling() * sp.p.Vt / (4 * eps);
  CHECK(std::abs(hd(basis::index(0, 0, 0), basis::index(1, 0, 0))) == doctest::Approx(amp).epsilon(1e-9));
}

TEST_CASE("RWA qubit splitting reproduces the approximate formula") {
  SweepPoint sp;
  for (double dE = -2e4; dE <= 2e4; dE += 1000) {
    const Mat8 h = rwa_hamiltonian(sp.p, {dE, 0.0, 0.0}, sp.w);
    Eigen::SelfAdjointEigenSolver<Mat8> es(h);
    double ou = 0, od = 0;
    const int iu = max_overlap_column(es.eigenvectors(), VecX::Unit(8, basis::kQubitUp), &ou);
    const int id = max_overlap_column(es.eigenvectors(), VecX::Unit(8, basis::kQubitDown), &od);
    // Rotating-frame energies include the frame charge of the nuclear flip.
    const auto K = rotating_frame_generator(sp.w);
    const double split = (es.eigenvalues()(id) - K(basis::kQubitDown)) - (es.eigenvalues()(iu) - K(basis::kQubitUp));
    CHECK(std::abs(split - qubit_splitting_approx(sp.p, dE)) < kTwoPi * 0.2e6);
  }
}

TEST_CASE("Floquet matrix layout") {
  SweepPoint sp;
  const auto comps = frequency_components(sp.p, {0.0, 255.2, 33.26e-3}, sp.w);
  const FloquetBlock fb = floquet_hamiltonian(comps, sp.w);
  CHECK(fb.floquet_matrix.rows() == 72);
  CHECK(hermiticity_defect(fb.floquet_matrix) < 1e-12);
  const auto& shifts = floquet_shifts();
  const int c = fb.target_block;
  CHECK(shifts[c] == FrequencyLabel{0, 0});
  for (int n = 0; n < 9; ++n) {
    const FrequencyLabel diff = shifts[c] - shifts[n];
    const MatX block = fb.floquet_matrix.block(8 * c, 8 * n, 8, 8);
    bool found = false;
    for (const auto& comp : comps)
      if (comp.label == diff) {
        found = true;
        if (n != c) CHECK((block - comp.matrix).cwiseAbs().maxCoeff() < 1e-3);
      }
    if (!found) CHECK(block.cwiseAbs().maxCoeff() == 0.0);
  }
  // diagonal blocks carry the shifts
  for (int n = 0; n < 9; ++n) {
    const MatX d = fb.floquet_matrix.block(8 * n, 8 * n, 8, 8) - fb.floquet_matrix.block(8 * c, 8 * c, 8, 8);
    CHECK((d - MatX::Identity(8, 8) * shifts[n].value(sp.w)).cwiseAbs().maxCoeff() < 1e-3);
  }
}

TEST_CASE("Schrieffer-Wolff reduction") {
  SweepPoint sp;
  // zero drives: corrections are drive independent and small
  const EnvelopeSample idle{800.0, 0.0, 0.0};
  const Mat8 h0 = rwa_hamiltonian(sp.p, idle, sp.w);
  const Mat8 hp = effective_hamiltonian(sp.p, idle, sp.w);
  CHECK(hermiticity_defect(hp) < 1e-12);
  CHECK((hp - h0).cwiseAbs().maxCoeff() < kTwoPi * 5e6);
  // zeroth + first order is the static component
  auto comps = frequency_components(sp.p, {800.0, 200.0, 0.02}, sp.w);
  FloquetBlock fb = floquet_hamiltonian(comps, sp.w);
  const Mat8 full = schrieffer_wolff(fb);
  CHECK(hermiticity_defect(full) < 1e-12);
  // second order only: strip exterior couplings and the result must equal H0
  for (int n = 0; n < 9; ++n)
    if (n != fb.target_block) {
      fb.floquet_matrix.block(8 * fb.target_block, 8 * n, 8, 8).setZero();
      fb.floquet_matrix.block(8 * n, 8 * fb.target_block, 8, 8).setZero();
    }
  const Mat8 first = schrieffer_wolff(fb);
  CHECK((first - component(comps, {0, 0}).matrix).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("Schrieffer-Wolff guard rejects a near-degenerate exterior state") {
  SweepPoint sp;
  const auto comps = frequency_components(sp.p, {0.0, 100.0, 0.01}, sp.w);
  FloquetBlock fb = floquet_hamiltonian(comps, sp.w);
  FloquetBlock uncoupled = fb;
  const int m = 8 * fb.target_block, l = 0;
  // Move exterior state l to within 2 pi 1 MHz of target state m.
  fb.floquet_matrix(l, l) = fb.floquet_matrix(m, m) + kTwoPi * 1e6;
  uncoupled.floquet_matrix(l, l) = fb.floquet_matrix(l, l);
  fb.floquet_matrix(m, l) = fb.floquet_matrix(l, m) = kTwoPi * 5e6;
  CHECK_THROWS_AS(schrieffer_wolff(fb), SimulationError);
  // A near-degenerate but uncoupled pair is harmless.
  for (int j = 0; j < 8; ++j) {
    uncoupled.floquet_matrix(m + j, l) = uncoupled.floquet_matrix(l, m + j) = 0.0;
  }
  CHECK_NOTHROW(schrieffer_wolff(uncoupled));
}

TEST_CASE("H' is Hermitian and smooth along the sweep") {
  SweepPoint sp;
  // Two-photon resonance eps0 = 2 wE, computed independently.
  const double k = sp.p.field_coupling();
  const double resonance = std::sqrt(4 * sp.w.omega_E * sp.w.omega_E - sp.p.Vt * sp.p.Vt) / k;
  CHECK(resonance == doctest::Approx(2527.0).epsilon(0.01));

  // Eigenvalue curvature (second difference on a 1 V/m grid) stays small up to
  // the resonance; the first difference is just the slope of order k.
  Eigen::Matrix<double, 8, 1> e1, e2;
  int have = 0, checked = 0;
  double worst = 0.0;
  for (double dE = -2520; dE <= 2520; dE += 1.0) {
    const Mat8 h = effective_hamiltonian(sp.p, {dE, 255.2, 33.26e-3}, sp.w);
    REQUIRE(hermiticity_defect(h) < 1e-12);
    Eigen::SelfAdjointEigenSolver<Mat8> es(h);
    const Eigen::Matrix<double, 8, 1> e = es.eigenvalues();
    if (have >= 2) worst = std::max(worst, (e - 2 * e1 + e2).cwiseAbs().maxCoeff());
    e2 = e1;
    e1 = e;
    ++have;
    ++checked;
  }
  CHECK(checked == 5041);
  CHECK(worst < kTwoPi * 0.1e6);
}

TEST_CASE("matrix dump has labels") {
  SweepPoint sp;
  const std::string text = format_matrix(effective_hamiltonian(sp.p, {0.0, 0.0, 0.0}, sp.w));
  CHECK(text.find("|gdD>") != std::string::npos);
  CHECK(text.find("|euU>") != std::string::npos);
}
