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

#include "donorq/core_model.hpp"

#include <sstream>
#include <stdexcept>

#include "donorq/diagnostics.hpp"
#include "donorq/operators.hpp"

namespace donorq {

std::vector<std::string> validate(const SystemParams& p) {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument(std::string(name) + " must be strictly positive");
  };
  require_positive(p.hyperfine_A, "hyperfine_A");
  require_positive(p.gamma_e, "gamma_e");
  require_positive(p.gamma_n, "gamma_n");
  require_positive(p.donor_depth_d, "donor_depth_d");
  require_positive(p.B0, "B0");
  require_positive(p.Vt, "Vt");
  if (!std::isfinite(p.delta_gamma) || std::abs(p.delta_gamma) >= 1.0)
    throw std::invalid_argument("delta_gamma must be a small finite fraction");
  if (!std::isfinite(p.dE_idle)) throw std::invalid_argument("dE_idle must be finite");

  std::vector<std::string> warnings;
  const double ratio = p.B0 * (p.gamma_e + p.gamma_n) / p.hyperfine_A;
  if (ratio < 10.0) {
    std::ostringstream os;
    os << "B0 (gamma_e + gamma_n) / A = " << ratio << " < 10; the strong-field picture is marginal";
    warnings.push_back(os.str());
    warn(warnings.back());
  }
  return warnings;
}

namespace basis {
std::string label(int idx, bool position_basis) {
  const int orbital = idx / 4, electron = (idx / 2) % 2, nuclear = idx % 2;
  std::string s = "|";
  s += position_basis ? (orbital == 0 ? "i" : "d") : (orbital == 0 ? "g" : "e");
  s += electron == kSpinUp ? "u" : "d";
  s += nuclear == kSpinUp ? "U" : "D";
  s += ">";
  return s;
}
}  // namespace basis

double charge_splitting(const SystemParams& p, double dE) {
  return std::hypot(p.Vt, p.field_coupling() * dE);
}

double hyperfine_expectation(const SystemParams& p, double dE) {
  const double a = p.field_coupling() * dE / charge_splitting(p, dE);
  return 0.5 * p.hyperfine_A * (1.0 - a);
}

double qubit_splitting_approx(const SystemParams& p, double dE) {
  return p.nuclear_zeeman() + 0.5 * hyperfine_expectation(p, dE);
}

double dephasing_sensitivity(const SystemParams& p, double dE) {
  const double eps = charge_splitting(p, dE);
  return -p.hyperfine_A * p.field_coupling() * p.Vt * p.Vt / (4.0 * eps * eps * eps);
}

double dephasing_sensitivity_large_field(const SystemParams& p, double dE) {
  const double k = p.field_coupling();
  return -p.hyperfine_A * p.Vt * p.Vt / (4.0 * k * k * dE * dE * dE);
}

TransitionEnergies transition_energies(const SystemParams& p, double dE) {
  const double eps = charge_splitting(p, dE);
  const double avg = hyperfine_expectation(p, dE);
  const double quarter = 0.25 * p.hyperfine_A;
  return {p.electron_zeeman() - 0.5 * avg, eps - quarter + 0.5 * avg,
          eps - p.B0 * (p.gamma_e + p.gamma_n) - quarter + 0.5 * avg};
}

double qubit_splitting_exact(const SystemParams& p, double dE) {
  const Mat8 h = position_hamiltonian(p, dE, 0.0, 0.0);
  Eigen::SelfAdjointEigenSolver<Mat8> es(h);
  // Qubit states expressed in the position basis: Lambda^dagger |g down U/D>.
  const Mat8 to_position = orbital_rotation8(p, dE).adjoint();
  const MatX vecs = es.eigenvectors();
  const int up = max_overlap_column(vecs, to_position.col(basis::kQubitUp));
  const int down = max_overlap_column(vecs, to_position.col(basis::kQubitDown));
  return es.eigenvalues()(down) - es.eigenvalues()(up);
}

}  // namespace donorq
