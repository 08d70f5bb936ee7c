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

#include "donorq/operators.hpp"

namespace donorq {

namespace {

Mat8 embed(const Mat2& orbital, const Mat2& electron, const Mat2& nuclear) {
  return Mat8(kron(kron(orbital, electron), nuclear));
}

Operators build_operators() {
  const Mat2 id = Mat2::Identity();
  Mat2 px, py, pz, lower_to_upper;
  px << 0, 1, 1, 0;
  py << 0, -kI, kI, 0;
  pz << 1, 0, 0, -1;
  lower_to_upper << 0, 1, 0, 0;  // |0><1|

  // Spins use index 0 = down, 1 = up, so S+ = |1><0|.
  Mat2 splus;
  splus << 0, 0, 1, 0;
  const Mat2 sminus = splus.adjoint();
  const Mat2 sx = 0.5 * px;
  const Mat2 sy = 0.5 * Mat2(-py);  // sy = (S+ - S-) / 2i in the down/up ordering
  const Mat2 sz = -0.5 * pz;

  Operators ops;
  ops.identity = Mat8::Identity();
  ops.tau_x = embed(px, id, id);
  ops.tau_y = embed(py, id, id);
  ops.tau_z = embed(pz, id, id);
  ops.tau_plus = embed(lower_to_upper, id, id);
  ops.sx = embed(id, sx, id);
  ops.sy = embed(id, sy, id);
  ops.sz = embed(id, sz, id);
  ops.s_plus = embed(id, splus, id);
  ops.s_minus = embed(id, sminus, id);
  ops.ix = embed(id, id, sx);
  ops.iy = embed(id, id, sy);
  ops.iz = embed(id, id, sz);
  ops.i_plus = embed(id, id, splus);
  ops.i_minus = embed(id, id, sminus);
  ops.s_dot_i = ops.sx * ops.ix + ops.sy * ops.iy + ops.sz * ops.iz;
  return ops;
}

}  // namespace

const Operators& Operators::get() {
  static const Operators ops = build_operators();
  return ops;
}

Mat8 position_hamiltonian(const SystemParams& p, double field, double ac_electric,
                          double ac_magnetic) {
  const Operators& op = Operators::get();
  // |d><d| = (1 - tau_z^{id}) / 2
  const Mat8 on_donor = 0.5 * (op.identity - op.tau_z);
  const double ez = p.electron_zeeman();
  Mat8 h = (-0.5 * p.field_coupling() * (field + ac_electric)) * op.tau_z;
  h += (0.5 * p.Vt) * op.tau_x;
  h += ez * op.sz + (ez * p.delta_gamma) * (on_donor * op.sz);
  h -= p.nuclear_zeeman() * op.iz;
  h += ac_magnetic * (p.gamma_e * op.sx - p.gamma_n * op.ix);
  h += p.hyperfine_A * (on_donor * op.s_dot_i);
  return h;
}

Mat2 orbital_rotation(const SystemParams& p, double field) {
  const double a = p.field_coupling() * field / charge_splitting(p, field);
  const double c = std::sqrt(std::max(0.0, 0.5 * (1.0 + a)));
  const double s = std::sqrt(std::max(0.0, 0.5 * (1.0 - a)));
  // c 1 - i s sigma_y = [[c, -s], [s, c]]
  Mat2 lam;
  lam << c, -s, s, c;
  return lam;
}

Mat8 orbital_rotation8(const SystemParams& p, double field) {
  return Mat8(kron(orbital_rotation(p, field), Eigen::Matrix4cd::Identity()));
}

Mat8 moving_basis_term(const SystemParams& p, double field, double rate) {
  const double eps = charge_splitting(p, field);
  const double coef = -p.field_coupling() * p.Vt / (2.0 * eps * eps);
  return (coef * rate) * Operators::get().tau_y;
}

InterfaceWeights interface_weights(const SystemParams& p, double field) {
  const double a = p.field_coupling() * field / charge_splitting(p, field);
  return {0.5 * (1.0 + a), 0.5 * (1.0 - a)};
}

int max_overlap_column(const MatX& vectors, const VecX& target, double* overlap) {
  int best = 0;
  double best_val = -1.0;
  for (Eigen::Index k = 0; k < vectors.cols(); ++k) {
    const double v = std::norm(vectors.col(k).dot(target));
    if (v > best_val) {
      best_val = v;
      best = static_cast<int>(k);
    }
  }
  if (overlap) *overlap = best_val;
  return best;
}

}  // namespace donorq
