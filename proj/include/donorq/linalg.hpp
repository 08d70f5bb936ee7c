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

#include <cmath>
#include <complex>

#include <Eigen/Dense>

namespace donorq {

using cd = std::complex<double>;
inline constexpr cd kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

using Mat2 = Eigen::Matrix<cd, 2, 2>;
using Mat8 = Eigen::Matrix<cd, 8, 8>;
using Vec8 = Eigen::Matrix<cd, 8, 1>;
using Mat8x2 = Eigen::Matrix<cd, 8, 2>;
using MatX = Eigen::MatrixXcd;
using VecX = Eigen::VectorXcd;

/// Kronecker product of two dense complex matrices.
template <typename A, typename B>
MatX kron(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  MatX out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

/// Max-entry deviation from Hermiticity, relative to the largest entry.
template <typename M>
double hermiticity_defect(const Eigen::MatrixBase<M>& h) {
  const double scale = std::max(h.cwiseAbs().maxCoeff(), 1e-300);
  return (h - h.adjoint()).cwiseAbs().maxCoeff() / scale;
}

/// Operator 2-norm of U^dagger U - 1.
template <typename M>
double unitarity_defect(const Eigen::MatrixBase<M>& u) {
  using Plain = typename M::PlainObject;
  const Plain d = u.adjoint() * u - Plain::Identity(u.rows(), u.cols());
  Eigen::JacobiSVD<Plain> svd(d);
  return svd.singularValues()(0);
}

template <typename M>
double operator_norm(const Eigen::MatrixBase<M>& m) {
  Eigen::JacobiSVD<typename M::PlainObject> svd(m);
  return svd.singularValues()(0);
}

/// exp(-i H dt) for Hermitian H by scaling-and-squaring with a Taylor series.
///
/// The series is truncated once the next term falls below machine precision
/// relative to the identity; the argument is scaled so its 1-norm is <= 0.5.
template <typename M>
typename M::PlainObject propagator_step(const Eigen::MatrixBase<M>& h, double dt) {
  using Plain = typename M::PlainObject;
  Plain a = (-kI * dt) * h;
  const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
  int squarings = 0;
  if (norm1 > 0.5) {
    squarings = static_cast<int>(std::ceil(std::log2(norm1 / 0.5)));
    a /= std::ldexp(1.0, squarings);
  }
  const double scaled = norm1 / std::ldexp(1.0, squarings);
  Plain result = Plain::Identity(h.rows(), h.cols());
  Plain term = Plain::Identity(h.rows(), h.cols());
  double bound = 1.0;
  for (int k = 1; k <= 30; ++k) {
    term = (term * a) / static_cast<double>(k);
    result += term;
    bound *= scaled / static_cast<double>(k);
    if (bound < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = (result * result).eval();
  return result;
}

/// exp(-i H t) through the Hermitian eigendecomposition; exactly unitary up to rounding.
inline MatX propagator_eigen(const MatX& h, double dt) {
  Eigen::SelfAdjointEigenSolver<MatX> es(h);
  const VecX phases = (-kI * dt * es.eigenvalues().cast<cd>()).array().exp().matrix();
  return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

/// Wrap an angle into [0, 2pi).
inline double wrap_2pi(double a) {
  double r = std::fmod(a, kTwoPi);
  if (r < 0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

/// Wrap an angle into (-pi, pi].
inline double wrap_pi(double a) {
  double r = wrap_2pi(a);
  if (r > kPi) r -= kTwoPi;
  return r;
}

}  // namespace donorq
