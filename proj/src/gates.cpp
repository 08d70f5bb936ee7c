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


#include "donorq/gates.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

#include "donorq/diagnostics.hpp"
#include "donorq/parallel.hpp"

namespace donorq {

Mat2 rz(double theta) {
  Mat2 m = Mat2::Zero();
  m(0, 0) = std::exp(-0.5 * kI * theta);
  m(1, 1) = std::exp(0.5 * kI * theta);
  return m;
}

Mat2 rx(double theta) {
  const double c = std::cos(0.5 * theta), s = std::sin(0.5 * theta);
  Mat2 m;
  m << c, -kI * s, -kI * s, c;
  return m;
}

namespace {
Mat2 nearest_unitary(const Mat2& u) {
  Eigen::JacobiSVD<Mat2> svd(u, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}
}  // namespace

QubitGate QubitGate::from(const Mat2& u) {
  Mat2 m = nearest_unitary(u);
  m /= std::sqrt(m.determinant());
  const cd ref = std::abs(m(0, 0)) > 1e-9 ? m(0, 0) : m(0, 1);
  const double phase = std::arg(ref);
  if (phase <= -0.5 * kPi || phase > 0.5 * kPi) m = -m;
  return {m};
}

EulerAngles euler_decompose(const Mat2& u_in) {
  const Mat2 u = nearest_unitary(u_in);
  const double c = 0.5 * (std::abs(u(0, 0)) + std::abs(u(1, 1)));
  const double s = 0.5 * (std::abs(u(0, 1)) + std::abs(u(1, 0)));
  EulerAngles e;
  e.theta_x = 2.0 * std::atan2(s, c);
  constexpr double kLock = 1e-9;
  if (s < kLock) {
    e.theta_x = 0.0;
    e.theta_z1 = wrap_2pi(std::arg(u(1, 1) * std::conj(u(0, 0))));
    return e;
  }
  if (c < kLock) {
    e.theta_x = kPi;
    e.theta_z1 = wrap_2pi(std::arg(u(1, 0) * std::conj(u(0, 1))));
    return e;
  }
  const double sum = std::arg(u(1, 1) * std::conj(u(0, 0)));
  const double diff = std::arg(u(1, 0) * std::conj(u(0, 1)));
  // (z1, z2) is fixed up to a joint shift by pi; keep the one that recomposes.
  double best = -1.0;
  for (double shift : {0.0, kPi}) {
    EulerAngles trial{wrap_2pi(0.5 * (sum + diff) + shift), e.theta_x,
                      wrap_2pi(0.5 * (sum - diff) + shift)};
    const double overlap = std::abs((trial.compose().adjoint() * u).trace());
    if (overlap > best) {
      best = overlap;
      e = trial;
    }
  }
  return e;
}

double gate_infidelity(const MatX& U, const MatX& U0) {
  const double n = static_cast<double>(U.rows());
  const double purity = (U.adjoint() * U).trace().real();
  const double overlap = std::norm((U0.adjoint() * U).trace());
  return std::clamp(1.0 - (purity + overlap) / (n * (n + 1.0)), 0.0, 1.0);
}

Mat2 idle_frame_block(const EvolutionResult& r, const QubitFrame& f) {
  const double T = r.t_end - r.t_begin;
  const MatX& u = r.propagator.data;
  Mat2 b;
  for (int a = 0; a < 2; ++a)
    for (int c = 0; c < 2; ++c)
      b(a, c) = std::exp(kI * (f.energies(a) * T)) * f.vectors.col(a).dot(u * f.vectors.col(c));
  return b;
}

ExtractedGate extract_qubit_gate(const EvolutionResult& r, const SystemParams& p,
                                 double max_leakage) {
  const QubitFrame f = idle_qubit_frame(p, r.drive, r.frame);
  ExtractedGate g;
  g.block = idle_frame_block(r, f);
  g.leakage = std::clamp(1.0 - 0.5 * g.block.squaredNorm(), 0.0, 1.0);
  if (g.leakage > max_leakage) {
    throw SimulationError("qubit-subspace leakage " + std::to_string(g.leakage) +
                          " exceeds " + std::to_string(max_leakage));
  }
  g.gate = QubitGate::from(g.block);
  return g;
}

double rz_angle_of(const Mat2& b) { return std::arg(b(1, 1) * std::conj(b(0, 0))); }

RzPrediction predict_rz_angle(const SystemParams& p, double T) {
  const PulseSchedule s = make_rz_schedule(p, T);
  const double idle = qubit_splitting_approx(p, p.dE_idle);
  // Composite Simpson on a grid fine enough to resolve the 5 ns ramps.
  const int n = 20000;
  const double h = T / n;
  double acc = 0.0;
  for (int k = 0; k <= n; ++k) {
    const double w = (k == 0 || k == n) ? 1.0 : (k % 2 ? 4.0 : 2.0);
    acc += w * (qubit_splitting_approx(p, s.dE(k * h)) - idle);
  }
  const double theta = -acc * h / 3.0;
  return {theta, wrap_2pi(theta)};
}

double sequence_duration(const GateSequence& seq) {
  double t = 0.0;
  for (const auto& step : seq)
    if (step.kind == GateStep::Kind::Pulse) t += step.schedule.total_time;
  return t;
}

SequenceResult simulate_sequence(const SystemParams& p, const GateSequence& seq, double noise,
                                 const EvolveOptions& options) {
  Mat2 total = Mat2::Identity();
  for (const auto& step : seq) {
    if (step.kind == GateStep::Kind::VirtualRz) {
      total = rz(step.angle) * total;
      continue;
    }
    EvolveOptions o = options;
    o.t_begin = 0.0;
    o.t_end = -1.0;
    const EvolutionResult r = evolve(p, step.schedule, noise, o);
    const QubitFrame f = idle_qubit_frame(p, r.drive, r.frame);
    total = idle_frame_block(r, f) * total;
  }
  return {total, std::clamp(1.0 - 0.5 * total.squaredNorm(), 0.0, 1.0)};
}

std::vector<double> draw_noise_samples(const NoiseModel& m) {
  if (m.sample_count < 1) throw std::invalid_argument("sample_count must be at least 1");
  if (!(m.sigma_dE >= 0.0)) throw std::invalid_argument("sigma_dE must be non-negative");
  std::mt19937_64 rng(m.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> out;
  out.reserve(m.sample_count);
  while (static_cast<int>(out.size()) + 1 < m.sample_count) {
    const double x = m.sigma_dE * normal(rng);
    out.push_back(x);
    out.push_back(-x);
  }
  if (static_cast<int>(out.size()) < m.sample_count) out.push_back(m.sigma_dE * normal(rng));
  return out;
}

MonteCarloResult run_noise_monte_carlo(const std::function<double(double)>& infidelity_at,
                                       const NoiseModel& model) {
  MonteCarloResult r;
  r.noise = draw_noise_samples(model);
  r.infidelity.assign(r.noise.size(), 0.0);
  parallel_for(r.noise.size(), [&](std::size_t i) { r.infidelity[i] = infidelity_at(r.noise[i]); });
  const double n = static_cast<double>(r.noise.size());
  double sum = 0.0, sq = 0.0;
  for (double v : r.infidelity) sum += v;
  r.mean_infidelity = sum / n;
  for (double v : r.infidelity) sq += (v - r.mean_infidelity) * (v - r.mean_infidelity);
  r.std_error = n > 1 ? std::sqrt(sq / (n - 1) / n) : 0.0;
  return r;
}

MonteCarloResult run_noise_monte_carlo(const SystemParams& p, const GateSequence& seq,
                                       const Mat2& target, const NoiseModel& model,
                                       const EvolveOptions& options) {
  return run_noise_monte_carlo(
      [&](double noise) {
        return gate_infidelity(simulate_sequence(p, seq, noise, options).block, target);
      },
      model);
}

NoiseSensitivity noise_sensitivity(const std::function<Mat2(double)>& gate_at,
                                   const std::vector<double>& probes) {
  if (probes.size() < 2) throw std::invalid_argument("noise_sensitivity needs two probes");
  const std::size_t n = probes.size();
  std::vector<EulerAngles> raw(n);
  parallel_for(n, [&](std::size_t k) { raw[k] = euler_decompose(gate_at(probes[k])); });

  NoiseSensitivity out;
  out.probes = probes;
  std::vector<double> z1(n), x(n), z2(n);
  for (std::size_t k = 0; k < n; ++k) {
    x[k] = raw[k].theta_x;
    if (k == 0) {
      z1[k] = raw[k].theta_z1;
      z2[k] = raw[k].theta_z2;
      continue;
    }
    const double d1 = wrap_pi(raw[k].theta_z1 - z1[k - 1]);
    const double d2 = wrap_pi(raw[k].theta_z2 - z2[k - 1]);
    if (std::abs(d1) > 0.5 * kPi || std::abs(d2) > 0.5 * kPi) out.ambiguous = true;
    z1[k] = z1[k - 1] + d1;
    z2[k] = z2[k - 1] + d2;
  }
  if (out.ambiguous) warn("noise_sensitivity: Euler-angle unwrapping is ambiguous");

  double mean_p = 0.0;
  for (double v : probes) mean_p += v;
  mean_p /= static_cast<double>(n);
  double spp = 0.0;
  for (double v : probes) spp += (v - mean_p) * (v - mean_p);
  auto fit = [&](const std::vector<double>& y, double& intercept, double& slope) {
    double mean_y = 0.0;
    for (double v : y) mean_y += v;
    mean_y /= static_cast<double>(n);
    double spy = 0.0;
    for (std::size_t k = 0; k < n; ++k) spy += (probes[k] - mean_p) * (y[k] - mean_y);
    slope = spy / spp;
    intercept = mean_y - slope * mean_p;
    for (std::size_t k = 0; k < n; ++k)
      out.residual = std::max(out.residual, std::abs(intercept + slope * probes[k] - y[k]));
  };
  fit(z1, out.theta_z1_0, out.theta_z1_prime);
  fit(z2, out.theta_z2_0, out.theta_z2_prime);
  fit(x, out.theta_x_0, out.theta_x_prime);
  out.theta_z1_0 = wrap_2pi(out.theta_z1_0);
  out.theta_z2_0 = wrap_2pi(out.theta_z2_0);
  return out;
}

NoiseSensitivity noise_sensitivity(const SystemParams& p, const GateSequence& seq,
                                   const EvolveOptions& options,
                                   const std::vector<double>& probes) {
  return noise_sensitivity(
      [&](double noise) { return simulate_sequence(p, seq, noise, options).block; }, probes);
}

double LambdaCalibration::interpolate(double theta) const {
  if (theta <= theta_x.front()) return lambda.front();
  for (std::size_t k = 1; k < theta_x.size(); ++k) {
    if (theta <= theta_x[k]) {
      const double f = (theta - theta_x[k - 1]) / (theta_x[k] - theta_x[k - 1]);
      return lambda[k - 1] + f * (lambda[k] - lambda[k - 1]);
    }
  }
  return lambda.back();
}

namespace {
double theta_x_of(const SystemParams& p, const RxFactory& factory, double lambda,
                  const EvolveOptions& options) {
  if (lambda == 0.0) return 0.0;
  const GateSequence seq{GateStep::pulse(factory(lambda))};
  return euler_decompose(simulate_sequence(p, seq, 0.0, options).block).theta_x;
}
}  // namespace

LambdaCalibration calibrate_lambda(const SystemParams& p, const RxFactory& factory,
                                   const EvolveOptions& options, int points) {
  if (points < 2) throw std::invalid_argument("calibrate_lambda needs at least two points");
  LambdaCalibration table;
  table.lambda.resize(points);
  table.theta_x.resize(points);
  for (int k = 0; k < points; ++k) table.lambda[k] = static_cast<double>(k) / (points - 1);
  parallel_for(points, [&](std::size_t k) {
    table.theta_x[k] = theta_x_of(p, factory, table.lambda[k], options);
  });
  for (int k = 1; k < points; ++k) {
    if (!(table.theta_x[k] > table.theta_x[k - 1]))
      throw SimulationError("lambda calibration is not monotone near lambda = " +
                            std::to_string(table.lambda[k]));
  }
  return table;
}

double solve_lambda(const SystemParams& p, const RxFactory& factory, const LambdaCalibration& t,
                    double theta, const EvolveOptions& options, double tol) {
  if (!(theta > 0.0) || theta > t.max_theta() + tol)
    throw std::invalid_argument("theta_x " + std::to_string(theta) +
                                " outside the calibrated range (0, " +
                                std::to_string(t.max_theta()) + "]");
  std::size_t hi = 1;
  while (hi + 1 < t.theta_x.size() && t.theta_x[hi] < theta) ++hi;
  double a = t.lambda[hi - 1], fa = t.theta_x[hi - 1] - theta;
  double b = t.lambda[hi], fb = t.theta_x[hi] - theta;
  if (std::abs(fb) <= tol) return b;
  if (std::abs(fa) <= tol) return a;
  // Illinois regula falsi on the bracketing table interval.
  int side = 0;
  for (int it = 0; it < 60; ++it) {
    const double c = (a * fb - b * fa) / (fb - fa);
    const double fc = theta_x_of(p, factory, c, options) - theta;
    if (std::abs(fc) <= tol || std::abs(b - a) < 1e-12) return c;
    if ((fc > 0.0) == (fb > 0.0)) {
      b = c;
      fb = fc;
      if (side == -1) fa *= 0.5;
      side = -1;
    } else {
      a = c;
      fa = fc;
      if (side == 1) fb *= 0.5;
      side = 1;
    }
  }
  throw SimulationError("lambda root refinement did not converge");
}

GateSequence corrected_pulse(const SystemParams& p, const PulseSchedule& pulse,
                             const EvolveOptions& options, EulerAngles* raw) {
  const GateSequence bare{GateStep::pulse(pulse)};
  const EulerAngles e = euler_decompose(simulate_sequence(p, bare, 0.0, options).block);
  if (raw) *raw = e;
  return {GateStep::virtual_rz(-e.theta_z2), GateStep::pulse(pulse),
          GateStep::virtual_rz(-e.theta_z1)};
}

namespace {

// d(theta)/d(dE) of a noise-vulnerable echo idle with the given hold time.
double echo_slope(const SystemParams& p, double hold, const EvolveOptions& options) {
  const GateSequence seq{GateStep::pulse(make_echo_rz_schedule(p, hold))};
  const double h = 20.0;
  const double plus = rz_angle_of(simulate_sequence(p, seq, h, options).block);
  const double minus = rz_angle_of(simulate_sequence(p, seq, -h, options).block);
  return wrap_pi(plus - minus) / (2.0 * h);
}

// Hold time whose echo slope equals `required` (secant; the slope is close to
// linear in the hold time).
double solve_echo_hold(const SystemParams& p, double required, const EvolveOptions& options) {
  const double base = echo_slope(p, 0.0, options);
  const double rate = p.hyperfine_A * p.field_coupling() / (4.0 * p.Vt);
  if (required < base)
    throw SimulationError("echo cannot cancel a noise slope of " + std::to_string(-required) +
                          " rad per V/m (wrong sign or too small)");
  double t0 = 0.0, f0 = base - required;
  double t1 = (required - base) / rate, f1 = echo_slope(p, t1, options) - required;
  for (int it = 0; it < 30 && std::abs(f1) > 1e-9; ++it) {
    const double t2 = std::max(0.0, t1 - f1 * (t1 - t0) / (f1 - f0));
    t0 = t1;
    f0 = f1;
    t1 = t2;
    f1 = echo_slope(p, t1, options) - required;
  }
  if (std::abs(f1) > 1e-7) throw SimulationError("echo hold-time search did not converge");
  return t1;
}

}  // namespace

SweepEchoRx build_sweep_echo_rx(const SystemParams& p, double theta_x,
                                const LambdaCalibration& table, const EvolveOptions& options,
                                const SweepConfig& config) {
  SweepEchoRx out;
  out.lambda = solve_lambda(
      p, [&](double l) { return make_rx_sweep_schedule(p, l, config); }, table, theta_x, options);
  const PulseSchedule x_gate = make_rx_sweep_schedule(p, 1.0, config);
  const PulseSchedule sweep = make_rx_sweep_schedule(p, out.lambda, config);
  const GateSequence core{GateStep::pulse(x_gate), GateStep::pulse(sweep), GateStep::pulse(x_gate)};
  out.core = noise_sensitivity(p, core, options);

  // Rz(e_last) [Rz(m1) Rx Rz(m2)] Rz(e_first): each echo cancels the adjacent slope.
  out.echo_hold_first = solve_echo_hold(p, -out.core.theta_z2_prime, options);
  out.echo_hold_last = solve_echo_hold(p, -out.core.theta_z1_prime, options);

  GateSequence physical{GateStep::pulse(make_echo_rz_schedule(p, out.echo_hold_first))};
  physical.insert(physical.end(), core.begin(), core.end());
  physical.push_back(GateStep::pulse(make_echo_rz_schedule(p, out.echo_hold_last)));
  out.composite = noise_sensitivity(p, physical, options);

  const EulerAngles e = euler_decompose(simulate_sequence(p, physical, 0.0, options).block);
  out.sequence.push_back(GateStep::virtual_rz(-e.theta_z2));
  out.sequence.insert(out.sequence.end(), physical.begin(), physical.end());
  out.sequence.push_back(GateStep::virtual_rz(-e.theta_z1));
  out.total_time = sequence_duration(out.sequence);
  return out;
}

namespace {
SweepConfig naive_config(const SweepConfig& base, double scale, double shift) {
  SweepConfig c = base;
  c.Ea_max *= scale;
  c.Ba_max *= scale;
  c.detuning_B += shift;
  return c;
}

template <class F>
std::pair<double, double> golden_max(F&& f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  while (b - a > tol) {
    if (f1 < f2) {
      a = x1, x1 = x2, f1 = f2;
      x2 = a + r * (b - a), f2 = f(x2);
    } else {
      b = x2, x2 = x1, f2 = f1;
      x1 = b - r * (b - a), f1 = f(x1);
    }
  }
  return f1 < f2 ? std::pair{x2, f2} : std::pair{x1, f1};
}
}  // namespace

NaiveRxCalibration calibrate_naive_rx(const SystemParams& p, const EvolveOptions& options,
                                      const SweepConfig& base) {
  auto theta = [&](double scale, double shift) {
    const PulseSchedule s = make_naive_rx_schedule(p, 1.0, naive_config(base, scale, shift));
    return euler_decompose(simulate_sequence(p, {GateStep::pulse(s)}, 0.0, options).block).theta_x;
  };
  const double mhz = kTwoPi * 1e6;
  // Best detuning for a given scale: coarse grid, then golden refinement.
  auto best_shift = [&](double scale) {
    constexpr int n = 81;
    std::vector<double> grid(n);
    parallel_for(n, [&](std::size_t i) { grid[i] = theta(scale, (-20.0 + i) * mhz); });
    const auto k = std::max_element(grid.begin(), grid.end()) - grid.begin();
    const double centre = (-20.0 + k) * mhz;
    return golden_max([&](double d) { return theta(scale, d); }, centre - mhz, centre + mhz,
                      1e-3 * mhz);
  };
  std::vector<double> scales;
  for (int i = 1; i <= 20; ++i) scales.push_back(0.05 * i);
  double s_best = scales.front(), th_best = -1.0;
  for (double s : scales) {
    const double th = best_shift(s).second;
    if (th > th_best) s_best = s, th_best = th;
    if (th < 0.5 * th_best) break;  // past the first pi crossing
  }
  const auto [scale, peak] = golden_max([&](double s) { return best_shift(s).second; },
                                        s_best - 0.05, s_best + 0.05, 1e-4);
  NaiveRxCalibration out;
  out.amplitude_scale = scale;
  out.detuning_B_shift = best_shift(scale).first;
  out.theta_x = peak;
  out.config = naive_config(base, scale, out.detuning_B_shift);
  return out;
}

std::string GateReport::serialize() const {
  std::ostringstream os;
  char buf[160];
  os << "target = " << target << '\n';
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) {
      std::snprintf(buf, sizeof buf, "target_%d%d = %.12g %+.12gi\n", i, j,
                    target_matrix(i, j).real(), target_matrix(i, j).imag());
      os << buf;
    }
  std::snprintf(buf, sizeof buf, "theta_z1 = %.12g\ntheta_x = %.12g\ntheta_z2 = %.12g\n",
                angles.theta_z1, angles.theta_x, angles.theta_z2);
  os << buf;
  std::snprintf(buf, sizeof buf, "leakage = %.6e\nzero_noise_infidelity = %.6e\n", leakage,
                zero_noise_infidelity);
  os << buf;
  os << "samples = " << sample_count << "\nseed = " << seed << '\n';
  for (const auto& [sigma, inf] : noise_curve) {
    std::snprintf(buf, sizeof buf, "noise_curve = %.6g %.6e\n", sigma, inf);
    os << buf;
  }
  return os.str();
}

}  // namespace donorq
