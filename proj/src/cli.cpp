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

#include "donorq/cli.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <map>
#include <optional>
#include <regex>
#include <sstream>

#include "donorq/diagnostics.hpp"
#include "donorq/effective.hpp"
#include "donorq/gates.hpp"
#include "donorq/parallel.hpp"
#include "donorq/propagation.hpp"
#include "donorq/pulses.hpp"
#include "donorq/twoqubit.hpp"

namespace donorq {

namespace {

constexpr const char* kVersion = "donorq 1.0";

std::string trim(std::string_view s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return std::string(s.substr(a, b - a));
}

// Unit name -> (dimension, scale to SI / rad/s).
const std::map<std::string, std::pair<Dimension, double>>& unit_table() {
  static const std::map<std::string, std::pair<Dimension, double>> table{
      {"m", {Dimension::Length, 1.0}},
      {"um", {Dimension::Length, 1e-6}},
      {"nm", {Dimension::Length, 1e-9}},
      {"s", {Dimension::Time, 1.0}},
      {"us", {Dimension::Time, 1e-6}},
      {"ns", {Dimension::Time, 1e-9}},
      {"ps", {Dimension::Time, 1e-12}},
      {"V/m", {Dimension::Field, 1.0}},
      {"kV/m", {Dimension::Field, 1e3}},
      {"rad/s", {Dimension::AngularFrequency, 1.0}},
      {"Hz", {Dimension::AngularFrequency, kTwoPi}},
      {"kHz", {Dimension::AngularFrequency, kTwoPi * 1e3}},
      {"MHz", {Dimension::AngularFrequency, kTwoPi * 1e6}},
      {"GHz", {Dimension::AngularFrequency, kTwoPi * 1e9}},
      {"T", {Dimension::MagneticField, 1.0}},
      {"mT", {Dimension::MagneticField, 1e-3}},
      {"rad", {Dimension::Angle, 1.0}},
      {"deg", {Dimension::Angle, kPi / 180.0}},
      {"rad/s/T", {Dimension::Gyromagnetic, 1.0}},
      {"MHz/T", {Dimension::Gyromagnetic, kTwoPi * 1e6}},
      {"GHz/T", {Dimension::Gyromagnetic, kTwoPi * 1e9}},
  };
  return table;
}

bool is_unit(const std::string& token) { return unit_table().count(token) > 0; }

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("not a number: '" + s + "'");
  }
  if (used != s.size()) throw std::invalid_argument("not a number: '" + s + "'");
  return v;
}

}  // namespace

double parse_quantity(std::string_view text, Dimension dim) {
  const std::string s = trim(text);
  if (s.empty()) throw std::invalid_argument("empty quantity");
  static const std::regex pi_form(R"(^([+-]?[0-9.eE+-]*)\s*\*?\s*pi\s*(?:/\s*([0-9.eE+]+))?$)");
  std::smatch m;
  if (std::regex_match(s, m, pi_form)) {
    if (dim != Dimension::Angle && dim != Dimension::None)
      throw std::invalid_argument("multiples of pi are only valid for angles: '" + s + "'");
    const std::string coef = m[1].str();
    double v = kPi;
    if (!coef.empty() && coef != "+") v *= coef == "-" ? -1.0 : parse_number(coef);
    if (m[2].matched) v /= parse_number(m[2].str());
    return v;
  }
  const auto split = s.find_first_of(" \t");
  std::string number = s, unit;
  if (split != std::string::npos) {
    number = s.substr(0, split);
    unit = trim(s.substr(split));
  } else {
    // Allow "5ns": peel a trailing unit.
    for (const auto& [name, spec] : unit_table()) {
      if (s.size() > name.size() && s.compare(s.size() - name.size(), name.size(), name) == 0) {
        const std::string head = s.substr(0, s.size() - name.size());
        if (!head.empty() && (std::isdigit(static_cast<unsigned char>(head.back())) || head.back() == '.')) {
          if (unit.size() < name.size()) number = head, unit = name;
        }
      }
    }
  }
  const double v = parse_number(number);
  if (unit.empty()) return v;
  const auto it = unit_table().find(unit);
  if (it == unit_table().end()) throw std::invalid_argument("unknown unit '" + unit + "'");
  if (dim != Dimension::None && it->second.first != dim)
    throw std::invalid_argument("unit '" + unit + "' has the wrong dimension");
  return v * it->second.second;
}

std::vector<double> parse_quantity_list(std::string_view text, Dimension dim) {
  std::string s(text);
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::vector<std::string> tokens;
  for (std::string t; is >> t;) tokens.push_back(t);
  std::string unit;
  if (!tokens.empty() && is_unit(tokens.back())) {
    unit = tokens.back();
    tokens.pop_back();
  }
  if (tokens.empty()) throw std::invalid_argument("empty list");
  std::vector<double> out;
  for (const auto& t : tokens) out.push_back(parse_quantity(unit.empty() ? t : t + " " + unit, dim));
  return out;
}

// ---------------------------------------------------------------------------

ExperimentManifest ExperimentManifest::parse(std::string_view text) {
  ExperimentManifest m;
  std::istringstream is{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string t = trim(line);
    if (t.empty()) continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ManifestError("line " + std::to_string(line_no), "expected 'key = value'");
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) throw ManifestError("line " + std::to_string(line_no), "empty key");
    if (m.has(key)) throw ManifestError(key, "duplicate key");
    m.entries.emplace_back(key, value);
  }
  return m;
}

std::string ExperimentManifest::render() const {
  std::string out;
  for (const auto& [k, v] : entries) out += k + " = " + v + "\n";
  return out;
}

bool ExperimentManifest::has(std::string_view key) const {
  return std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.first == key; });
}

const std::string& ExperimentManifest::get(std::string_view key) const {
  for (const auto& e : entries)
    if (e.first == key) return e.second;
  throw ManifestError(std::string(key), "required field missing");
}

std::string ExperimentManifest::get_or(std::string_view key, std::string fallback) const {
  return has(key) ? get(key) : fallback;
}

void ExperimentManifest::set(const std::string& key, const std::string& value) {
  for (auto& e : entries)
    if (e.first == key) {
      e.second = value;
      return;
    }
  entries.emplace_back(key, value);
}

// ---------------------------------------------------------------------------

const std::vector<ExperimentInfo>& experiment_catalog() {
  static const std::vector<ExperimentInfo> catalog{
      {"splitting-curve", "qubit splitting vs dE, exact and approximate",
       {"dE_min", "dE_max", "points"}},
      {"rz-angle-curve", "simulated and predicted Rz angle vs duration",
       {"T_min", "T_max", "points"}},
      {"rz-noise", "Rz gate infidelity vs charge-noise sigma",
       {"durations", "sigma", "samples"}},
      {"rx-noise", "naive or sweep Rx infidelity vs charge-noise sigma",
       {"gate", "theta", "sigma", "samples"}},
      {"sweep-echo-noise", "sweep-and-echo Rx infidelity vs charge-noise sigma",
       {"theta", "sigma", "samples"}},
      {"cphase-curve", "entangling phase vs CPHASE duration",
       {"T_min", "T_max", "points", "separation", "method"}},
      {"hprime-dump", "effective Hamiltonian H' at one envelope sample",
       {"dE", "Ea", "Ba", "detuning_E", "detuning_B"}},
  };
  return catalog;
}

namespace {

const std::vector<std::string> kCommonKeys{"kind", "output", "seed", "frame", "dt",
                                           "check_convergence"};

struct ParamKey {
  const char* name;
  Dimension dim;
  double SystemParams::*field;
};
const std::vector<ParamKey>& param_keys() {
  static const std::vector<ParamKey> keys{
      {"param.hyperfine_A", Dimension::AngularFrequency, &SystemParams::hyperfine_A},
      {"param.gamma_e", Dimension::Gyromagnetic, &SystemParams::gamma_e},
      {"param.gamma_n", Dimension::Gyromagnetic, &SystemParams::gamma_n},
      {"param.delta_gamma", Dimension::None, &SystemParams::delta_gamma},
      {"param.donor_depth_d", Dimension::Length, &SystemParams::donor_depth_d},
      {"param.B0", Dimension::MagneticField, &SystemParams::B0},
      {"param.Vt", Dimension::AngularFrequency, &SystemParams::Vt},
      {"param.dE_idle", Dimension::Field, &SystemParams::dE_idle},
  };
  return keys;
}

Dimension key_dimension(const std::string& key) {
  static const std::map<std::string, Dimension> dims{
      {"dE_min", Dimension::Field},   {"dE_max", Dimension::Field},   {"dE", Dimension::Field},
      {"Ea", Dimension::Field},       {"Ba", Dimension::MagneticField}, {"sigma", Dimension::Field},
      {"T_min", Dimension::Time},     {"T_max", Dimension::Time},     {"durations", Dimension::Time},
      {"dt", Dimension::Time},        {"theta", Dimension::Angle},    {"separation", Dimension::Length},
      {"detuning_E", Dimension::AngularFrequency}, {"detuning_B", Dimension::AngularFrequency},
  };
  const auto it = dims.find(key);
  return it == dims.end() ? Dimension::None : it->second;
}

int as_int(const ExperimentManifest& m, const std::string& key, int fallback, int min_value) {
  if (!m.has(key)) return fallback;
  try {
    const double v = parse_number(m.get(key));
    if (v != std::floor(v) || v < min_value) throw std::invalid_argument("");
    return static_cast<int>(v);
  } catch (const std::exception&) {
    throw ManifestError(key, "expected an integer >= " + std::to_string(min_value));
  }
}

double quantity(const ExperimentManifest& m, const std::string& key, double fallback,
                std::optional<Dimension> dim = std::nullopt) {
  if (!m.has(key)) return fallback;
  try {
    return parse_quantity(m.get(key), dim.value_or(key_dimension(key)));
  } catch (const std::exception& e) {
    throw ManifestError(key, e.what());
  }
}

std::vector<double> quantities(const ExperimentManifest& m, const std::string& key,
                               std::vector<double> fallback) {
  if (!m.has(key)) return fallback;
  try {
    return parse_quantity_list(m.get(key), key_dimension(key));
  } catch (const std::exception& e) {
    throw ManifestError(key, e.what());
  }
}

std::vector<double> linspace(double a, double b, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = n == 1 ? a : a + (b - a) * i / (n - 1);
  return out;
}

EvolveOptions evolve_options(const ExperimentManifest& m) {
  EvolveOptions o;
  try {
    o.frame = parse_evolution_frame(m.get_or("frame", "effective"));
  } catch (const std::exception& e) {
    throw ManifestError("frame", e.what());
  }
  o.dt = quantity(m, "dt", 0.0);
  const std::string cc = m.get_or("check_convergence", "false");
  if (cc != "true" && cc != "false") throw ManifestError("check_convergence", "expected true or false");
  o.check_convergence = cc == "true";
  return o;
}

std::uint64_t seed_of(const ExperimentManifest& m) {
  if (!m.has("seed")) return 1;
  const std::string& s = m.get("seed");
  if (s.empty() || !std::all_of(s.begin(), s.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ManifestError("seed", "expected a non-negative integer");
  return std::stoull(s);
}

}  // namespace

SystemParams resolve_params(const ExperimentManifest& m) {
  SystemParams p;
  for (const auto& key : param_keys())
    if (m.has(key.name)) p.*key.field = quantity(m, key.name, 0.0, key.dim);
  const bool zeeman_changed =
      m.has("param.B0") || m.has("param.gamma_e") || m.has("param.gamma_n");
  if (zeeman_changed && !m.has("param.Vt")) p.Vt = p.B0 * (p.gamma_e + p.gamma_n);
  try {
    validate(p);
  } catch (const std::exception& e) {
    throw ManifestError("param", e.what());
  }
  return p;
}

void validate_manifest(const ExperimentManifest& m) {
  const std::string kind = m.kind();
  const auto& cat = experiment_catalog();
  const auto info = std::find_if(cat.begin(), cat.end(), [&](const auto& e) { return e.kind == kind; });
  if (info == cat.end()) throw ManifestError("kind", "unknown experiment kind '" + kind + "'");
  for (const auto& [key, value] : m.entries) {
    const bool common = std::find(kCommonKeys.begin(), kCommonKeys.end(), key) != kCommonKeys.end();
    const bool specific = std::find(info->keys.begin(), info->keys.end(), key) != info->keys.end();
    const bool param = std::any_of(param_keys().begin(), param_keys().end(),
                                   [&](const ParamKey& k) { return key == k.name; });
    if (!common && !specific && !param) throw ManifestError(key, "unknown field for kind " + kind);
    if (value.empty()) throw ManifestError(key, "empty value");
  }
  resolve_params(m);
  evolve_options(m);
  seed_of(m);
  for (const auto& key : info->keys) {
    if (!m.has(key)) continue;
    if (key == "points" || key == "samples") {
      as_int(m, key, 0, key == "points" ? 2 : 1);
    } else if (key == "gate") {
      if (m.get(key) != "naive" && m.get(key) != "sweep") throw ManifestError(key, "expected naive or sweep");
    } else if (key == "method") {
      const std::string& v = m.get(key);
      if (v != "first-order" && v != "adiabatic" && v != "both") throw ManifestError(key, "expected first-order, adiabatic or both");
    } else if (key == "durations" || key == "sigma" || key == "theta") {
      const auto values = quantities(m, key, {});
      for (double v : values)
        if ((key == "sigma" && v < 0) || (key != "sigma" && !(v > 0)))
          throw ManifestError(key, "value out of range");
    } else {
      quantity(m, key, 0.0);
    }
  }
  if (m.has("T_min") && m.has("T_max") && !(quantity(m, "T_max", 0) > quantity(m, "T_min", 0)))
    throw ManifestError("T_max", "must exceed T_min");
  if (m.has("dE_min") && m.has("dE_max") && !(quantity(m, "dE_max", 0) > quantity(m, "dE_min", 0)))
    throw ManifestError("dE_max", "must exceed dE_min");
}

// ---------------------------------------------------------------------------

namespace {

void write_header(std::ostream& out, const ExperimentManifest& m, const SystemParams& p,
                  const std::string& columns) {
  char buf[160];
  out << "# " << kVersion << "\n";
  for (const auto& [k, v] : m.entries) out << "# manifest." << k << " = " << v << "\n";
  out << "# resolved.seed = " << seed_of(m) << "\n";
  out << "# resolved.threads_independent = true\n";
  for (const auto& key : param_keys()) {
    std::snprintf(buf, sizeof buf, "# resolved.%s = %.17g\n", key.name, p.*key.field);
    out << buf;
  }
  out << "# units = SI; angular frequencies in rad/s; frequencies reported in Hz are marked _Hz\n";
  out << "# columns = " << columns << "\n";
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", v);
  return buf;
}

void add(RunSummary& s, const std::string& key, double v) { s.values.emplace_back(key, fmt(v)); }

RunSummary run_splitting_curve(const ExperimentManifest& m, const SystemParams& p, std::ostream& out) {
  const double a = quantity(m, "dE_min", -2e4), b = quantity(m, "dE_max", 2e4);
  const int n = as_int(m, "points", 401, 2);
  write_header(out, m, p, "dE_V_per_m dq_exact_Hz dq_approx_Hz");
  const auto grid = linspace(a, b, n);
  std::vector<double> exact(n), approx(n);
  parallel_for(n, [&](std::size_t i) {
    exact[i] = qubit_splitting_exact(p, grid[i]);
    approx[i] = qubit_splitting_approx(p, grid[i]);
  });
  RunSummary s;
  double gap = 0.0;
  for (int i = 0; i < n; ++i) {
    out << fmt(grid[i]) << ' ' << fmt(exact[i] / kTwoPi) << ' ' << fmt(approx[i] / kTwoPi) << '\n';
    gap = std::max(gap, std::abs(exact[i] - approx[i]));
  }
  add(s, "max_gap_Hz", gap / kTwoPi);
  add(s, "shift_Hz", (exact.front() - exact.back()) / kTwoPi);
  return s;
}

RunSummary run_rz_angle_curve(const ExperimentManifest& m, const SystemParams& p, std::ostream& out) {
  const double a = quantity(m, "T_min", 2e-9), b = quantity(m, "T_max", 25e-9);
  const int n = as_int(m, "points", 47, 2);
  const EvolveOptions o = evolve_options(m);
  write_header(out, m, p, "T_s theta_sim_rad theta_pred_rad gap_rad leakage");
  const auto grid = linspace(a, b, n);
  std::vector<double> sim(n), pred(n), leak(n);
  std::vector<int> converged(n, 1);
  parallel_for(n, [&](std::size_t i) {
    const EvolutionResult r = evolve(p, make_rz_schedule(p, grid[i]), 0.0, o);
    const ExtractedGate g = extract_qubit_gate(r, p);
    pred[i] = predict_rz_angle(p, grid[i]).unreduced;
    sim[i] = pred[i] + wrap_pi(rz_angle_of(g.block) - pred[i]);
    leak[i] = g.leakage;
    converged[i] = r.converged && r.valid;
  });
  RunSummary s;
  double gap = 0.0;
  for (int i = 0; i < n; ++i) {
    out << fmt(grid[i]) << ' ' << fmt(sim[i]) << ' ' << fmt(pred[i]) << ' ' << fmt(sim[i] - pred[i])
        << ' ' << fmt(leak[i]) << '\n';
    gap = std::max(gap, std::abs(sim[i] - pred[i]));
    if (!converged[i]) s.flags.push_back("non-convergence at T = " + fmt(grid[i]));
  }
  add(s, "max_gap_rad", gap);
  return s;
}

void emit_noise_rows(std::ostream& out, double label, const std::vector<double>& sigmas,
                     const std::vector<MonteCarloResult>& rows) {
  for (std::size_t k = 0; k < sigmas.size(); ++k)
    out << fmt(label) << ' ' << fmt(sigmas[k]) << ' ' << fmt(rows[k].mean_infidelity) << ' '
        << fmt(rows[k].std_error) << '\n';
}

std::vector<MonteCarloResult> noise_rows(const SystemParams& p, const GateSequence& seq,
                                         const Mat2& target, const std::vector<double>& sigmas,
                                         int samples, std::uint64_t seed, const EvolveOptions& o) {
  std::vector<MonteCarloResult> rows;
  for (double sigma : sigmas) {
    NoiseModel model{sigma, samples, seed};
    rows.push_back(run_noise_monte_carlo(p, seq, target, model, o));
  }
  return rows;
}

const std::vector<double> kDefaultSigmas{0.0, 25.0, 50.0, 75.0, 100.0, 150.0, 200.0};

RunSummary run_rz_noise(const ExperimentManifest& m, const SystemParams& p, std::ostream& out) {
  const auto durations = quantities(m, "durations", {6.632e-9, 13.56e-9, 22.116e-9});
  const auto sigmas = quantities(m, "sigma", kDefaultSigmas);
  const int samples = as_int(m, "samples", 200, 1);
  const EvolveOptions o = evolve_options(m);
  write_header(out, m, p, "T_s sigma_V_per_m mean_infidelity std_error");
  RunSummary s;
  for (double T : durations) {
    const GateSequence seq{GateStep::pulse(make_rz_schedule(p, T))};
    const SequenceResult zero = simulate_sequence(p, seq, 0.0, o);
    const Mat2 target = QubitGate::from(zero.block).matrix;
    const auto rows = noise_rows(p, seq, target, sigmas, samples, seed_of(m), o);
    emit_noise_rows(out, T, sigmas, rows);
    add(s, "theta_at_" + fmt(T), rz_angle_of(zero.block));
  }
  return s;
}

RunSummary run_rx_noise(const ExperimentManifest& m, const SystemParams& p, std::ostream& out) {
  const std::string gate = m.get_or("gate", "sweep");
  const auto thetas = quantities(m, "theta", {kPi});
  const auto sigmas = quantities(m, "sigma", kDefaultSigmas);
  const int samples = as_int(m, "samples", 200, 1);
  const EvolveOptions o = evolve_options(m);
  SweepConfig config;
  RunSummary s;
  if (gate == "naive") {
    const NaiveRxCalibration cal = calibrate_naive_rx(p, o);
    config = cal.config;
    add(s, "naive_amplitude_scale", cal.amplitude_scale);
    add(s, "naive_detuning_B_shift_rad_s", cal.detuning_B_shift);
  }
  const RxFactory factory = [&](double l) {
    return gate == "naive" ? make_naive_rx_schedule(p, l, config) : make_rx_sweep_schedule(p, l, config);
  };
  const LambdaCalibration table = calibrate_lambda(p, factory, o);
  write_header(out, m, p, "theta_rad sigma_V_per_m mean_infidelity std_error");
  for (double theta : thetas) {
    if (theta > table.max_theta() + 1e-9)
      throw ManifestError("theta", "outside the calibrated range (max " + fmt(table.max_theta()) + ")");
    const double lambda = solve_lambda(p, factory, table, std::min(theta, table.max_theta()), o);
    const GateSequence seq = corrected_pulse(p, factory(lambda), o);
    emit_noise_rows(out, theta, sigmas, noise_rows(p, seq, rx(theta), sigmas, samples, seed_of(m), o));
    add(s, "lambda_at_" + fmt(theta), lambda);
  }
  return s;
}

RunSummary run_sweep_echo_noise(const ExperimentManifest& m, const SystemParams& p, std::ostream& out) {
  const auto thetas = quantities(m, "theta", {kPi / 4, kPi / 2, 3 * kPi / 4});
  const auto sigmas = quantities(m, "sigma", kDefaultSigmas);
  const int samples = as_int(m, "samples", 200, 1);
  const EvolveOptions o = evolve_options(m);
  const LambdaCalibration table =
      calibrate_lambda(p, [&](double l) { return make_rx_sweep_schedule(p, l); }, o);
  write_header(out, m, p, "theta_rad sigma_V_per_m mean_infidelity std_error");
  RunSummary s;
  for (double theta : thetas) {
    if (theta > table.max_theta() + 1e-9)
      throw ManifestError("theta", "outside the calibrated range (max " + fmt(table.max_theta()) + ")");
    const SweepEchoRx g = build_sweep_echo_rx(p, theta, table, o);
    emit_noise_rows(out, theta, sigmas, noise_rows(p, g.sequence, rx(theta), sigmas, samples, seed_of(m), o));
    add(s, "total_time_at_" + fmt(theta), g.total_time);
  }
  return s;
}

RunSummary run_cphase_curve(const ExperimentManifest& m, const SystemParams& p, std::ostream& out) {
  TwoQubitLayout layout;
  layout.qubit1 = layout.qubit2 = p;
  layout.separation_r = quantity(m, "separation", 5e-7);
  const double a = quantity(m, "T_min", 100e-9), b = quantity(m, "T_max", 750e-9);
  const int n = as_int(m, "points", 27, 2);
  const std::string method = m.get_or("method", "both");
  write_header(out, m, p, "T_s phi_first_order_rad phi_adiabatic_rad nonadiabaticity_first_order");
  const auto grid = linspace(a, b, n);
  std::vector<CphaseReport> first(n), exact(n);
  parallel_for(n, [&](std::size_t i) {
    const CphasePair pair = make_cphase_pair(layout, grid[i]);
    if (method != "adiabatic") first[i] = cphase_angle(layout, pair.qubit1, pair.qubit2);
    if (method != "first-order") exact[i] = adiabatic_cphase_angle(layout, pair.qubit1, pair.qubit2);
  });
  const double nan = std::nan("");
  for (int i = 0; i < n; ++i)
    out << fmt(grid[i]) << ' ' << fmt(method != "adiabatic" ? first[i].phi : nan) << ' '
        << fmt(method != "first-order" ? exact[i].phi : nan) << ' '
        << fmt(method != "adiabatic" ? first[i].nonadiabaticity : nan) << '\n';
  RunSummary s;
  add(s, "dipole_coupling_rad_s", dipole_coupling_strength(layout));
  add(s, "omega_E_shift_rad_s", dipole_frequency_shift(layout, CphaseConfig{}.hold_field));
  if (method != "adiabatic") {
    try {
      add(s, "cz_duration_first_order_s", cz_duration_search(layout, kPi, {}, a, b));
    } catch (const SimulationError& e) {
      s.values.emplace_back("cz_duration_first_order_s", std::string("none (") + e.what() + ")");
    }
  }
  return s;
}

RunSummary run_hprime_dump(const ExperimentManifest& m, const SystemParams& p, std::ostream& out) {
  const EnvelopeSample sample{quantity(m, "dE", 2000.0), quantity(m, "Ea", 0.0), quantity(m, "Ba", 0.0)};
  const DriveFrequencies w{charge_splitting(p, sample.dE) + quantity(m, "detuning_E", 0.0),
                           p.electron_zeeman() - 0.25 * p.hyperfine_A + quantity(m, "detuning_B", 0.0)};
  const Mat8 h = effective_hamiltonian(p, sample, w);
  write_header(out, m, p, "matrix dump in units of 2 pi MHz, then eigenvalues_MHz");
  out << format_matrix(h);
  Eigen::SelfAdjointEigenSolver<Mat8> es(h);
  out << "# eigenvalues_MHz\n";
  for (int k = 0; k < 8; ++k) out << fmt(es.eigenvalues()(k) / (kTwoPi * 1e6)) << '\n';
  RunSummary s;
  add(s, "omega_E_rad_s", w.omega_E);
  add(s, "omega_B_rad_s", w.omega_B);
  add(s, "hermiticity_defect", hermiticity_defect(h));
  return s;
}

}  // namespace

RunSummary run_experiment(const ExperimentManifest& m, std::ostream& out) {
  validate_manifest(m);
  const SystemParams p = resolve_params(m);
  const std::string kind = m.kind();
  RunSummary s;
  try {
    if (kind == "splitting-curve") s = run_splitting_curve(m, p, out);
    else if (kind == "rz-angle-curve") s = run_rz_angle_curve(m, p, out);
    else if (kind == "rz-noise") s = run_rz_noise(m, p, out);
    else if (kind == "rx-noise") s = run_rx_noise(m, p, out);
    else if (kind == "sweep-echo-noise") s = run_sweep_echo_noise(m, p, out);
    else if (kind == "cphase-curve") s = run_cphase_curve(m, p, out);
    else if (kind == "hprime-dump") s = run_hprime_dump(m, p, out);
  } catch (const SimulationError& e) {
    s.flags.push_back(e.what());
  }
  for (const auto& [k, v] : s.values) out << "# summary." << k << " = " << v << "\n";
  for (const auto& f : s.flags) out << "# flag = " << f << "\n";
  return s;
}

ExperimentManifest manifest_from_header(std::string_view text) {
  ExperimentManifest m;
  std::istringstream is{std::string(text)};
  const std::string prefix = "# manifest.";
  for (std::string line; std::getline(is, line);) {
    if (line.rfind(prefix, 0) != 0) continue;
    const std::string body = line.substr(prefix.size());
    const auto eq = body.find(" = ");
    if (eq == std::string::npos) continue;
    m.entries.emplace_back(body.substr(0, eq), body.substr(eq + 3));
  }
  if (!m.has("kind")) throw ManifestError("kind", "no manifest header found");
  return m;
}

}  // namespace donorq
