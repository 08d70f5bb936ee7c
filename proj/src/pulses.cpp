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

#include "donorq/pulses.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <variant>

#include "donorq/diagnostics.hpp"

namespace donorq {

double window(double t, double tau, double T) {
  if (!(tau > 0.0) || tau > 0.5 * T * (1.0 + 1e-12))
    throw std::invalid_argument("window: require 0 < tau <= T/2");
  if (t < 0.0 || t > T) return 0.0;
  if (t < tau) return 0.5 * (1.0 - std::cos(kPi * t / tau));
  if (t < T - tau) return 1.0;
  return 0.5 * (1.0 - std::cos(kPi * (T - t) / tau));
}

double window_derivative(double t, double tau, double T) {
  if (!(tau > 0.0) || tau > 0.5 * T * (1.0 + 1e-12))
    throw std::invalid_argument("window: require 0 < tau <= T/2");
  if (t < 0.0 || t > T) return 0.0;
  if (t < tau) return 0.5 * kPi / tau * std::sin(kPi * t / tau);
  if (t < T - tau) return 0.0;
  return -0.5 * kPi / tau * std::sin(kPi * (T - t) / tau);
}

namespace {
void check_ramp(double tau1, double tau2, double T) {
  if (!(0.0 < tau1 && tau1 < tau2 && tau2 < T))
    throw std::invalid_argument("ramp: require 0 < tau1 < tau2 < T");
}
}  // namespace

double ramp(double t, double tau1, double y1, double tau2, double y2, double T) {
  check_ramp(tau1, tau2, T);
  if (t < 0.0 || t > T) return 0.0;
  if (t < tau1) return y1 * t / tau1;
  if (t < tau2) return y1 + (y2 - y1) * (t - tau1) / (tau2 - tau1);
  return y2 * (T - t) / (T - tau2);
}

double ramp_derivative(double t, double tau1, double y1, double tau2, double y2, double T) {
  check_ramp(tau1, tau2, T);
  if (t < 0.0 || t > T) return 0.0;
  if (t < tau1) return y1 / tau1;
  if (t < tau2) return (y2 - y1) / (tau2 - tau1);
  return -y2 / (T - tau2);
}

// ---------------------------------------------------------------------------
// Envelope expression tree

struct ConstNode { double value; };
struct WindowNode { double tau, T; };
struct RampNode { double tau1, y1, tau2, y2, T; };
struct ShiftNode { double t0; std::shared_ptr<const Envelope::Node> child; };
struct ScaleNode { double k; std::shared_ptr<const Envelope::Node> child; };
struct SquareNode { std::shared_ptr<const Envelope::Node> child; };
struct SumNode { std::vector<std::shared_ptr<const Envelope::Node>> terms; };

struct Envelope::Node {
  std::variant<ConstNode, WindowNode, RampNode, ShiftNode, ScaleNode, SquareNode, SumNode> v;
};

namespace {

using NodePtr = std::shared_ptr<const Envelope::Node>;

template <typename... Ts>
struct Overloaded : Ts... { using Ts::operator()...; };
template <typename... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double eval(const NodePtr& n, double t);
double eval_d(const NodePtr& n, double t);

double eval(const NodePtr& n, double t) {
  return std::visit(Overloaded{
      [&](const ConstNode& c) { return c.value; },
      [&](const WindowNode& w) { return window(t, w.tau, w.T); },
      [&](const RampNode& r) { return ramp(t, r.tau1, r.y1, r.tau2, r.y2, r.T); },
      [&](const ShiftNode& s) { return eval(s.child, t - s.t0); },
      [&](const ScaleNode& s) { return s.k * eval(s.child, t); },
      [&](const SquareNode& s) { const double v = eval(s.child, t); return v * v; },
      [&](const SumNode& s) {
        double acc = 0.0;
        for (const auto& term : s.terms) acc += eval(term, t);
        return acc;
      }}, n->v);
}

double eval_d(const NodePtr& n, double t) {
  return std::visit(Overloaded{
      [&](const ConstNode&) { return 0.0; },
      [&](const WindowNode& w) { return window_derivative(t, w.tau, w.T); },
      [&](const RampNode& r) { return ramp_derivative(t, r.tau1, r.y1, r.tau2, r.y2, r.T); },
      [&](const ShiftNode& s) { return eval_d(s.child, t - s.t0); },
      [&](const ScaleNode& s) { return s.k * eval_d(s.child, t); },
      [&](const SquareNode& s) { return 2.0 * eval(s.child, t) * eval_d(s.child, t); },
      [&](const SumNode& s) {
        double acc = 0.0;
        for (const auto& term : s.terms) acc += eval_d(term, t);
        return acc;
      }}, n->v);
}

bool zero(const NodePtr& n) {
  return std::visit(Overloaded{
      [](const ConstNode& c) { return c.value == 0.0; },
      [](const WindowNode&) { return false; },
      [](const RampNode& r) { return r.y1 == 0.0 && r.y2 == 0.0; },
      [](const ShiftNode& s) { return zero(s.child); },
      [](const ScaleNode& s) { return s.k == 0.0 || zero(s.child); },
      [](const SquareNode& s) { return zero(s.child); },
      [](const SumNode& s) {
        return std::all_of(s.terms.begin(), s.terms.end(), [](const NodePtr& x) { return zero(x); });
      }}, n->v);
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string render(const NodePtr& n) {
  return std::visit(Overloaded{
      [](const ConstNode& c) { return "const(" + num(c.value) + ")"; },
      [](const WindowNode& w) { return "window(" + num(w.tau) + ", " + num(w.T) + ")"; },
      [](const RampNode& r) {
        return "ramp(" + num(r.tau1) + ", " + num(r.y1) + ", " + num(r.tau2) + ", " + num(r.y2) +
               ", " + num(r.T) + ")";
      },
      [](const ShiftNode& s) { return "shift(" + num(s.t0) + ", " + render(s.child) + ")"; },
      [](const ScaleNode& s) { return "scale(" + num(s.k) + ", " + render(s.child) + ")"; },
      [](const SquareNode& s) { return "square(" + render(s.child) + ")"; },
      [](const SumNode& s) {
        std::string out = "sum(";
        for (std::size_t i = 0; i < s.terms.size(); ++i) {
          if (i) out += ", ";
          out += render(s.terms[i]);
        }
        return out + ")";
      }}, n->v);
}

NodePtr make(auto node) { return std::make_shared<const Envelope::Node>(Envelope::Node{std::move(node)}); }

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  NodePtr parse_all() {
    NodePtr n = expr();
    skip();
    if (pos_ != s_.size()) fail("trailing characters");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("envelope parse error at " + std::to_string(pos_) + ": " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  void expect(char c) {
    skip();
    if (pos_ >= s_.size() || s_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  std::string ident() {
    skip();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
      ++pos_;
    if (start == pos_) fail("expected a primitive name");
    return std::string(s_.substr(start, pos_ - start));
  }
  double number() {
    skip();
    const std::string rest(s_.substr(pos_));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(rest, &used);
    } catch (const std::exception&) {
      fail("expected a number");
    }
    pos_ += used;
    return v;
  }
  NodePtr expr() {
    const std::string name = ident();
    expect('(');
    NodePtr out;
    if (name == "const") {
      out = make(ConstNode{number()});
    } else if (name == "window") {
      const double tau = number();
      expect(',');
      const double T = number();
      if (!(tau > 0.0) || tau > 0.5 * T * (1.0 + 1e-12)) fail("window requires 0 < tau <= T/2");
      out = make(WindowNode{tau, T});
    } else if (name == "ramp") {
      double v[5];
      for (int i = 0; i < 5; ++i) {
        if (i) expect(',');
        v[i] = number();
      }
      if (!(0.0 < v[0] && v[0] < v[2] && v[2] < v[4])) fail("ramp breakpoints not monotone");
      out = make(RampNode{v[0], v[1], v[2], v[3], v[4]});
    } else if (name == "shift" || name == "scale") {
      const double x = number();
      expect(',');
      NodePtr child = expr();
      out = name == "shift" ? make(ShiftNode{x, child}) : make(ScaleNode{x, child});
    } else if (name == "square") {
      out = make(SquareNode{expr()});
    } else if (name == "sum") {
      SumNode sum;
      sum.terms.push_back(expr());
      while (accept(',')) sum.terms.push_back(expr());
      out = make(std::move(sum));
    } else {
      fail("unknown primitive '" + name + "'");
    }
    expect(')');
    return out;
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Envelope::Envelope() : node_(make(ConstNode{0.0})) {}
Envelope::Envelope(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Envelope Envelope::constant(double value) { return Envelope(make(ConstNode{value})); }

Envelope Envelope::window(double tau, double T) {
  if (!(tau > 0.0) || tau > 0.5 * T * (1.0 + 1e-12))
    throw std::invalid_argument("window: require 0 < tau <= T/2");
  return Envelope(make(WindowNode{tau, T}));
}

Envelope Envelope::ramp(double tau1, double y1, double tau2, double y2, double T) {
  check_ramp(tau1, tau2, T);
  return Envelope(make(RampNode{tau1, y1, tau2, y2, T}));
}

Envelope Envelope::shifted(double t0) const { return Envelope(make(ShiftNode{t0, node_})); }
Envelope Envelope::scaled(double k) const { return Envelope(make(ScaleNode{k, node_})); }
Envelope Envelope::squared() const { return Envelope(make(SquareNode{node_})); }

Envelope operator+(const Envelope& a, const Envelope& b) {
  return Envelope(make(SumNode{{a.node_, b.node_}}));
}

double Envelope::operator()(double t) const { return eval(node_, t); }
double Envelope::derivative(double t) const { return eval_d(node_, t); }
bool Envelope::is_zero() const { return zero(node_); }
std::string Envelope::to_string() const { return render(node_); }
Envelope Envelope::parse(std::string_view text) { return Envelope(Parser(text).parse_all()); }

// ---------------------------------------------------------------------------
// Schedules

std::string PulseSchedule::serialize() const {
  std::ostringstream os;
  os << "kind = " << kind << '\n'
     << "total_time = " << num(total_time) << '\n'
     << "omega_E = " << num(omega_E) << '\n'
     << "omega_B = " << num(omega_B) << '\n'
     << "dE = " << dE.to_string() << '\n'
     << "Ea = " << Ea.to_string() << '\n'
     << "Ba = " << Ba.to_string() << '\n';
  return os.str();
}

PulseSchedule PulseSchedule::deserialize(std::string_view text) {
  PulseSchedule s;
  bool seen[7] = {};
  std::istringstream is{std::string(text)};
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      if (line.find_first_not_of(" \t\r") != std::string::npos)
        throw std::invalid_argument("schedule: malformed line '" + line + "'");
      continue;
    }
    auto trim = [](std::string x) {
      const auto b = x.find_first_not_of(" \t\r");
      const auto e = x.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : x.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "kind") { s.kind = value; seen[0] = true; }
    else if (key == "total_time") { s.total_time = std::stod(value); seen[1] = true; }
    else if (key == "omega_E") { s.omega_E = std::stod(value); seen[2] = true; }
    else if (key == "omega_B") { s.omega_B = std::stod(value); seen[3] = true; }
    else if (key == "dE") { s.dE = Envelope::parse(value); seen[4] = true; }
    else if (key == "Ea") { s.Ea = Envelope::parse(value); seen[5] = true; }
    else if (key == "Ba") { s.Ba = Envelope::parse(value); seen[6] = true; }
    else throw std::invalid_argument("schedule: unknown key '" + key + "'");
  }
  static const char* names[7] = {"kind", "total_time", "omega_E", "omega_B", "dE", "Ea", "Ba"};
  for (int i = 0; i < 7; ++i)
    if (!seen[i]) throw std::invalid_argument(std::string("schedule: missing key '") + names[i] + "'");
  if (!(s.total_time > 0.0)) throw std::invalid_argument("schedule: total_time must be positive");
  return s;
}

void check_schedule_invariants(const SystemParams& params, const PulseSchedule& s) {
  const double T = s.total_time;
  const double tol = 1e-9 * std::max(1.0, std::abs(params.dE_idle));
  if (std::abs(s.dE(0.0) - params.dE_idle) > tol || std::abs(s.dE(T) - params.dE_idle) > tol)
    throw std::invalid_argument("schedule '" + s.kind + "' does not start and end at dE_idle");
  if (std::abs(s.Ea(0.0)) > 1e-9 || std::abs(s.Ea(T)) > 1e-9 || std::abs(s.Ba(0.0)) > 1e-12 ||
      std::abs(s.Ba(T)) > 1e-12)
    throw std::invalid_argument("schedule '" + s.kind + "' has AC fields on at an endpoint");
}

double two_photon_crossing_probability(const SystemParams& params, const PulseSchedule& s, double t) {
  const double k = params.field_coupling();
  const double dE = s.dE(t);
  const double eps = charge_splitting(params, dE);
  const double omega_x = s.Ea(t) * k * params.Vt / (2.0 * eps);
  const double omega_z = s.Ea(t) * k * k * dE / (2.0 * eps);
  const double g = omega_x * omega_z / s.omega_E;
  const double sweep_rate = std::abs(k * k * dE / eps * s.dE.derivative(t));
  if (sweep_rate == 0.0) return g == 0.0 ? 0.0 : 1.0;
  return std::min(1.0, kTwoPi * g * g / sweep_rate);
}

bool two_photon_resonance_crossed(const SystemParams& params, const PulseSchedule& s, int samples,
                                  double threshold) {
  if (s.Ea.is_zero()) return false;
  double prev = 0.0;
  bool have_prev = false;
  for (int k = 0; k <= samples; ++k) {
    const double t = s.total_time * k / samples;
    if (s.Ea(t) == 0.0) {
      have_prev = false;
      continue;
    }
    const double gap = charge_splitting(params, s.dE(t)) - 2.0 * s.omega_E;
    if (have_prev && (gap == 0.0 || (gap > 0.0) != (prev > 0.0))) {
      const double prob = two_photon_crossing_probability(params, s, t);
      if (prob > threshold) {
        warn("schedule '" + s.kind + "' crosses the two-photon resonance eps0 = 2 wE near dE = " +
             num(s.dE(t)) + " V/m while the AC electric field is on (transfer probability " +
             num(prob) + ")");
        return true;
      }
    }
    prev = gap;
    have_prev = true;
  }
  return false;
}

namespace {
// Rotating-frame reference frequencies for schedules without AC drive.
void set_idle_frame(const SystemParams& p, PulseSchedule& s) {
  s.omega_E = charge_splitting(p, p.dE_idle);
  s.omega_B = p.electron_zeeman() - 0.25 * p.hyperfine_A;
}
}  // namespace

PulseSchedule make_rz_schedule(const SystemParams& p, double T) {
  if (!(T > 0.0)) throw std::invalid_argument("make_rz_schedule: T must be positive");
  const double tau = std::min(5e-9, 0.5 * T);
  const double depth = 2e4 * std::min(1.0, T / 10e-9);
  PulseSchedule s;
  s.kind = "rz";
  s.total_time = T;
  s.dE = Envelope::constant(p.dE_idle) + Envelope::window(tau, T).scaled(-depth);
  set_idle_frame(p, s);
  return s;
}

PulseSchedule make_echo_rz_schedule(const SystemParams& p, double hold_time, double hold_field,
                                    double ramp_time) {
  if (!(hold_time >= 0.0) || !(ramp_time > 0.0))
    throw std::invalid_argument("make_echo_rz_schedule: need hold_time >= 0 and ramp_time > 0");
  const double T = hold_time + 2.0 * ramp_time;
  PulseSchedule s;
  s.kind = "echo_rz";
  s.total_time = T;
  s.dE = Envelope::constant(p.dE_idle) +
         Envelope::window(ramp_time, T).scaled(hold_field - p.dE_idle);
  set_idle_frame(p, s);
  return s;
}

namespace {
PulseSchedule sweep_like(const SystemParams& p, double lambda, const SweepConfig& c,
                         double start, double end, const char* kind) {
  if (!(lambda >= 0.0 && lambda <= 1.0))
    throw std::invalid_argument("Rx schedule: lambda must lie in [0, 1]");
  const double tau1 = c.setup_time;
  const double tau2 = tau1 + c.sweep_time;
  const double T = 2.0 * tau1 + c.sweep_time;
  PulseSchedule s;
  s.kind = kind;
  s.total_time = T;
  s.dE = Envelope::constant(p.dE_idle) +
         Envelope::ramp(tau1, start - p.dE_idle, tau2, end - p.dE_idle, T);
  const Envelope ac = Envelope::window(tau2 / 5.0, tau2).squared().shifted(tau1);
  s.Ea = ac.scaled(lambda * c.Ea_max);
  s.Ba = ac.scaled(lambda * c.Ba_max);
  s.omega_E = charge_splitting(p, c.omega_E_reference_field) - c.detuning_E;
  s.omega_B = p.electron_zeeman() - 0.25 * p.hyperfine_A - c.detuning_B;
  return s;
}
}  // namespace

PulseSchedule make_rx_sweep_schedule(const SystemParams& p, double lambda, const SweepConfig& c) {
  return sweep_like(p, lambda, c, c.sweep_start, c.sweep_end, "rx_sweep");
}

PulseSchedule make_naive_rx_schedule(const SystemParams& p, double lambda, const SweepConfig& c,
                                     double hold_field) {
  return sweep_like(p, lambda, c, hold_field, hold_field, "rx_naive");
}

PulseSchedule make_cphase_schedule(const SystemParams& p, double T, const CphaseConfig& c) {
  const double tau1 = c.setup_time;
  if (!(T > 2.0 * tau1)) throw std::invalid_argument("make_cphase_schedule: T must exceed 2 tau1");
  const double tau_ac = T - 2.0 * tau1;
  const double tau2 = std::min(c.max_rise_time, 0.5 * tau_ac);
  const double r = T / c.amplitude_time;
  const double e_max = c.E_max * std::min(1.0, r * r);
  PulseSchedule s;
  s.kind = "cphase";
  s.total_time = T;
  s.dE = Envelope::constant(p.dE_idle) +
         Envelope::ramp(tau1, c.hold_field - p.dE_idle, tau1 + tau_ac, c.hold_field - p.dE_idle, T);
  s.Ea = Envelope::window(tau2, tau_ac).shifted(tau1).scaled(e_max);
  s.omega_E = charge_splitting(p, c.hold_field) + 0.25 * p.hyperfine_A -
              0.5 * hyperfine_expectation(p, c.hold_field) + c.detuning + c.omega_E_shift;
  s.omega_B = p.electron_zeeman() - 0.25 * p.hyperfine_A;
  return s;
}

}  // namespace donorq
