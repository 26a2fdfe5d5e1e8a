// Copyright 2026 The bvspeed Authors
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

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bvspeed/errors.hpp"

namespace bvspeed {

/// Integer time in units of the device sampling period dt.
using Tick = std::int64_t;

/// Sampling period as an exact rational number of nanoseconds.
struct TimeStep {
  std::int64_t num_ns = 2;
  std::int64_t den_ns = 9;

  double seconds() const { return static_cast<double>(num_ns) / (static_cast<double>(den_ns) * 1e9); }
  double to_seconds(Tick t) const {
    return static_cast<double>(t) * static_cast<double>(num_ns) / (static_cast<double>(den_ns) * 1e9);
  }
  friend bool operator==(const TimeStep&, const TimeStep&) = default;
};

enum class GateKind { H, X, CNOT, PhasedPi, Delay };

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::H: return "H";
    case GateKind::X: return "X";
    case GateKind::CNOT: return "CNOT";
    case GateKind::PhasedPi: return "PHASED_PI";
    case GateKind::Delay: return "DELAY";
  }
  return "?";
}

inline std::optional<GateKind> parse_gate_name(const std::string& s) {
  for (GateKind k : {GateKind::H, GateKind::X, GateKind::CNOT, GateKind::PhasedPi, GateKind::Delay}) {
    if (s == gate_name(k)) return k;
  }
  return std::nullopt;
}

inline double wrap_phase(double phi) {
  constexpr double two_pi = 2 * std::numbers::pi;
  double r = std::fmod(phi, two_pi);
  if (r < 0) r += two_pi;
  if (r >= two_pi) r = 0;
  return r;
}

/**
 * One timed gate. CNOT stores (control, target); everything else acts on a
 * single qubit. Construct through the named factories, which enforce arity
 * and duration rules.
 */
class GateEvent {
 public:
  static GateEvent h(int q, Tick start, Tick duration) { return {GateKind::H, q, -1, 0.0, start, duration}; }
  static GateEvent x(int q, Tick start, Tick duration) { return {GateKind::X, q, -1, 0.0, start, duration}; }
  static GateEvent cnot(int control, int target, Tick start, Tick duration) {
    return {GateKind::CNOT, control, target, 0.0, start, duration};
  }
  static GateEvent phased_pi(int q, double phase, Tick start, Tick duration) {
    return {GateKind::PhasedPi, q, -1, wrap_phase(phase), start, duration};
  }
  static GateEvent delay(int q, Tick start, Tick duration) { return {GateKind::Delay, q, -1, 0.0, start, duration}; }

  GateKind kind() const { return kind_; }
  int arity() const { return kind_ == GateKind::CNOT ? 2 : 1; }
  std::span<const int> qubits() const { return {qubits_.data(), static_cast<std::size_t>(arity())}; }
  int qubit(int i = 0) const { return qubits_.at(static_cast<std::size_t>(i)); }
  double phase() const { return phase_; }
  Tick start() const { return start_; }
  Tick duration() const { return duration_; }
  Tick end() const { return start_ + duration_; }
  bool acts_on(int q) const { return qubits_[0] == q || (arity() == 2 && qubits_[1] == q); }

  GateEvent shifted_to(Tick start) const {
    GateEvent e = *this;
    e.start_ = start;
    return e;
  }

  friend bool operator==(const GateEvent&, const GateEvent&) = default;

 private:
  GateEvent(GateKind k, int q0, int q1, double phase, Tick start, Tick duration)
      : kind_(k), qubits_{q0, q1}, phase_(phase), start_(start), duration_(duration) {
    if (k == GateKind::CNOT && q0 == q1) throw ConfigError("CNOT needs two distinct qubits");
    if (q0 < 0 || (k == GateKind::CNOT && q1 < 0)) throw ConfigError("negative qubit index");
    if (start < 0) throw ConfigError("negative event start");
    if (k == GateKind::Delay ? duration < 0 : duration <= 0) {
      throw ConfigError(std::string("invalid duration for ") + gate_name(k));
    }
  }

  GateKind kind_;
  std::array<int, 2> qubits_;
  double phase_;
  Tick start_;
  Tick duration_;
};

/// A scheduled circuit. `measured[i]` is the physical qubit read out as data bit i.
struct TimedCircuit {
  int num_qubits = 0;
  std::vector<GateEvent> events;
  Tick readout_duration = 0;
  TimeStep dt;
  std::vector<int> measured;

  /// End of the last gate, excluding readout.
  Tick gate_end() const {
    Tick t = 0;
    for (const auto& e : events) t = std::max(t, e.end());
    return t;
  }

  std::size_t count(GateKind k) const {
    return static_cast<std::size_t>(
        std::count_if(events.begin(), events.end(), [k](const GateEvent& e) { return e.kind() == k; }));
  }

  /// Events touching q, sorted by start time.
  std::vector<GateEvent> events_on(int q) const {
    std::vector<GateEvent> out;
    for (const auto& e : events) {
      if (e.acts_on(q)) out.push_back(e);
    }
    std::stable_sort(out.begin(), out.end(), [](const GateEvent& a, const GateEvent& b) { return a.start() < b.start(); });
    return out;
  }

  friend bool operator==(const TimedCircuit&, const TimedCircuit&) = default;
};

struct CircuitViolation {
  int qubit = -1;
  std::vector<std::size_t> events;
  std::string message;
};

/// First overlap, out-of-range qubit or bad measurement record, if any.
inline std::optional<CircuitViolation> validate_circuit(const TimedCircuit& c) {
  if (c.num_qubits < 0) return CircuitViolation{-1, {}, "negative qubit count"};
  for (std::size_t i = 0; i < c.events.size(); ++i) {
    for (int q : c.events[i].qubits()) {
      if (q >= c.num_qubits) {
        return CircuitViolation{q, {i}, "qubit " + std::to_string(q) + " out of range in event " + std::to_string(i)};
      }
    }
  }
  std::vector<std::vector<std::size_t>> per_qubit(static_cast<std::size_t>(c.num_qubits));
  for (std::size_t i = 0; i < c.events.size(); ++i) {
    for (int q : c.events[i].qubits()) per_qubit[static_cast<std::size_t>(q)].push_back(i);
  }
  for (int q = 0; q < c.num_qubits; ++q) {
    auto& idx = per_qubit[static_cast<std::size_t>(q)];
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return c.events[a].start() < c.events[b].start();
    });
    for (std::size_t j = 1; j < idx.size(); ++j) {
      const auto& prev = c.events[idx[j - 1]];
      const auto& cur = c.events[idx[j]];
      // Zero-length delays occupy no time.
      if (prev.duration() == 0 || cur.duration() == 0) continue;
      if (cur.start() < prev.end()) {
        return CircuitViolation{q, {idx[j - 1], idx[j]},
                                "overlapping events " + std::to_string(idx[j - 1]) + " and " +
                                    std::to_string(idx[j]) + " on qubit " + std::to_string(q)};
      }
    }
  }
  std::vector<bool> seen(static_cast<std::size_t>(c.num_qubits), false);
  for (int q : c.measured) {
    if (q < 0 || q >= c.num_qubits) return CircuitViolation{q, {}, "measured qubit " + std::to_string(q) + " out of range"};
    if (seen[static_cast<std::size_t>(q)]) return CircuitViolation{q, {}, "qubit " + std::to_string(q) + " measured twice"};
    seen[static_cast<std::size_t>(q)] = true;
  }
  if (c.readout_duration < 0) return CircuitViolation{-1, {}, "negative readout duration"};
  return std::nullopt;
}

/// Last gate end plus readout, in dt.
inline Tick circuit_duration(const TimedCircuit& c) { return c.gate_end() + c.readout_duration; }

/// t_r(n) = c * tau_2q * n + tau_0, with optional measured overrides.
struct DurationModel {
  double c = 1.0;
  double tau_2q = 0.0;  ///< seconds
  double tau_0 = 0.0;   ///< seconds
  std::map<int, double> exact_table;

  double slope() const { return c * tau_2q; }
};

inline double run_time(int n, const DurationModel& m) {
  if (n < 0) throw ConfigError("run_time: negative problem size");
  if (auto it = m.exact_table.find(n); it != m.exact_table.end()) return it->second;
  return m.slope() * n + m.tau_0;
}

/// Checks that t_r(n) is strictly increasing over [0, n_max].
inline bool duration_model_increasing(const DurationModel& m, int n_max) {
  for (int n = 1; n <= n_max; ++n) {
    if (!(run_time(n, m) > run_time(n - 1, m))) return false;
  }
  return true;
}

}  // namespace bvspeed
