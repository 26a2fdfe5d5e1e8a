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
#include <cstdint>
#include <numbers>
#include <set>
#include <tuple>
#include <vector>

#include "bvspeed/channels.hpp"
#include "bvspeed/circuit.hpp"
#include "bvspeed/device.hpp"
#include "bvspeed/gates.hpp"

namespace bvspeed {

/// One step of a noisy program. Fields used depend on `op`.
struct Instruction {
  enum class Op : std::uint8_t {
    Unitary1,  ///< u on q0
    Cnot,      ///< control q0, target q1
    Depol1,    ///< a = p
    Depol2,    ///< a = p on (q0, q1)
    Relax,     ///< a = gamma, b = p_z
    Detune,    ///< a = seconds of free precession under the static field
    ZZ,        ///< a = theta for exp(-i theta ZZ/2)
  };

  Op op = Op::Unitary1;
  int q0 = 0;
  int q1 = -1;
  Mat2 u = Mat2::Identity();
  double a = 0.0;
  double b = 0.0;

  bool multi() const { return op == Op::Cnot || op == Op::Depol2 || op == Op::ZZ; }
  bool stochastic() const { return op == Op::Depol1 || op == Op::Depol2 || op == Op::Relax; }
};

/// A circuit lowered to a time-ordered list of unitaries and channels.
struct NoisyProgram {
  int num_qubits = 0;
  std::vector<Instruction> instructions;
  std::vector<int> measured;
  std::vector<ReadoutConfusion> confusion;  ///< per measured bit
  std::vector<int> active;                  ///< qubits touched by any instruction, ascending
  double detuning_sigma = 0.0;

  bool has_stochastic() const {
    return std::any_of(instructions.begin(), instructions.end(), [](const Instruction& i) { return i.stochastic(); });
  }
  std::vector<int> detuned_qubits() const {
    std::set<int> s;
    for (const auto& i : instructions) {
      if (i.op == Instruction::Op::Detune) s.insert(i.q0);
    }
    return {s.begin(), s.end()};
  }
  bool has_readout_error() const {
    return std::any_of(confusion.begin(), confusion.end(),
                       [](const ReadoutConfusion& c) { return c.p1_given0 > 0 || c.p0_given1 > 0; });
  }
};

namespace detail {

inline Instruction gate_unitary(const GateEvent& e, const NoiseConfig& noise) {
  Instruction in;
  in.q0 = e.qubit(0);
  switch (e.kind()) {
    case GateKind::H: in.u = gates::h(); break;
    case GateKind::X: in.u = gates::x(); break;
    case GateKind::PhasedPi: {
      const double eps = noise.flip_on() ? noise.flip_angle_eps : 0.0;
      in.u = gates::phased_rotation(e.phase(), std::numbers::pi * (1 + eps));
      break;
    }
    case GateKind::CNOT:
      in.op = Instruction::Op::Cnot;
      in.q1 = e.qubit(1);
      break;
    case GateKind::Delay: break;
  }
  return in;
}

}  // namespace detail

/**
 * Lowers a timed circuit onto the device noise model.
 *
 * Every gate is followed by its depolarizing channel. Amplitude damping and
 * dephasing run over each qubit's whole timeline from its first event to the
 * end of the last gate, gate durations included. Static detuning and ZZ act
 * only while a qubit is idle. ZZ couples pairs of device-adjacent qubits that
 * both appear in the circuit.
 */
inline NoisyProgram compile_program(const TimedCircuit& c, const DeviceModel& device, const NoiseConfig& noise) {
  if (auto v = validate_circuit(c)) throw ConfigError("invalid circuit: " + v->message);
  if (c.num_qubits > device.num_qubits()) throw ConfigError("circuit has more qubits than the device");
  noise.validate();
  using Op = Instruction::Op;

  NoisyProgram prog;
  prog.num_qubits = c.num_qubits;
  prog.measured = c.measured;
  prog.detuning_sigma = noise.detuning_on() ? noise.detuning_sigma : 0.0;
  for (int q : c.measured) {
    prog.confusion.push_back(noise.readout ? device.readout[static_cast<std::size_t>(q)] : ReadoutConfusion{});
  }

  std::vector<std::size_t> order(c.events.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return c.events[x].start() < c.events[y].start(); });

  const Tick end = c.gate_end();
  const auto nq = static_cast<std::size_t>(c.num_qubits);
  std::vector<std::vector<std::size_t>> busy(nq);  // non-delay events per qubit, time order
  for (std::size_t i : order) {
    if (c.events[i].kind() == GateKind::Delay) continue;
    for (int q : c.events[i].qubits()) busy[static_cast<std::size_t>(q)].push_back(i);
  }
  std::vector<char> in_circuit(nq, 0);
  for (const auto& e : c.events) {
    for (int q : e.qubits()) in_circuit[static_cast<std::size_t>(q)] = 1;
  }

  auto relax = [&](int q, Tick ticks, std::vector<Instruction>& out) {
    if (!noise.decoherence || ticks <= 0) return;
    const IdleParams p = idle_params(device.t1_us[static_cast<std::size_t>(q)] * 1e-6,
                                     device.t2_us[static_cast<std::size_t>(q)] * 1e-6, device.dt.to_seconds(ticks));
    if (p.trivial()) return;
    Instruction in;
    in.op = Op::Relax;
    in.q0 = q;
    in.a = p.gamma;
    in.b = p.p_z;
    out.push_back(in);
  };
  auto detune = [&](int q, Tick ticks, std::vector<Instruction>& out) {
    if (!noise.detuning_on() || ticks <= 0) return;
    Instruction in;
    in.op = Op::Detune;
    in.q0 = q;
    in.a = device.dt.to_seconds(ticks);
    out.push_back(in);
  };
  auto gate = [&](const GateEvent& e, std::vector<Instruction>& out) {
    out.push_back(detail::gate_unitary(e, noise));
    if (!noise.depolarizing) return;
    const double p = e.arity() == 2 ? device.p2q : device.p1q;
    if (p <= 0) return;
    Instruction d;
    d.op = e.arity() == 2 ? Op::Depol2 : Op::Depol1;
    d.q0 = e.qubit(0);
    if (e.arity() == 2) d.q1 = e.qubit(1);
    d.a = p;
    out.push_back(d);
  };

  auto& out = prog.instructions;
  if (!noise.zz_on()) {
    // Each qubit's idle after a gate is folded into the instructions that follow that gate.
    std::vector<std::size_t> cursor(nq, 0);
    for (std::size_t i : order) {
      const GateEvent& e = c.events[i];
      if (e.kind() == GateKind::Delay) continue;
      gate(e, out);
      for (int q : e.qubits()) {
        auto& pos = cursor[static_cast<std::size_t>(q)];
        const auto& list = busy[static_cast<std::size_t>(q)];
        ++pos;
        const Tick next = pos < list.size() ? c.events[list[pos]].start() : end;
        detune(q, next - e.end(), out);
        relax(q, next - e.start(), out);
      }
    }
  } else {
    std::vector<std::pair<int, int>> pairs;
    for (auto [u, v] : device.graph.edges()) {
      if (u < c.num_qubits && v < c.num_qubits && in_circuit[static_cast<std::size_t>(u)] &&
          in_circuit[static_cast<std::size_t>(v)]) {
        pairs.emplace_back(u, v);
      }
    }
    std::set<Tick> cuts{0, end};
    for (const auto& e : c.events) {
      cuts.insert(std::min(e.start(), end));
      cuts.insert(std::min(e.end(), end));
    }
    std::vector<Tick> bounds(cuts.begin(), cuts.end());
    std::vector<Tick> first_start(nq, end);
    for (std::size_t q = 0; q < nq; ++q) {
      if (!busy[q].empty()) first_start[q] = c.events[busy[q].front()].start();
    }
    std::size_t next_event = 0;
    std::vector<Tick> busy_until(nq, 0);
    for (std::size_t s = 0; s + 1 < bounds.size(); ++s) {
      const Tick t0 = bounds[s];
      const Tick t1 = bounds[s + 1];
      while (next_event < order.size() && c.events[order[next_event]].start() <= t0) {
        const GateEvent& e = c.events[order[next_event++]];
        if (e.kind() == GateKind::Delay) continue;
        gate(e, out);
        for (int q : e.qubits()) {
          relax(q, e.duration(), out);
          busy_until[static_cast<std::size_t>(q)] = e.end();
        }
      }
      auto idle = [&](int q) { return busy_until[static_cast<std::size_t>(q)] <= t0; };
      const Tick dt_slice = t1 - t0;
      for (int q = 0; q < c.num_qubits; ++q) {
        if (idle(q) && t0 >= first_start[static_cast<std::size_t>(q)]) detune(q, dt_slice, out);
      }
      for (auto [u, v] : pairs) {
        if (!idle(u) || !idle(v)) continue;
        Instruction in;
        in.op = Op::ZZ;
        in.q0 = u;
        in.q1 = v;
        in.a = noise.zz_rate * device.dt.to_seconds(dt_slice);
        out.push_back(in);
      }
      for (int q = 0; q < c.num_qubits; ++q) {
        if (idle(q) && t0 >= first_start[static_cast<std::size_t>(q)]) relax(q, dt_slice, out);
      }
    }
  }

  std::set<int> act;
  for (const auto& in : out) {
    act.insert(in.q0);
    if (in.q1 >= 0) act.insert(in.q1);
  }
  prog.active.assign(act.begin(), act.end());
  return prog;
}

}  // namespace bvspeed
