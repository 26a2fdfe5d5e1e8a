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
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "bvspeed/bv.hpp"
#include "bvspeed/channels.hpp"
#include "bvspeed/program.hpp"
#include "bvspeed/rng.hpp"
#include "bvspeed/state.hpp"

namespace bvspeed {

struct TrajectoryPlan {
  std::uint64_t shots = 1000;
  std::uint64_t master_seed = 0;
  std::uint64_t oracle_id = 0;
  int max_live_qubits = 21;  ///< memory guard on simultaneously stored qubits
  bool assert_normalized = false;
};

/**
 * Execution order for the trajectory engine. A qubit joins the register at its
 * first multi-qubit instruction, after its deferred single-qubit ones, and
 * leaves, by a Z measurement, once its last multi-qubit instruction and all its
 * trailing single-qubit instructions have run. A measured qubit's outcome is
 * its readout; any other qubit is traced out.
 */
class TrajectorySchedule {
 public:
  explicit TrajectorySchedule(const NoisyProgram& prog) : prog_(prog) {
    const auto nq = static_cast<std::size_t>(prog.num_qubits);
    per_qubit_.assign(nq, {});
    const auto& ins = prog.instructions;
    std::vector<long> last_multi(nq, -1);
    for (std::size_t i = 0; i < ins.size(); ++i) {
      per_qubit_[static_cast<std::size_t>(ins[i].q0)].push_back(i);
      if (ins[i].q1 >= 0) per_qubit_[static_cast<std::size_t>(ins[i].q1)].push_back(i);
      if (ins[i].multi()) {
        last_multi[static_cast<std::size_t>(ins[i].q0)] = static_cast<long>(i);
        last_multi[static_cast<std::size_t>(ins[i].q1)] = static_cast<long>(i);
      }
    }
    bit_of_.assign(nq, -1);
    for (std::size_t b = 0; b < prog.measured.size(); ++b) bit_of_[static_cast<std::size_t>(prog.measured[b])] = static_cast<int>(b);

    // Steps: (instruction, qubits to retire after it). Single-qubit-only
    // qubits run start to finish at their first instruction.
    std::vector<char> done(ins.size(), 0);
    std::vector<char> live(nq, 0);
    int live_count = 0;
    for (std::size_t i = 0; i < ins.size(); ++i) {
      if (done[i]) continue;
      // Leading single-qubit work commutes with everything else, so it waits
      // for the qubit's first multi-qubit instruction.
      if (!ins[i].multi() && !live[static_cast<std::size_t>(ins[i].q0)] &&
          last_multi[static_cast<std::size_t>(ins[i].q0)] >= 0) {
        continue;
      }
      for (int q : {ins[i].q0, ins[i].q1}) {
        if (q < 0 || live[static_cast<std::size_t>(q)]) continue;
        live[static_cast<std::size_t>(q)] = 1;
        steps_.push_back({Step::Kind::Activate, q});
        peak_ = std::max(peak_, ++live_count);
        for (std::size_t j : per_qubit_[static_cast<std::size_t>(q)]) {
          if (j >= i) break;
          if (done[j]) continue;
          steps_.push_back({Step::Kind::Apply, static_cast<int>(j)});
          done[j] = 1;
        }
        if (last_multi[static_cast<std::size_t>(q)] < 0) {
          for (std::size_t j : per_qubit_[static_cast<std::size_t>(q)]) {
            steps_.push_back({Step::Kind::Apply, static_cast<int>(j)});
            done[j] = 1;
          }
          steps_.push_back({Step::Kind::Retire, q});
          live[static_cast<std::size_t>(q)] = 0;
          --live_count;
        }
      }
      if (done[i]) continue;
      steps_.push_back({Step::Kind::Apply, static_cast<int>(i)});
      done[i] = 1;
      if (!ins[i].multi()) continue;
      for (int q : {ins[i].q0, ins[i].q1}) {
        if (last_multi[static_cast<std::size_t>(q)] != static_cast<long>(i)) continue;
        for (std::size_t j : per_qubit_[static_cast<std::size_t>(q)]) {
          if (j > i && !done[j]) {
            steps_.push_back({Step::Kind::Apply, static_cast<int>(j)});
            done[j] = 1;
          }
        }
        steps_.push_back({Step::Kind::Retire, q});
        live[static_cast<std::size_t>(q)] = 0;
        --live_count;
      }
    }
  }

  int peak_live_qubits() const { return peak_; }

  struct Step {
    enum class Kind : std::uint8_t { Activate, Apply, Retire };
    Kind kind;
    int arg;
  };
  const std::vector<Step>& steps() const { return steps_; }
  const NoisyProgram& program() const { return prog_; }
  /// Data bit read from qubit q, or -1.
  int bit_of(int q) const { return bit_of_[static_cast<std::size_t>(q)]; }

 private:
  const NoisyProgram& prog_;
  std::vector<std::vector<std::size_t>> per_qubit_;
  std::vector<int> bit_of_;
  std::vector<Step> steps_;
  int peak_ = 0;
};

/// Outcome of one trajectory before readout confusion. Also reports whether
/// every measurement was deterministic (probability 0 or 1 within tol).
struct TrajectoryOutcome {
  Bitstring bits;
  bool deterministic = true;
};

namespace detail {

inline void apply_noisy(StateVector& s, const Instruction& in, const std::vector<double>& delta, std::mt19937_64& rng) {
  using Op = Instruction::Op;
  switch (in.op) {
    case Op::Unitary1: s.apply1(in.q0, in.u); break;
    case Op::Cnot: s.apply_cnot(in.q0, in.q1); break;
    case Op::Detune: {
      const double th = delta[static_cast<std::size_t>(in.q0)] * in.a;
      if (th != 0) s.apply_diag1(in.q0, std::exp(cd(0, -th / 2)), std::exp(cd(0, th / 2)));
      break;
    }
    case Op::ZZ: s.apply_zz(in.q0, in.q1, in.a); break;
    case Op::Depol1:
      if (uniform01(rng) < in.a) s.apply_pauli(in.q0, 1 + static_cast<int>(rng() % 3));
      break;
    case Op::Depol2:
      if (uniform01(rng) < in.a) {
        const int k = 1 + static_cast<int>(rng() % 15);
        s.apply_pauli(in.q0, k / 4);
        s.apply_pauli(in.q1, k % 4);
      }
      break;
    case Op::Relax: {
      if (in.a > 0) {
        const double p1 = s.prob1(in.q0);
        const double p_jump = in.a * p1;
        if (uniform01(rng) < p_jump) {
          s.lower(in.q0);
          s.scale(1.0 / std::sqrt(p1));
        } else {
          s.apply_diag1(in.q0, 1.0, std::sqrt(1 - in.a));
          s.scale(1.0 / std::sqrt(1 - p_jump));
        }
      }
      if (in.b > 0 && uniform01(rng) < in.b) s.apply_diag1(in.q0, 1.0, -1.0);
      break;
    }
  }
}

}  // namespace detail

/// Runs one trajectory with its own random stream.
inline TrajectoryOutcome run_trajectory(const TrajectorySchedule& sched, StateVector& s, std::mt19937_64& rng,
                                        bool assert_normalized = false, double det_tol = 1e-9) {
  const NoisyProgram& prog = sched.program();
  const std::vector<double> delta = [&] {
    std::vector<double> d(static_cast<std::size_t>(prog.num_qubits), 0.0);
    if (prog.detuning_sigma > 0) {
      for (auto& x : d) x = prog.detuning_sigma * standard_normal(rng);
    }
    return d;
  }();
  TrajectoryOutcome out;
  out.bits = Bitstring(prog.measured.size());
  s.reset();
  for (const auto& step : sched.steps()) {
    switch (step.kind) {
      case TrajectorySchedule::Step::Kind::Activate: s.activate(step.arg); break;
      case TrajectorySchedule::Step::Kind::Apply:
        detail::apply_noisy(s, prog.instructions[static_cast<std::size_t>(step.arg)], delta, rng);
        if (assert_normalized && std::abs(s.norm2() - 1) > 1e-10) {
          throw Error("trajectory state lost normalization at instruction " + std::to_string(step.arg));
        }
        break;
      case TrajectorySchedule::Step::Kind::Retire: {
        const double p1 = std::clamp(s.prob1(step.arg), 0.0, 1.0);
        if (p1 > det_tol && p1 < 1 - det_tol) out.deterministic = false;
        const int bit = uniform01(rng) < p1 ? 1 : 0;
        s.collapse_and_remove(step.arg, bit, bit ? p1 : 1 - p1);
        const int b = sched.bit_of(step.arg);
        if (b >= 0 && bit) out.bits = out.bits.with_bit(static_cast<std::size_t>(b), true);
        break;
      }
    }
  }
  return out;
}

/// Monte Carlo shots; shot i draws only from stream (master_seed, oracle_id, i).
inline ShotTable simulate_shots(const NoisyProgram& prog, const OracleSpec& oracle, const TrajectoryPlan& plan) {
  if (static_cast<int>(prog.measured.size()) != oracle.n()) {
    throw ConfigError("simulate_shots: program measures " + std::to_string(prog.measured.size()) + " bits, oracle has " +
                      std::to_string(oracle.n()));
  }
  TrajectorySchedule sched(prog);
  if (sched.peak_live_qubits() > plan.max_live_qubits) {
    throw CapacityError("trajectory backend: " + std::to_string(sched.peak_live_qubits()) +
                        " simultaneously live qubits exceed the cap of " + std::to_string(plan.max_live_qubits));
  }
  StateVector s(prog.num_qubits);
  s.reserve_qubits(sched.peak_live_qubits());
  std::map<std::uint64_t, std::uint64_t> hist;
  for (std::uint64_t shot = 0; shot < plan.shots; ++shot) {
    auto rng = make_stream(plan.master_seed, StreamPurpose::Simulation, plan.oracle_id, shot);
    TrajectoryOutcome o = run_trajectory(sched, s, rng, plan.assert_normalized);
    Bitstring read = readout_sample(o.bits, prog.confusion, rng);
    ++hist[read.value()];
  }
  ShotTable t;
  t.oracle = oracle;
  t.total_shots = plan.shots;
  for (auto [v, c] : hist) t.counts[Bitstring(oracle.b.size(), v)] = c;
  return t;
}

inline ShotTable simulate_shots(const TimedCircuit& c, const DeviceModel& device, const NoiseConfig& noise,
                                const OracleSpec& oracle, const TrajectoryPlan& plan) {
  return simulate_shots(compile_program(c, device, noise), oracle, plan);
}

/// Stable numeric id of an oracle for stream derivation.
inline std::uint64_t oracle_id(const OracleSpec& o) {
  return splitmix64(static_cast<std::uint64_t>(o.n()) * 0x100000001b3ULL ^ o.b.value());
}

}  // namespace bvspeed
