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

#include <random>

#include "bvspeed/routing.hpp"
#include "bvspeed/trajectory_backend.hpp"

namespace bvspeed {

/**
 * True iff the noise-free routed circuit reads out b with certainty.
 *
 * Runs one noise-free trajectory with early qubit retirement, so the cost is
 * set by the number of simultaneously live qubits rather than n. Every
 * measurement must be deterministic and the recorded bits must equal b.
 */
inline bool verify_routed(const RoutedCircuit& routed, const OracleSpec& spec) {
  if (routed.circuit.measured.size() != static_cast<std::size_t>(spec.n())) return false;
  if (validate_circuit(routed.circuit)) return false;
  const DeviceModel ideal = DeviceModel::ideal(complete_graph(routed.circuit.num_qubits));
  const NoisyProgram prog = compile_program(routed.circuit, ideal, NoiseConfig::none());
  TrajectorySchedule sched(prog);
  StateVector s(prog.num_qubits);
  std::mt19937_64 rng(0);
  const TrajectoryOutcome o = run_trajectory(sched, s, rng);
  return o.deterministic && o.bits == spec.b;
}

}  // namespace bvspeed
