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

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "bvspeed/circuit.hpp"
#include "bvspeed/coupling_graph.hpp"
#include "bvspeed/errors.hpp"

namespace bvspeed {

/// Gate and readout durations in dt. A zero dd_pulse means "same as gate_1q".
struct GateDurations {
  Tick gate_1q = 1;
  Tick gate_2q = 1;
  Tick readout = 0;
  Tick dd_pulse = 0;

  Tick pulse() const { return dd_pulse > 0 ? dd_pulse : gate_1q; }
  friend bool operator==(const GateDurations&, const GateDurations&) = default;
};

struct ReadoutConfusion {
  double p1_given0 = 0.0;
  double p0_given1 = 0.0;
  friend bool operator==(const ReadoutConfusion&, const ReadoutConfusion&) = default;
};

/// Physical device description. T1/T2 are per physical qubit in microseconds;
/// +inf disables the corresponding decay.
struct DeviceModel {
  std::string name;
  CouplingGraph graph;
  std::vector<double> t1_us;
  std::vector<double> t2_us;
  GateDurations durations;
  double p1q = 0.0;
  double p2q = 0.0;
  std::vector<ReadoutConfusion> readout;
  TimeStep dt;

  /// Uniform parameters on every physical qubit.
  static DeviceModel homogeneous(std::string name, CouplingGraph graph, double t1_us, double t2_us, GateDurations d,
                                 double p1q, double p2q, ReadoutConfusion ro, TimeStep dt = {}) {
    DeviceModel m;
    m.name = std::move(name);
    const auto n = static_cast<std::size_t>(graph.num_physical());
    m.graph = std::move(graph);
    m.t1_us.assign(n, t1_us);
    m.t2_us.assign(n, t2_us);
    m.durations = d;
    m.p1q = p1q;
    m.p2q = p2q;
    m.readout.assign(n, ro);
    m.dt = dt;
    m.validate();
    return m;
  }

  /// Ideal device on `graph`: no decay, no gate or readout errors.
  static DeviceModel ideal(CouplingGraph graph, GateDurations d = {}) {
    const double inf = std::numeric_limits<double>::infinity();
    return homogeneous("ideal", std::move(graph), inf, inf, d, 0.0, 0.0, {});
  }

  int num_qubits() const { return graph.num_physical(); }

  void validate() const {
    const auto n = static_cast<std::size_t>(graph.num_physical());
    if (t1_us.size() != n || t2_us.size() != n || readout.size() != n) {
      throw ConfigError("device '" + name + "': per-qubit tables must have " + std::to_string(n) + " entries");
    }
    auto prob = [&](double p, const std::string& what) {
      if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("device '" + name + "': " + what + " must be in [0,1]");
    };
    for (std::size_t q = 0; q < n; ++q) {
      if (!(t1_us[q] > 0) || !(t2_us[q] > 0)) throw ConfigError("device '" + name + "': T1 and T2 must be positive");
      if (t2_us[q] > 2 * t1_us[q] * (1 + 1e-12)) {
        throw ConfigError("device '" + name + "': T2 > 2*T1 on qubit " + std::to_string(q));
      }
      prob(readout[q].p1_given0, "readout p(1|0)");
      prob(readout[q].p0_given1, "readout p(0|1)");
    }
    prob(p1q, "1q error");
    prob(p2q, "2q error");
    if (durations.gate_1q <= 0 || durations.gate_2q <= 0 || durations.readout < 0 || durations.dd_pulse < 0) {
      throw ConfigError("device '" + name + "': durations must be positive");
    }
    if (dt.num_ns <= 0 || dt.den_ns <= 0) throw ConfigError("device '" + name + "': dt must be positive");
  }
};

/// Coherent and quasi-static noise knobs plus per-channel switches.
struct NoiseConfig {
  double detuning_sigma = 0.0;  ///< rad/s, standard deviation of the static field
  double zz_rate = 0.0;         ///< rad/s per coupled idle pair
  double flip_angle_eps = 0.0;  ///< relative over-rotation of PhasedPi pulses

  bool decoherence = true;
  bool depolarizing = true;
  bool readout = true;
  bool detuning = true;
  bool zz = true;
  bool flip_angle = true;

  static NoiseConfig none() {
    NoiseConfig c;
    c.decoherence = c.depolarizing = c.readout = c.detuning = c.zz = c.flip_angle = false;
    return c;
  }

  bool detuning_on() const { return detuning && detuning_sigma > 0; }
  bool zz_on() const { return zz && zz_rate > 0; }
  bool flip_on() const { return flip_angle && flip_angle_eps != 0; }

  void validate() const {
    if (!(detuning_sigma >= 0) || !(zz_rate >= 0)) throw ConfigError("noise: sigma and zz rate must be nonnegative");
    if (!(std::abs(flip_angle_eps) < 1)) throw ConfigError("noise: |flip_angle_eps| must be below 1");
  }

  friend bool operator==(const NoiseConfig&, const NoiseConfig&) = default;
};

}  // namespace bvspeed
