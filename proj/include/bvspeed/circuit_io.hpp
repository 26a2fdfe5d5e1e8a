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

// Circuit text format, one record per line:
//
//   bvspeed-circuit 1
//   num_qubits 3
//   dt_ns 2/9
//   readout_duration 23400
//   measure 0 1
//   gate H 0 0 180
//   gate CNOT 0,2 180 1935
//   gate PHASED_PI 1 2115 180 1.5707963267948966
//
// Gate fields are kind, qubits, start, duration and (PHASED_PI only) phase.

#include <fstream>
#include <ostream>
#include <sstream>
#include <string>

#include "bvspeed/circuit.hpp"
#include "bvspeed/text.hpp"

namespace bvspeed {

inline void write_circuit(std::ostream& out, const TimedCircuit& c) {
  out << "bvspeed-circuit 1\n";
  out << "num_qubits " << c.num_qubits << "\n";
  out << "dt_ns " << c.dt.num_ns << "/" << c.dt.den_ns << "\n";
  out << "readout_duration " << c.readout_duration << "\n";
  out << "measure";
  for (int q : c.measured) out << " " << q;
  out << "\n";
  for (const auto& e : c.events) {
    out << "gate " << gate_name(e.kind()) << " " << e.qubit(0);
    if (e.arity() == 2) out << "," << e.qubit(1);
    out << " " << e.start() << " " << e.duration();
    if (e.kind() == GateKind::PhasedPi) out << " " << text::format_double(e.phase());
    out << "\n";
  }
}

inline std::string circuit_to_string(const TimedCircuit& c) {
  std::ostringstream os;
  write_circuit(os, c);
  return os.str();
}

inline TimedCircuit read_circuit(std::istream& in, const std::string& source = "<circuit>") {
  text::LineReader r(in, source);
  std::vector<std::string> f;
  if (!r.next(f) || f.size() != 2 || f[0] != "bvspeed-circuit" || f[1] != "1") {
    r.fail("missing 'bvspeed-circuit 1' header");
  }
  TimedCircuit c;
  bool have_nq = false;
  while (r.next(f)) {
    const std::string& key = f[0];
    if (key == "num_qubits") {
      r.expect_fields(f, 2);
      c.num_qubits = static_cast<int>(r.to_int(f[1]));
      have_nq = true;
    } else if (key == "dt_ns") {
      r.expect_fields(f, 2);
      auto slash = f[1].find('/');
      if (slash == std::string::npos) r.fail("dt_ns must be a ratio p/q");
      c.dt.num_ns = r.to_int(f[1].substr(0, slash));
      c.dt.den_ns = r.to_int(f[1].substr(slash + 1));
      if (c.dt.num_ns <= 0 || c.dt.den_ns <= 0) r.fail("dt_ns must be positive");
    } else if (key == "readout_duration") {
      r.expect_fields(f, 2);
      c.readout_duration = r.to_int(f[1]);
    } else if (key == "measure") {
      for (std::size_t i = 1; i < f.size(); ++i) c.measured.push_back(static_cast<int>(r.to_int(f[i])));
    } else if (key == "gate") {
      if (f.size() < 5) r.fail("gate record needs kind, qubits, start, duration");
      auto kind = parse_gate_name(f[1]);
      if (!kind) r.fail("unknown gate kind '" + f[1] + "'");
      const bool phased = *kind == GateKind::PhasedPi;
      r.expect_fields(f, phased ? 6 : 5);
      int q0 = 0;
      int q1 = -1;
      auto comma = f[2].find(',');
      if (comma == std::string::npos) {
        q0 = static_cast<int>(r.to_int(f[2]));
      } else {
        q0 = static_cast<int>(r.to_int(f[2].substr(0, comma)));
        q1 = static_cast<int>(r.to_int(f[2].substr(comma + 1)));
      }
      if ((*kind == GateKind::CNOT) != (q1 >= 0)) r.fail("wrong number of qubits for " + f[1]);
      Tick start = r.to_int(f[3]);
      Tick dur = r.to_int(f[4]);
      try {
        switch (*kind) {
          case GateKind::H: c.events.push_back(GateEvent::h(q0, start, dur)); break;
          case GateKind::X: c.events.push_back(GateEvent::x(q0, start, dur)); break;
          case GateKind::CNOT: c.events.push_back(GateEvent::cnot(q0, q1, start, dur)); break;
          case GateKind::PhasedPi: c.events.push_back(GateEvent::phased_pi(q0, r.to_double(f[5]), start, dur)); break;
          case GateKind::Delay: c.events.push_back(GateEvent::delay(q0, start, dur)); break;
        }
      } catch (const ConfigError& e) {
        r.fail(e.what());
      }
    } else {
      r.fail("unknown record '" + key + "'");
    }
  }
  if (!have_nq) r.fail("missing num_qubits");
  if (auto v = validate_circuit(c)) throw FormatError(source, r.line(), "invalid circuit: " + v->message);
  return c;
}

inline TimedCircuit circuit_from_string(const std::string& s) {
  std::istringstream is(s);
  return read_circuit(is);
}

inline void save_circuit(const std::string& path, const TimedCircuit& c) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write " + path);
  write_circuit(out, c);
}

inline TimedCircuit load_circuit(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open " + path);
  return read_circuit(in, path);
}

}  // namespace bvspeed
