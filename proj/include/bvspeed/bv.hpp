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
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bvspeed/bitstring.hpp"
#include "bvspeed/circuit.hpp"

namespace bvspeed {

/// Hidden string b for BV-n. Data qubits are logical 0..n-1, the ancilla is logical n.
struct OracleSpec {
  Bitstring b;

  OracleSpec() = default;
  explicit OracleSpec(Bitstring bits) : b(bits) {
    if (b.size() == 0) throw ConfigError("oracle needs at least one data qubit");
  }

  int n() const { return static_cast<int>(b.size()); }
  int ancilla_index() const { return n(); }
  int k() const { return static_cast<int>(b.hamming_weight()); }

  /// Marked data qubits in ascending order.
  std::vector<int> marked() const {
    std::vector<int> out;
    for (int i = 0; i < n(); ++i) {
      if (b[static_cast<std::size_t>(i)]) out.push_back(i);
    }
    return out;
  }

  friend bool operator==(const OracleSpec&, const OracleSpec&) = default;
};

/// Histogram of measured data bitstrings for one oracle.
struct ShotTable {
  OracleSpec oracle;
  std::map<Bitstring, std::uint64_t> counts;
  std::uint64_t total_shots = 0;

  std::uint64_t count(const Bitstring& x) const {
    auto it = counts.find(x);
    return it == counts.end() ? 0 : it->second;
  }

  friend bool operator==(const ShotTable&, const ShotTable&) = default;
};

/// Throws ConfigError if totals disagree or a key has the wrong length.
inline void check_shot_table(const ShotTable& t) {
  std::uint64_t sum = 0;
  for (const auto& [x, c] : t.counts) {
    if (static_cast<int>(x.size()) != t.oracle.n()) {
      throw ConfigError("outcome " + x.to_string() + " has length " + std::to_string(x.size()) + ", expected " +
                        std::to_string(t.oracle.n()));
    }
    sum += c;
  }
  if (sum != t.total_shots) {
    throw ConfigError("counts sum to " + std::to_string(sum) + " but total_shots is " + std::to_string(t.total_shots));
  }
}

/// Unrouted BV circuit on a complete graph with unit gate durations.
inline TimedCircuit bv_logical_circuit(const OracleSpec& spec) {
  const int n = spec.n();
  const int a = spec.ancilla_index();
  TimedCircuit c;
  c.num_qubits = n + 1;
  c.events.push_back(GateEvent::x(a, 0, 1));
  for (int i = 0; i < n; ++i) c.events.push_back(GateEvent::h(i, 0, 1));
  c.events.push_back(GateEvent::h(a, 1, 1));
  Tick t = 2;
  for (int i = 0; i < n; ++i) {
    if (spec.b[static_cast<std::size_t>(i)]) {
      c.events.push_back(GateEvent::cnot(i, a, t, 1));
      c.events.push_back(GateEvent::h(i, t + 1, 1));
      ++t;
    } else {
      c.events.push_back(GateEvent::h(i, 1, 1));
    }
  }
  c.events.push_back(GateEvent::h(a, t, 1));
  for (int i = 0; i < n; ++i) c.measured.push_back(i);
  return c;
}

/// b = 1^k 0^(n-k) for k = 0..n.
inline std::vector<OracleSpec> representative_oracles(int n) {
  if (n < 1) throw ConfigError("representative_oracles: n must be positive");
  std::vector<OracleSpec> out;
  for (int k = 0; k <= n; ++k) {
    out.emplace_back(Bitstring::ones_then_zeros(static_cast<std::size_t>(n), static_cast<std::size_t>(k)));
  }
  return out;
}

/// All 2^n oracles in lexicographic order.
inline std::vector<OracleSpec> all_oracles(int n, int cap = 12) {
  if (n < 1) throw ConfigError("all_oracles: n must be positive");
  if (n > cap) throw CapacityError("all_oracles: n=" + std::to_string(n) + " exceeds cap " + std::to_string(cap));
  std::vector<OracleSpec> out;
  const std::uint64_t count = std::uint64_t{1} << n;
  out.reserve(count);
  for (std::uint64_t v = 0; v < count; ++v) out.emplace_back(Bitstring(static_cast<std::size_t>(n), v));
  return out;
}

/// Marginalizes BV-n counts for b = 1^k 0^(n-k) onto the first m data qubits.
inline ShotTable reduce_counts(const ShotTable& table, int m) {
  const int n = table.oracle.n();
  const int k = table.oracle.k();
  if (table.oracle.b != Bitstring::ones_then_zeros(static_cast<std::size_t>(n), static_cast<std::size_t>(k))) {
    throw ConfigError("reduce_counts: oracle " + table.oracle.b.to_string() + " is not of the form 1^k 0^(n-k)");
  }
  if (m < k) throw ConfigError("reduce_counts: cannot trace out marked qubits (m < k)");
  if (m >= n) throw ConfigError("reduce_counts: target size must be smaller than n");
  ShotTable out;
  out.oracle = OracleSpec(Bitstring::ones_then_zeros(static_cast<std::size_t>(m), static_cast<std::size_t>(k)));
  out.total_shots = table.total_shots;
  for (const auto& [x, c] : table.counts) {
    if (c > 0) out.counts[x.prefix(static_cast<std::size_t>(m))] += c;
  }
  return out;
}

/// Best single-query classical strategy: one bit learned, the rest guessed.
inline double classical_success_prob(int n) {
  if (n < 1) throw ConfigError("classical_success_prob: n must be positive");
  return std::ldexp(1.0, 1 - n);
}

}  // namespace bvspeed
