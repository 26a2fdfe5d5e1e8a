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
#include <numbers>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bvspeed/circuit.hpp"
#include "bvspeed/errors.hpp"
#include "bvspeed/gates.hpp"

namespace bvspeed {

/// Ordered phases of a train of phased pi pulses.
struct DDSequence {
  std::string name;
  std::vector<double> phases;

  std::size_t size() const { return phases.size(); }
  friend bool operator==(const DDSequence&, const DDSequence&) = default;
};

/// Universally robust sequence UR_n.
inline DDSequence ur_phases(int n) {
  if (n < 4 || n % 2 != 0) throw ConfigError("UR_n needs an even n >= 4, got " + std::to_string(n));
  constexpr double pi = std::numbers::pi;
  const int m = n / 4;
  const double big_phi = (n % 4 == 0) ? pi / m : 2.0 * m * pi / (2.0 * m + 1.0);
  // phi_2 = pi/2 makes UR_4 = XY4, but for n = 4m+2 it leaves a net Z on the
  // ideal product. Phi/2 closes that family to the identity.
  const double phi2 = (n % 4 == 0) ? pi / 2 : big_phi / 2;
  DDSequence s;
  s.name = "ur" + std::to_string(n);
  for (int k = 1; k <= n; ++k) {
    const double kk = k;
    s.phases.push_back(wrap_phase((kk - 1) * (kk - 2) / 2 * big_phi + (kk - 1) * phi2));
  }
  // Values within rounding of 2*pi are really 0.
  for (double& p : s.phases) {
    if (2 * pi - p < 1e-12) p = 0;
  }
  return s;
}

inline DDSequence xy4() {
  constexpr double pi = std::numbers::pi;
  return DDSequence{"xy4", {0, pi / 2, 0, pi / 2}};
}

/// Parses none | xy4 | ur4 | ur14 | ur18 | ur:<n>. "none" yields nullopt.
inline std::optional<DDSequence> parse_dd_sequence(const std::string& s) {
  if (s == "none") return std::nullopt;
  if (s == "xy4") return xy4();
  std::string digits;
  if (s.rfind("ur:", 0) == 0) {
    digits = s.substr(3);
  } else if (s.rfind("ur", 0) == 0) {
    digits = s.substr(2);
  }
  if (!digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
    return ur_phases(std::stoi(digits));
  }
  throw ConfigError("unknown DD sequence '" + s + "'");
}

/// Ordered product of the pulses, each rotating by pi*(1+eps).
inline Mat2 sequence_product(const DDSequence& s, double eps = 0.0) {
  Mat2 u = Mat2::Identity();
  for (double phi : s.phases) u = gates::phased_rotation(phi, std::numbers::pi * (1 + eps)) * u;
  return u;
}

/// Distance of the ideal product from the identity up to a global phase: 2 - |tr U|.
inline double identity_defect(const DDSequence& s) { return 2.0 - std::abs(sequence_product(s).trace()); }

struct Gap {
  int qubit = 0;
  Tick start = 0;
  Tick end = 0;
  Tick length() const { return end - start; }
  friend bool operator==(const Gap&, const Gap&) = default;
};

struct GapOptions {
  bool leading = false;   ///< include [0, first event)
  bool trailing = false;  ///< include [last event, gate end) for measured qubits
};

/// Maximal idle intervals per qubit, ordered by qubit then time. Delay events count as idle.
inline std::vector<Gap> detect_gaps(const TimedCircuit& c, const GapOptions& opt = {}) {
  std::vector<Gap> gaps;
  const Tick end = c.gate_end();
  std::set<int> measured(c.measured.begin(), c.measured.end());
  for (int q = 0; q < c.num_qubits; ++q) {
    std::vector<std::pair<Tick, Tick>> busy;
    for (const auto& e : c.events) {
      if (e.kind() != GateKind::Delay && e.acts_on(q)) busy.emplace_back(e.start(), e.end());
    }
    if (busy.empty()) continue;
    std::sort(busy.begin(), busy.end());
    if (opt.leading && busy.front().first > 0) gaps.push_back({q, 0, busy.front().first});
    Tick cursor = busy.front().second;
    for (std::size_t i = 1; i < busy.size(); ++i) {
      if (busy[i].first > cursor) gaps.push_back({q, cursor, busy[i].first});
      cursor = std::max(cursor, busy[i].second);
    }
    if (opt.trailing && measured.count(q) && end > cursor) gaps.push_back({q, cursor, end});
  }
  return gaps;
}

enum class DDFallback { Ladder, Idle };

struct GapSchedule {
  Gap gap;
  std::vector<Tick> pulse_starts;
  DDSequence sequence;
};

struct DDOptions {
  Tick pulse_duration = 0;
  DDFallback fallback = DDFallback::Ladder;
  GapOptions gaps;
};

struct DDResult {
  TimedCircuit circuit;
  std::vector<GapSchedule> schedules;
};

/// Starts of n pulses of length d with centers equally spaced over [a, a+L).
inline std::vector<Tick> equal_spacing(Tick a, Tick length, int n, Tick d) {
  std::vector<Tick> s;
  for (int j = 0; j < n; ++j) {
    // floor division; numerator is nonnegative whenever length >= n*d.
    const Tick num = (2 * j + 1) * length - static_cast<Tick>(n) * d;
    s.push_back(a + num / (2 * static_cast<Tick>(n)));
  }
  return s;
}

/// Sequences tried for a gap, longest first.
inline std::vector<DDSequence> fallback_ladder(const DDSequence& seq, DDFallback policy) {
  std::vector<DDSequence> out{seq};
  if (policy == DDFallback::Idle) return out;
  if (seq.name.rfind("ur", 0) == 0) {
    for (int m = static_cast<int>(seq.size()) - 4; m >= 4; m -= 4) out.push_back(ur_phases(m));
  }
  if (out.back().size() > 4) out.push_back(xy4());
  return out;
}

/// Fills every idle gap with one repetition of the longest sequence that fits.
inline DDResult schedule_dd(const TimedCircuit& c, const DDSequence& seq, const DDOptions& opt) {
  if (opt.pulse_duration <= 0) throw ConfigError("DD pulse duration must be positive");
  DDResult r;
  r.circuit = c;
  const auto ladder = fallback_ladder(seq, opt.fallback);
  std::vector<Gap> filled;
  for (const Gap& g : detect_gaps(c, opt.gaps)) {
    for (const auto& s : ladder) {
      const int n = static_cast<int>(s.size());
      if (g.length() < static_cast<Tick>(n) * opt.pulse_duration) continue;
      GapSchedule gs{g, equal_spacing(g.start, g.length(), n, opt.pulse_duration), s};
      for (int j = 0; j < n; ++j) {
        r.circuit.events.push_back(GateEvent::phased_pi(g.qubit, s.phases[static_cast<std::size_t>(j)],
                                                        gs.pulse_starts[static_cast<std::size_t>(j)],
                                                        opt.pulse_duration));
      }
      r.schedules.push_back(std::move(gs));
      filled.push_back(g);
      break;
    }
  }
  // Explicit delays inside a filled gap are superseded by the pulses.
  std::erase_if(r.circuit.events, [&](const GateEvent& e) {
    if (e.kind() != GateKind::Delay) return false;
    return std::any_of(filled.begin(), filled.end(), [&](const Gap& g) {
      return g.qubit == e.qubit() && e.start() < g.end && e.end() > g.start;
    });
  });
  std::stable_sort(r.circuit.events.begin(), r.circuit.events.end(),
                   [](const GateEvent& x, const GateEvent& y) { return x.start() < y.start(); });
  return r;
}

}  // namespace bvspeed
