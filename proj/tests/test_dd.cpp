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


#include <cmath>
#include <numbers>
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "bvspeed/dd.hpp"
#include "bvspeed/exact_backend.hpp"
#include "bvspeed/routing.hpp"
#include "bvspeed/trajectory_backend.hpp"

using namespace bvspeed;
using Catch::Approx;
constexpr double pi = std::numbers::pi;

namespace {

GateDurations montreal_durations() { return GateDurations{180, 1935, 23400, 180}; }

DeviceModel ideal_hex() { return DeviceModel::ideal(heavy_hex_27(), montreal_durations()); }

/// Centers of consecutive pulses, doubled to stay integral.
std::vector<Tick> doubled_centers(const GapSchedule& s, Tick d) {
  std::vector<Tick> c;
  for (Tick t : s.pulse_starts) c.push_back(2 * t + d);
  return c;
}

void check_spacing(const GapSchedule& s, Tick d) {
  const auto& p = s.pulse_starts;
  REQUIRE(!p.empty());
  CHECK(p.front() >= s.gap.start);
  CHECK(p.back() + d <= s.gap.end);
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] >= p[i - 1] + d);
  auto c = doubled_centers(s, d);
  for (std::size_t i = 2; i < c.size(); ++i) {
    // Adjacent center spacings differ by at most 1 dt.
    CHECK(std::abs((c[i] - c[i - 1]) - (c[i - 1] - c[i - 2])) <= 2);
  }
}

TimedCircuit one_qubit_idle(Tick idle, Tick d1) {
  TimedCircuit c;
  c.num_qubits = 1;
  c.events = {GateEvent::h(0, 0, d1), GateEvent::h(0, d1 + idle, d1)};
  c.measured = {0};
  return c;
}

}  // namespace

TEST_CASE("UR phases", "[dd]") {
  CHECK(ur_phases(4).phases == std::vector<double>{0, pi / 2, 0, pi / 2});
  CHECK(ur_phases(4).phases == xy4().phases);

  // Frozen from exact rational evaluation, in units of pi/14.
  const std::vector<int> ur14 = {0, 6, 24, 26, 12, 10, 20, 14, 20, 10, 12, 26, 24, 6};
  auto s = ur_phases(14);
  REQUIRE(s.size() == 14);
  for (std::size_t i = 0; i < 14; ++i) CHECK(s.phases[i] == Approx(ur14[i] * pi / 14).margin(1e-12));
  // Phi = 6 pi / 7 is the second difference of the phases.
  CHECK(identity_defect(s) < 1e-10);
  for (std::size_t k = 2; k < 14; ++k) {
    double dd = wrap_phase(s.phases[k] - 2 * s.phases[k - 1] + s.phases[k - 2]);
    CHECK(dd == Approx(6 * pi / 7).margin(1e-12));
  }

  for (int n : {4, 6, 8, 10, 12, 14, 16, 18, 22}) {
    auto u = ur_phases(n);
    CHECK(u.size() == static_cast<std::size_t>(n));
    CHECK(identity_defect(u) < 1e-10);
    for (double p : u.phases) {
      CHECK(p >= 0);
      CHECK(p < 2 * pi);
    }
  }
  CHECK_THROWS_AS(ur_phases(5), ConfigError);
  CHECK_THROWS_AS(ur_phases(2), ConfigError);
}

TEST_CASE("longer UR sequences suppress flip-angle error", "[dd]") {
  const double eps = 0.02;
  auto defect = [&](const DDSequence& s) { return 2.0 - std::abs(sequence_product(s, eps).trace()); };
  DDSequence single{"x", {0, 0}};
  CHECK(defect(ur_phases(4)) < defect(single));
  CHECK(defect(ur_phases(14)) < defect(ur_phases(4)));
  CHECK(defect(ur_phases(18)) < 1e-8);
}

TEST_CASE("parse DD names", "[dd]") {
  CHECK_FALSE(parse_dd_sequence("none"));
  CHECK(parse_dd_sequence("xy4")->phases == xy4().phases);
  CHECK(parse_dd_sequence("ur14")->size() == 14);
  CHECK(parse_dd_sequence("ur:18")->size() == 18);
  CHECK_THROWS_AS(parse_dd_sequence("ur7"), ConfigError);
  CHECK_THROWS_AS(parse_dd_sequence("cpmg"), ConfigError);
}

TEST_CASE("gap detection", "[dd]") {
  TimedCircuit tight;
  tight.num_qubits = 1;
  tight.events = {GateEvent::h(0, 0, 10), GateEvent::x(0, 10, 10), GateEvent::h(0, 20, 10)};
  CHECK(detect_gaps(tight).empty());

  TimedCircuit pair;
  pair.num_qubits = 2;
  pair.events = {GateEvent::cnot(0, 1, 0, 100), GateEvent::cnot(0, 1, 300, 100)};
  auto g = detect_gaps(pair);
  REQUIRE(g.size() == 2);
  CHECK(g[0] == Gap{0, 100, 300});
  CHECK(g[1] == Gap{1, 100, 300});

  // Delays are idle time; leading and trailing gaps are opt-in.
  TimedCircuit d;
  d.num_qubits = 2;
  d.events = {GateEvent::h(0, 0, 10), GateEvent::delay(0, 10, 50), GateEvent::h(0, 60, 10), GateEvent::h(1, 30, 10)};
  d.measured = {0, 1};
  auto dg = detect_gaps(d);
  REQUIRE(dg.size() == 1);
  CHECK(dg[0] == Gap{0, 10, 60});
  GapOptions all{true, true};
  auto full = detect_gaps(d, all);
  CHECK(full.size() == 3);
  CHECK(std::count(full.begin(), full.end(), Gap{1, 0, 30}) == 1);
  CHECK(std::count(full.begin(), full.end(), Gap{1, 40, 70}) == 1);
}

TEST_CASE("routed BV-6 has qubits with disjoint gaps", "[dd]") {
  auto r = route_bv(OracleSpec(Bitstring::parse("111111")), ideal_hex());
  // Data qubits wait for the joint readout after their final H.
  auto count_max = [&](const GapOptions& o) {
    std::map<int, int> per_qubit;
    for (const auto& g : detect_gaps(r.circuit, o)) {
      ++per_qubit[g.qubit];
      CHECK(g.length() > 0);
    }
    int most = 0;
    for (auto [q, c] : per_qubit) most = std::max(most, c);
    return most;
  };
  CHECK(count_max({}) == 1);
  CHECK(count_max({false, true}) >= 2);
  for (const auto& g : detect_gaps(r.circuit)) CHECK(g.end < r.circuit.gate_end());
}

TEST_CASE("equal spacing at the boundaries", "[dd]") {
  // Exactly n*d: back to back.
  auto s = equal_spacing(1000, 4 * 25, 4, 25);
  CHECK(s == std::vector<Tick>{1000, 1025, 1050, 1075});
  // Centers at (2j+1)L/(2n), rounded toward the gap start.
  CHECK(equal_spacing(0, 401, 4, 10) == std::vector<Tick>{45, 145, 245, 345});
}

TEST_CASE("DD scheduling and fallback", "[dd]") {
  const Tick d = 10;
  DDOptions opt;
  opt.pulse_duration = d;

  SECTION("gap too short with idle fallback stays empty") {
    opt.fallback = DDFallback::Idle;
    auto c = one_qubit_idle(39, 5);
    auto r = schedule_dd(c, xy4(), opt);
    CHECK(r.schedules.empty());
    CHECK(r.circuit.events == c.events);
  }
  SECTION("exact fit is back to back") {
    auto r = schedule_dd(one_qubit_idle(40, 5), xy4(), opt);
    REQUIRE(r.schedules.size() == 1);
    CHECK(r.schedules[0].pulse_starts == std::vector<Tick>{5, 15, 25, 35});
    CHECK_FALSE(validate_circuit(r.circuit));
  }
  SECTION("ladder steps down the UR family then XY4") {
    auto ladder = fallback_ladder(ur_phases(18), DDFallback::Ladder);
    std::vector<std::size_t> sizes;
    for (const auto& s : ladder) sizes.push_back(s.size());
    CHECK(sizes == std::vector<std::size_t>{18, 14, 10, 6, 4});
    CHECK(ladder.back().name == "xy4");
    CHECK(schedule_dd(one_qubit_idle(139, 5), ur_phases(14), opt).schedules[0].sequence.size() == 10);
    CHECK(schedule_dd(one_qubit_idle(59, 5), ur_phases(14), opt).schedules[0].sequence.name == "xy4");
    CHECK(schedule_dd(one_qubit_idle(39, 5), ur_phases(14), opt).schedules.empty());
  }
  SECTION("delays inside a filled gap are replaced") {
    TimedCircuit c = one_qubit_idle(100, 5);
    c.events.insert(c.events.begin() + 1, GateEvent::delay(0, 5, 100));
    auto r = schedule_dd(c, xy4(), opt);
    CHECK(r.circuit.count(GateKind::Delay) == 0);
    CHECK(r.circuit.count(GateKind::PhasedPi) == 4);
  }
  CHECK_THROWS_AS(schedule_dd(one_qubit_idle(40, 5), xy4(), DDOptions{}), ConfigError);
}

TEST_CASE("DD schedules on routed circuits are valid", "[dd][property]") {
  const auto dev = ideal_hex();
  std::mt19937_64 rng(3);
  DDOptions opt;
  opt.pulse_duration = dev.durations.pulse();
  for (int n = 2; n <= 26; n += 3) {
    Bitstring b(static_cast<std::size_t>(n), rng() & ((std::uint64_t{1} << n) - 1));
    auto r = route_bv(OracleSpec(b), dev);
    for (const auto& seq : {ur_phases(14), ur_phases(18), xy4()}) {
      auto dd = schedule_dd(r.circuit, seq, opt);
      CHECK_FALSE(validate_circuit(dd.circuit));
      CHECK(dd.circuit.gate_end() == r.circuit.gate_end());
      // One repetition per gap, each a member of the ladder.
      std::set<std::pair<int, Tick>> seen;
      for (const auto& s : dd.schedules) {
        CHECK(seen.insert({s.gap.qubit, s.gap.start}).second);
        check_spacing(s, opt.pulse_duration);
      }
    }
  }
}

TEST_CASE("DD is neutral without noise", "[dd][oracle]") {
  const auto dev = ideal_hex();
  DDOptions opt;
  opt.pulse_duration = dev.durations.pulse();
  for (int n = 1; n <= 6; ++n) {
    for (const auto& spec : representative_oracles(n)) {
      auto r = route_bv(spec, dev);
      auto dd = schedule_dd(r.circuit, ur_phases(14), opt);
      auto plain = simulate_exact(r.circuit, dev, NoiseConfig::none());
      auto dressed = simulate_exact(dd.circuit, dev, NoiseConfig::none());
      CHECK(total_variation(plain, dressed) < 1e-12);
      CHECK(dressed[spec.b] == Approx(1.0).margin(1e-12));
    }
  }
}

TEST_CASE("UR14 protects an idle qubit against detuning", "[dd][property]") {
  // |+> held for ~3 us under a quasi-static field, then rotated back.
  const Tick d1 = 180;
  const Tick idle = 14000;
  auto dev = DeviceModel::ideal(chain_graph(1), GateDurations{d1, d1, 0, d1});
  NoiseConfig noise = NoiseConfig::none();
  noise.detuning = noise.flip_angle = true;
  noise.detuning_sigma = 1.0 / dev.dt.to_seconds(idle);
  noise.flip_angle_eps = 0.02;

  auto bare = one_qubit_idle(idle, d1);
  DDOptions opt;
  opt.pulse_duration = d1;
  auto protected_ = schedule_dd(bare, ur_phases(14), opt).circuit;
  REQUIRE(protected_.count(GateKind::PhasedPi) == 14);

  OracleSpec zero(Bitstring::parse("0"));
  TrajectoryPlan plan;
  plan.shots = 4000;
  plan.master_seed = 17;
  auto f_bare = simulate_shots(bare, dev, noise, zero, plan).count(zero.b) / 4000.0;
  auto f_dd = simulate_shots(protected_, dev, noise, zero, plan).count(zero.b) / 4000.0;
  // Free evolution: (1 + exp(-1/2)) / 2 ~ 0.80.
  CHECK(f_bare == Approx(0.803).margin(0.03));
  CHECK(f_dd > 0.97);
  CHECK(f_dd > f_bare);
  auto exact_bare = simulate_exact(bare, dev, noise)[zero.b];
  CHECK(exact_bare == Approx((1 + std::exp(-0.5)) / 2).margin(1e-6));
}
