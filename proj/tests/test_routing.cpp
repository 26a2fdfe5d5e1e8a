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

#include <map>
#include <queue>
#include <random>
#include <sstream>

#include <catch2/catch_amalgamated.hpp>

#include "bvspeed/exact_backend.hpp"
#include "bvspeed/routing.hpp"
#include "bvspeed/verify.hpp"

using namespace bvspeed;

namespace {

// Cheapest CNOT count to couple k marked qubits to the ancilla, by Dijkstra
// over complete placements: every node is empty (0), pending (1), done (2) or
// the ancilla (3). Moves: a direct CNOT on a pending neighbor (1), a fused
// step onto a pending neighbor (2), a plain SWAP with any neighbor (3).
// Minimized over all initial placements, optionally with a fixed ancilla start.
int brute_force_cost(const CouplingGraph& g, int k, std::optional<int> start = std::nullopt) {
  std::vector<int> nodes;
  for (int v = 0; v < g.num_physical(); ++v) {
    if (g.usable(v)) nodes.push_back(v);
  }
  const int n = g.num_physical();
  int best = 1 << 30;
  for (int a : nodes) {
    if (start && a != *start) continue;
    std::vector<int> others;
    for (int v : nodes) {
      if (v != a) others.push_back(v);
    }
    const int m = static_cast<int>(others.size());
    for (int mask = 0; mask < (1 << m); ++mask) {
      if (__builtin_popcount(static_cast<unsigned>(mask)) != k) continue;
      std::string init(static_cast<std::size_t>(n), '0');
      init[static_cast<std::size_t>(a)] = '3';
      for (int j = 0; j < m; ++j) {
        if (mask & (1 << j)) init[static_cast<std::size_t>(others[static_cast<std::size_t>(j)])] = '1';
      }
      std::map<std::string, int> dist;
      using Item = std::pair<int, std::string>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      dist[init] = 0;
      pq.push({0, init});
      while (!pq.empty()) {
        auto [d, s] = pq.top();
        pq.pop();
        if (d != dist[s]) continue;
        if (s.find('1') == std::string::npos) {
          best = std::min(best, d);
          break;
        }
        const int anc = static_cast<int>(s.find('3'));
        for (int w : g.neighbors(anc)) {
          auto push = [&](std::string t, int c) {
            auto it = dist.find(t);
            if (it == dist.end() || d + c < it->second) {
              dist[t] = d + c;
              pq.push({d + c, t});
            }
          };
          const char occ = s[static_cast<std::size_t>(w)];
          if (occ == '1') {
            std::string t = s;
            t[static_cast<std::size_t>(w)] = '2';
            push(t, 1);
            std::string f = s;
            f[static_cast<std::size_t>(w)] = '3';
            f[static_cast<std::size_t>(anc)] = '2';
            push(f, 2);
          }
          std::string sw = s;
          std::swap(sw[static_cast<std::size_t>(w)], sw[static_cast<std::size_t>(anc)]);
          push(sw, 3);
        }
      }
    }
  }
  return best;
}

DeviceModel device_on(const CouplingGraph& g) { return DeviceModel::ideal(g, GateDurations{180, 1935, 23400, 0}); }

OracleSpec ones(int n, int k) {
  return OracleSpec(Bitstring::ones_then_zeros(static_cast<std::size_t>(n), static_cast<std::size_t>(k)));
}

std::vector<CouplingGraph> small_graphs() {
  return {chain_graph(3),
          chain_graph(5),
          chain_graph(6),
          CouplingGraph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}),                  // star
          CouplingGraph(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}, {5, 0}}),  // ring
          CouplingGraph(7, {{0, 1}, {1, 2}, {1, 3}, {3, 4}, {4, 5}, {4, 6}}),  // two junctions
          complete_graph(5)};
}

}  // namespace

TEST_CASE("heavy-hex 27 layout", "[routing]") {
  auto g = heavy_hex_27();
  CHECK(g.num_physical() == 27);
  CHECK(g.edges().size() == 28);
  CHECK(g.max_degree() == 3);
  auto cairo = g.with_blacklist({19, 20, 22});
  CHECK(cairo.usable_count() == 24);
  for (auto [u, v] : cairo.edges()) {
    CHECK(cairo.usable(u));
    CHECK(cairo.usable(v));
  }
  CHECK(cairo.degree(16) == 1);
}

TEST_CASE("path of three nodes", "[routing]") {
  auto g = chain_graph(3);
  auto spec = ones(2, 2);
  // Ancilla at the end of the path, as in the Q2-Q1-QA picture.
  EmbeddingSearchOptions pinned;
  pinned.ancilla_start = 2;
  auto r = route_bv(spec, device_on(g), {}, pinned);
  CHECK(r.cnot_count == 3);
  CHECK(brute_force_cost(g, 2, 2) == 3);
  // A free start puts the ancilla in the middle.
  CHECK(route_bv(spec, device_on(g)).cnot_count == 2);
  CHECK(brute_force_cost(g, 2) == 2);
}

TEST_CASE("embedding search matches the brute-force oracle", "[routing][oracle]") {
  for (const auto& g : small_graphs()) {
    for (int k = 0; k < g.usable_count(); ++k) {
      auto spec = ones(g.usable_count() - 1, k);
      auto e = find_embedding(g, spec);
      CHECK(embedding_cost(spec, e) == brute_force_cost(g, k));
      for (int s = 0; s < g.num_physical(); ++s) {
        EmbeddingSearchOptions o;
        o.ancilla_start = s;
        auto pinned = find_embedding(g, spec, o);
        CHECK(embedding_cost(spec, pinned) == brute_force_cost(g, k, s));
        // Walks that double back must still produce a correct circuit.
        auto r = route_bv(spec, g, pinned, device_on(g));
        CHECK(r.cnot_count == embedding_cost(spec, pinned));
        CHECK(verify_routed(r, spec));
      }
    }
  }
}

TEST_CASE("emitted CNOTs follow the cost model", "[routing][property]") {
  const auto dev = device_on(heavy_hex_27());
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 40; ++rep) {
    const int n = 1 + static_cast<int>(rng() % 26);
    Bitstring b(static_cast<std::size_t>(n), rng() & ((std::uint64_t{1} << n) - 1));
    OracleSpec spec(b);
    for (bool fuse : {true, false}) {
      RouteOptions ro;
      ro.fuse_swaps = fuse;
      auto r = route_bv(spec, dev, ro);
      CHECK(r.cnot_count == static_cast<int>(r.circuit.count(GateKind::CNOT)));
      CHECK(r.cnot_count == embedding_cost(spec, r.embedding, fuse));
      CHECK_FALSE(validate_circuit(r.circuit));
      CHECK(verify_routed(r, spec));
    }
  }
}

TEST_CASE("zero oracle needs no CNOTs", "[routing]") {
  for (const auto& g : {chain_graph(6), heavy_hex_27(), complete_graph(4)}) {
    auto r = route_bv(ones(3, 0), device_on(g));
    CHECK(r.cnot_count == 0);
    CHECK(verify_routed(r, ones(3, 0)));
  }
}

TEST_CASE("heavy-hex b=1^26", "[routing]") {
  const auto g = heavy_hex_27();
  const auto spec = ones(26, 26);
  EmbeddingSearchOptions pinned;
  pinned.ancilla_start = 26;
  auto e = find_embedding(g, spec, pinned);
  CHECK(embedding_cost(spec, e) == 44);
  CHECK(embedding_cost(spec, e, false) == 80);
  auto r = route_bv(spec, g, e, device_on(g));
  CHECK(r.cnot_count == 44);
  CHECK(verify_routed(r, spec));
  // Without the pinned start one step fewer is possible.
  CHECK(embedding_cost(spec, find_embedding(g, spec)) == 43);
}

TEST_CASE("CNOT scaling slopes", "[routing]") {
  auto hh = cnot_scaling(heavy_hex_27(), 2, 26);
  CHECK(hh.slope >= 1.70);
  CHECK(hh.slope <= 1.82);
  EmbeddingSearchOptions pinned;
  pinned.ancilla_start = 20;
  auto chain = cnot_scaling(chain_graph(21), 2, 20, pinned);
  CHECK(chain.slope == Catch::Approx(2.0).margin(0.05));
  auto full = cnot_scaling(complete_graph(21), 2, 20);
  CHECK(full.slope == Catch::Approx(1.0));
}

TEST_CASE("blacklisting never lowers the optimum", "[routing][property]") {
  const auto g = heavy_hex_27();
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 15; ++rep) {
    std::set<int> bl;
    for (int j = 0; j < 3; ++j) bl.insert(static_cast<int>(rng() % 27));
    auto gb = g.with_blacklist(bl);
    for (int k : {3, 8, 14}) {
      auto spec = ones(std::min(k + 2, gb.usable_count() - 1), k);
      int base = embedding_cost(spec, find_embedding(g, spec));
      try {
        const int blocked = embedding_cost(spec, find_embedding(gb, spec));
        CHECK(blocked >= base);
      } catch (const InfeasibleError&) {
        SUCCEED("disconnected after blacklisting");
      }
    }
  }
}

TEST_CASE("routed circuits agree with dense simulation", "[routing][oracle]") {
  const auto dev = device_on(heavy_hex_27());
  for (int n = 1; n <= 10; ++n) {
    for (const auto& spec : representative_oracles(n)) {
      auto r = route_bv(spec, dev);
      CHECK(verify_routed(r, spec));
      auto d = simulate_exact(r.circuit, dev, NoiseConfig::none());
      CHECK(d[spec.b] == Catch::Approx(1.0).margin(1e-9));
      std::map<int, int> inv;
      for (auto [p, l] : r.final_permutation) inv[l] = p;
      for (int i = 0; i < n; ++i) CHECK(r.circuit.measured[static_cast<std::size_t>(i)] == inv[i]);
    }
  }
}

TEST_CASE("verify_routed rejects a deleted CNOT", "[routing]") {
  const auto dev = device_on(heavy_hex_27());
  for (const auto& spec : {ones(6, 4), ones(12, 12), OracleSpec(Bitstring::parse("1011001"))}) {
    auto r = route_bv(spec, dev);
    REQUIRE(verify_routed(r, spec));
    // Dropping the first CNOT of a fused step leaves a valid circuit: the
    // marked qubit, kicked into |->, takes over as the ancilla. Every other
    // deletion must be caught.
    int caught = 0;
    for (std::size_t i = 0; i < r.circuit.events.size(); ++i) {
      if (r.circuit.events[i].kind() != GateKind::CNOT) continue;
      auto broken = r;
      broken.circuit.events.erase(broken.circuit.events.begin() + static_cast<long>(i));
      if (!verify_routed(broken, spec)) ++caught;
    }
    CHECK(caught >= r.cnot_count - r.embedding.steps());
  }
}

TEST_CASE("route_bv rejects malformed embeddings", "[routing]") {
  const auto g = chain_graph(5);
  const auto dev = device_on(g);
  auto spec = ones(3, 2);
  auto e = find_embedding(g, spec);
  auto jump = e;
  jump.ancilla_walk = {0, 2};
  jump.logical_to_physical[3] = 0;
  CHECK_THROWS_AS(route_bv(spec, g, jump, dev), InfeasibleError);
  auto uncovered = e;
  uncovered.direct_hits.clear();
  uncovered.ancilla_walk = {uncovered.ancilla_walk.front()};
  if (e.steps() > 0 || !e.direct_hits.empty()) CHECK_THROWS_AS(route_bv(spec, g, uncovered, dev), InfeasibleError);
  CHECK_THROWS_AS(find_embedding(chain_graph(3), ones(3, 1)), InfeasibleError);
}

TEST_CASE("standard setup keeps unmarked qubits", "[routing]") {
  const auto dev = device_on(chain_graph(7));
  auto spec = ones(6, 2);
  RouteOptions std_opt;
  std_opt.setup = Setup::Standard;
  auto r = route_bv(spec, dev, std_opt);
  for (int i = 2; i < 6; ++i) {
    const int p = r.circuit.measured[static_cast<std::size_t>(i)];
    auto ev = r.circuit.events_on(p);
    int h = 0;
    for (const auto& e : ev) h += e.kind() == GateKind::H;
    CHECK(h >= 2);
  }
  CHECK(verify_routed(r, spec));
  auto reduced = route_bv(spec, dev);
  CHECK(reduced.cnot_count == r.cnot_count);
  // BV-n and BV-m share the placement of their first m qubits.
  auto small = route_bv(ones(4, 2), dev, std_opt);
  for (int i = 0; i < 4; ++i) {
    CHECK(small.embedding.logical_to_physical.at(i) == r.embedding.logical_to_physical.at(i));
  }
}

TEST_CASE("graph files and layout names", "[routing][io]") {
  auto g = heavy_hex_27().with_blacklist({19, 20, 22});
  std::ostringstream os;
  write_graph(os, g);
  std::istringstream is(os.str());
  CHECK(read_graph(is) == g);
  CHECK(parse_layout("heavy-hex-27", 0) == heavy_hex_27());
  CHECK(parse_layout("chain", 5) == chain_graph(5));
  CHECK(parse_layout("chain:8", 5) == chain_graph(8));
  CHECK(parse_layout("full:4", 5) == complete_graph(4));
  CHECK_THROWS_AS(parse_layout("ring", 5), ConfigError);
  std::istringstream bad("bvspeed-graph 1\nnodes 3\nedge 0 5\n");
  CHECK_THROWS_AS(read_graph(bad), FormatError);
}
