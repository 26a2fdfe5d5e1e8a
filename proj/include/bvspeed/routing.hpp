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
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "bvspeed/bv.hpp"
#include "bvspeed/circuit.hpp"
#include "bvspeed/coupling_graph.hpp"
#include "bvspeed/device.hpp"

namespace bvspeed {

/**
 * Placement of a BV instance. Logical qubits 0..n-1 are data, n is the
 * ancilla. The ancilla starts on ancilla_walk[0] and visits the walk nodes in
 * order; marked qubits on the walk are absorbed by fused CNOT+SWAP steps and
 * the rest are hit directly from an adjacent walk node.
 */
struct Embedding {
  std::map<int, int> logical_to_physical;
  std::vector<int> ancilla_walk;
  std::set<int> direct_hits;

  int steps() const { return ancilla_walk.empty() ? 0 : static_cast<int>(ancilla_walk.size()) - 1; }
  friend bool operator==(const Embedding&, const Embedding&) = default;
};

enum class Setup {
  Reduced,   ///< unmarked data qubits carry no gates
  Standard,  ///< unmarked data qubits get an H at the start and one at the end
};

struct RouteOptions {
  Setup setup = Setup::Reduced;
  bool fuse_swaps = true;  ///< false: plain 3-CNOT SWAPs plus a separate CNOT per marked qubit
};

struct RoutedCircuit {
  OracleSpec spec;
  TimedCircuit circuit;
  int cnot_count = 0;
  std::map<int, int> final_permutation;  ///< physical -> logical, end of circuit
  Embedding embedding;
};

struct EmbeddingSearchOptions {
  std::optional<int> ancilla_start;
  std::uint64_t node_budget = 5'000'000;  ///< DFS nodes before falling back to the greedy walk
  bool allow_greedy = true;
};

namespace detail {

/// Off-walk neighbors of the visited set.
inline int cover(const CouplingGraph& g, const std::vector<char>& visited) {
  int c = 0;
  for (int w = 0; w < g.num_physical(); ++w) {
    if (visited[static_cast<std::size_t>(w)] || !g.usable(w)) continue;
    for (int v : g.neighbors(w)) {
      if (visited[static_cast<std::size_t>(v)]) {
        ++c;
        break;
      }
    }
  }
  return c;
}

/**
 * Iterative-deepening search over ancilla walks. A step onto a new node is a
 * fused step (one CNOT above the k coupling CNOTs); a step back onto a visited
 * node is a plain SWAP (three). The walk is complete once the new nodes plus
 * their off-walk neighbors can hold all k marked qubits.
 */
class WalkSearch {
 public:
  WalkSearch(const CouplingGraph& g, int k, std::uint64_t budget) : g_(g), k_(k), budget_(budget) {}

  /// Walk from `start` whose extra cost is at most `extra`, if any.
  std::optional<std::vector<int>> run(int start, int extra) {
    visited_.assign(static_cast<std::size_t>(g_.num_physical()), 0);
    visited_[static_cast<std::size_t>(start)] = 1;
    walk_.assign(1, start);
    memo_.clear();
    if (dfs(start, 0, extra)) return walk_;
    return std::nullopt;
  }

  bool exhausted() const { return nodes_ > budget_; }

 private:
  std::string key(int node) const {
    std::string k(visited_.begin(), visited_.end());
    k += std::to_string(node);
    return k;
  }

  bool dfs(int v, int fresh, int left) {
    if (++nodes_ > budget_) return false;
    if (fresh + cover(g_, visited_) >= k_) return true;
    if (left <= 0) return false;
    // Skip states already explored with at least this much budget.
    auto [it, inserted] = memo_.try_emplace(key(v), left);
    if (!inserted) {
      if (it->second >= left) return false;
      it->second = left;
    }
    for (int w : g_.neighbors(v)) {
      const bool fresh_step = !visited_[static_cast<std::size_t>(w)];
      const int cost = fresh_step ? 1 : 3;
      if (cost > left) continue;
      walk_.push_back(w);
      if (fresh_step) visited_[static_cast<std::size_t>(w)] = 1;
      if (dfs(w, fresh + (fresh_step ? 1 : 0), left - cost)) return true;
      if (fresh_step) visited_[static_cast<std::size_t>(w)] = 0;
      walk_.pop_back();
      if (exhausted()) return false;
    }
    return false;
  }

  const CouplingGraph& g_;
  int k_;
  std::uint64_t budget_;
  std::uint64_t nodes_ = 0;
  std::vector<char> visited_;
  std::vector<int> walk_;
  std::unordered_map<std::string, int> memo_;
};

/// Greedy simple walk: extend towards the best two-step coverage gain.
inline std::optional<std::vector<int>> greedy_walk(const CouplingGraph& g, int k, int start) {
  std::vector<int> path{start};
  std::vector<char> visited(static_cast<std::size_t>(g.num_physical()), 0);
  visited[static_cast<std::size_t>(start)] = 1;
  auto score = [&](std::initializer_list<int> extra) {
    for (int x : extra) visited[static_cast<std::size_t>(x)] = 1;
    const int sc = static_cast<int>(path.size() + extra.size()) - 1 + cover(g, visited);
    for (int x : extra) visited[static_cast<std::size_t>(x)] = 0;
    return sc;
  };
  while (static_cast<int>(path.size()) - 1 + cover(g, visited) < k) {
    int best = -1;
    int best_score = -1;
    for (int w : g.neighbors(path.back())) {
      if (visited[static_cast<std::size_t>(w)]) continue;
      int sc = score({w});
      visited[static_cast<std::size_t>(w)] = 1;
      for (int x : g.neighbors(w)) {
        if (!visited[static_cast<std::size_t>(x)]) sc = std::max(sc, score({x}));
      }
      visited[static_cast<std::size_t>(w)] = 0;
      // Ties go to degree-3 junctions, then to the lowest index.
      sc = sc * 8 + g.degree(w);
      if (sc > best_score) {
        best_score = sc;
        best = w;
      }
    }
    if (best < 0) return std::nullopt;
    path.push_back(best);
    visited[static_cast<std::size_t>(best)] = 1;
  }
  return path;
}

}  // namespace detail

/// Minimum-CNOT placement of `spec` on `g` under the ancilla-swapping cost model.
inline Embedding find_embedding(const CouplingGraph& g, const OracleSpec& spec, const EmbeddingSearchOptions& opt = {}) {
  const int n = spec.n();
  const int k = spec.k();
  if (n + 1 > g.usable_count()) {
    throw InfeasibleError("BV-" + std::to_string(n) + " needs " + std::to_string(n + 1) + " qubits, layout has " +
                          std::to_string(g.usable_count()) + " usable");
  }
  std::vector<int> starts;
  if (opt.ancilla_start) {
    if (!g.usable(*opt.ancilla_start)) throw ConfigError("ancilla start node is not usable");
    starts.push_back(*opt.ancilla_start);
  } else {
    for (int v = 0; v < g.num_physical(); ++v) {
      if (g.usable(v)) starts.push_back(v);
    }
  }

  std::optional<std::vector<int>> walk;
  detail::WalkSearch search(g, k, opt.node_budget);
  const int max_extra = k + 3 * g.num_physical();
  for (int extra = 0; extra <= max_extra && !walk && !search.exhausted(); ++extra) {
    for (int v : starts) {
      walk = search.run(v, extra);
      if (walk || search.exhausted()) break;
    }
  }
  if (!walk && search.exhausted()) {
    if (!opt.allow_greedy) throw InfeasibleError("embedding search budget exhausted");
    int best_start = starts.front();
    for (int v : starts) {
      if (g.degree(v) > g.degree(best_start)) best_start = v;
    }
    walk = detail::greedy_walk(g, k, best_start);
  }
  if (!walk) throw InfeasibleError("no walk covers " + std::to_string(k) + " marked qubits");

  std::vector<char> on_walk(static_cast<std::size_t>(g.num_physical()), 0);
  for (int v : *walk) on_walk[static_cast<std::size_t>(v)] = 1;

  // CNOT order: direct hits around v0, then each newly entered node followed
  // by the direct hits around it.
  std::vector<char> taken(on_walk);
  std::vector<char> entered(static_cast<std::size_t>(g.num_physical()), 0);
  entered[static_cast<std::size_t>(walk->front())] = 1;
  int fresh = 0;
  for (std::size_t i = 1; i < walk->size(); ++i) {
    if (!entered[static_cast<std::size_t>((*walk)[i])]) {
      entered[static_cast<std::size_t>((*walk)[i])] = 1;
      ++fresh;
    }
  }
  int direct_needed = std::max(0, k - fresh);
  std::fill(entered.begin(), entered.end(), 0);
  entered[static_cast<std::size_t>(walk->front())] = 1;
  std::vector<int> cnot_order;
  std::vector<char> is_direct;
  for (std::size_t i = 0; i < walk->size(); ++i) {
    const int v = (*walk)[i];
    if (i > 0) {
      if (entered[static_cast<std::size_t>(v)]) continue;
      entered[static_cast<std::size_t>(v)] = 1;
      cnot_order.push_back(v);
      is_direct.push_back(0);
    }
    for (int w : g.neighbors(v)) {
      if (direct_needed == 0) break;
      if (taken[static_cast<std::size_t>(w)]) continue;
      taken[static_cast<std::size_t>(w)] = 1;
      cnot_order.push_back(w);
      is_direct.push_back(1);
      --direct_needed;
    }
  }
  if (static_cast<int>(cnot_order.size()) < k) throw InfeasibleError("walk does not cover the marked set");

  Embedding e;
  e.ancilla_walk = *walk;
  e.logical_to_physical[spec.ancilla_index()] = walk->front();
  const auto marked = spec.marked();
  std::set<int> used{walk->front()};
  for (std::size_t j = 0; j < marked.size(); ++j) {
    e.logical_to_physical[marked[j]] = cnot_order[j];
    used.insert(cnot_order[j]);
    if (is_direct[j]) e.direct_hits.insert(marked[j]);
  }

  // Unmarked qubits fill free nodes in BFS order around the used region,
  // walk nodes last.
  std::vector<int> seeds(walk->begin(), walk->end());
  for (std::size_t j = 0; j < marked.size(); ++j) {
    if (is_direct[j]) seeds.push_back(cnot_order[j]);
  }
  std::vector<int> free_nodes;
  std::vector<int> free_walk;
  for (int v : g.bfs_order(seeds)) {
    if (used.count(v)) continue;
    (on_walk[static_cast<std::size_t>(v)] ? free_walk : free_nodes).push_back(v);
  }
  free_nodes.insert(free_nodes.end(), free_walk.begin(), free_walk.end());
  std::size_t next = 0;
  for (int i = 0; i < n; ++i) {
    if (spec.b[static_cast<std::size_t>(i)]) continue;
    e.logical_to_physical[i] = free_nodes.at(next++);
  }
  return e;
}

/// Lays out the routed BV circuit for `spec` along `emb` with device durations.
inline RoutedCircuit route_bv(const OracleSpec& spec, const CouplingGraph& g, const Embedding& emb,
                              const DeviceModel& device, const RouteOptions& opt = {}) {
  const int n = spec.n();
  const int anc = spec.ancilla_index();
  const int num_phys = g.num_physical();
  const Tick d1 = device.durations.gate_1q;
  const Tick d2 = device.durations.gate_2q;

  if (emb.ancilla_walk.empty()) throw InfeasibleError("embedding has an empty ancilla walk");
  std::vector<char> on_walk(static_cast<std::size_t>(num_phys), 0);
  for (std::size_t i = 0; i < emb.ancilla_walk.size(); ++i) {
    int v = emb.ancilla_walk[i];
    if (!g.usable(v)) throw InfeasibleError("walk node " + std::to_string(v) + " is not usable");
    on_walk[static_cast<std::size_t>(v)] = 1;
    if (i > 0 && !g.adjacent(emb.ancilla_walk[i - 1], v)) {
      throw InfeasibleError("walk step " + std::to_string(emb.ancilla_walk[i - 1]) + "->" + std::to_string(v) +
                            " is not an edge");
    }
  }
  auto anc_it = emb.logical_to_physical.find(anc);
  if (anc_it == emb.logical_to_physical.end() || anc_it->second != emb.ancilla_walk.front()) {
    throw InfeasibleError("ancilla must start on the first walk node");
  }

  // occupant[p]: logical qubit currently on physical p, or -1.
  std::vector<int> occupant(static_cast<std::size_t>(num_phys), -1);
  for (auto [l, p] : emb.logical_to_physical) {
    if (l < 0 || l > n) throw InfeasibleError("embedding maps unknown logical qubit " + std::to_string(l));
    if (!g.usable(p)) throw InfeasibleError("logical " + std::to_string(l) + " placed on unusable node");
    if (occupant[static_cast<std::size_t>(p)] != -1) throw InfeasibleError("two logical qubits on node " + std::to_string(p));
    occupant[static_cast<std::size_t>(p)] = l;
  }
  for (int i = 0; i < n; ++i) {
    if (!emb.logical_to_physical.count(i)) throw InfeasibleError("logical qubit " + std::to_string(i) + " is not placed");
  }

  // Marked qubits must be on the walk or adjacent to it; direct hits fire
  // from the earliest adjacent walk node.
  const auto marked = spec.marked();
  std::vector<std::vector<int>> hits_at(emb.ancilla_walk.size());
  for (int m : marked) {
    int p = emb.logical_to_physical.at(m);
    if (on_walk[static_cast<std::size_t>(p)]) {
      if (emb.direct_hits.count(m)) throw InfeasibleError("walk qubit listed as a direct hit");
      continue;
    }
    if (!emb.direct_hits.count(m)) throw InfeasibleError("marked qubit " + std::to_string(m) + " is not covered");
    bool placed = false;
    for (std::size_t i = 0; i < emb.ancilla_walk.size() && !placed; ++i) {
      if (g.adjacent(emb.ancilla_walk[i], p)) {
        hits_at[i].push_back(p);
        placed = true;
      }
    }
    if (!placed) throw InfeasibleError("direct hit " + std::to_string(m) + " is not adjacent to the walk");
  }
  for (int d : emb.direct_hits) {
    if (d < 0 || d >= n || !spec.b[static_cast<std::size_t>(d)]) {
      throw InfeasibleError("direct hit " + std::to_string(d) + " is not a marked qubit");
    }
  }
  for (auto& h : hits_at) std::sort(h.begin(), h.end());

  const auto is_marked = [&](int l) { return l >= 0 && l < n && spec.b[static_cast<std::size_t>(l)]; };
  const bool standard = opt.setup == Setup::Standard;

  TimedCircuit c;
  c.num_qubits = num_phys;
  c.readout_duration = device.durations.readout;
  c.dt = device.dt;
  std::vector<Tick> ready(static_cast<std::size_t>(num_phys), 0);
  auto emit1 = [&](GateKind kind, int p) {
    Tick t = ready[static_cast<std::size_t>(p)];
    c.events.push_back(kind == GateKind::H ? GateEvent::h(p, t, d1) : GateEvent::x(p, t, d1));
    ready[static_cast<std::size_t>(p)] = t + d1;
    return t;
  };
  auto emit_cx = [&](int ctrl, int tgt) {
    Tick t = std::max(ready[static_cast<std::size_t>(ctrl)], ready[static_cast<std::size_t>(tgt)]);
    c.events.push_back(GateEvent::cnot(ctrl, tgt, t, d2));
    ready[static_cast<std::size_t>(ctrl)] = ready[static_cast<std::size_t>(tgt)] = t + d2;
  };

  int a = emb.ancilla_walk.front();
  emit1(GateKind::X, a);
  emit1(GateKind::H, a);
  for (int p = 0; p < num_phys; ++p) {
    int l = occupant[static_cast<std::size_t>(p)];
    if (is_marked(l) || (standard && l >= 0 && l < n)) emit1(GateKind::H, p);
  }

  Tick last_final_h = 0;
  auto finish_data = [&](int p) { last_final_h = std::max(last_final_h, emit1(GateKind::H, p)); };
  auto hit = [&](int p) {
    emit_cx(p, a);
    finish_data(p);
  };

  // A step onto a pending marked qubit applies its coupling; revisits are
  // plain SWAPs.
  std::vector<char> done(static_cast<std::size_t>(n + 1), 0);
  for (std::size_t i = 0; i < emb.ancilla_walk.size(); ++i) {
    if (i > 0) {
      const int w = emb.ancilla_walk[i];
      const int occ = occupant[static_cast<std::size_t>(w)];
      const bool pending = is_marked(occ) && !done[static_cast<std::size_t>(occ)];
      const int l = pending ? occ : -1;
      if (pending) done[static_cast<std::size_t>(occ)] = 1;
      if (opt.fuse_swaps && is_marked(l)) {
        // CNOT(w->a) then SWAP(a,w) == CNOT(a->w) CNOT(w->a).
        emit_cx(a, w);
        emit_cx(w, a);
        std::swap(occupant[static_cast<std::size_t>(a)], occupant[static_cast<std::size_t>(w)]);
        finish_data(a);
      } else {
        if (is_marked(l)) emit_cx(w, a);
        emit_cx(a, w);
        emit_cx(w, a);
        emit_cx(a, w);
        std::swap(occupant[static_cast<std::size_t>(a)], occupant[static_cast<std::size_t>(w)]);
        if (is_marked(l)) finish_data(a);
      }
      a = w;
    }
    for (int p : hits_at[i]) hit(p);
  }
  last_final_h = std::max(last_final_h, emit1(GateKind::H, a));

  if (standard) {
    for (int p = 0; p < num_phys; ++p) {
      int l = occupant[static_cast<std::size_t>(p)];
      if (l < 0 || l >= n || is_marked(l)) continue;
      Tick t = std::max(ready[static_cast<std::size_t>(p)], last_final_h);
      c.events.push_back(GateEvent::h(p, t, d1));
      ready[static_cast<std::size_t>(p)] = t + d1;
    }
  }

  RoutedCircuit r;
  r.spec = spec;
  r.embedding = emb;
  std::vector<int> where(static_cast<std::size_t>(n + 1), -1);
  for (int p = 0; p < num_phys; ++p) {
    int l = occupant[static_cast<std::size_t>(p)];
    if (l >= 0) {
      r.final_permutation[p] = l;
      where[static_cast<std::size_t>(l)] = p;
    }
  }
  for (int i = 0; i < n; ++i) c.measured.push_back(where[static_cast<std::size_t>(i)]);
  std::stable_sort(c.events.begin(), c.events.end(), [](const GateEvent& x, const GateEvent& y) {
    return x.start() < y.start();
  });
  r.cnot_count = static_cast<int>(c.count(GateKind::CNOT));
  r.circuit = std::move(c);
  return r;
}

/// Convenience: search an embedding and route in one call.
inline RoutedCircuit route_bv(const OracleSpec& spec, const DeviceModel& device, const RouteOptions& opt = {},
                              const EmbeddingSearchOptions& search = {}) {
  return route_bv(spec, device.graph, find_embedding(device.graph, spec, search), device, opt);
}

/// Closed-form CNOT count of an embedding under the route_bv cost model.
inline int embedding_cost(const OracleSpec& spec, const Embedding& emb, bool fuse_swaps = true) {
  std::map<int, int> occupant;
  for (auto [l, p] : emb.logical_to_physical) occupant[p] = l;
  std::set<int> done;
  int cost = static_cast<int>(emb.direct_hits.size());
  for (std::size_t i = 1; i < emb.ancilla_walk.size(); ++i) {
    const int a = emb.ancilla_walk[i - 1];
    const int w = emb.ancilla_walk[i];
    auto it = occupant.find(w);
    const int l = it == occupant.end() ? -1 : it->second;
    const bool pending = l >= 0 && l < spec.n() && spec.b[static_cast<std::size_t>(l)] && !done.count(l);
    if (pending) {
      done.insert(l);
      cost += fuse_swaps ? 2 : 4;
    } else {
      cost += 3;
    }
    const int moved = occupant.count(a) ? occupant[a] : -1;
    occupant[a] = l;
    occupant[w] = moved;
  }
  return cost;
}

struct ScalingResult {
  std::vector<int> n;
  std::vector<int> cnot_count;
  double slope = 0.0;
  double intercept = 0.0;
};

/// OLS slope of cnot_count(1^n) over [n_lo, n_hi].
inline ScalingResult cnot_scaling(const CouplingGraph& g, int n_lo, int n_hi, const EmbeddingSearchOptions& opt = {},
                                  bool fuse_swaps = true) {
  ScalingResult r;
  for (int n = n_lo; n <= n_hi; ++n) {
    OracleSpec spec(Bitstring::ones_then_zeros(static_cast<std::size_t>(n), static_cast<std::size_t>(n)));
    Embedding e = find_embedding(g, spec, opt);
    r.n.push_back(n);
    r.cnot_count.push_back(embedding_cost(spec, e, fuse_swaps));
  }
  const double m = static_cast<double>(r.n.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < r.n.size(); ++i) {
    sx += r.n[i];
    sy += r.cnot_count[i];
  }
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < r.n.size(); ++i) {
    sxx += (r.n[i] - mx) * (r.n[i] - mx);
    sxy += (r.n[i] - mx) * (r.cnot_count[i] - my);
  }
  r.slope = sxx > 0 ? sxy / sxx : 0.0;
  r.intercept = my - r.slope * mx;
  return r;
}

}  // namespace bvspeed
