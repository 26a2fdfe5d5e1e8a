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

// Graph file format:
//
//   bvspeed-graph 1
//   nodes 5
//   edge 0 1
//   edge 1 2
//   blacklist 3 4
//
// The blacklist record is optional and may repeat.

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bvspeed/errors.hpp"
#include "bvspeed/text.hpp"

namespace bvspeed {

class CouplingGraph {
 public:
  CouplingGraph() = default;
  CouplingGraph(int num_physical, const std::vector<std::pair<int, int>>& edges, std::set<int> blacklist = {})
      : num_physical_(num_physical), blacklist_(std::move(blacklist)) {
    if (num_physical < 0) throw ConfigError("negative node count");
    for (int b : blacklist_) {
      if (b < 0 || b >= num_physical) throw ConfigError("blacklisted node " + std::to_string(b) + " out of range");
    }
    adj_.assign(static_cast<std::size_t>(num_physical), {});
    for (auto [u, v] : edges) {
      if (u < 0 || v < 0 || u >= num_physical || v >= num_physical) {
        throw ConfigError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
      }
      if (u == v) throw ConfigError("self-loop on node " + std::to_string(u));
      raw_edges_.insert({std::min(u, v), std::max(u, v)});
    }
    for (auto [u, v] : raw_edges_) {
      if (blacklist_.count(u) || blacklist_.count(v)) continue;
      adj_[static_cast<std::size_t>(u)].push_back(v);
      adj_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& a : adj_) std::sort(a.begin(), a.end());
  }

  int num_physical() const { return num_physical_; }
  const std::set<int>& blacklist() const { return blacklist_; }
  /// All edges as given, including those touching blacklisted nodes.
  const std::set<std::pair<int, int>>& raw_edges() const { return raw_edges_; }

  /// Edges of the blacklist-filtered induced subgraph.
  std::set<std::pair<int, int>> edges() const {
    std::set<std::pair<int, int>> out;
    for (auto e : raw_edges_) {
      if (!blacklist_.count(e.first) && !blacklist_.count(e.second)) out.insert(e);
    }
    return out;
  }

  bool usable(int v) const { return v >= 0 && v < num_physical_ && !blacklist_.count(v); }
  int usable_count() const { return num_physical_ - static_cast<int>(blacklist_.size()); }

  /// Sorted neighbors within the usable subgraph.
  const std::vector<int>& neighbors(int v) const { return adj_.at(static_cast<std::size_t>(v)); }
  bool adjacent(int u, int v) const {
    const auto& a = neighbors(u);
    return std::binary_search(a.begin(), a.end(), v);
  }
  int degree(int v) const { return static_cast<int>(neighbors(v).size()); }
  int max_degree() const {
    int d = 0;
    for (int v = 0; v < num_physical_; ++v) d = std::max(d, degree(v));
    return d;
  }

  CouplingGraph with_blacklist(std::set<int> blacklist) const {
    return CouplingGraph(num_physical_, {raw_edges_.begin(), raw_edges_.end()}, std::move(blacklist));
  }

  /// Usable nodes in breadth-first order from `seeds`, lowest index first on ties.
  /// Nodes unreachable from the seeds follow in index order.
  std::vector<int> bfs_order(const std::vector<int>& seeds) const {
    std::vector<int> order;
    std::vector<bool> seen(static_cast<std::size_t>(num_physical_), false);
    std::deque<int> queue;
    for (int s : seeds) {
      if (usable(s) && !seen[static_cast<std::size_t>(s)]) {
        seen[static_cast<std::size_t>(s)] = true;
        queue.push_back(s);
      }
    }
    auto drain = [&] {
      while (!queue.empty()) {
        int v = queue.front();
        queue.pop_front();
        order.push_back(v);
        for (int w : neighbors(v)) {
          if (!seen[static_cast<std::size_t>(w)]) {
            seen[static_cast<std::size_t>(w)] = true;
            queue.push_back(w);
          }
        }
      }
    };
    drain();
    for (int v = 0; v < num_physical_; ++v) {
      if (usable(v) && !seen[static_cast<std::size_t>(v)]) {
        seen[static_cast<std::size_t>(v)] = true;
        queue.push_back(v);
        drain();
      }
    }
    return order;
  }

  friend bool operator==(const CouplingGraph& a, const CouplingGraph& b) {
    return a.num_physical_ == b.num_physical_ && a.raw_edges_ == b.raw_edges_ && a.blacklist_ == b.blacklist_;
  }

 private:
  int num_physical_ = 0;
  std::set<std::pair<int, int>> raw_edges_;
  std::set<int> blacklist_;
  std::vector<std::vector<int>> adj_;
};

/// 27-qubit Falcon heavy-hex layout.
inline CouplingGraph heavy_hex_27() {
  static const std::vector<std::pair<int, int>> kEdges = {
      {0, 1},   {1, 2},   {1, 4},   {2, 3},   {3, 5},   {4, 7},   {5, 8},   {6, 7},   {7, 10},  {8, 9},
      {8, 11},  {10, 12}, {11, 14}, {12, 13}, {12, 15}, {13, 14}, {14, 16}, {15, 18}, {16, 19}, {17, 18},
      {18, 21}, {19, 20}, {19, 22}, {21, 23}, {22, 25}, {23, 24}, {24, 25}, {25, 26}};
  return CouplingGraph(27, kEdges);
}

/// Path 0-1-...-(n-1).
inline CouplingGraph chain_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i + 1 < n; ++i) e.emplace_back(i, i + 1);
  return CouplingGraph(n, e);
}

inline CouplingGraph complete_graph(int n) {
  std::vector<std::pair<int, int>> e;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) e.emplace_back(i, j);
  }
  return CouplingGraph(n, e);
}

inline void write_graph(std::ostream& out, const CouplingGraph& g) {
  out << "bvspeed-graph 1\n";
  out << "nodes " << g.num_physical() << "\n";
  for (auto [u, v] : g.raw_edges()) out << "edge " << u << " " << v << "\n";
  if (!g.blacklist().empty()) {
    out << "blacklist";
    for (int b : g.blacklist()) out << " " << b;
    out << "\n";
  }
}

inline CouplingGraph read_graph(std::istream& in, const std::string& source = "<graph>") {
  text::LineReader r(in, source);
  std::vector<std::string> f;
  if (!r.next(f) || f.size() != 2 || f[0] != "bvspeed-graph" || f[1] != "1") r.fail("missing 'bvspeed-graph 1' header");
  int nodes = -1;
  std::vector<std::pair<int, int>> edges;
  std::set<int> blacklist;
  while (r.next(f)) {
    if (f[0] == "nodes") {
      r.expect_fields(f, 2);
      nodes = static_cast<int>(r.to_int(f[1]));
    } else if (f[0] == "edge") {
      r.expect_fields(f, 3);
      edges.emplace_back(static_cast<int>(r.to_int(f[1])), static_cast<int>(r.to_int(f[2])));
    } else if (f[0] == "blacklist") {
      for (std::size_t i = 1; i < f.size(); ++i) blacklist.insert(static_cast<int>(r.to_int(f[i])));
    } else {
      r.fail("unknown record '" + f[0] + "'");
    }
  }
  if (nodes < 0) r.fail("missing nodes record");
  try {
    return CouplingGraph(nodes, edges, blacklist);
  } catch (const ConfigError& e) {
    throw FormatError(source, r.line(), e.what());
  }
}

inline CouplingGraph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open graph file " + path);
  return read_graph(in, path);
}

/// Resolves a layout name: chain[:N], heavy-hex-27, full:N or file:<path>.
/// A bare "chain" is sized by `default_size`.
inline CouplingGraph parse_layout(const std::string& spec, int default_size) {
  if (spec == "heavy-hex-27") return heavy_hex_27();
  if (spec == "chain") return chain_graph(default_size);
  auto colon = spec.find(':');
  if (colon != std::string::npos) {
    std::string head = spec.substr(0, colon);
    std::string tail = spec.substr(colon + 1);
    if (head == "file") return load_graph(tail);
    if (head == "chain" || head == "full") {
      int n = 0;
      try {
        n = std::stoi(tail);
      } catch (const std::exception&) {
        throw ConfigError("bad layout size in '" + spec + "'");
      }
      return head == "chain" ? chain_graph(n) : complete_graph(n);
    }
  }
  throw ConfigError("unknown layout '" + spec + "'");
}

}  // namespace bvspeed
