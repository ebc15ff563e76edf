// Copyright 2026 The Reconf Authors
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

#include <algorithm>
#include <numeric>

#include "reconf/error.hpp"
#include "reconf/parallel.hpp"

namespace reconf {

std::vector<DataflowGraph> segment_by_blocking(const DataflowGraph& graph) {
  const std::size_t n = graph.size();
  const std::vector<std::size_t> order = graph.topological_order();
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i;

  // Union-find over pipelined edges; edges leaving a blocking operator are cut.
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&parent](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t e = 0; e < graph.edges().size(); ++e) {
    std::size_t f = graph.edge_from(e);
    if (graph.meta_at(f).blocking) continue;
    parent[find(f)] = find(graph.edge_to(e));
  }

  struct Piece {
    std::size_t first_rank;
    OperatorSet members;
    OperatorSet upstream_blocking;
  };
  std::vector<std::size_t> piece_of(n, n);
  std::vector<Piece> pieces;
  for (std::size_t v : order) {
    std::size_t root = find(v);
    if (piece_of[root] == n) {
      piece_of[root] = pieces.size();
      pieces.push_back(Piece{rank[v], {}, {}});
    }
    pieces[piece_of[root]].members.insert(graph.id_at(v));
  }
  for (std::size_t e = 0; e < graph.edges().size(); ++e) {
    std::size_t f = graph.edge_from(e);
    if (!graph.meta_at(f).blocking) continue;
    pieces[piece_of[find(graph.edge_to(e))]].upstream_blocking.insert(graph.id_at(f));
  }
  std::sort(pieces.begin(), pieces.end(),
            [](const Piece& a, const Piece& b) { return a.first_rank < b.first_rank; });

  std::vector<DataflowGraph> out;
  for (const Piece& p : pieces) {
    DataflowGraph seg;
    for (const OperatorId& b : p.upstream_blocking) {
      if (!p.members.count(b)) seg.add_operator(b, graph.meta(b));
    }
    for (const OperatorId& id : p.members) seg.add_operator(id, graph.meta(id));
    for (const Edge& e : graph.edges()) {
      const bool from_inside = p.members.count(e.from) != 0;
      const bool into_inside = p.members.count(e.to) != 0;
      if (!into_inside) continue;
      if (from_inside && !graph.meta(e.from).blocking) seg.add_edge(e);
      if (p.upstream_blocking.count(e.from)) seg.add_edge(e);
    }
    seg.derive_roles();
    out.push_back(std::move(seg));
  }
  return out;
}

std::size_t route_to_segment(const std::vector<DataflowGraph>& segments, std::size_t current,
                             const OperatorSet& ops) {
  for (std::size_t s = current; s < segments.size(); ++s) {
    bool all = !ops.empty();
    for (const OperatorId& op : ops) all = all && segments[s].contains(op);
    if (all) return s;
  }
  throw InputError("reconfiguration does not fit a single pending segment");
}

}  // namespace reconf
