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

#include "reconf/mcs.hpp"

#include <algorithm>
#include <map>

#include "reconf/error.hpp"

namespace reconf {

Mcs find_mcs(const DataflowGraph& graph, const OperatorSet& m, WorkCounter* counter) {
  std::vector<bool> in_m(graph.size(), false);
  for (const OperatorId& id : m) in_m[graph.index_of(id)] = true;

  const std::vector<std::size_t> order = graph.topological_order(counter);
  auto tick = [counter] {
    if (counter) ++counter->steps;
  };

  // Forward pass: descendants of M (inclusive).
  std::vector<bool> red(graph.size(), false);
  for (std::size_t v : order) {
    tick();
    bool mark = in_m[v];
    for (std::size_t e : graph.in_edges(v)) {
      tick();
      mark = mark || red[graph.edge_from(e)];
    }
    red[v] = mark;
  }
  // Backward pass: ancestors of M (inclusive).
  std::vector<bool> blue(graph.size(), false);
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    tick();
    std::size_t v = *it;
    bool mark = in_m[v];
    for (std::size_t e : graph.out_edges(v)) {
      tick();
      mark = mark || blue[graph.edge_to(e)];
    }
    blue[v] = mark;
  }

  Mcs out;
  for (std::size_t v = 0; v < graph.size(); ++v) {
    tick();
    if (red[v] && blue[v]) out.vertices.insert(graph.id_at(v));
  }
  for (std::size_t e = 0; e < graph.edges().size(); ++e) {
    tick();
    std::size_t f = graph.edge_from(e);
    std::size_t t = graph.edge_to(e);
    if (red[f] && blue[f] && red[t] && blue[t]) out.edges.insert(graph.edges()[e]);
  }
  out.components = find_components(out.vertices, out.edges, counter);
  return out;
}

std::vector<Component> find_components(const OperatorSet& vertices, const EdgeSet& edges,
                                       WorkCounter* counter) {
  auto tick = [counter] {
    if (counter) ++counter->steps;
  };
  // Dense indices over the (sorted) vertex set.
  std::map<OperatorId, std::size_t> index;
  std::vector<OperatorId> ids(vertices.begin(), vertices.end());
  for (std::size_t i = 0; i < ids.size(); ++i) index.emplace(ids[i], i);

  std::vector<std::vector<std::size_t>> undirected(ids.size());
  std::vector<std::vector<std::size_t>> succ(ids.size());
  std::vector<std::size_t> indegree(ids.size(), 0);
  for (const Edge& e : edges) {
    tick();
    auto f = index.find(e.from);
    auto t = index.find(e.to);
    if (f == index.end() || t == index.end()) {
      throw InputError("edge " + e.from + "->" + e.to + " leaves the sub-DAG");
    }
    undirected[f->second].push_back(t->second);
    undirected[t->second].push_back(f->second);
    succ[f->second].push_back(t->second);
    ++indegree[t->second];
  }

  std::vector<int> label(ids.size(), -1);
  int next = 0;
  for (std::size_t s = 0; s < ids.size(); ++s) {
    if (label[s] != -1) continue;
    std::vector<std::size_t> stack{s};
    label[s] = next;
    while (!stack.empty()) {
      std::size_t u = stack.back();
      stack.pop_back();
      tick();
      for (std::size_t w : undirected[u]) {
        tick();
        if (label[w] == -1) {
          label[w] = next;
          stack.push_back(w);
        }
      }
    }
    ++next;
  }

  std::vector<Component> comps(static_cast<std::size_t>(next));
  for (std::size_t i = 0; i < ids.size(); ++i) {
    Component& c = comps[static_cast<std::size_t>(label[i])];
    c.vertices.insert(ids[i]);
    if (indegree[i] == 0) c.heads.insert(ids[i]);
  }
  for (const Edge& e : edges) {
    comps[static_cast<std::size_t>(label[index.at(e.from)])].edges.insert(e);
  }

  // Longest path per component: relax edges in topological order.
  std::vector<std::size_t> depth(ids.size(), 0);
  std::vector<std::size_t> remaining = indegree;
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (remaining[i] == 0) ready.push_back(i);
  }
  std::size_t visited = 0;
  while (!ready.empty()) {
    std::size_t u = ready.back();
    ready.pop_back();
    ++visited;
    tick();
    Component& c = comps[static_cast<std::size_t>(label[u])];
    c.longest_path_len = std::max(c.longest_path_len, depth[u]);
    for (std::size_t w : succ[u]) {
      tick();
      depth[w] = std::max(depth[w], depth[u] + 1);
      if (--remaining[w] == 0) ready.push_back(w);
    }
  }
  if (visited != ids.size()) throw InputError("sub-DAG contains a cycle");
  return comps;
}

bool needs_extension(const DataflowGraph& graph, const OperatorSet& reconfig_ops) {
  for (const OperatorId& o : reconfig_ops) {
    if (!one_to_many_ancestors(graph, o).empty()) return true;
  }
  return false;
}

}  // namespace reconf
