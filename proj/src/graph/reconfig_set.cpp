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

#include "reconf/error.hpp"
#include "reconf/mcs.hpp"

namespace reconf {

OperatorSet one_to_many_ancestors(const DataflowGraph& graph, const OperatorId& target) {
  const std::size_t t = graph.index_of(target);
  const std::vector<bool> up = graph.reaching(t);
  OperatorSet out;
  for (std::size_t v = 0; v < graph.size(); ++v) {
    if (v != t && up[v] && graph.meta_at(v).arity == Arity::kOneToMany) {
      out.insert(graph.id_at(v));
    }
  }
  return out;
}

namespace {

bool edge_wise_rule(const DataflowGraph& graph, const std::vector<bool>& reaches_reconfig,
                    std::size_t ancestor, std::size_t target) {
  if (!graph.meta_at(ancestor).per_edge_one_to_one) return false;
  const std::vector<bool> to_target = graph.reaching(target);
  std::size_t reaching_edges = 0;
  bool via_target = false;
  for (std::size_t e : graph.out_edges(ancestor)) {
    std::size_t next = graph.edge_to(e);
    if (!reaches_reconfig[next]) continue;
    ++reaching_edges;
    via_target = to_target[next];
  }
  return reaching_edges == 1 && via_target;
}

bool uniqueness_rule(const DataflowGraph& graph, std::size_t ancestor, std::size_t target) {
  // Search from the ancestor without passing through uniqueness operators;
  // if the target stays unreachable every path is cut by one.
  std::vector<bool> seen(graph.size(), false);
  std::vector<std::size_t> stack{ancestor};
  seen[ancestor] = true;
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t e : graph.out_edges(u)) {
      std::size_t w = graph.edge_to(e);
      if (w == target) return false;
      if (seen[w] || graph.meta_at(w).uniqueness) continue;
      seen[w] = true;
      stack.push_back(w);
    }
  }
  return true;
}

}  // namespace

OperatorSet prune_ancestors(const DataflowGraph& graph, const OperatorSet& reconfig_ops,
                            const OperatorId& target, const OperatorSet& ancestors) {
  const std::size_t t = graph.index_of(target);
  // Vertices from which some reconfiguration operator is reachable.
  std::vector<bool> reaches_reconfig(graph.size(), false);
  for (const OperatorId& r : reconfig_ops) {
    std::vector<bool> up = graph.reaching(graph.index_of(r));
    for (std::size_t v = 0; v < graph.size(); ++v) {
      if (up[v]) reaches_reconfig[v] = true;
    }
  }
  OperatorSet kept;
  for (const OperatorId& a : ancestors) {
    const std::size_t ai = graph.index_of(a);
    if (edge_wise_rule(graph, reaches_reconfig, ai, t)) continue;
    if (uniqueness_rule(graph, ai, t)) continue;
    kept.insert(a);
  }
  return kept;
}

OperatorSet earliest(const DataflowGraph& graph, const OperatorSet& candidates) {
  OperatorSet out;
  for (const OperatorId& c : candidates) {
    const std::vector<bool> up = graph.reaching(graph.index_of(c));
    bool dominated = false;
    for (const OperatorId& other : candidates) {
      if (other != c && up[graph.index_of(other)]) {
        dominated = true;
        break;
      }
    }
    if (!dominated) out.insert(c);
  }
  return out;
}

OperatorSet extend_reconfig_set(const DataflowGraph& graph, const OperatorSet& reconfig_ops,
                                bool pruning_enabled) {
  for (const OperatorId& o : reconfig_ops) graph.index_of(o);
  OperatorSet m = reconfig_ops;
  for (const OperatorId& o : reconfig_ops) {
    OperatorSet ancestors = one_to_many_ancestors(graph, o);
    if (pruning_enabled) ancestors = prune_ancestors(graph, reconfig_ops, o, ancestors);
    for (const OperatorId& a : earliest(graph, ancestors)) m.insert(a);
  }
  return m;
}

}  // namespace reconf
