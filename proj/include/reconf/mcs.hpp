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

// Minimal covering sub-DAG (MCS) of a set of operators and the sets that
// feed it.
//
// The MCS of M in G is the smallest sub-DAG that contains M and every
// vertex and edge lying on a path between two members of M. It is computed
// by a forward pass marking descendants of M and a backward pass marking
// ancestors of M; the MCS is the set of vertices carrying both marks plus all
// edges between them. Its weakly connected components are the units that a
// component-scoped reconfiguration synchronizes independently.

#ifndef RECONF_MCS_HPP_
#define RECONF_MCS_HPP_

#include <cstddef>
#include <vector>

#include "reconf/graph.hpp"

namespace reconf {

struct Component {
  OperatorSet vertices;
  EdgeSet edges;
  // Vertices without an input edge inside the component.
  OperatorSet heads;
  // Longest path in edges.
  std::size_t longest_path_len = 0;

  bool operator==(const Component&) const = default;
};

struct Mcs {
  OperatorSet vertices;
  EdgeSet edges;
  // Ordered by smallest member id.
  std::vector<Component> components;
};

// Throws InputError for unknown operators or a cyclic graph. An empty M
// yields an empty MCS.
Mcs find_mcs(const DataflowGraph& graph, const OperatorSet& m,
             WorkCounter* counter = nullptr);

// Weakly connected components of a sub-DAG given as vertex and edge sets.
std::vector<Component> find_components(const OperatorSet& vertices, const EdgeSet& edges,
                                       WorkCounter* counter = nullptr);

// One-to-many strict ancestors of `target`.
OperatorSet one_to_many_ancestors(const DataflowGraph& graph, const OperatorId& target);

// Drops the ancestors of `target` that need no synchronization:
//  - edge-wise rule: the ancestor emits at most one tuple per output edge and
//    exactly one of its output edges reaches any reconfiguration operator,
//    and that edge reaches `target`;
//  - uniqueness rule: every path from the ancestor to `target` passes an
//    operator that emits at most one tuple per transaction.
OperatorSet prune_ancestors(const DataflowGraph& graph, const OperatorSet& reconfig_ops,
                            const OperatorId& target, const OperatorSet& ancestors);

// Members of `candidates` that have no other member as an ancestor.
OperatorSet earliest(const DataflowGraph& graph, const OperatorSet& candidates);

// reconfig_ops plus, for each of them, the earliest one-to-many ancestors
// that survive pruning (when enabled).
OperatorSet extend_reconfig_set(const DataflowGraph& graph, const OperatorSet& reconfig_ops,
                                bool pruning_enabled);

// True when some one-to-many operator is an ancestor of a reconfiguration
// operator, i.e. when the component-only plan is not sufficient.
bool needs_extension(const DataflowGraph& graph, const OperatorSet& reconfig_ops);

}  // namespace reconf

#endif  // RECONF_MCS_HPP_
