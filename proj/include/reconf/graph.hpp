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

// Operator DAG model shared by the planner, the engine and the harness.

#ifndef RECONF_GRAPH_HPP_
#define RECONF_GRAPH_HPP_

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace reconf {

using OperatorId = std::string;
using OperatorSet = std::set<OperatorId>;

enum class Arity { kOneToOne, kOneToMany };

enum class Partitioning { kHash, kRange, kBroadcast };

std::string_view to_string(Arity a);
std::string_view to_string(Partitioning p);
Arity parse_arity(std::string_view s);
Partitioning parse_partitioning(std::string_view s);

struct OperatorMeta {
  Arity arity = Arity::kOneToOne;
  // Emits at most one tuple on each output edge per input tuple
  // (replicate-style). Only meaningful for one-to-many operators.
  bool per_edge_one_to_one = false;
  // Emits at most one output tuple per data transaction.
  bool uniqueness = false;
  bool blocking = false;
  bool is_source = false;
  bool is_sink = false;
  int worker_count = 1;
  // Default partitioning of the operator's output edges.
  Partitioning partitioning = Partitioning::kHash;
  // Per-tuple processing delay.
  double cost_ms = 0.0;
  // Set on the replicate vertices that parallel expansion inserts after
  // broadcasting workers.
  bool synthetic = false;

  bool operator==(const OperatorMeta&) const = default;
};

struct Edge {
  OperatorId from;
  OperatorId to;
  Partitioning partitioning = Partitioning::kHash;

  auto operator<=>(const Edge& o) const {
    if (auto c = from <=> o.from; c != 0) return c;
    return to <=> o.to;
  }
  bool operator==(const Edge& o) const { return from == o.from && to == o.to; }
};

using EdgeSet = std::set<Edge>;

// Counts elementary steps of the graph algorithms so tests can bound their
// work by a multiple of V+E.
struct WorkCounter {
  std::size_t steps = 0;
};

class DataflowGraph {
 public:
  DataflowGraph() = default;

  // Throws InputError on a duplicate id.
  void add_operator(const OperatorId& id, OperatorMeta meta = {});
  // Uses the source operator's default partitioning. Throws InputError when an
  // endpoint is unknown or the edge already exists.
  void add_edge(const OperatorId& from, const OperatorId& to);
  void add_edge(const Edge& e);

  // Sets is_source / is_sink from vertex degrees.
  void derive_roles();

  // Throws InputError unless the graph is a non-empty DAG whose role flags
  // agree with its edges.
  void validate() const;

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  bool contains(const OperatorId& id) const { return index_.count(id) != 0; }
  std::size_t index_of(const OperatorId& id) const;
  const OperatorId& id_at(std::size_t i) const { return ids_[i]; }
  const OperatorMeta& meta(const OperatorId& id) const;
  const OperatorMeta& meta_at(std::size_t i) const { return metas_[i]; }
  OperatorMeta& mutable_meta(const OperatorId& id);

  const std::vector<OperatorId>& operators() const { return ids_; }
  const std::vector<Edge>& edges() const { return edges_; }
  // Edge indices into edges().
  const std::vector<std::size_t>& out_edges(std::size_t v) const { return out_[v]; }
  const std::vector<std::size_t>& in_edges(std::size_t v) const { return in_[v]; }
  std::size_t edge_from(std::size_t e) const { return edge_ends_[e].first; }
  std::size_t edge_to(std::size_t e) const { return edge_ends_[e].second; }

  // Kahn's algorithm; among ready vertices the smallest OperatorId goes
  // first. Throws InputError on a cycle.
  std::vector<std::size_t> topological_order(WorkCounter* counter = nullptr) const;
  bool is_acyclic() const;

  std::vector<OperatorId> sources() const;
  std::vector<OperatorId> sinks() const;

  // Reachability as a per-vertex bitmap, including the start vertex.
  std::vector<bool> reachable_from(std::size_t v) const;
  std::vector<bool> reaching(std::size_t v) const;

  // Sub-graph on the given vertices keeping every edge between them.
  DataflowGraph induced(const OperatorSet& vertices) const;

  bool operator==(const DataflowGraph& o) const {
    return ids_ == o.ids_ && metas_ == o.metas_ && edges_ == o.edges_;
  }

 private:
  std::vector<OperatorId> ids_;
  std::vector<OperatorMeta> metas_;
  std::map<OperatorId, std::size_t> index_;
  std::vector<Edge> edges_;
  std::vector<std::pair<std::size_t, std::size_t>> edge_ends_;
  std::vector<std::vector<std::size_t>> out_;
  std::vector<std::vector<std::size_t>> in_;
};

// JSON graph documents; see docs/schema.md.
DataflowGraph graph_from_json_text(const std::string& text);
DataflowGraph load_graph_file(const std::string& path);
std::string graph_to_json_text(const DataflowGraph& g);

}  // namespace reconf

#endif  // RECONF_GRAPH_HPP_
