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

#include "reconf/graph.hpp"

#include <functional>
#include <queue>

#include "reconf/error.hpp"

namespace reconf {

std::string_view to_string(Arity a) {
  return a == Arity::kOneToOne ? "one_to_one" : "one_to_many";
}

std::string_view to_string(Partitioning p) {
  switch (p) {
    case Partitioning::kHash: return "hash";
    case Partitioning::kRange: return "range";
    case Partitioning::kBroadcast: return "broadcast";
  }
  return "hash";
}

Arity parse_arity(std::string_view s) {
  if (s == "one_to_one") return Arity::kOneToOne;
  if (s == "one_to_many") return Arity::kOneToMany;
  throw InputError("unknown arity '" + std::string(s) + "'");
}

Partitioning parse_partitioning(std::string_view s) {
  if (s == "hash") return Partitioning::kHash;
  if (s == "range") return Partitioning::kRange;
  if (s == "broadcast") return Partitioning::kBroadcast;
  throw InputError("unknown partitioning '" + std::string(s) + "'");
}

void DataflowGraph::add_operator(const OperatorId& id, OperatorMeta meta) {
  if (id.empty()) throw InputError("operator id must not be empty");
  if (contains(id)) throw InputError("duplicate operator '" + id + "'");
  if (meta.worker_count < 1) {
    throw InputError("operator '" + id + "' needs worker_count >= 1");
  }
  index_.emplace(id, ids_.size());
  ids_.push_back(id);
  metas_.push_back(meta);
  out_.emplace_back();
  in_.emplace_back();
}

void DataflowGraph::add_edge(const OperatorId& from, const OperatorId& to) {
  add_edge(Edge{from, to, meta(from).partitioning});
}

void DataflowGraph::add_edge(const Edge& e) {
  std::size_t f = index_of(e.from);
  std::size_t t = index_of(e.to);
  for (std::size_t ei : out_[f]) {
    if (edge_ends_[ei].second == t) {
      throw InputError("duplicate edge " + e.from + "->" + e.to);
    }
  }
  out_[f].push_back(edges_.size());
  in_[t].push_back(edges_.size());
  edges_.push_back(e);
  edge_ends_.emplace_back(f, t);
}

void DataflowGraph::derive_roles() {
  for (std::size_t v = 0; v < size(); ++v) {
    metas_[v].is_source = in_[v].empty();
    metas_[v].is_sink = out_[v].empty();
  }
}

void DataflowGraph::validate() const {
  if (empty()) throw InputError("graph has no operators");
  topological_order();
  bool has_source = false;
  bool has_sink = false;
  for (std::size_t v = 0; v < size(); ++v) {
    if (metas_[v].is_source && !in_[v].empty()) {
      throw InputError("source '" + ids_[v] + "' has input edges");
    }
    if (metas_[v].is_sink && !out_[v].empty()) {
      throw InputError("sink '" + ids_[v] + "' has output edges");
    }
    has_source = has_source || in_[v].empty();
    has_sink = has_sink || out_[v].empty();
  }
  if (!has_source || !has_sink) throw InputError("graph needs a source and a sink");
}

std::size_t DataflowGraph::index_of(const OperatorId& id) const {
  auto it = index_.find(id);
  if (it == index_.end()) throw InputError("unknown operator '" + id + "'");
  return it->second;
}

const OperatorMeta& DataflowGraph::meta(const OperatorId& id) const {
  return metas_[index_of(id)];
}

OperatorMeta& DataflowGraph::mutable_meta(const OperatorId& id) {
  return metas_[index_of(id)];
}

std::vector<std::size_t> DataflowGraph::topological_order(WorkCounter* counter) const {
  std::vector<std::size_t> indegree(size());
  for (std::size_t v = 0; v < size(); ++v) indegree[v] = in_[v].size();

  // Min-heap on the id string so the order is independent of insertion order.
  auto later = [this](std::size_t a, std::size_t b) { return ids_[a] > ids_[b]; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(later)> ready(later);
  for (std::size_t v = 0; v < size(); ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<std::size_t> order;
  order.reserve(size());
  while (!ready.empty()) {
    std::size_t v = ready.top();
    ready.pop();
    order.push_back(v);
    if (counter) ++counter->steps;
    for (std::size_t e : out_[v]) {
      if (counter) ++counter->steps;
      if (--indegree[edge_ends_[e].second] == 0) ready.push(edge_ends_[e].second);
    }
  }
  if (order.size() != size()) throw InputError("graph contains a cycle");
  return order;
}

bool DataflowGraph::is_acyclic() const {
  try {
    topological_order();
    return true;
  } catch (const InputError&) {
    return false;
  }
}

std::vector<OperatorId> DataflowGraph::sources() const {
  std::vector<OperatorId> out;
  for (std::size_t v = 0; v < size(); ++v) {
    if (in_[v].empty()) out.push_back(ids_[v]);
  }
  return out;
}

std::vector<OperatorId> DataflowGraph::sinks() const {
  std::vector<OperatorId> out;
  for (std::size_t v = 0; v < size(); ++v) {
    if (out_[v].empty()) out.push_back(ids_[v]);
  }
  return out;
}

std::vector<bool> DataflowGraph::reachable_from(std::size_t v) const {
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> stack{v};
  seen[v] = true;
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t e : out_[u]) {
      std::size_t w = edge_ends_[e].second;
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

std::vector<bool> DataflowGraph::reaching(std::size_t v) const {
  std::vector<bool> seen(size(), false);
  std::vector<std::size_t> stack{v};
  seen[v] = true;
  while (!stack.empty()) {
    std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t e : in_[u]) {
      std::size_t w = edge_ends_[e].first;
      if (!seen[w]) {
        seen[w] = true;
        stack.push_back(w);
      }
    }
  }
  return seen;
}

DataflowGraph DataflowGraph::induced(const OperatorSet& vertices) const {
  DataflowGraph sub;
  for (std::size_t v = 0; v < size(); ++v) {
    if (vertices.count(ids_[v])) sub.add_operator(ids_[v], metas_[v]);
  }
  for (const Edge& e : edges_) {
    if (vertices.count(e.from) && vertices.count(e.to)) sub.add_edge(e);
  }
  return sub;
}

}  // namespace reconf
