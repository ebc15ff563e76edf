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

#include "reconf/parallel.hpp"

#include "reconf/error.hpp"

namespace reconf {

std::string worker_name(const OperatorId& op, int index, int worker_count) {
  if (worker_count == 1) return op;
  return op + "#" + std::to_string(index);
}

OperatorSet ParallelGraph::workers_of(const OperatorSet& ops) const {
  OperatorSet out;
  for (const OperatorId& op : ops) {
    auto it = workers.find(op);
    if (it == workers.end()) throw InputError("unknown operator '" + op + "'");
    out.insert(it->second.begin(), it->second.end());
  }
  return out;
}

const OperatorId& ParallelGraph::logical_of(const OperatorId& worker) const {
  auto it = info.find(worker);
  if (it == info.end()) throw InputError("unknown worker '" + worker + "'");
  return it->second.op;
}

std::size_t ParallelGraph::channel_count() const {
  std::size_t n = 0;
  for (const Edge& e : graph.edges()) {
    if (!info.at(e.to).synthetic) ++n;
  }
  return n;
}

std::size_t ParallelGraph::channel_count_within(const OperatorSet& worker_vertices) const {
  std::size_t n = 0;
  for (const Edge& e : graph.edges()) {
    if (info.at(e.to).synthetic) continue;
    if (worker_vertices.count(e.from) && worker_vertices.count(e.to)) ++n;
  }
  return n;
}

ParallelGraph expand_parallel(const DataflowGraph& graph) {
  ParallelGraph out;
  for (std::size_t v = 0; v < graph.size(); ++v) {
    const OperatorId& op = graph.id_at(v);
    OperatorMeta meta = graph.meta_at(v);
    const int count = meta.worker_count;
    if (count < 1) throw InputError("operator '" + op + "' needs worker_count >= 1");
    meta.worker_count = 1;
    auto& names = out.workers[op];
    for (int k = 0; k < count; ++k) {
      const OperatorId name = worker_name(op, k, count);
      out.graph.add_operator(name, meta);
      out.info.emplace(name, WorkerInfo{op, k, false, {}});
      names.push_back(name);
    }
  }
  for (const Edge& e : graph.edges()) {
    const auto& senders = out.workers.at(e.from);
    const auto& receivers = out.workers.at(e.to);
    for (const OperatorId& s : senders) {
      if (e.partitioning == Partitioning::kBroadcast) {
        const OperatorId rep = s + "~" + e.to;
        OperatorMeta rm;
        rm.arity = Arity::kOneToMany;
        rm.per_edge_one_to_one = true;
        rm.synthetic = true;
        out.graph.add_operator(rep, rm);
        out.info.emplace(rep, WorkerInfo{e.from, out.info.at(s).index, true, e.to});
        out.graph.add_edge(Edge{s, rep, Partitioning::kHash});
        for (const OperatorId& r : receivers) out.graph.add_edge(Edge{rep, r, Partitioning::kHash});
      } else {
        for (const OperatorId& r : receivers) out.graph.add_edge(Edge{s, r, e.partitioning});
      }
    }
  }
  // Roles follow degrees, which match the logical operator for real workers.
  out.graph.derive_roles();
  return out;
}

}  // namespace reconf
