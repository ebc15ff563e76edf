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

#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>

#include "reconf/mcs.hpp"

namespace reconf::testing {

namespace {

std::map<OperatorId, std::vector<OperatorId>> successors(const DataflowGraph& g) {
  std::map<OperatorId, std::vector<OperatorId>> out;
  for (const Edge& e : g.edges()) out[e.from].push_back(e.to);
  return out;
}

}  // namespace

SubDag brute_force_mcs(const DataflowGraph& g, const OperatorSet& m) {
  SubDag out;
  const auto succ = successors(g);
  std::vector<OperatorId> path;
  std::function<void(const OperatorId&)> walk = [&](const OperatorId& v) {
    path.push_back(v);
    if (m.count(v)) {
      for (std::size_t i = 0; i < path.size(); ++i) {
        out.vertices.insert(path[i]);
        if (i > 0) out.edges.insert(Edge{path[i - 1], path[i]});
      }
    }
    auto it = succ.find(v);
    if (it != succ.end()) {
      for (const OperatorId& w : it->second) walk(w);
    }
    path.pop_back();
  };
  for (const OperatorId& s : m) walk(s);
  return out;
}

std::vector<OperatorSet> union_find_components(const OperatorSet& vertices,
                                               const EdgeSet& edges) {
  std::map<OperatorId, OperatorId> parent;
  for (const OperatorId& v : vertices) parent[v] = v;
  std::function<OperatorId(const OperatorId&)> find = [&](const OperatorId& v) {
    if (parent[v] == v) return v;
    return parent[v] = find(parent[v]);
  };
  for (const Edge& e : edges) {
    const OperatorId a = find(e.from);
    const OperatorId b = find(e.to);
    if (a != b) parent[a] = b;
  }
  std::map<OperatorId, OperatorSet> groups;
  for (const OperatorId& v : vertices) groups[find(v)].insert(v);
  std::vector<OperatorSet> out;
  for (auto& [root, set] : groups) out.push_back(std::move(set));
  std::sort(out.begin(), out.end(),
            [](const OperatorSet& a, const OperatorSet& b) { return *a.begin() < *b.begin(); });
  return out;
}

std::size_t brute_force_longest_path(const OperatorSet& vertices, const EdgeSet& edges) {
  std::map<OperatorId, std::vector<OperatorId>> succ;
  for (const Edge& e : edges) succ[e.from].push_back(e.to);
  std::size_t best = 0;
  std::function<void(const OperatorId&, std::size_t)> walk = [&](const OperatorId& v,
                                                                  std::size_t len) {
    best = std::max(best, len);
    for (const OperatorId& w : succ[v]) walk(w, len + 1);
  };
  for (const OperatorId& v : vertices) walk(v, 0);
  return best;
}

DataflowGraph dag_from_mask(int n, std::uint64_t mask) {
  DataflowGraph g;
  for (int i = 0; i < n; ++i) g.add_operator("v" + std::to_string(i));
  int bit = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j, ++bit) {
      if (mask >> bit & 1) g.add_edge("v" + std::to_string(i), "v" + std::to_string(j));
    }
  }
  return g;
}

DataflowGraph random_dag(std::mt19937_64& rng, int n, double edge_p) {
  // Random labels so that id order and topological order differ.
  std::vector<int> label(n);
  std::iota(label.begin(), label.end(), 0);
  std::shuffle(label.begin(), label.end(), rng);
  std::bernoulli_distribution edge(edge_p);
  DataflowGraph g;
  for (int i = 0; i < n; ++i) g.add_operator("v" + std::to_string(label[i]));
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (edge(rng)) g.add_edge("v" + std::to_string(label[i]), "v" + std::to_string(label[j]));
    }
  }
  return g;
}

bool serial_order_serializable(const ScheduleLog& log) {
  // Entities: data transactions by txn id, plus the update as id 0.
  struct Op {
    std::uint32_t worker;
    std::uint64_t seq;
    bool mu;
    TxnId txn;
  };
  std::vector<Op> ops;
  std::vector<TxnId> entities;
  bool has_update = false;
  for (std::uint32_t w = 0; w < log.worker_count(); ++w) {
    for (const LogEvent& e : log.events(w)) {
      const bool mu = e.kind == EventKind::kMu;
      ops.push_back(Op{w, e.seq, mu, mu ? 0 : e.txn});
      if (mu) {
        has_update = true;
      } else if (std::find(entities.begin(), entities.end(), e.txn) == entities.end()) {
        entities.push_back(e.txn);
      }
    }
  }
  if (has_update) entities.push_back(0);
  // Conflicting pairs in log order: (earlier entity, later entity).
  std::vector<std::pair<TxnId, TxnId>> precedences;
  for (const Op& a : ops) {
    for (const Op& b : ops) {
      if (a.worker != b.worker || a.mu == b.mu || a.seq >= b.seq) continue;
      precedences.emplace_back(a.txn, b.txn);
    }
  }
  std::sort(entities.begin(), entities.end());
  do {
    std::map<TxnId, std::size_t> pos;
    for (std::size_t i = 0; i < entities.size(); ++i) pos[entities[i]] = i;
    bool ok = true;
    for (const auto& [first, second] : precedences) {
      if (pos[first] > pos[second]) {
        ok = false;
        break;
      }
    }
    if (ok) return true;
  } while (std::next_permutation(entities.begin(), entities.end()));
  return false;
}

ScheduleLog random_log(std::mt19937_64& rng, int max_txns, int max_workers) {
  auto uniform = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  const int workers = uniform(1, max_workers);
  const int txns = uniform(1, max_txns);
  std::vector<std::vector<LogEvent>> per(workers);
  TupleId next_tuple = 1;
  for (int t = 1; t <= txns; ++t) {
    const int n = uniform(1, 3);
    TupleId parent = kNoTuple;
    for (int k = 0; k < n; ++k) {
      LogEvent e;
      e.kind = EventKind::kPhi;
      e.txn = static_cast<TxnId>(t);
      e.tuple = next_tuple++;
      e.parent = parent;
      parent = e.tuple;
      per[uniform(0, workers - 1)].push_back(e);
    }
  }
  if (uniform(0, 9) != 0) {
    bool any = false;
    for (int w = 0; w < workers; ++w) {
      if (uniform(0, 1) == 1 || (!any && w == workers - 1)) {
        LogEvent e;
        e.kind = EventKind::kMu;
        e.request = 1;
        per[w].push_back(e);
        any = true;
      }
    }
  }
  ScheduleLog log;
  std::uint64_t index = 0;
  for (int w = 0; w < workers; ++w) {
    const std::string name = "w" + std::to_string(w);
    const std::uint32_t id = log.add_worker(name, name);
    std::shuffle(per[w].begin(), per[w].end(), rng);
    for (LogEvent e : per[w]) {
      e.worker = id;
      e.index = index++;
      log.append(e);
    }
  }
  return log;
}

std::string compare_mcs(const DataflowGraph& g, const OperatorSet& m) {
  const Mcs got = find_mcs(g, m);
  const SubDag want = brute_force_mcs(g, m);
  if (got.vertices != want.vertices) return "vertices differ";
  if (got.edges != want.edges) return "edges differ";
  const auto comps = union_find_components(want.vertices, want.edges);
  if (comps.size() != got.components.size()) return "component count differs";
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const Component& c = got.components[i];
    if (c.vertices != comps[i]) return "component vertices differ";
    EdgeSet inner;
    for (const Edge& e : want.edges) {
      if (comps[i].count(e.from)) inner.insert(e);
    }
    if (c.edges != inner) return "component edges differ";
    if (c.longest_path_len != brute_force_longest_path(c.vertices, c.edges)) {
      return "longest path differs";
    }
    OperatorSet heads;
    for (const OperatorId& v : c.vertices) {
      bool has_in = false;
      for (const Edge& e : inner) has_in = has_in || e.to == v;
      if (!has_in) heads.insert(v);
    }
    if (c.heads != heads) return "heads differ";
  }
  return "";
}

OperatorSet subset_of(const DataflowGraph& g, std::uint64_t bits) {
  OperatorSet m;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (bits >> i & 1) m.insert(g.id_at(i));
  }
  return m;
}

}  // namespace reconf::testing
