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

#include <functional>

#include "reconf/error.hpp"
#include "reconf/harness.hpp"

namespace reconf {

namespace {

struct OpDef {
  const char* id;
  const char* fn;
  Arity arity = Arity::kOneToOne;
  bool per_edge = false;
  bool uniqueness = false;
  bool parallel = false;
  bool inference = false;
};

struct Topology {
  std::vector<OpDef> ops;
  std::vector<std::pair<const char*, const char*>> edges;
};

constexpr Arity kMany = Arity::kOneToMany;
constexpr Arity kOne = Arity::kOneToOne;

// Interior operators are parallel unless noted.
OpDef op(const char* id, const char* fn, bool parallel = true) {
  return OpDef{id, fn, kOne, false, false, parallel, false};
}
OpDef infer(const char* id, const char* fn = "pass.v1") {
  return OpDef{id, fn, kOne, false, false, true, true};
}
OpDef many(const char* id, const char* fn, bool per_edge = false) {
  return OpDef{id, fn, kMany, per_edge, false, true, false};
}

Topology topology(const std::string& name) {
  if (name == "fig2") {
    return {{op("FC", "pass.v1", false), op("FM", "pass.v1"), op("MC", "sink.v1", false)},
            {{"FC", "FM"}, {"FM", "MC"}}};
  }
  if (name == "fig7") {
    return {{op("X", "pass.v1", false), op("C", "pass.v1"), op("D", "pass.v1"),
             op("Y", "sink.v1", false)},
            {{"X", "C"}, {"X", "D"}, {"C", "Y"}, {"D", "Y"}}};
  }
  if (name == "fig9") {
    return {{op("A", "pass.v1", false), op("B", "pass.v1", false), op("C", "pass.v1"),
             op("D", "pass.v1"), op("E", "pass.v1"), op("F", "pass.v1"), op("G", "pass.v1"),
             op("H", "sink.v1", false)},
            {{"A", "C"},
             {"B", "C"},
             {"B", "G"},
             {"C", "D"},
             {"C", "E"},
             {"D", "F"},
             {"E", "F"},
             {"F", "H"},
             {"G", "H"}}};
  }
  if (name == "fig10") {
    return {{op("FC", "pass.v1", false), many("J", "fanout:3.v1"), op("SP", "pass.v1"),
             op("FMX", "pass.v1"), op("FMY", "pass.v1"), op("U1", "sink.v1", false)},
            {{"FC", "J"}, {"J", "SP"}, {"SP", "FMX"}, {"SP", "FMY"}, {"FMX", "U1"},
             {"FMY", "U1"}}};
  }
  if (name == "fig11a") {
    return {{op("Src", "pass.v1", false), many("RE", "replicate.v1", true), op("C", "pass.v1"),
             op("D", "pass.v1"), op("E", "pass.v1"), op("K", "sink.v1", false)},
            {{"Src", "RE"}, {"RE", "C"}, {"RE", "D"}, {"C", "E"}, {"E", "K"}, {"D", "K"}}};
  }
  if (name == "fig11b") {
    return {{op("Src", "pass.v1", false), many("RE", "replicate.v1", true), op("C", "pass.v1"),
             op("D", "pass.v1"), op("E", "pass.v1"), op("F", "pass.v1"),
             op("K", "sink.v1", false)},
            {{"Src", "RE"},
             {"RE", "C"},
             {"RE", "D"},
             {"C", "E"},
             {"D", "F"},
             {"E", "K"},
             {"F", "K"}}};
  }
  if (name == "fig11c") {
    return {{op("Src", "pass.v1", false), many("RE", "replicate.v1", true), op("C", "pass.v1"),
             op("D", "pass.v1"), op("E", "pass.v1"), op("X", "pass.v1"),
             op("K", "sink.v1", false)},
            {{"Src", "RE"},
             {"RE", "C"},
             {"RE", "D"},
             {"C", "E"},
             {"E", "X"},
             {"D", "X"},
             {"X", "K"}}};
  }
  if (name == "fig12") {
    OpDef sj = op("SJ", "selfjoin:2.v1");
    sj.uniqueness = true;
    return {{op("Src", "pass.v1", false), many("RE", "replicate.v1", true), op("C", "pass.v1"),
             op("D", "pass.v1"), sj, op("E", "pass.v1"), op("K", "sink.v1", false)},
            {{"Src", "RE"},
             {"RE", "C"},
             {"RE", "D"},
             {"C", "SJ"},
             {"D", "SJ"},
             {"SJ", "E"},
             {"E", "K"}}};
  }
  if (name == "w1") {
    return {{op("Src", "pass.v1", false), infer("FD", "fd.v1"), op("Sink", "sink.v1", false)},
            {{"Src", "FD"}, {"FD", "Sink"}}};
  }
  if (name == "w2") {
    return {{op("Src", "pass.v1"), op("J1", "pass.v1"), op("J2", "pass.v1"), op("J3", "pass.v1"),
             op("J4", "pass.v1"), op("Sink", "sink.v1", false)},
            {{"Src", "J1"}, {"J1", "J2"}, {"J2", "J3"}, {"J3", "J4"}, {"J4", "Sink"}}};
  }
  if (name == "w3") {
    return {{op("Src1", "pass.v1", false), op("Src2", "pass.v1", false),
             op("Src3", "pass.v1", false), op("J5", "pass.v1"), op("J6", "pass.v1"),
             op("J7", "pass.v1"), op("U1", "pass.v1"), op("J8", "pass.v1"), op("J9", "pass.v1"),
             op("Sink", "sink.v1", false)},
            {{"Src1", "J5"},
             {"Src2", "J6"},
             {"J5", "J7"},
             {"J6", "J7"},
             {"J7", "U1"},
             {"Src3", "U1"},
             {"U1", "J8"},
             {"J8", "J9"},
             {"J9", "Sink"}}};
  }
  if (name == "w4") {
    return {{op("Src", "pass.v1", false), op("F1", "filter.v1"), many("U2", "fanout:4.v1"),
             infer("FD1"), infer("FD2"), op("F2", "pass.v1"), op("Sink", "sink.v1", false)},
            {{"Src", "F1"},
             {"F1", "U2"},
             {"U2", "FD1"},
             {"U2", "FD2"},
             {"FD1", "F2"},
             {"FD2", "F2"},
             {"F2", "Sink"}}};
  }
  if (name == "w5") {
    OpDef sj = op("SJ", "selfjoin:2.v1");
    sj.uniqueness = true;
    return {{op("Src", "pass.v1", false), many("RE", "replicate.v1", true), infer("FD3"),
             op("S1", "pass.v1"), op("F3", "pass.v1"), op("F4", "pass.v1"), infer("FD4"), sj,
             op("E1", "pass.v1"), op("Sink", "sink.v1", false)},
            {{"Src", "RE"},
             {"RE", "FD3"},
             {"FD3", "S1"},
             {"S1", "F3"},
             {"F3", "SJ"},
             {"RE", "F4"},
             {"F4", "FD4"},
             {"FD4", "SJ"},
             {"SJ", "E1"},
             {"E1", "Sink"}}};
  }
  throw InputError("unknown workflow '" + name + "'");
}

}  // namespace

std::vector<std::string> catalog_names() {
  return {"w1",   "w2",   "w3",    "w4",     "w5",     "fig2",  "fig7",
          "fig9", "fig10", "fig11a", "fig11b", "fig11c", "fig12"};
}

Workflow catalog_workflow(const std::string& name, const CatalogOptions& options) {
  if (options.workers < 1) throw InputError("worker count must be at least 1");
  const Topology topo = topology(name);
  Workflow wf;
  wf.name = name;
  const double inference_cost = options.inference_cost_ms.value_or(25.0);
  for (const OpDef& d : topo.ops) {
    OperatorMeta meta;
    meta.arity = d.arity;
    meta.per_edge_one_to_one = d.per_edge;
    meta.uniqueness = d.uniqueness;
    meta.worker_count = d.parallel ? options.workers : 1;
    meta.cost_ms = d.inference ? inference_cost : options.base_cost_ms;
    wf.graph.add_operator(d.id, meta);
    wf.deployment.functions.emplace(d.id, require_function(d.fn));
    if (d.inference) wf.inference.insert(d.id);
  }
  for (const auto& [from, to] : topo.edges) wf.graph.add_edge(from, to);
  wf.graph.derive_roles();
  wf.graph.validate();
  for (const OperatorId& s : wf.graph.sources()) {
    SourceFeed feed;
    feed.count = options.tuples;
    auto r = options.source_rates.find(s);
    const double rate = r != options.source_rates.end() ? r->second : options.rate;
    if (rate > 0) feed.rates = {{0.0, rate}};
    feed.payload = [](std::uint64_t i, double) { return Payload{{"key", i}, {"ver", 1}}; };
    wf.deployment.feeds.emplace(s, std::move(feed));
  }
  wf.deployment.resolve = builtin_function;
  return wf;
}

ReconfigurationRequest bump_request(const Workflow& wf, const OperatorSet& ops,
                                    const std::string& transform) {
  ReconfigurationRequest req;
  for (const OperatorId& o : ops) {
    auto it = wf.deployment.functions.find(o);
    if (it == wf.deployment.functions.end()) throw InputError("unknown operator '" + o + "'");
    req.updates.emplace(o, builtin_update(next_version(it->second.config_id), transform));
  }
  return req;
}

}  // namespace reconf
