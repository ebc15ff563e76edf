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

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "reconf/error.hpp"
#include "reconf/graph.hpp"

namespace reconf {

using nlohmann::json;

namespace {

OperatorMeta meta_from_json(const json& j) {
  OperatorMeta m;
  m.arity = parse_arity(j.value("arity", std::string("one_to_one")));
  m.per_edge_one_to_one = j.value("per_edge_one_to_one", false);
  m.uniqueness = j.value("uniqueness", false);
  m.blocking = j.value("blocking", false);
  m.worker_count = j.value("worker_count", 1);
  m.partitioning = parse_partitioning(j.value("partitioning", std::string("hash")));
  m.cost_ms = j.value("cost_ms", 0.0);
  if (m.cost_ms < 0) throw InputError("cost_ms must be non-negative");
  return m;
}

}  // namespace

DataflowGraph graph_from_json_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InputError(std::string("graph document is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("operators") || !doc["operators"].is_array()) {
    throw InputError("graph document needs an 'operators' array");
  }
  DataflowGraph g;
  struct Explicit {
    OperatorId id;
    std::optional<bool> source, sink;
  };
  std::vector<Explicit> roles;
  try {
    for (const json& op : doc["operators"]) {
      const OperatorId id = op.at("id").get<std::string>();
      g.add_operator(id, meta_from_json(op));
      Explicit r{id, {}, {}};
      if (op.contains("is_source")) r.source = op["is_source"].get<bool>();
      if (op.contains("is_sink")) r.sink = op["is_sink"].get<bool>();
      roles.push_back(r);
    }
    for (const json& e : doc.value("edges", json::array())) {
      if (e.is_array()) {
        if (e.size() != 2) throw InputError("edge pairs must have two entries");
        g.add_edge(e[0].get<std::string>(), e[1].get<std::string>());
      } else {
        const OperatorId from = e.at("from").get<std::string>();
        Edge edge{from, e.at("to").get<std::string>(), g.meta(from).partitioning};
        if (e.contains("partitioning")) {
          edge.partitioning = parse_partitioning(e["partitioning"].get<std::string>());
        }
        g.add_edge(edge);
      }
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed graph document: ") + e.what());
  }
  g.derive_roles();
  for (const Explicit& r : roles) {
    OperatorMeta& m = g.mutable_meta(r.id);
    if (r.source) m.is_source = *r.source;
    if (r.sink) m.is_sink = *r.sink;
  }
  g.validate();
  return g;
}

DataflowGraph load_graph_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open graph file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return graph_from_json_text(ss.str());
}

std::string graph_to_json_text(const DataflowGraph& g) {
  json doc;
  doc["operators"] = json::array();
  for (std::size_t v = 0; v < g.size(); ++v) {
    const OperatorMeta& m = g.meta_at(v);
    doc["operators"].push_back({
        {"id", g.id_at(v)},
        {"arity", std::string(to_string(m.arity))},
        {"per_edge_one_to_one", m.per_edge_one_to_one},
        {"uniqueness", m.uniqueness},
        {"blocking", m.blocking},
        {"is_source", m.is_source},
        {"is_sink", m.is_sink},
        {"worker_count", m.worker_count},
        {"partitioning", std::string(to_string(m.partitioning))},
        {"cost_ms", m.cost_ms},
    });
  }
  doc["edges"] = json::array();
  for (const Edge& e : g.edges()) {
    doc["edges"].push_back(
        {{"from", e.from}, {"to", e.to}, {"partitioning", std::string(to_string(e.partitioning))}});
  }
  return doc.dump(2);
}

}  // namespace reconf
