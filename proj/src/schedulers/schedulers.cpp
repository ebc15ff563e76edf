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

#include "reconf/schedulers.hpp"

#include "reconf/error.hpp"

namespace reconf {

using nlohmann::json;

namespace {

ReconfigPlan base_plan(SchedulerKind kind, const ParallelGraph& graph, const OperatorSet& ops) {
  if (ops.empty()) throw InputError("reconfiguration request is empty");
  ReconfigPlan plan;
  plan.kind = kind;
  plan.reconfig_workers = graph.workers_of(ops);
  return plan;
}

OperatorSet source_workers(const ParallelGraph& graph) {
  OperatorSet out;
  for (const OperatorId& s : graph.graph.sources()) out.insert(s);
  return out;
}

json set_json(const OperatorSet& s) { return json(std::vector<std::string>(s.begin(), s.end())); }

json component_json(const OperatorSet& vertices, const EdgeSet& edges, const OperatorSet& heads,
                    std::size_t longest) {
  json e = json::array();
  for (const Edge& x : edges) e.push_back({x.from, x.to});
  return {{"vertices", set_json(vertices)},
          {"edges", std::move(e)},
          {"heads", set_json(heads)},
          {"longest_path", longest}};
}

}  // namespace

ReconfigPlan schedule_epoch(const ParallelGraph& graph, const OperatorSet& ops) {
  ReconfigPlan plan = base_plan(SchedulerKind::kEpoch, graph, ops);
  plan.fcm_targets = source_workers(graph);
  return plan;
}

ReconfigPlan schedule_naive_fcm(const ParallelGraph& graph, const OperatorSet& ops) {
  ReconfigPlan plan = base_plan(SchedulerKind::kNaive, graph, ops);
  plan.fcm_targets = plan.reconfig_workers;
  return plan;
}

ReconfigPlan schedule_multi_version(const ParallelGraph& graph, const OperatorSet& ops) {
  ReconfigPlan plan = base_plan(SchedulerKind::kMultiVersion, graph, ops);
  plan.fcm_targets = plan.reconfig_workers;
  plan.version_sources = source_workers(graph);
  return plan;
}

ReconfigPlan schedule_fries(const ParallelGraph& graph, const OperatorSet& ops,
                            const FriesOptions& options) {
  ReconfigPlan plan = base_plan(SchedulerKind::kFries, graph, ops);
  plan.options = options;
  const DataflowGraph& g = graph.graph;
  if (!options.extended && !options.allow_unsafe_basic &&
      needs_extension(g, plan.reconfig_workers)) {
    throw InputError(
        "a one-to-many operator feeds the reconfiguration set; enable the extended mode");
  }
  plan.extended_set = options.extended
                          ? extend_reconfig_set(g, plan.reconfig_workers, options.pruning)
                          : plan.reconfig_workers;
  const Mcs mcs = find_mcs(g, plan.extended_set);
  for (const Component& c : mcs.components) {
    plan.components.push_back(PlanComponent{c.vertices, c.edges, c.heads, c.longest_path_len});
    plan.fcm_targets.insert(c.heads.begin(), c.heads.end());
  }
  return plan;
}

ReconfigPlan make_plan(SchedulerKind kind, const FriesOptions& options,
                       const ParallelGraph& graph, const OperatorSet& ops) {
  switch (kind) {
    case SchedulerKind::kEpoch:
      return schedule_epoch(graph, ops);
    case SchedulerKind::kNaive:
      return schedule_naive_fcm(graph, ops);
    case SchedulerKind::kMultiVersion:
      return schedule_multi_version(graph, ops);
    case SchedulerKind::kFries:
      return schedule_fries(graph, ops, options);
  }
  throw InputError("unknown scheduler");
}

FriesAnalysis analyze_fries(const DataflowGraph& graph, const OperatorSet& ops,
                            const FriesOptions& options) {
  if (ops.empty()) throw InputError("reconfiguration request is empty");
  for (const OperatorId& o : ops) graph.index_of(o);
  if (!options.extended && !options.allow_unsafe_basic && needs_extension(graph, ops)) {
    throw InputError(
        "a one-to-many operator feeds the reconfiguration set; enable the extended mode");
  }
  FriesAnalysis a;
  a.extended_set = options.extended ? extend_reconfig_set(graph, ops, options.pruning) : ops;
  a.mcs = find_mcs(graph, a.extended_set);
  return a;
}

OperatorSet RequestDocument::operators() const {
  OperatorSet out;
  for (const UpdateSpec& u : updates) out.insert(u.op);
  return out;
}

RequestDocument parse_request(const json& j) {
  RequestDocument doc;
  try {
    doc.scheduler = parse_scheduler(j.value("scheduler", std::string("fries")));
    if (j.contains("options")) {
      const json& o = j.at("options");
      doc.options.extended = o.value("extended", true);
      doc.options.pruning = o.value("pruning", false);
    }
    for (const json& u : j.at("updates")) {
      UpdateSpec s;
      s.op = u.at("operator").get<std::string>();
      s.new_function = u.at("new_function").get<std::string>();
      s.state_transform = u.value("state_transform", std::string());
      doc.updates.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("bad reconfiguration request: ") + e.what());
  }
  if (doc.updates.empty()) throw InputError("reconfiguration request is empty");
  OperatorSet seen;
  for (const UpdateSpec& u : doc.updates) {
    if (!seen.insert(u.op).second) throw InputError("operator '" + u.op + "' updated twice");
  }
  return doc;
}

json plan_to_json(const ReconfigPlan& plan) {
  json comps = json::array();
  for (const PlanComponent& c : plan.components) {
    comps.push_back(component_json(c.vertices, c.edges, c.heads, c.longest_path_len));
  }
  return {{"scheduler", to_string(plan.kind)},
          {"extended", plan.options.extended},
          {"pruning", plan.options.pruning},
          {"reconfig_workers", set_json(plan.reconfig_workers)},
          {"extended_set", set_json(plan.extended_set)},
          {"components", std::move(comps)},
          {"fcm_targets", set_json(plan.fcm_targets)},
          {"version_sources", set_json(plan.version_sources)}};
}

json analysis_to_json(const FriesAnalysis& analysis) {
  json comps = json::array();
  for (const Component& c : analysis.mcs.components) {
    comps.push_back(component_json(c.vertices, c.edges, c.heads, c.longest_path_len));
  }
  return {{"extended_set", set_json(analysis.extended_set)},
          {"mcs", set_json(analysis.mcs.vertices)},
          {"components", std::move(comps)}};
}

}  // namespace reconf
