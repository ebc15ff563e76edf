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

// Reconfiguration schedulers. Each turns a set of logical operators to
// update into a ReconfigPlan over the worker-level graph. Plan computation
// is pure; the engine's controller executes plans.

#ifndef RECONF_SCHEDULERS_HPP_
#define RECONF_SCHEDULERS_HPP_

#include <string>
#include <vector>

#include <json.hpp>

#include "reconf/graph.hpp"
#include "reconf/mcs.hpp"
#include "reconf/parallel.hpp"
#include "reconf/plan.hpp"

namespace reconf {

// All schedulers throw InputError for an empty set or unknown operators.

// One marker from every source carrying the whole request.
ReconfigPlan schedule_epoch(const ParallelGraph& graph, const OperatorSet& ops);

// One control message per reconfiguration worker, with no coordination.
// Not safe in general; kept as a baseline.
ReconfigPlan schedule_naive_fcm(const ParallelGraph& graph, const OperatorSet& ops);

// Installs the new configuration next to the old one, then moves sources to
// the next version tag; the old configuration is retired once no tuple with
// an older tag is in flight.
ReconfigPlan schedule_multi_version(const ParallelGraph& graph, const OperatorSet& ops);

// Control messages to the heads of each component of the minimal covering
// sub-DAG; markers stay inside their component. Throws InputError if the
// graph needs the one-to-many extension and options.extended is off, unless
// options.allow_unsafe_basic is set.
ReconfigPlan schedule_fries(const ParallelGraph& graph, const OperatorSet& ops,
                            const FriesOptions& options);

ReconfigPlan make_plan(SchedulerKind kind, const FriesOptions& options,
                       const ParallelGraph& graph, const OperatorSet& ops);

// Logical-level view of a Fries plan, for reports.
struct FriesAnalysis {
  OperatorSet extended_set;
  Mcs mcs;
};
FriesAnalysis analyze_fries(const DataflowGraph& graph, const OperatorSet& ops,
                            const FriesOptions& options);

// Parsed reconfiguration request file:
// {"scheduler": "fries", "options": {"extended": true, "pruning": false},
//  "updates": [{"operator": "FD", "new_function": "...",
//               "state_transform": "..."}]}
// Function and transform names refer to a registry supplied by the caller.
struct UpdateSpec {
  OperatorId op;
  std::string new_function;
  std::string state_transform;  // may be empty
};
struct RequestDocument {
  SchedulerKind scheduler = SchedulerKind::kFries;
  FriesOptions options;
  std::vector<UpdateSpec> updates;

  OperatorSet operators() const;
};
RequestDocument parse_request(const nlohmann::json& j);

nlohmann::json plan_to_json(const ReconfigPlan& plan);
nlohmann::json analysis_to_json(const FriesAnalysis& analysis);

}  // namespace reconf

#endif  // RECONF_SCHEDULERS_HPP_
