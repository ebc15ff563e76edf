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

// Controller actions computed by a scheduler. Plans name workers of the
// parallel-expanded graph, never logical operators.

#ifndef RECONF_PLAN_HPP_
#define RECONF_PLAN_HPP_

#include <cstddef>
#include <string>
#include <vector>

#include "reconf/graph.hpp"

namespace reconf {

enum class SchedulerKind { kEpoch, kNaive, kMultiVersion, kFries };

std::string to_string(SchedulerKind kind);
// Accepts "epoch", "naive", "multiversion" and "fries".
SchedulerKind parse_scheduler(const std::string& text);

struct FriesOptions {
  bool extended = true;
  bool pruning = false;
  // Permits basic Fries on graphs that need the extension. Negative
  // controls only.
  bool allow_unsafe_basic = false;
};

struct PlanComponent {
  OperatorSet vertices;
  EdgeSet edges;
  OperatorSet heads;
  std::size_t longest_path_len = 0;
};

struct ReconfigPlan {
  SchedulerKind kind = SchedulerKind::kFries;
  FriesOptions options;
  OperatorSet reconfig_workers;  // workers that apply an update
  OperatorSet extended_set;      // M after extension, in workers
  std::vector<PlanComponent> components;
  // Workers that receive a controller message: heads for Fries, sources
  // for Epoch, reconfiguration workers for Naive and Multi-Version.
  OperatorSet fcm_targets;
  OperatorSet version_sources;  // multi-version phase 2 targets
};

}  // namespace reconf

#endif  // RECONF_PLAN_HPP_
