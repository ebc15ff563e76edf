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

#include <gtest/gtest.h>

#include "reconf/error.hpp"
#include "reconf/harness.hpp"
#include "reconf/schedulers.hpp"

namespace reconf {
namespace {

std::vector<OperatorSet> ComponentSets(const std::string& wf, const OperatorSet& ops,
                                       bool pruning = false) {
  FriesOptions o;
  o.pruning = pruning;
  const FriesAnalysis a = analyze_fries(catalog_workflow(wf).graph, ops, o);
  std::vector<OperatorSet> out;
  for (const Component& c : a.mcs.components) out.push_back(c.vertices);
  return out;
}

TEST(FriesPlanTest, JoinTreeComponents) {
  EXPECT_EQ(ComponentSets("w2", {"J1"}), (std::vector<OperatorSet>{{"J1"}}));
  EXPECT_EQ(ComponentSets("w2", {"J1", "J3"}), (std::vector<OperatorSet>{{"J1", "J2", "J3"}}));
  EXPECT_EQ(ComponentSets("w3", {"J5", "J6"}), (std::vector<OperatorSet>{{"J5"}, {"J6"}}));
  EXPECT_EQ(ComponentSets("w3", {"J7", "J8", "J9"}),
            (std::vector<OperatorSet>{{"J7", "J8", "J9", "U1"}}));
}

TEST(FriesPlanTest, OneToManyComponents) {
  EXPECT_EQ(ComponentSets("w4", {"F1", "U2"}), (std::vector<OperatorSet>{{"F1", "U2"}}));
  EXPECT_EQ(ComponentSets("w4", {"FD1"}), (std::vector<OperatorSet>{{"FD1", "U2"}}));
  EXPECT_EQ(ComponentSets("w4", {"F2"}),
            (std::vector<OperatorSet>{{"F2", "FD1", "FD2", "U2"}}));
}

TEST(FriesPlanTest, PruningComponents) {
  EXPECT_EQ(ComponentSets("w5", {"FD4"}, true), (std::vector<OperatorSet>{{"FD4"}}));
  EXPECT_EQ(ComponentSets("w5", {"FD4"}, false), (std::vector<OperatorSet>{{"F4", "FD4", "RE"}}));
  EXPECT_EQ(ComponentSets("w5", {"F3"}, false),
            (std::vector<OperatorSet>{{"F3", "FD3", "RE", "S1"}}));
  EXPECT_EQ(ComponentSets("w5", {"FD3", "FD4"}, true),
            (std::vector<OperatorSet>{{"F4", "FD3", "FD4", "RE"}}));
  EXPECT_EQ(ComponentSets("w5", {"E1"}, true), (std::vector<OperatorSet>{{"E1"}}));
}

TEST(FriesPlanTest, HeadsBecomeControlTargets) {
  CatalogOptions opts;
  opts.workers = 2;
  const ParallelGraph pg = expand_parallel(catalog_workflow("w3", opts).graph);
  const ReconfigPlan plan = schedule_fries(pg, {"J5", "J6", "J7"}, {});
  EXPECT_EQ(plan.fcm_targets, (OperatorSet{"J5#0", "J5#1", "J6#0", "J6#1"}));
  EXPECT_EQ(plan.reconfig_workers.size(), 6u);
  ASSERT_EQ(plan.components.size(), 1u);
  EXPECT_EQ(plan.components[0].longest_path_len, 1u);
}

TEST(FriesPlanTest, BasicModeGuard) {
  const ParallelGraph pg = expand_parallel(catalog_workflow("fig11a").graph);
  FriesOptions basic;
  basic.extended = false;
  EXPECT_THROW(schedule_fries(pg, {"E"}, basic), InputError);
  basic.allow_unsafe_basic = true;
  const ReconfigPlan plan = schedule_fries(pg, {"E"}, basic);
  EXPECT_EQ(plan.fcm_targets, OperatorSet{"E"});
  // One-to-one graphs need no extension.
  FriesOptions strict;
  strict.extended = false;
  EXPECT_NO_THROW(schedule_fries(expand_parallel(catalog_workflow("fig2").graph), {"FM"}, strict));
}

TEST(BaselinePlanTest, TargetsPerScheduler) {
  const ParallelGraph pg = expand_parallel(catalog_workflow("fig9").graph);
  const OperatorSet ops{"C", "F", "G"};
  EXPECT_EQ(schedule_epoch(pg, ops).fcm_targets, (OperatorSet{"A", "B"}));
  EXPECT_EQ(schedule_naive_fcm(pg, ops).fcm_targets, ops);
  const ReconfigPlan mv = schedule_multi_version(pg, ops);
  EXPECT_EQ(mv.fcm_targets, ops);
  EXPECT_EQ(mv.version_sources, (OperatorSet{"A", "B"}));
  EXPECT_EQ(make_plan(SchedulerKind::kFries, {}, pg, ops).fcm_targets, (OperatorSet{"C", "G"}));
}

TEST(BaselinePlanTest, RejectsEmptyAndUnknown) {
  const ParallelGraph pg = expand_parallel(catalog_workflow("fig2").graph);
  for (SchedulerKind k : {SchedulerKind::kEpoch, SchedulerKind::kNaive,
                          SchedulerKind::kMultiVersion, SchedulerKind::kFries}) {
    EXPECT_THROW(make_plan(k, {}, pg, {}), InputError);
    EXPECT_THROW(make_plan(k, {}, pg, {"ZZ"}), InputError);
  }
}

TEST(SchedulerNamesTest, RoundTrip) {
  for (SchedulerKind k : {SchedulerKind::kEpoch, SchedulerKind::kNaive,
                          SchedulerKind::kMultiVersion, SchedulerKind::kFries}) {
    EXPECT_EQ(parse_scheduler(to_string(k)), k);
  }
  EXPECT_THROW(parse_scheduler("chi"), InputError);
}

TEST(RequestDocumentTest, Parses) {
  const RequestDocument d = parse_request(nlohmann::json::parse(R"({
      "scheduler": "fries", "options": {"pruning": true},
      "updates": [{"operator": "FD", "new_function": "fd.v2", "state_transform": "reset"}]})"));
  EXPECT_EQ(d.scheduler, SchedulerKind::kFries);
  EXPECT_TRUE(d.options.pruning);
  EXPECT_TRUE(d.options.extended);
  ASSERT_EQ(d.updates.size(), 1u);
  EXPECT_EQ(d.updates[0].state_transform, "reset");
  EXPECT_EQ(d.operators(), OperatorSet{"FD"});
}

TEST(RequestDocumentTest, RejectsBadDocuments) {
  using nlohmann::json;
  EXPECT_THROW(parse_request(json::parse(R"({"updates": []})")), InputError);
  EXPECT_THROW(parse_request(json::parse(R"({"updates": [{"operator": "A"}]})")), InputError);
  EXPECT_THROW(parse_request(json::parse(
                   R"({"updates": [{"operator": "A", "new_function": "x"},
                                   {"operator": "A", "new_function": "y"}]})")),
               InputError);
  EXPECT_THROW(parse_request(json::parse(R"({"scheduler": "bogus", "updates": []})")),
               InputError);
}

TEST(PlanJsonTest, ListsComponents) {
  const ParallelGraph pg = expand_parallel(catalog_workflow("w3").graph);
  const nlohmann::json j = plan_to_json(schedule_fries(pg, {"J5", "J6", "J7", "J9"}, {}));
  ASSERT_EQ(j["components"].size(), 1u);
  EXPECT_EQ(j["components"][0]["longest_path"], 4);
  EXPECT_EQ(j["fcm_targets"], nlohmann::json({"J5", "J6"}));
}

}  // namespace
}  // namespace reconf
