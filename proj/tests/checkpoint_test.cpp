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

#include "reconf/engine.hpp"
#include "reconf/error.hpp"
#include "reconf/harness.hpp"

namespace reconf {
namespace {

using nlohmann::json;

TEST(ArtifactTest, JsonRoundTrip) {
  CheckpointArtifact a;
  a.id = 4;
  a.taken_ms = 12.5;
  a.workers["A"] = WorkerSnapshot{"pass.v1", json{{"n", 3}}, 3, 1};
  a.workers["B#1"] = WorkerSnapshot{"fd.v2", nullptr, 0, 2};
  const CheckpointArtifact b = CheckpointArtifact::from_json(a.to_json());
  EXPECT_EQ(b.to_json(), a.to_json());
  EXPECT_EQ(b.workers.at("A").source_offset, 3u);
  EXPECT_EQ(b.workers.at("B#1").source_version, 2u);
}

TEST(ArtifactTest, RejectsCorruptDocuments) {
  CheckpointArtifact a;
  a.workers["A"] = WorkerSnapshot{"pass.v1", nullptr, 0, 1};
  json bad_format = a.to_json();
  bad_format["format"] = "other/9";
  EXPECT_THROW(CheckpointArtifact::from_json(bad_format), InputError);
  json no_workers = a.to_json();
  no_workers["workers"] = json::object();
  EXPECT_THROW(CheckpointArtifact::from_json(no_workers), InputError);
  json wrong_type = a.to_json();
  wrong_type["workers"]["A"]["source_offset"] = "three";
  EXPECT_THROW(CheckpointArtifact::from_json(wrong_type), InputError);
  EXPECT_THROW(CheckpointArtifact::from_json(json::array()), InputError);
}

Workflow Fig2(std::uint64_t tuples) {
  CatalogOptions opts;
  opts.tuples = tuples;
  opts.base_cost_ms = 1;
  return catalog_workflow("fig2", opts);
}

TEST(RestoreTest, ContinuesAfterRecordedOffsets) {
  const Workflow wf = Fig2(40);
  Engine first(wf.graph, wf.deployment, RunConfig{});
  first.schedule_checkpoint(Trigger::at_time(10), CheckpointPolicy::kPlain);
  const RunResult r1 = first.run();
  ASSERT_EQ(r1.artifacts.size(), 1u);
  const CheckpointArtifact& art = r1.artifacts[0];
  const std::uint64_t offset = art.workers.at("FC").source_offset;
  ASSERT_GT(offset, 0u);
  ASSERT_LT(offset, 40u);

  const CheckpointArtifact reloaded = CheckpointArtifact::from_json(art.to_json());
  Engine second = Engine::restore(wf.graph, wf.deployment, reloaded, RunConfig{});
  const RunResult r2 = second.run();
  EXPECT_TRUE(r2.quiescent);
  // The source cursor resumes at the offset and ends at the full count.
  EXPECT_EQ(r2.counters.at("ingested"), 40u);
  EXPECT_EQ(r2.log.events(r2.log.worker_index("FC")).size(), 40u - offset);
  // Snapshot state plus replayed tuples equals an uninterrupted run.
  for (const char* w : {"FC", "FM", "MC"}) {
    EXPECT_EQ(r2.workers.at(w).state.value("n", 0), r1.workers.at(w).state.value("n", 0)) << w;
  }
}

TEST(RestoreTest, RestoresConfiguration) {
  const Workflow wf = Fig2(10);
  CheckpointArtifact art;
  art.workers["FC"] = WorkerSnapshot{"pass.v1", nullptr, 10, 1};
  art.workers["FM"] = WorkerSnapshot{"pass.v3", json{{"n", 10}}, 0, 1};
  art.workers["MC"] = WorkerSnapshot{"sink.v1", json{{"n", 10}}, 0, 1};
  Engine e = Engine::restore(wf.graph, wf.deployment, art, RunConfig{});
  const RunResult r = e.run();
  EXPECT_EQ(r.workers.at("FM").config_id, "pass.v3");
  EXPECT_TRUE(r.log.events(r.log.worker_index("FC")).empty());
}

TEST(RestoreTest, RejectsMismatchedArtifact) {
  const Workflow wf = Fig2(10);
  CheckpointArtifact art;
  art.workers["FC"] = WorkerSnapshot{"pass.v1", nullptr, 0, 1};
  EXPECT_THROW(Engine::restore(wf.graph, wf.deployment, art, RunConfig{}), InputError);
  art.workers["FM"] = WorkerSnapshot{"nosuch.v1", nullptr, 0, 1};
  art.workers["MC"] = WorkerSnapshot{"sink.v1", nullptr, 0, 1};
  EXPECT_THROW(Engine::restore(wf.graph, wf.deployment, art, RunConfig{}), InputError);
}

// A long backlog keeps the checkpoint marker in flight when the
// reconfiguration starts.
TEST(SafeCheckpointTest, InFlightCheckpointIsCancelled) {
  const Workflow wf = Fig2(500);
  Engine e(wf.graph, wf.deployment, RunConfig{});
  e.schedule_checkpoint(Trigger::at_time(5), CheckpointPolicy::kReconfigSafe);
  e.schedule_reconfiguration(Trigger::at_time(6), schedule_fries(e.parallel(), {"MC"}, {}),
                             bump_request(wf, {"MC"}));
  const RunResult r = e.run();
  ASSERT_EQ(r.checkpoints.size(), 1u);
  EXPECT_TRUE(r.checkpoints[0].cancelled);
  EXPECT_TRUE(r.artifacts.empty());
}

TEST(SafeCheckpointTest, PlainCheckpointIsNotCancelled) {
  const Workflow wf = Fig2(500);
  Engine e(wf.graph, wf.deployment, RunConfig{});
  e.schedule_checkpoint(Trigger::at_time(5), CheckpointPolicy::kPlain);
  e.schedule_reconfiguration(Trigger::at_time(6), schedule_fries(e.parallel(), {"MC"}, {}),
                             bump_request(wf, {"MC"}));
  const RunResult r = e.run();
  ASSERT_EQ(r.checkpoints.size(), 1u);
  EXPECT_FALSE(r.checkpoints[0].cancelled);
  EXPECT_EQ(r.artifacts.size(), 1u);
}

TEST(SafeCheckpointTest, RequestDuringReconfigurationIsDeferred) {
  const Workflow wf = Fig2(50);
  RunConfig config;
  config.control_latency_ms = 5;
  Engine e(wf.graph, wf.deployment, config);
  e.schedule_reconfiguration(Trigger::at_time(1), schedule_fries(e.parallel(), {"FM"}, {}),
                             bump_request(wf, {"FM"}));
  e.schedule_checkpoint(Trigger::at_time(2), CheckpointPolicy::kReconfigSafe);
  const RunResult r = e.run();
  ASSERT_EQ(r.checkpoints.size(), 1u);
  EXPECT_TRUE(r.checkpoints[0].deferred);
  ASSERT_TRUE(r.checkpoints[0].complete_ms.has_value());
  ASSERT_EQ(r.artifacts.size(), 1u);
  // Taken after the head acknowledged, so it already holds the new function.
  EXPECT_EQ(r.artifacts[0].workers.at("FM").config_id, "pass.v2");
}

}  // namespace
}  // namespace reconf
