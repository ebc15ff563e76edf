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
#include "reconf/mcs.hpp"
#include "reconf/parallel.hpp"

namespace reconf {
namespace {

TEST(ParallelTest, WorkerNames) {
  EXPECT_EQ(worker_name("J1", 0, 1), "J1");
  EXPECT_EQ(worker_name("J1", 2, 4), "J1#2");
}

TEST(ParallelTest, ExpandsEveryOperator) {
  CatalogOptions opts;
  opts.workers = 3;
  const ParallelGraph pg = expand_parallel(catalog_workflow("w2", opts).graph);
  EXPECT_EQ(pg.workers.at("J1").size(), 3u);
  EXPECT_EQ(pg.workers.at("Sink").size(), 1u);
  EXPECT_EQ(pg.logical_of("J2#1"), "J2");
  EXPECT_EQ(pg.workers_of({"J1", "Sink"}),
            (OperatorSet{"J1#0", "J1#1", "J1#2", "Sink"}));
  EXPECT_TRUE(pg.graph.is_acyclic());
}

struct ChannelRow {
  int workers;
  std::size_t all;
  std::size_t mcs;
};

class W2ChannelTest : public ::testing::TestWithParam<ChannelRow> {};

TEST_P(W2ChannelTest, MatchesReferenceCounts) {
  const ChannelRow row = GetParam();
  CatalogOptions opts;
  opts.workers = row.workers;
  const DataflowGraph g = catalog_workflow("w2", opts).graph;
  const ParallelGraph pg = expand_parallel(g);
  EXPECT_EQ(pg.channel_count(), row.all);
  const Mcs mcs = find_mcs(g, {"J1", "J4"});
  EXPECT_EQ(pg.channel_count_within(pg.workers_of(mcs.vertices)), row.mcs);
}

INSTANTIATE_TEST_SUITE_P(Reference, W2ChannelTest,
                         ::testing::Values(ChannelRow{1, 5, 3}, ChannelRow{4, 68, 48},
                                           ChannelRow{12, 588, 432}, ChannelRow{20, 1620, 1200},
                                           ChannelRow{40, 6440, 4800}));

TEST(ParallelTest, BroadcastAddsLocalReplicate) {
  DataflowGraph g;
  OperatorMeta bcast;
  bcast.partitioning = Partitioning::kBroadcast;
  OperatorMeta two;
  two.worker_count = 2;
  g.add_operator("A", bcast);
  g.add_operator("B", two);
  g.add_edge("A", "B");
  g.derive_roles();
  const ParallelGraph pg = expand_parallel(g);
  ASSERT_TRUE(pg.graph.contains("A~B"));
  const WorkerInfo& info = pg.info.at("A~B");
  EXPECT_TRUE(info.synthetic);
  EXPECT_EQ(info.op, "A");
  EXPECT_EQ(info.broadcast_target, "B");
  EXPECT_EQ(pg.graph.meta("A~B").arity, Arity::kOneToMany);
  EXPECT_EQ(pg.channel_count(), 2u);
}

TEST(ParallelTest, RejectsZeroWorkers) {
  DataflowGraph g;
  OperatorMeta none;
  none.worker_count = 0;
  EXPECT_THROW(g.add_operator("A", none), InputError);
}

}  // namespace
}  // namespace reconf
