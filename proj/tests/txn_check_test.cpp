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

#include <random>

#include "oracles.hpp"
#include "reconf/error.hpp"
#include "reconf/txn_check.hpp"

namespace reconf {
namespace {

// FC -> FM -> MC with one tuple t; `order` lists events per worker.
ScheduleLog ThreeStage(bool fm_mu_first, bool mc_mu_first) {
  ScheduleLog log;
  const auto fc = log.add_worker("FC", "FC");
  const auto fm = log.add_worker("FM", "FM");
  const auto mc = log.add_worker("MC", "MC");
  auto phi = [&](std::uint32_t w, TupleId id, TupleId parent) {
    LogEvent e;
    e.worker = w;
    e.txn = 1;
    e.tuple = id;
    e.parent = parent;
    log.append(e);
  };
  auto mu = [&](std::uint32_t w) {
    LogEvent e;
    e.kind = EventKind::kMu;
    e.worker = w;
    e.request = 1;
    log.append(e);
  };
  phi(fc, 1, kNoTuple);
  if (fm_mu_first) mu(fm);
  phi(fm, 2, 1);
  if (!fm_mu_first) mu(fm);
  if (mc_mu_first) mu(mc);
  phi(mc, 3, 2);
  if (!mc_mu_first) mu(mc);
  return log;
}

TEST(CheckerTest, AllNewIsSerializable) {
  const SerializabilityVerdict v = check_conflict_serializable(ThreeStage(true, true));
  EXPECT_TRUE(v.serializable);
  EXPECT_EQ(v.conflicts, 2u);
  EXPECT_EQ(v.placement.at(1), Placement::kAfter);
}

TEST(CheckerTest, AllOldIsSerializable) {
  const SerializabilityVerdict v = check_conflict_serializable(ThreeStage(false, false));
  EXPECT_TRUE(v.serializable);
  EXPECT_EQ(v.placement.at(1), Placement::kBefore);
}

TEST(CheckerTest, MixedHasWitness) {
  const SerializabilityVerdict v = check_conflict_serializable(ThreeStage(false, true));
  ASSERT_FALSE(v.serializable);
  ASSERT_TRUE(v.witness.has_value());
  EXPECT_EQ(v.witness->txn, 1u);
  EXPECT_EQ(v.witness->phi_before_mu.worker_name, "FM");
  EXPECT_EQ(v.witness->mu_before_phi.worker_name, "MC");
  const nlohmann::json j = v.to_json();
  EXPECT_FALSE(j["serializable"].get<bool>());
  EXPECT_EQ(j["witness"]["phi_before_mu"]["worker"], "FM");
}

TEST(CheckerTest, NoUpdateIsTriviallySerializable) {
  ScheduleLog log;
  const auto a = log.add_worker("A", "A");
  LogEvent e;
  e.worker = a;
  e.txn = 4;
  log.append(e);
  const SerializabilityVerdict v = check_conflict_serializable(log);
  EXPECT_TRUE(v.serializable);
  EXPECT_FALSE(v.has_update);
  EXPECT_EQ(v.conflicts, 0u);
}

TEST(CheckerTest, RejectsTwoRequestsAndDoubleApply) {
  ScheduleLog log;
  const auto a = log.add_worker("A", "A");
  LogEvent mu;
  mu.kind = EventKind::kMu;
  mu.worker = a;
  mu.request = 1;
  log.append(mu);
  log.append(mu);
  EXPECT_THROW(build_transactions(log), InputError);
  ScheduleLog two;
  const auto b = two.add_worker("B", "B");
  mu.worker = b;
  two.append(mu);
  mu.request = 2;
  two.append(mu);
  EXPECT_THROW(build_transactions(two), InputError);
}

TEST(CheckerTest, LineageClosure) {
  DataTransaction t;
  t.ops = {{0, 0, 1, kNoTuple}, {1, 0, 2, 1}};
  EXPECT_TRUE(t.lineage_closed());
  t.ops.push_back({2, 0, 3, 99});
  EXPECT_FALSE(t.lineage_closed());
}

TEST(CheckerTest, AgreesWithSerialOrderEnumeration) {
  std::mt19937_64 rng(2024);
  int violations = 0;
  for (int i = 0; i < 300; ++i) {
    const ScheduleLog log = testing::random_log(rng, 5, 4);
    const bool want = testing::serial_order_serializable(log);
    ASSERT_EQ(check_conflict_serializable(log).serializable, want) << log.to_jsonl();
    violations += want ? 0 : 1;
  }
  // Both verdicts must occur for the comparison to mean anything.
  EXPECT_GT(violations, 10);
  EXPECT_LT(violations, 290);
}

TEST(VersionAuditTest, FlagsMismatches) {
  ScheduleLog log;
  const auto a = log.add_worker("A", "A");
  LogEvent e;
  e.worker = a;
  e.txn = 1;
  e.tag = 1;
  e.applied = 1;
  log.append(e);
  VersionAudit audit = audit_version_consistency(log);
  EXPECT_TRUE(audit.consistent);
  EXPECT_EQ(audit.checked, 1u);
  e.txn = 2;
  e.tag = 1;
  e.applied = 2;
  log.append(e);
  audit = audit_version_consistency(log);
  EXPECT_FALSE(audit.consistent);
  ASSERT_EQ(audit.violations.size(), 1u);
  EXPECT_EQ(audit.violations[0].txn, 2u);
}

TEST(VersionAuditTest, NeedsAppliedRecords) {
  ScheduleLog log;
  const auto a = log.add_worker("A", "A");
  LogEvent e;
  e.worker = a;
  log.append(e);
  EXPECT_THROW(audit_version_consistency(log), InputError);
}

}  // namespace
}  // namespace reconf
