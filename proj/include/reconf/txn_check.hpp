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

// Transactions and conflict-serializability over a schedule log.
//
// A data transaction is every phi event of one source tuple's lineage; the
// update transaction is the set of mu events of the one reconfiguration in
// the log. A phi and a mu conflict when they happen on the same worker.
// Data transactions never conflict with each other, so a log is
// conflict-serializable exactly when no data transaction sits before the
// update on one worker and after it on another.

#ifndef RECONF_TXN_CHECK_HPP_
#define RECONF_TXN_CHECK_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "reconf/schedule_log.hpp"

namespace reconf {

struct Operation {
  std::uint32_t worker = 0;
  std::uint64_t seq = 0;
  TupleId tuple = kNoTuple;
  TupleId parent = kNoTuple;
};

struct DataTransaction {
  TxnId txn = 0;
  std::vector<Operation> ops;  // ordered by (worker, seq)

  // Every non-root operation's parent tuple was itself processed.
  bool lineage_closed() const;
};

struct UpdateTransaction {
  std::uint64_t request = 0;
  std::map<std::uint32_t, std::uint64_t> mu_seq;  // worker -> seq
};

struct Transactions {
  std::vector<DataTransaction> data;  // ordered by txn id
  std::optional<UpdateTransaction> update;
};

// Throws InputError when mu events of two requests share a log or a worker
// logs two mu events for one request.
Transactions build_transactions(const ScheduleLog& log);

enum class Placement { kBefore, kAfter };

struct ConflictPoint {
  std::uint32_t worker = 0;
  std::string worker_name;
  std::uint64_t phi_seq = 0;
  std::uint64_t mu_seq = 0;
};

struct Witness {
  TxnId txn = 0;
  ConflictPoint phi_before_mu;
  ConflictPoint mu_before_phi;
};

struct SerializabilityVerdict {
  bool serializable = true;
  std::optional<Witness> witness;
  // Serial position relative to the update, for every transaction. Those
  // with no conflict are listed as kBefore.
  std::map<TxnId, Placement> placement;
  std::size_t transactions = 0;
  std::size_t conflicts = 0;
  bool has_update = false;

  nlohmann::json to_json() const;
};

SerializabilityVerdict check_conflict_serializable(const ScheduleLog& log);
SerializabilityVerdict check_conflict_serializable(const ScheduleLog& log,
                                                   const Transactions& txns);

struct VersionViolation {
  std::string worker;
  std::uint64_t seq = 0;
  TxnId txn = 0;
  std::int64_t tag = -1;
  std::int64_t applied = -1;
};

struct VersionAudit {
  bool consistent = true;
  std::size_t checked = 0;
  std::vector<VersionViolation> violations;
};

// Every phi event carrying an applied-version record must match its tuple's
// tag. Throws InputError when the log has no such record at all.
VersionAudit audit_version_consistency(const ScheduleLog& log);

}  // namespace reconf

#endif  // RECONF_TXN_CHECK_HPP_
