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

// Per-worker record of data operations (phi) and function updates (mu).

#ifndef RECONF_SCHEDULE_LOG_HPP_
#define RECONF_SCHEDULE_LOG_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "reconf/graph.hpp"

namespace reconf {

using TxnId = std::uint64_t;
using TupleId = std::uint64_t;
inline constexpr TupleId kNoTuple = 0;

enum class EventKind : std::uint8_t { kPhi, kMu };

struct LogEvent {
  EventKind kind = EventKind::kPhi;
  std::uint32_t worker = 0;
  std::uint64_t seq = 0;    // position in the worker's sequence
  std::uint64_t index = 0;  // global order of the run
  TxnId txn = 0;            // phi only
  TupleId tuple = kNoTuple;
  TupleId parent = kNoTuple;
  double vtime = 0;
  std::int64_t tag = -1;      // version tag of the tuple, -1 if untagged
  std::int64_t applied = -1;  // configuration version that processed it
  std::uint64_t request = 0;  // mu only: reconfiguration request id
};

class ScheduleLog {
 public:
  ScheduleLog() = default;

  std::uint32_t add_worker(const OperatorId& worker, const OperatorId& op);
  std::size_t worker_count() const { return workers_.size(); }
  const OperatorId& worker_name(std::uint32_t w) const { return workers_[w]; }
  const OperatorId& operator_name(std::uint32_t w) const { return operators_[w]; }
  // Throws InputError for unknown names.
  std::uint32_t worker_index(const OperatorId& worker) const;

  // Assigns seq from the worker's current length.
  LogEvent& append(LogEvent e);
  const std::vector<LogEvent>& events(std::uint32_t w) const { return per_worker_[w]; }
  std::vector<LogEvent>& mutable_events(std::uint32_t w) { return per_worker_[w]; }

  std::size_t size() const;
  std::size_t count(EventKind kind) const;
  // All events ordered by global index.
  std::vector<LogEvent> merged() const;

  // Throws InputError unless each worker's seq runs 0,1,2,...
  void validate_order() const;

  // Line-delimited JSON records:
  // {"worker","seq","kind":"phi"|"mu","txn_id"?,"operator","vtime",...}
  std::string to_jsonl() const;
  static ScheduleLog from_jsonl(const std::string& text);

  // FNV-1a over the JSONL export.
  std::uint64_t digest() const;

 private:
  std::vector<OperatorId> workers_;
  std::vector<OperatorId> operators_;
  std::vector<std::vector<LogEvent>> per_worker_;
};

}  // namespace reconf

#endif  // RECONF_SCHEDULE_LOG_HPP_
