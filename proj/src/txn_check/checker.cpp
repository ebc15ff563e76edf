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

#include "reconf/txn_check.hpp"

#include <set>

#include "reconf/error.hpp"

namespace reconf {

using nlohmann::json;

bool DataTransaction::lineage_closed() const {
  std::set<TupleId> seen;
  for (const Operation& op : ops) seen.insert(op.tuple);
  for (const Operation& op : ops) {
    if (op.parent != kNoTuple && !seen.count(op.parent)) return false;
  }
  return true;
}

Transactions build_transactions(const ScheduleLog& log) {
  Transactions out;
  std::map<TxnId, DataTransaction> by_txn;
  for (std::uint32_t w = 0; w < log.worker_count(); ++w) {
    for (const LogEvent& e : log.events(w)) {
      if (e.kind == EventKind::kPhi) {
        DataTransaction& t = by_txn[e.txn];
        t.txn = e.txn;
        t.ops.push_back(Operation{w, e.seq, e.tuple, e.parent});
        continue;
      }
      if (!out.update) {
        out.update = UpdateTransaction{e.request, {}};
      } else if (out.update->request != e.request) {
        throw InputError("log holds updates of two reconfiguration requests (" +
                         std::to_string(out.update->request) + " and " +
                         std::to_string(e.request) + ")");
      }
      if (!out.update->mu_seq.emplace(w, e.seq).second) {
        throw InputError("worker '" + log.worker_name(w) + "' applied request " +
                         std::to_string(e.request) + " twice");
      }
    }
  }
  out.data.reserve(by_txn.size());
  for (auto& [id, t] : by_txn) out.data.push_back(std::move(t));
  return out;
}

SerializabilityVerdict check_conflict_serializable(const ScheduleLog& log) {
  return check_conflict_serializable(log, build_transactions(log));
}

SerializabilityVerdict check_conflict_serializable(const ScheduleLog& log,
                                                   const Transactions& txns) {
  SerializabilityVerdict v;
  v.transactions = txns.data.size();
  v.has_update = txns.update.has_value();
  for (const DataTransaction& t : txns.data) {
    std::optional<ConflictPoint> before;
    std::optional<ConflictPoint> after;
    if (txns.update) {
      for (const Operation& op : t.ops) {
        auto mu = txns.update->mu_seq.find(op.worker);
        if (mu == txns.update->mu_seq.end()) continue;
        ++v.conflicts;
        ConflictPoint p{op.worker, log.worker_name(op.worker), op.seq, mu->second};
        if (op.seq < mu->second) {
          if (!before) before = p;
        } else if (!after) {
          after = p;
        }
      }
    }
    v.placement[t.txn] = after ? Placement::kAfter : Placement::kBefore;
    if (before && after && v.serializable) {
      v.serializable = false;
      v.witness = Witness{t.txn, *before, *after};
    }
  }
  return v;
}

json SerializabilityVerdict::to_json() const {
  std::size_t before = 0;
  for (const auto& [txn, p] : placement) before += p == Placement::kBefore ? 1 : 0;
  json j = {{"serializable", serializable},
            {"transactions", transactions},
            {"conflicts", conflicts},
            {"has_update", has_update},
            {"placed_before_update", before},
            {"placed_after_update", placement.size() - before}};
  if (witness) {
    auto point = [](const ConflictPoint& p) {
      return json{{"worker", p.worker_name}, {"phi_seq", p.phi_seq}, {"mu_seq", p.mu_seq}};
    };
    j["witness"] = {{"txn_id", witness->txn},
                    {"phi_before_mu", point(witness->phi_before_mu)},
                    {"mu_before_phi", point(witness->mu_before_phi)}};
  }
  return j;
}

VersionAudit audit_version_consistency(const ScheduleLog& log) {
  VersionAudit a;
  for (std::uint32_t w = 0; w < log.worker_count(); ++w) {
    for (const LogEvent& e : log.events(w)) {
      if (e.kind != EventKind::kPhi || e.applied < 0) continue;
      ++a.checked;
      if (e.tag != e.applied) {
        a.violations.push_back(VersionViolation{log.worker_name(w), e.seq, e.txn, e.tag,
                                                e.applied});
      }
    }
  }
  if (a.checked == 0) throw InputError("log has no applied-version records");
  a.consistent = a.violations.empty();
  return a;
}

}  // namespace reconf
