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

#include "reconf/schedule_log.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include <json.hpp>

#include "reconf/error.hpp"

namespace reconf {

using nlohmann::json;

std::uint32_t ScheduleLog::add_worker(const OperatorId& worker, const OperatorId& op) {
  workers_.push_back(worker);
  operators_.push_back(op);
  per_worker_.emplace_back();
  return static_cast<std::uint32_t>(workers_.size() - 1);
}

std::uint32_t ScheduleLog::worker_index(const OperatorId& worker) const {
  auto it = std::find(workers_.begin(), workers_.end(), worker);
  if (it == workers_.end()) throw InputError("unknown worker '" + worker + "' in log");
  return static_cast<std::uint32_t>(it - workers_.begin());
}

LogEvent& ScheduleLog::append(LogEvent e) {
  auto& seq = per_worker_.at(e.worker);
  e.seq = seq.size();
  seq.push_back(e);
  return seq.back();
}

std::size_t ScheduleLog::size() const {
  std::size_t n = 0;
  for (const auto& w : per_worker_) n += w.size();
  return n;
}

std::size_t ScheduleLog::count(EventKind kind) const {
  std::size_t n = 0;
  for (const auto& w : per_worker_) {
    n += static_cast<std::size_t>(
        std::count_if(w.begin(), w.end(), [kind](const LogEvent& e) { return e.kind == kind; }));
  }
  return n;
}

std::vector<LogEvent> ScheduleLog::merged() const {
  std::vector<LogEvent> all;
  all.reserve(size());
  for (const auto& w : per_worker_) all.insert(all.end(), w.begin(), w.end());
  std::stable_sort(all.begin(), all.end(), [](const LogEvent& a, const LogEvent& b) {
    if (a.index != b.index) return a.index < b.index;
    if (a.worker != b.worker) return a.worker < b.worker;
    return a.seq < b.seq;
  });
  return all;
}

void ScheduleLog::validate_order() const {
  for (std::size_t w = 0; w < per_worker_.size(); ++w) {
    for (std::size_t i = 0; i < per_worker_[w].size(); ++i) {
      if (per_worker_[w][i].seq != i) {
        throw InputError("worker '" + workers_[w] + "' has a gap or reordering at seq " +
                         std::to_string(i));
      }
    }
  }
}

std::string ScheduleLog::to_jsonl() const {
  std::string out;
  for (const LogEvent& e : merged()) {
    json j;
    j["worker"] = workers_[e.worker];
    j["seq"] = e.seq;
    j["kind"] = e.kind == EventKind::kPhi ? "phi" : "mu";
    if (e.kind == EventKind::kPhi) {
      j["txn_id"] = e.txn;
      j["tuple"] = e.tuple;
      if (e.parent != kNoTuple) j["parent"] = e.parent;
    } else {
      j["request"] = e.request;
    }
    j["operator"] = operators_[e.worker];
    j["vtime"] = e.vtime;
    j["index"] = e.index;
    if (e.tag >= 0) j["tag"] = e.tag;
    if (e.applied >= 0) j["applied"] = e.applied;
    out += j.dump();
    out += '\n';
  }
  return out;
}

ScheduleLog ScheduleLog::from_jsonl(const std::string& text) {
  ScheduleLog log;
  std::map<OperatorId, std::uint32_t> index;
  std::vector<std::vector<LogEvent>> pending;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  std::uint64_t fallback_index = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      json j = json::parse(line);
      const OperatorId worker = j.at("worker").get<std::string>();
      const OperatorId op = j.value("operator", worker);
      auto it = index.find(worker);
      if (it == index.end()) {
        it = index.emplace(worker, log.add_worker(worker, op)).first;
        pending.emplace_back();
      }
      LogEvent e;
      e.worker = it->second;
      e.seq = j.at("seq").get<std::uint64_t>();
      const std::string kind = j.at("kind").get<std::string>();
      if (kind == "phi") {
        e.kind = EventKind::kPhi;
        e.txn = j.at("txn_id").get<TxnId>();
        e.tuple = j.value("tuple", TupleId{kNoTuple});
        e.parent = j.value("parent", TupleId{kNoTuple});
      } else if (kind == "mu") {
        e.kind = EventKind::kMu;
        e.request = j.value("request", std::uint64_t{0});
      } else {
        throw InputError("unknown event kind '" + kind + "'");
      }
      e.vtime = j.value("vtime", 0.0);
      e.index = j.value("index", fallback_index);
      ++fallback_index;
      e.tag = j.value("tag", std::int64_t{-1});
      e.applied = j.value("applied", std::int64_t{-1});
      pending[e.worker].push_back(e);
    } catch (const json::exception& ex) {
      throw InputError("log line " + std::to_string(lineno) + ": " + ex.what());
    }
  }
  for (std::uint32_t w = 0; w < pending.size(); ++w) {
    auto& evs = pending[w];
    std::stable_sort(evs.begin(), evs.end(),
                     [](const LogEvent& a, const LogEvent& b) { return a.seq < b.seq; });
    log.per_worker_[w] = std::move(evs);
  }
  log.validate_order();
  return log;
}

std::uint64_t ScheduleLog::digest() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : to_jsonl()) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace reconf
