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

#include <algorithm>

#include "engine/core.hpp"
#include "reconf/error.hpp"

namespace reconf::detail {

ControllerCore::ControllerCore(std::vector<OperatorId> worker_names,
                               std::vector<std::uint32_t> sources, const RunConfig& config)
    : names_(std::move(worker_names)), sources_(std::move(sources)), config_(config) {}

std::uint32_t ControllerCore::worker_id(const OperatorId& name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InputError("plan names unknown worker '" + name + "'");
  return static_cast<std::uint32_t>(it - names_.begin());
}

bool ControllerCore::reconfigs_settled() const { return !active_.has_value(); }

void ControllerCore::send(std::uint32_t worker, Control c, std::vector<Outgoing>& out) {
  out.push_back(Outgoing{worker, std::move(c)});
}

void ControllerCore::start_reconfig(std::uint64_t id, double now, const ReconfigPlan& plan,
                                    std::map<std::uint32_t, UpdatePtr> updates,
                                    std::vector<Outgoing>& out) {
  if (active_) {
    throw BusyError("reconfiguration " + std::to_string(reconfigs_[active_->record].id) +
                    " is still in progress");
  }
  ReconfigRecord rec;
  rec.id = id;
  rec.kind = plan.kind;
  rec.request_ms = now;
  reconfigs_.push_back(rec);

  ActiveReconfig a;
  a.record = reconfigs_.size() - 1;
  a.plan = plan;
  a.updates = std::move(updates);
  a.phase_start = now;
  for (const OperatorId& w : plan.reconfig_workers) a.awaiting_apply.insert(worker_id(w));

  for (const OperatorId& w : plan.fcm_targets) {
    if (config_.terminated_workers.count(w)) {
      reconfigs_.back().aborted = true;
      reconfigs_.back().error = "delivery to '" + w + "' failed: worker terminated";
      return;
    }
  }

  // Reconfiguration-safe checkpoints in flight would straddle the switch.
  for (auto it = running_.begin(); it != running_.end();) {
    if (it->second.policy == CheckpointPolicy::kReconfigSafe) {
      checkpoints_[it->second.record].cancelled = true;
      it = running_.erase(it);
    } else {
      ++it;
    }
  }
  checkpoints_blocked_ = true;

  switch (plan.kind) {
    case SchedulerKind::kEpoch: {
      auto m = std::make_shared<MarkerInfo>();
      m->kind = MarkerKind::kEpoch;
      m->id = next_marker_id();
      m->request = id;
      m->payload = a.updates;
      for (std::uint32_t s : sources_) {
        a.awaiting_receipt.insert(s);
        send(s, Control{ControlKind::kStartMarker, id, nullptr, m, 0}, out);
      }
      break;
    }
    case SchedulerKind::kNaive:
      for (std::uint32_t w : a.awaiting_apply) {
        a.awaiting_receipt.insert(w);
        send(w, Control{ControlKind::kApply, id, a.updates.at(w), nullptr, 0}, out);
      }
      break;
    case SchedulerKind::kFries:
      for (const PlanComponent& c : plan.components) {
        auto m = std::make_shared<MarkerInfo>();
        m->kind = MarkerKind::kComponent;
        m->id = next_marker_id();
        m->request = id;
        m->in_scope.assign(names_.size(), 0);
        for (const OperatorId& v : c.vertices) {
          const std::uint32_t w = worker_id(v);
          m->in_scope[w] = 1;
          auto u = a.updates.find(w);
          if (u != a.updates.end()) m->payload.emplace(w, u->second);
        }
        for (const OperatorId& h : c.heads) {
          const std::uint32_t w = worker_id(h);
          a.awaiting_receipt.insert(w);
          send(w, Control{ControlKind::kStartMarker, id, nullptr, m, 0}, out);
        }
      }
      break;
    case SchedulerKind::kMultiVersion:
      a.phase = 1;
      a.version = current_version_ + 1;
      for (std::uint32_t w : a.awaiting_apply) {
        a.awaiting_install.insert(w);
        a.awaiting_receipt.insert(w);
        send(w, Control{ControlKind::kInstall, id, a.updates.at(w), nullptr, a.version}, out);
      }
      break;
  }
  active_ = std::move(a);
  if (active_->awaiting_apply.empty()) finish_reconfig(now, out);
}

void ControllerCore::start_checkpoint(std::uint64_t id, CheckpointPolicy policy, double now,
                                      std::vector<Outgoing>& out) {
  CheckpointRecord rec;
  rec.id = id;
  rec.policy = policy;
  rec.request_ms = now;
  checkpoints_.push_back(rec);
  if (policy == CheckpointPolicy::kReconfigSafe && checkpoints_blocked_) {
    checkpoints_.back().deferred = true;
    deferred_.push_back(checkpoints_.size() - 1);
    return;
  }
  launch_checkpoint(checkpoints_.size() - 1, out);
}

void ControllerCore::launch_checkpoint(std::size_t record, std::vector<Outgoing>& out) {
  const CheckpointRecord& rec = checkpoints_[record];
  auto m = std::make_shared<MarkerInfo>();
  m->kind = MarkerKind::kCheckpoint;
  m->id = next_marker_id();
  m->checkpoint = rec.id;
  running_[rec.id] = ActiveCheckpoint{record, rec.policy, {}};
  for (std::uint32_t s : sources_) {
    send(s, Control{ControlKind::kStartMarker, 0, nullptr, m, 0}, out);
  }
}

void ControllerCore::start_epoch(double /*now*/, std::vector<Outgoing>& out) {
  auto m = std::make_shared<MarkerInfo>();
  m->kind = MarkerKind::kEpoch;
  m->id = next_marker_id();
  for (std::uint32_t s : sources_) {
    send(s, Control{ControlKind::kStartMarker, 0, nullptr, m, 0}, out);
  }
}

void ControllerCore::maybe_unblock(std::vector<Outgoing>& out) {
  if (!checkpoints_blocked_) return;
  if (active_ && !active_->awaiting_receipt.empty()) return;
  checkpoints_blocked_ = false;
  std::vector<std::size_t> ready;
  ready.swap(deferred_);
  for (std::size_t r : ready) launch_checkpoint(r, out);
}

void ControllerCore::finish_reconfig(double now, std::vector<Outgoing>& out) {
  ReconfigRecord& rec = reconfigs_[active_->record];
  rec.complete_ms = now;
  if (active_->plan.kind == SchedulerKind::kMultiVersion) {
    rec.retired_ms = now;
    current_version_ = active_->version;
  }
  active_.reset();
  maybe_unblock(out);
}

void ControllerCore::fail_reconfig(const std::string& error, double /*now*/,
                                   std::vector<Outgoing>& out) {
  ReconfigRecord& rec = reconfigs_[active_->record];
  rec.aborted = true;
  rec.error = error;
  for (const auto& [w, u] : active_->updates) {
    send(w, Control{ControlKind::kAbort, rec.id, nullptr, nullptr, 0}, out);
  }
  active_.reset();
  maybe_unblock(out);
}

void ControllerCore::on_notice(const Notice& n, double now, std::vector<Outgoing>& out) {
  if (n.kind == NoticeKind::kSnapshot) {
    auto it = running_.find(n.checkpoint);
    if (it == running_.end()) return;  // cancelled
    it->second.snapshots[n.worker] = n.snapshot;
    if (it->second.snapshots.size() == names_.size()) {
      CheckpointArtifact art;
      art.id = n.checkpoint;
      art.taken_ms = now;
      for (auto& [w, snap] : it->second.snapshots) art.workers[names_[w]] = std::move(snap);
      artifacts_.push_back(std::move(art));
      checkpoints_[it->second.record].complete_ms = now;
      running_.erase(it);
    }
    return;
  }
  if (!active_ || reconfigs_[active_->record].id != n.request) return;
  ActiveReconfig& a = *active_;
  switch (n.kind) {
    case NoticeKind::kControlReceived:
      a.awaiting_receipt.erase(n.worker);
      maybe_unblock(out);
      break;
    case NoticeKind::kApplied:
      reconfigs_[a.record].switched.insert(names_[n.worker]);
      a.awaiting_apply.erase(n.worker);
      if (a.awaiting_apply.empty()) finish_reconfig(now, out);
      break;
    case NoticeKind::kInstalled:
      a.awaiting_install.erase(n.worker);
      if (a.phase == 1 && a.awaiting_install.empty()) {
        a.phase = 2;
        a.phase_start = now;
        for (std::uint32_t s : sources_) {
          a.awaiting_bump.insert(s);
          send(s, Control{ControlKind::kBumpVersion, reconfigs_[a.record].id, nullptr, nullptr,
                          a.version},
               out);
        }
      }
      break;
    case NoticeKind::kBumped:
      a.awaiting_bump.erase(n.worker);
      if (a.phase == 2 && a.awaiting_bump.empty()) a.phase = 3;
      break;
    case NoticeKind::kFailed:
      fail_reconfig(n.error, now, out);
      break;
    case NoticeKind::kSnapshot:
      break;
  }
}

void ControllerCore::on_tick(double now, const InFlightProbe& probe, std::vector<Outgoing>& out) {
  if (!active_ || active_->plan.kind != SchedulerKind::kMultiVersion) return;
  ActiveReconfig& a = *active_;
  if (a.phase == 1 && config_.ack_timeout_ms && now - a.phase_start > *config_.ack_timeout_ms) {
    fail_reconfig("acknowledgement timeout before version bump", now, out);
    return;
  }
  if (a.phase == 3 && !probe(a.version)) {
    a.phase = 4;
    for (std::uint32_t w : a.awaiting_apply) {
      send(w, Control{ControlKind::kRetire, reconfigs_[a.record].id, nullptr, nullptr, a.version},
           out);
    }
  }
}

}  // namespace reconf::detail
