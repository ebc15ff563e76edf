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
#include <exception>

#include "engine/core.hpp"
#include "reconf/error.hpp"

namespace reconf::detail {

namespace {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t partition_key(const Tuple& t) {
  if (t.payload.is_object()) {
    auto it = t.payload.find("key");
    if (it != t.payload.end()) {
      if (it->is_number_unsigned()) return it->get<std::uint64_t>();
      if (it->is_number_integer()) return static_cast<std::uint64_t>(it->get<std::int64_t>());
      if (it->is_string()) return std::hash<std::string>{}(it->get<std::string>());
    }
  }
  return t.txn_id;
}

}  // namespace

WorkerCore::WorkerCore(std::uint32_t index, OperatorId name, WorkerInfo info, OperatorMeta meta,
                       OperatorFunction fn, State state)
    : index_(index), name_(std::move(name)), info_(std::move(info)), meta_(std::move(meta)) {
  active_.fn = std::move(fn);
  active_.state = std::move(state);
}

std::size_t WorkerCore::add_input(std::size_t channel, std::uint32_t sender) {
  inputs_.push_back(channel);
  senders_.push_back(sender);
  blocked_.push_back(0);
  return inputs_.size() - 1;
}

void WorkerCore::add_output(const OperatorId& target, Partitioning partitioning,
                            std::size_t channel, std::uint32_t receiver) {
  auto it = std::find_if(ports_.begin(), ports_.end(),
                         [&](const OutPort& p) { return p.target == target; });
  if (it == ports_.end()) {
    ports_.push_back(OutPort{target, partitioning, {}, {}});
    downstream_.push_back(target);
    it = std::prev(ports_.end());
  }
  it->channels.push_back(channel);
  it->receivers.push_back(receiver);
}

void WorkerCore::log_event(LogEvent e, Effects& fx) {
  e.worker = index_;
  e.seq = logged_++;
  fx.events.push_back(e);
}

std::size_t WorkerCore::route(const OutPort& port, const Tuple& child) const {
  const std::size_t n = port.channels.size();
  if (n == 1) return 0;
  const std::uint64_t key = partition_key(child);
  if (port.partitioning == Partitioning::kRange) {
    return static_cast<std::size_t>(((key & 0xffffffffULL) * n) >> 32);
  }
  return static_cast<std::size_t>(mix64(key) % n);
}

void WorkerCore::ingest(std::uint64_t txn, Payload payload, double source_time,
                        std::uint32_t origin, double now, Effects& fx) {
  Tuple t;
  t.txn_id = txn;
  t.id = next_tuple_id();
  t.payload = std::move(payload);
  t.version_tag = source_version_;
  t.source_time = source_time;
  t.origin = origin;
  ++ingested_;
  process(t, now, fx);
}

void WorkerCore::handle_data(Tuple t, double now, Effects& fx) {
  process(t, now, fx);
  fx.consumed = std::move(t);
}

void WorkerCore::process(const Tuple& t, double now, Effects& fx) {
  Config* cfg = &active_;
  if (pending_ && t.version_tag && *t.version_tag >= pending_->version) cfg = &*pending_;

  LogEvent phi;
  phi.kind = EventKind::kPhi;
  phi.txn = t.txn_id;
  phi.tuple = t.id;
  phi.parent = t.parent;
  phi.vtime = now;
  if (t.version_tag) phi.tag = *t.version_tag;
  if (versioned_) phi.applied = cfg->version;
  log_event(phi, fx);

  fx.cost_ms += cfg->fn.cost_ms.value_or(meta_.cost_ms) * cost_multiplier_;

  auto derive = [&](Payload p) {
    Tuple c;
    c.txn_id = t.txn_id;
    c.id = next_tuple_id();
    c.parent = t.id;
    c.payload = std::move(p);
    c.version_tag = t.version_tag;
    c.source_time = t.source_time;
    c.origin = t.origin;
    return c;
  };

  if (info_.synthetic) {
    // A replicate copies each tuple to every receiver of its target.
    for (const OutPort& port : ports_) {
      for (std::size_t ch : port.channels) fx.sends.emplace_back(ch, derive(t.payload));
    }
    return;
  }

  std::vector<Emission> out;
  if (cfg->fn.apply) cfg->fn.apply(cfg->state, t, downstream_, out);
  if (meta_.arity == Arity::kOneToOne && out.size() > 1) {
    throw EngineError("operator '" + info_.op + "' is one_to_one but emitted " +
                      std::to_string(out.size()) + " tuples");
  }
  if (is_sink()) {
    fx.sunk.push_back(SinkRecord{name_, t, now});
    return;
  }
  for (Emission& e : out) {
    const OutPort* port = nullptr;
    if (e.target.empty()) {
      if (ports_.size() != 1) {
        throw EngineError("operator '" + info_.op + "' emitted without a target but has " +
                          std::to_string(ports_.size()) + " downstream operators");
      }
      port = &ports_.front();
    } else {
      for (const OutPort& p : ports_) {
        if (p.target == e.target) port = &p;
      }
      if (!port) {
        throw EngineError("operator '" + info_.op + "' routed a tuple to '" + e.target +
                          "', which is not downstream");
      }
    }
    Tuple c = derive(std::move(e.payload));
    const std::size_t k = route(*port, c);
    fx.sends.emplace_back(port->channels[k], std::move(c));
  }
}

void WorkerCore::handle_marker(std::size_t slot, const MarkerPtr& m, double now, Effects& fx) {
  Alignment& a = aligning_[m->id];
  if (!a.marker) {
    a.marker = m;
    a.got.assign(inputs_.size(), 0);
    for (std::size_t s = 0; s < inputs_.size(); ++s) {
      if (m->scoped(senders_[s])) ++a.remaining;
    }
  }
  if (!a.got[slot]) {
    a.got[slot] = 1;
    ++blocked_[slot];
    if (a.remaining > 0) --a.remaining;
  }
  if (a.remaining > 0) return;
  for (std::size_t s = 0; s < inputs_.size(); ++s) {
    if (a.got[s]) --blocked_[s];
  }
  MarkerPtr done = a.marker;
  aligning_.erase(m->id);
  complete_marker(done, now, fx);
}

void WorkerCore::complete_marker(const MarkerPtr& m, double now, Effects& fx) {
  fx.crossings.push_back(MarkerCrossing{name_, m->id, logged_, now});
  fx.cost_ms += marker_cost_ms_;
  if (m->request != 0 && !aborted_.count(m->request)) {
    auto it = m->payload.find(index_);
    if (it != m->payload.end()) apply_update(*it->second, m->request, now, fx);
  }
  if (m->kind == MarkerKind::kCheckpoint) {
    Notice n;
    n.kind = NoticeKind::kSnapshot;
    n.worker = index_;
    n.checkpoint = m->checkpoint;
    n.snapshot = snapshot();
    fx.notices.push_back(std::move(n));
  }
  for (const OutPort& port : ports_) {
    for (std::size_t k = 0; k < port.channels.size(); ++k) {
      if (m->scoped(port.receivers[k])) fx.sends.emplace_back(port.channels[k], m);
    }
  }
}

void WorkerCore::apply_update(const FunctionUpdate& u, std::uint64_t request, double now,
                              Effects& fx) {
  Notice n;
  n.worker = index_;
  n.request = request;
  try {
    State next = u.state_transform ? u.state_transform(active_.state) : active_.state;
    if (u.validator && !u.validator(next)) throw EngineError("transformed state rejected");
    active_.fn = u.new_function;
    active_.state = std::move(next);
    active_.request = request;
  } catch (const std::exception& e) {
    n.kind = NoticeKind::kFailed;
    n.error = "state transform failed at '" + name_ + "': " + e.what();
    fx.notices.push_back(std::move(n));
    return;
  }
  LogEvent mu;
  mu.kind = EventKind::kMu;
  mu.vtime = now;
  mu.request = request;
  log_event(mu, fx);
  n.kind = NoticeKind::kApplied;
  fx.notices.push_back(std::move(n));
}

void WorkerCore::handle_control(const Control& c, double now, Effects& fx) {
  if (c.kind != ControlKind::kAbort) {
    Notice r;
    r.kind = NoticeKind::kControlReceived;
    r.worker = index_;
    r.request = c.request;
    fx.notices.push_back(r);
  }
  switch (c.kind) {
    case ControlKind::kApply:
      if (!aborted_.count(c.request)) apply_update(*c.update, c.request, now, fx);
      break;
    case ControlKind::kStartMarker:
      complete_marker(c.marker, now, fx);
      break;
    case ControlKind::kInstall: {
      Notice n;
      n.worker = index_;
      n.request = c.request;
      try {
        const FunctionUpdate& u = *c.update;
        State next = u.state_transform ? u.state_transform(active_.state) : active_.state;
        if (u.validator && !u.validator(next)) throw EngineError("transformed state rejected");
        pending_ = Config{u.new_function, std::move(next), c.version, c.request};
        versioned_ = true;
        n.kind = NoticeKind::kInstalled;
      } catch (const std::exception& e) {
        n.kind = NoticeKind::kFailed;
        n.error = "state transform failed at '" + name_ + "': " + e.what();
      }
      fx.notices.push_back(std::move(n));
      break;
    }
    case ControlKind::kBumpVersion: {
      source_version_ = c.version;
      Notice n;
      n.kind = NoticeKind::kBumped;
      n.worker = index_;
      n.request = c.request;
      fx.notices.push_back(n);
      break;
    }
    case ControlKind::kRetire:
      if (pending_ && pending_->request == c.request) {
        active_ = std::move(*pending_);
        pending_.reset();
        LogEvent mu;
        mu.kind = EventKind::kMu;
        mu.vtime = now;
        mu.request = c.request;
        mu.applied = active_.version;
        log_event(mu, fx);
        Notice n;
        n.kind = NoticeKind::kApplied;
        n.worker = index_;
        n.request = c.request;
        fx.notices.push_back(n);
      }
      break;
    case ControlKind::kAbort:
      aborted_.insert(c.request);
      if (pending_ && pending_->request == c.request) pending_.reset();
      break;
  }
}

WorkerAudit WorkerCore::audit() const {
  WorkerAudit a;
  a.config_id = active_.fn.config_id;
  a.state_count = pending_ ? 2 : 1;
  a.state = active_.state;
  return a;
}

WorkerSnapshot WorkerCore::snapshot() const {
  WorkerSnapshot s;
  s.config_id = active_.fn.config_id;
  s.state = active_.state;
  s.source_offset = ingested_;
  s.source_version = source_version_;
  return s;
}

}  // namespace reconf::detail
