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

namespace {

constexpr char kReplicateConfig[] = "builtin.replicate";

OperatorFunction restore_function(const Deployment& dep, const OperatorId& op,
                                  const std::string& config_id) {
  auto it = dep.functions.find(op);
  if (it != dep.functions.end() && it->second.config_id == config_id) return it->second;
  if (dep.resolve) {
    if (auto fn = dep.resolve(config_id)) return *fn;
  }
  throw InputError("checkpoint names unknown configuration '" + config_id + "' for '" + op +
                   "'");
}

// Puts each multi-version worker's log in version order: phi events of
// tuples tagged below the new version, the update, then the rest. This is
// the single-version schedule the two-state execution is equivalent to.
void serialize_versions(std::vector<LogEvent>& events) {
  bool versioned = false;
  for (const LogEvent& e : events) {
    if (e.kind != EventKind::kMu) continue;
    if (e.applied < 0) return;
    versioned = true;
  }
  if (!versioned) return;
  std::vector<std::uint64_t> indices;
  indices.reserve(events.size());
  for (const LogEvent& e : events) indices.push_back(e.index);
  auto key = [](const LogEvent& e) {
    if (e.kind == EventKind::kMu) return static_cast<double>(e.applied) - 0.5;
    return static_cast<double>(std::max<std::int64_t>(e.tag, 0));
  };
  std::stable_sort(events.begin(), events.end(),
                   [&](const LogEvent& a, const LogEvent& b) { return key(a) < key(b); });
  for (std::size_t i = 0; i < events.size(); ++i) {
    events[i].seq = i;
    events[i].index = indices[i];
  }
}

}  // namespace

Model::Model(const DataflowGraph& logical_graph, Deployment dep, RunConfig cfg,
             const CheckpointArtifact* restore_from)
    : logical(logical_graph), deployment(std::move(dep)), config(std::move(cfg)) {
  logical.validate();
  if (config.channel_capacity == 0) throw InputError("channel capacity must be positive");
  for (const OperatorId& op : logical.operators()) {
    if (!deployment.functions.count(op)) throw InputError("no function for operator '" + op + "'");
  }
  for (const auto& [op, feed] : deployment.feeds) {
    if (!logical.contains(op) || !logical.meta(op).is_source) {
      throw InputError("feed given for non-source '" + op + "'");
    }
  }
  parallel = expand_parallel(logical);
  if (restore_from) start_ms = restore_from->taken_ms;

  const std::vector<std::size_t> order = parallel.graph.topological_order();
  std::vector<OperatorId> names;
  for (std::size_t v : order) {
    const OperatorId& name = parallel.graph.id_at(v);
    const WorkerInfo& info = parallel.info.at(name);
    OperatorFunction fn;
    State state;
    if (info.synthetic) {
      fn = OperatorFunction(kReplicateConfig, nullptr, 0.0);
    } else {
      fn = deployment.functions.at(info.op);
      auto st = deployment.initial_states.find(info.op);
      if (st != deployment.initial_states.end()) state = st->second;
    }
    if (restore_from) {
      auto snap = restore_from->workers.find(name);
      if (snap == restore_from->workers.end()) {
        throw InputError("corrupt checkpoint: no snapshot for worker '" + name + "'");
      }
      if (!info.synthetic) fn = restore_function(deployment, info.op, snap->second.config_id);
      state = snap->second.state;
    }
    const auto idx = static_cast<std::uint32_t>(workers.size());
    workers.emplace_back(idx, name, info, parallel.graph.meta(name), std::move(fn),
                         std::move(state));
    auto mult = config.cost_multiplier.find(name);
    if (mult != config.cost_multiplier.end()) workers.back().set_cost_multiplier(mult->second);
    workers.back().set_marker_cost(config.marker_cost_ms);
    index.emplace(name, idx);
    names.push_back(name);
    result.log.add_worker(name, info.synthetic ? name : info.op);
  }
  if (restore_from && restore_from->workers.size() != workers.size()) {
    throw InputError("corrupt checkpoint: worker set does not match the graph");
  }

  for (const Edge& e : parallel.graph.edges()) {
    const std::uint32_t from = index.at(e.from);
    const std::uint32_t to = index.at(e.to);
    const WorkerInfo& rinfo = parallel.info.at(e.to);
    const OperatorId target = rinfo.synthetic ? rinfo.broadcast_target : rinfo.op;
    const std::size_t ch = channels.size();
    const std::size_t slot = workers[to].add_input(ch, from);
    channels.push_back(ChannelSpec{from, to, slot});
    workers[from].add_output(target, e.partitioning, ch, to);
  }

  cursor_of.assign(workers.size(), -1);
  std::uint32_t ordinal = 0;
  std::vector<std::uint32_t> source_workers;
  for (const OperatorId& op : logical.sources()) {
    const auto& ws = parallel.workers.at(op);
    auto feed = deployment.feeds.find(op);
    for (std::size_t k = 0; k < ws.size(); ++k) {
      SourceCursor c;
      c.worker = index.at(ws[k]);
      c.ordinal = ordinal;
      c.feed = feed == deployment.feeds.end() ? nullptr : &feed->second;
      c.stride = ws.size();
      c.offset = k;
      cursor_of[c.worker] = static_cast<int>(cursors.size());
      cursors.push_back(c);
      source_workers.push_back(c.worker);
      if (restore_from) {
        const WorkerSnapshot& s = restore_from->workers.at(ws[k]);
        workers[c.worker].set_source_state(s.source_offset, s.source_version);
      }
    }
    ++ordinal;
  }
  outstanding.resize(cursors.size());
  controller = std::make_unique<ControllerCore>(names, source_workers, config);
}

std::optional<double> Model::next_source_time(std::uint32_t worker) const {
  const int c = cursor_of[worker];
  if (c < 0) return std::nullopt;
  const SourceCursor& cur = cursors[c];
  if (!cur.feed) return std::nullopt;
  return feed_time(*cur.feed, cur.raw_index(workers[worker].ingested()));
}

bool Model::source_exhausted(std::uint32_t worker) const {
  return !next_source_time(worker).has_value();
}

void Model::count_send(const Message& m) {
  if (const Tuple* t = std::get_if<Tuple>(&m)) {
    ++outstanding[t->origin][t->version_tag.value_or(0)];
    ++in_flight;
  }
}

void Model::record(std::uint32_t /*worker*/, Effects& fx, std::vector<Outgoing>& /*out*/,
                   double /*now*/) {
  for (LogEvent& e : fx.events) {
    e.index = global_index++;
    result.log.append(e);
  }
  for (SinkRecord& s : fx.sunk) result.sink.push_back(std::move(s));
  for (MarkerCrossing& c : fx.crossings) result.crossings.push_back(std::move(c));
  if (fx.consumed) {
    --outstanding[fx.consumed->origin][fx.consumed->version_tag.value_or(0)];
    --in_flight;
  }
}

bool Model::old_in_flight(std::uint32_t version) const {
  for (const auto& per_source : outstanding) {
    for (const auto& [v, n] : per_source) {
      if (v >= version) break;
      if (n > 0) return true;
    }
  }
  return false;
}

std::map<std::uint32_t, UpdatePtr> Model::expand_updates(
    const ReconfigurationRequest& request) const {
  if (request.updates.empty()) throw InputError("reconfiguration request is empty");
  std::map<std::uint32_t, UpdatePtr> out;
  for (const auto& [op, u] : request.updates) {
    auto it = parallel.workers.find(op);
    if (it == parallel.workers.end()) throw InputError("unknown operator '" + op + "'");
    auto ptr = std::make_shared<const FunctionUpdate>(u);
    for (const OperatorId& w : it->second) out.emplace(index.at(w), ptr);
  }
  return out;
}

void Model::fire(ScheduledAction& action, double now, std::vector<Outgoing>& out) {
  action.fired = true;
  switch (action.kind) {
    case ActionKind::kReconfig:
      try {
        controller->start_reconfig(action.id, now, action.plan, expand_updates(action.request),
                                   out);
      } catch (const BusyError& e) {
        ReconfigRecord rec;
        rec.id = action.id;
        rec.kind = action.plan.kind;
        rec.request_ms = now;
        rec.rejected = true;
        rec.error = e.what();
        controller->reconfigs().push_back(rec);
      }
      break;
    case ActionKind::kCheckpoint:
      controller->start_checkpoint(action.id, action.policy, now, out);
      break;
    case ActionKind::kEpoch:
      controller->start_epoch(now, out);
      break;
  }
}

bool Model::all_actions_fired() const {
  return std::all_of(actions.begin(), actions.end(),
                     [](const ScheduledAction& a) { return a.fired; });
}

void Model::finalize(double now) {
  for (std::uint32_t w = 0; w < result.log.worker_count(); ++w) {
    serialize_versions(result.log.mutable_events(w));
  }
  result.reconfigs = controller->reconfigs();
  std::sort(result.reconfigs.begin(), result.reconfigs.end(),
            [](const ReconfigRecord& a, const ReconfigRecord& b) { return a.id < b.id; });
  result.checkpoints = controller->checkpoints();
  result.artifacts = controller->artifacts();
  for (const WorkerCore& w : workers) result.workers[w.name()] = w.audit();
  result.end_ms = now;
  result.in_flight = in_flight;
  result.counters["phi"] = result.log.count(EventKind::kPhi);
  result.counters["mu"] = result.log.count(EventKind::kMu);
  result.counters["sink"] = result.sink.size();
  std::uint64_t ingested = 0;
  for (const SourceCursor& c : cursors) ingested += workers[c.worker].ingested();
  result.counters["ingested"] = ingested;
}

}  // namespace reconf::detail
