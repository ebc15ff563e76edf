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

// Runtime-independent pieces of the engine: messages, the worker state
// machine, the controller state machine and the wired model both runtimes
// drive. Worker and controller handlers never touch shared state; they
// describe their outputs in an Effects record the runtime applies.

#ifndef RECONF_SRC_ENGINE_CORE_HPP_
#define RECONF_SRC_ENGINE_CORE_HPP_

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "reconf/engine.hpp"

namespace reconf::detail {

enum class MarkerKind : std::uint8_t { kEpoch, kComponent, kCheckpoint };

using UpdatePtr = std::shared_ptr<const FunctionUpdate>;

struct MarkerInfo {
  MarkerKind kind = MarkerKind::kEpoch;
  std::uint64_t id = 0;
  std::uint64_t request = 0;     // 0 when no reconfiguration rides along
  std::uint64_t checkpoint = 0;  // checkpoint markers only
  std::vector<char> in_scope;    // by worker; empty means every worker
  std::map<std::uint32_t, UpdatePtr> payload;

  bool scoped(std::uint32_t w) const { return in_scope.empty() || in_scope[w] != 0; }
};
using MarkerPtr = std::shared_ptr<const MarkerInfo>;

using Message = std::variant<Tuple, MarkerPtr>;

enum class ControlKind : std::uint8_t {
  kApply,        // naive: apply now
  kStartMarker,  // head or source: act on a marker as if fully aligned
  kInstall,      // multi-version phase 1
  kBumpVersion,  // multi-version phase 2, sources
  kRetire,       // multi-version: drop the old configuration
  kAbort,
};

struct Control {
  ControlKind kind = ControlKind::kApply;
  std::uint64_t request = 0;
  UpdatePtr update;
  MarkerPtr marker;
  std::uint32_t version = 0;
};

enum class NoticeKind : std::uint8_t {
  kControlReceived,
  kApplied,
  kInstalled,
  kBumped,
  kSnapshot,
  kFailed,
};

struct Notice {
  NoticeKind kind = NoticeKind::kControlReceived;
  std::uint32_t worker = 0;
  std::uint64_t request = 0;
  std::uint64_t checkpoint = 0;
  WorkerSnapshot snapshot;
  std::string error;
};

struct Effects {
  std::vector<std::pair<std::size_t, Message>> sends;  // by channel id
  std::vector<Notice> notices;
  std::vector<LogEvent> events;
  std::vector<SinkRecord> sunk;
  std::vector<MarkerCrossing> crossings;
  double cost_ms = 0;
  std::optional<Tuple> consumed;  // input data tuple, for in-flight accounting

  void clear() { *this = Effects{}; }
};

struct OutPort {
  OperatorId target;  // logical operator
  Partitioning partitioning = Partitioning::kHash;
  std::vector<std::size_t> channels;
  std::vector<std::uint32_t> receivers;
};

class WorkerCore {
 public:
  struct Config {
    OperatorFunction fn;
    State state;
    std::uint32_t version = 1;
    std::uint64_t request = 0;
  };

  WorkerCore(std::uint32_t index, OperatorId name, WorkerInfo info, OperatorMeta meta,
             OperatorFunction fn, State state);

  std::uint32_t index() const { return index_; }
  const OperatorId& name() const { return name_; }
  const WorkerInfo& info() const { return info_; }
  const OperatorMeta& meta() const { return meta_; }
  bool is_sink() const { return ports_.empty(); }

  // Wiring, done once by the model.
  std::size_t add_input(std::size_t channel, std::uint32_t sender);
  void add_output(const OperatorId& target, Partitioning partitioning, std::size_t channel,
                  std::uint32_t receiver);
  void set_cost_multiplier(double m) { cost_multiplier_ = m; }
  void set_marker_cost(double ms) { marker_cost_ms_ = ms; }
  void set_source_state(std::uint64_t ingested, std::uint32_t version) {
    ingested_ = ingested;
    source_version_ = version;
  }

  const std::vector<std::size_t>& inputs() const { return inputs_; }
  const std::vector<OutPort>& ports() const { return ports_; }
  bool slot_blocked(std::size_t slot) const { return blocked_[slot] > 0; }
  std::uint64_t ingested() const { return ingested_; }
  std::uint32_t source_version() const { return source_version_; }
  const Config& active() const { return active_; }
  bool has_pending() const { return pending_.has_value(); }

  void ingest(std::uint64_t txn, Payload payload, double source_time, std::uint32_t origin,
              double now, Effects& fx);
  void handle_data(Tuple t, double now, Effects& fx);
  void handle_marker(std::size_t slot, const MarkerPtr& m, double now, Effects& fx);
  void handle_control(const Control& c, double now, Effects& fx);

  WorkerAudit audit() const;
  WorkerSnapshot snapshot() const;

 private:
  struct Alignment {
    MarkerPtr marker;
    std::vector<char> got;
    std::size_t remaining = 0;
  };

  void process(const Tuple& t, double now, Effects& fx);
  void complete_marker(const MarkerPtr& m, double now, Effects& fx);
  void apply_update(const FunctionUpdate& u, std::uint64_t request, double now, Effects& fx);
  void log_event(LogEvent e, Effects& fx);
  std::size_t route(const OutPort& port, const Tuple& child) const;
  TupleId next_tuple_id() { return (static_cast<TupleId>(index_ + 1) << 40) | ++tuple_seq_; }

  std::uint32_t index_;
  OperatorId name_;
  WorkerInfo info_;
  OperatorMeta meta_;
  std::vector<std::size_t> inputs_;
  std::vector<std::uint32_t> senders_;
  std::vector<int> blocked_;
  std::vector<OutPort> ports_;
  std::vector<OperatorId> downstream_;
  Config active_;
  std::optional<Config> pending_;
  bool versioned_ = false;
  std::set<std::uint64_t> aborted_;
  std::map<std::uint64_t, Alignment> aligning_;
  double cost_multiplier_ = 1.0;
  double marker_cost_ms_ = 0;
  std::uint64_t ingested_ = 0;
  std::uint32_t source_version_ = 1;
  std::uint64_t tuple_seq_ = 0;
  std::uint64_t logged_ = 0;
};

struct Outgoing {
  std::uint32_t worker = 0;
  Control control;
};

// Controller bookkeeping. All methods append messages for workers to `out`;
// the runtime delivers them.
class ControllerCore {
 public:
  // `old_in_flight(v)` reports whether any tuple tagged below v is buffered
  // or being processed.
  using InFlightProbe = std::function<bool(std::uint32_t version)>;

  ControllerCore(std::vector<OperatorId> worker_names, std::vector<std::uint32_t> sources,
                 const RunConfig& config);

  bool busy() const { return active_.has_value(); }
  bool reconfigs_settled() const;

  void start_reconfig(std::uint64_t id, double now, const ReconfigPlan& plan,
                      std::map<std::uint32_t, UpdatePtr> updates, std::vector<Outgoing>& out);
  void start_checkpoint(std::uint64_t id, CheckpointPolicy policy, double now,
                        std::vector<Outgoing>& out);
  void start_epoch(double now, std::vector<Outgoing>& out);
  void on_notice(const Notice& n, double now, std::vector<Outgoing>& out);
  void on_tick(double now, const InFlightProbe& probe, std::vector<Outgoing>& out);

  std::uint64_t next_marker_id() { return ++marker_seq_; }
  std::vector<ReconfigRecord>& reconfigs() { return reconfigs_; }
  std::vector<CheckpointRecord>& checkpoints() { return checkpoints_; }
  std::vector<CheckpointArtifact>& artifacts() { return artifacts_; }

 private:
  struct ActiveReconfig {
    std::size_t record = 0;
    ReconfigPlan plan;
    std::map<std::uint32_t, UpdatePtr> updates;
    std::set<std::uint32_t> awaiting_apply;
    std::set<std::uint32_t> awaiting_receipt;  // heads or sources
    // Multi-version phases.
    int phase = 0;
    std::set<std::uint32_t> awaiting_install;
    std::set<std::uint32_t> awaiting_bump;
    std::uint32_t version = 0;
    double phase_start = 0;
  };
  struct ActiveCheckpoint {
    std::size_t record = 0;
    CheckpointPolicy policy = CheckpointPolicy::kPlain;
    std::map<std::uint32_t, WorkerSnapshot> snapshots;
  };

  void send(std::uint32_t worker, Control c, std::vector<Outgoing>& out);
  void launch_checkpoint(std::size_t record, std::vector<Outgoing>& out);
  void finish_reconfig(double now, std::vector<Outgoing>& out);
  void fail_reconfig(const std::string& error, double now, std::vector<Outgoing>& out);
  void maybe_unblock(std::vector<Outgoing>& out);
  std::uint32_t worker_id(const OperatorId& name) const;

  std::vector<OperatorId> names_;
  std::vector<std::uint32_t> sources_;
  const RunConfig& config_;
  std::optional<ActiveReconfig> active_;
  std::map<std::uint64_t, ActiveCheckpoint> running_;
  std::vector<std::size_t> deferred_;
  bool checkpoints_blocked_ = false;
  std::uint32_t current_version_ = 1;
  std::uint64_t marker_seq_ = 0;
  std::vector<ReconfigRecord> reconfigs_;
  std::vector<CheckpointRecord> checkpoints_;
  std::vector<CheckpointArtifact> artifacts_;
};

struct ChannelSpec {
  std::uint32_t from = 0;
  std::uint32_t to = 0;
  std::size_t to_slot = 0;
};

struct SourceCursor {
  std::uint32_t worker = 0;
  std::uint32_t ordinal = 0;  // logical source ordinal, part of txn ids
  const SourceFeed* feed = nullptr;
  std::uint64_t stride = 1;
  std::uint64_t offset = 0;

  // Raw index of the next tuple for a worker that already ingested `n`.
  std::uint64_t raw_index(std::uint64_t n) const { return offset + n * stride; }
};

enum class ActionKind { kReconfig, kCheckpoint, kEpoch };

struct ScheduledAction {
  ActionKind kind = ActionKind::kReconfig;
  Trigger when;
  std::uint64_t id = 0;
  ReconfigPlan plan;
  ReconfigurationRequest request;
  CheckpointPolicy policy = CheckpointPolicy::kPlain;
  bool fired = false;
};

// Everything a runtime needs: wired workers, channels, sources, controller
// and the accumulating result.
struct Model {
  Model(const DataflowGraph& logical, Deployment deployment, RunConfig config,
        const CheckpointArtifact* restore_from);

  DataflowGraph logical;
  ParallelGraph parallel;
  Deployment deployment;
  RunConfig config;
  double start_ms = 0;

  std::vector<WorkerCore> workers;
  std::map<OperatorId, std::uint32_t> index;
  std::vector<ChannelSpec> channels;
  std::vector<SourceCursor> cursors;
  std::vector<int> cursor_of;  // by worker, -1 if not a source
  std::unique_ptr<ControllerCore> controller;
  std::vector<ScheduledAction> actions;
  std::uint64_t next_request = 0;
  std::uint64_t next_checkpoint = 0;

  // Per-source low-watermark bookkeeping: in-flight data tuples by origin
  // cursor and version tag.
  std::vector<std::map<std::uint32_t, std::int64_t>> outstanding;
  std::uint64_t in_flight = 0;
  std::uint64_t global_index = 0;

  RunResult result;

  std::optional<double> next_source_time(std::uint32_t worker) const;
  bool source_exhausted(std::uint32_t worker) const;

  // Applies everything but sends; the runtime routes sends itself.
  void record(std::uint32_t worker, Effects& fx, std::vector<Outgoing>& out, double now);
  void count_send(const Message& m);
  bool old_in_flight(std::uint32_t version) const;
  std::map<std::uint32_t, UpdatePtr> expand_updates(const ReconfigurationRequest& request) const;
  // Fires `action` through the controller, recording a rejection when busy.
  void fire(ScheduledAction& action, double now, std::vector<Outgoing>& out);
  bool all_actions_fired() const;
  void finalize(double now);
};

// Deterministic-mode runtime.
void run_simulation(Model& model);
// Concurrent-mode runtime.
void run_threads(Model& model);

}  // namespace reconf::detail

#endif  // RECONF_SRC_ENGINE_CORE_HPP_
