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

// Pipelined dataflow execution with runtime reconfiguration.
//
// An Engine runs the worker-level expansion of a logical graph. Every worker
// owns one state and one active function; data moves on bounded FIFO
// channels, markers align on in-scope inputs, and controller messages use a
// separate path that never queues behind data. Two runtimes share the same
// worker logic: a seeded virtual-time simulator and a thread per worker.

#ifndef RECONF_ENGINE_HPP_
#define RECONF_ENGINE_HPP_

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "reconf/graph.hpp"
#include "reconf/parallel.hpp"
#include "reconf/plan.hpp"
#include "reconf/schedule_log.hpp"

namespace reconf {

using Payload = nlohmann::json;
using State = nlohmann::json;

struct Tuple {
  TxnId txn_id = 0;
  TupleId id = kNoTuple;
  TupleId parent = kNoTuple;
  Payload payload;
  std::optional<std::uint32_t> version_tag;
  double source_time = 0;     // when the source produced the root tuple
  std::uint32_t origin = 0;   // source worker ordinal
};

struct Emission {
  Payload payload;
  // Logical downstream operator; may be empty when there is exactly one.
  OperatorId target;
};

class OperatorFunction {
 public:
  using Apply = std::function<void(State& state, const Tuple& in,
                                   const std::vector<OperatorId>& downstream,
                                   std::vector<Emission>& out)>;

  OperatorFunction() = default;
  OperatorFunction(std::string config_id, Apply apply,
                   std::optional<double> cost_ms = std::nullopt)
      : config_id(std::move(config_id)), apply(std::move(apply)), cost_ms(cost_ms) {}

  std::string config_id;
  Apply apply;
  // Per-tuple processing time; falls back to the operator's cost_ms.
  std::optional<double> cost_ms;
};

using StateTransform = std::function<State(const State&)>;
using StateValidator = std::function<bool(const State&)>;

struct FunctionUpdate {
  OperatorFunction new_function;
  StateTransform state_transform;  // identity when empty
  StateValidator validator;        // optional
};

// Keys are logical operators; every worker of an operator gets the update.
struct ReconfigurationRequest {
  std::map<OperatorId, FunctionUpdate> updates;
  OperatorSet operators() const;
};

enum class Mode { kDeterministic, kConcurrent };

std::string to_string(Mode mode);
Mode parse_mode(const std::string& text);

// Source tuple generator. Raw tuple i of an operator with w workers is
// produced by worker i % w.
struct SourceFeed {
  std::uint64_t count = 0;
  // (from_ms, tuples per second), ascending. Empty means all tuples at once.
  std::vector<std::pair<double, double>> rates;
  std::function<Payload(std::uint64_t index, double time_ms)> payload;
};

// Emission time of raw tuple `index` under a rate schedule, or nullopt if
// the schedule never reaches it.
std::optional<double> feed_time(const SourceFeed& feed, std::uint64_t index);

struct Deployment {
  std::map<OperatorId, OperatorFunction> functions;  // every logical operator
  std::map<OperatorId, State> initial_states;        // default: null
  std::map<OperatorId, SourceFeed> feeds;            // logical sources
  // Maps a config_id back to a function; needed to restore checkpoints.
  std::function<std::optional<OperatorFunction>(const std::string&)> resolve;
};

// When a controller action fires: at a virtual (or wall) time, or right
// before the given deterministic step.
struct Trigger {
  double at_ms = 0;
  std::optional<std::uint64_t> at_step;

  static Trigger at_time(double ms) { return Trigger{ms, std::nullopt}; }
  static Trigger at_step_index(std::uint64_t step) { return Trigger{0, step}; }
};

enum class CheckpointPolicy { kPlain, kReconfigSafe };

struct StopCondition {
  std::optional<double> until_ms;
  std::optional<std::uint64_t> max_steps;  // simulates a crash
  bool when_reconfigs_done = false;
};

struct RunConfig {
  Mode mode = Mode::kDeterministic;
  std::uint64_t seed = 1;
  std::size_t channel_capacity = 1024;
  double control_latency_ms = 0;  // controller to worker
  double notice_latency_ms = 0;   // worker to controller
  // Random extra control latency in [0, jitter) drawn from the seed.
  double control_jitter_ms = 0;
  double marker_cost_ms = 0;
  std::map<OperatorId, double> cost_multiplier;  // by worker, for stragglers
  OperatorSet terminated_workers;                // drop all controller messages
  std::optional<double> ack_timeout_ms;          // multi-version phase 1
  StopCondition stop;
  // Concurrent mode maps one virtual ms to this many wall ms.
  double wall_scale = 1.0;
};

struct SinkRecord {
  OperatorId worker;
  Tuple tuple;
  double receive_ms = 0;
};

struct ReconfigRecord {
  std::uint64_t id = 0;
  SchedulerKind kind = SchedulerKind::kFries;
  double request_ms = 0;
  std::optional<double> complete_ms;
  bool rejected = false;
  bool aborted = false;
  std::string error;
  OperatorSet switched;  // workers that applied their update
  std::optional<double> retired_ms;

  std::optional<double> delay_ms() const {
    if (!complete_ms) return std::nullopt;
    return *complete_ms - request_ms;
  }
};

struct WorkerSnapshot {
  std::string config_id;
  State state;
  std::uint64_t source_offset = 0;  // raw tuples already ingested
  std::uint32_t source_version = 1;
};

struct CheckpointArtifact {
  std::uint64_t id = 0;
  double taken_ms = 0;
  std::map<OperatorId, WorkerSnapshot> workers;

  nlohmann::json to_json() const;
  // Throws InputError on malformed input.
  static CheckpointArtifact from_json(const nlohmann::json& j);
};

struct CheckpointRecord {
  std::uint64_t id = 0;
  CheckpointPolicy policy = CheckpointPolicy::kPlain;
  double request_ms = 0;
  std::optional<double> complete_ms;
  bool cancelled = false;
  bool deferred = false;
};

struct MarkerCrossing {
  OperatorId worker;
  std::uint64_t marker_id = 0;
  std::uint64_t log_seq = 0;  // worker log length when the marker completed
  double vtime = 0;
};

struct WorkerAudit {
  std::string config_id;
  std::size_t state_count = 1;  // two while a multi-version config is pending
  State state;
};

struct RunResult {
  ScheduleLog log;
  std::vector<SinkRecord> sink;
  std::vector<ReconfigRecord> reconfigs;
  std::vector<CheckpointRecord> checkpoints;
  std::vector<CheckpointArtifact> artifacts;
  std::vector<MarkerCrossing> crossings;
  std::map<OperatorId, WorkerAudit> workers;
  std::map<std::string, std::uint64_t> counters;
  std::uint64_t steps = 0;
  double end_ms = 0;
  bool quiescent = false;
  std::uint64_t in_flight = 0;  // data tuples still buffered at stop
};

class Engine {
 public:
  // Throws InputError when the graph or deployment is incomplete.
  Engine(const DataflowGraph& logical, Deployment deployment, RunConfig config);
  ~Engine();
  Engine(Engine&&) noexcept;
  Engine& operator=(Engine&&) noexcept;

  // Resumes from a snapshot: worker states and configurations come from the
  // artifact and sources continue after their recorded offsets.
  static Engine restore(const DataflowGraph& logical, Deployment deployment,
                        const CheckpointArtifact& artifact, RunConfig config);

  const ParallelGraph& parallel() const;
  const DataflowGraph& logical() const;
  const RunConfig& config() const;

  // The plan must come from the schedulers module for this engine's
  // parallel graph. Returns the request id.
  std::uint64_t schedule_reconfiguration(Trigger when, ReconfigPlan plan,
                                         ReconfigurationRequest request);
  std::uint64_t schedule_checkpoint(Trigger when, CheckpointPolicy policy);
  // A marker from every source with no payload.
  std::uint64_t schedule_epoch(Trigger when);

  // Runs until the stop condition or quiescence. Call once.
  // Throws EngineError on arity or routing violations.
  RunResult run();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace reconf

#endif  // RECONF_ENGINE_HPP_
