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

// Workflow catalog, built-in operator functions, experiment runner, fuzzing
// campaigns and delay benchmarks.

#ifndef RECONF_HARNESS_HPP_
#define RECONF_HARNESS_HPP_

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "reconf/engine.hpp"
#include "reconf/schedulers.hpp"
#include "reconf/txn_check.hpp"

namespace reconf {

// ---------------------------------------------------------------------------
// Built-in functions.
//
// A config id reads "<kind>[:<param>].v<version>", for example "pass.v1",
// "fanout:3.v1" or "fd.v2". Kinds:
//   pass       one output, routed by key when there are several downstreams
//   filter     like pass, but drops keys congruent to 3 mod 7
//   fanout:k   k outputs spread over the downstream operators
//   replicate  one copy per downstream operator
//   dedup      forwards only the first tuple of each transaction
//   selfjoin   emits once the second copy of a transaction arrives
//   fd         tags each tuple valid when its "ver" equals the version
//   sink       consumes
// Every kind counts processed tuples in state["n"].

std::optional<OperatorFunction> builtin_function(const std::string& config_id);
// Throws InputError for unknown ids.
OperatorFunction require_function(const std::string& config_id);
// "" and "identity" keep the state; "reset" clears it; "count_reset" zeroes
// the counter; "fail" throws.
StateTransform builtin_transform(const std::string& name);
FunctionUpdate builtin_update(const std::string& config_id, const std::string& transform);
// "pass.v1" -> "pass.v2".
std::string next_version(const std::string& config_id);

// ---------------------------------------------------------------------------
// Catalog.

struct CatalogOptions {
  int workers = 1;  // for operators the workflow marks as parallel
  std::uint64_t tuples = 100;
  double rate = 0;  // per source, tuples/s; 0 emits everything at time 0
  std::map<OperatorId, double> source_rates;  // overrides `rate`
  std::optional<double> inference_cost_ms;    // default 25
  double base_cost_ms = 0;                    // every other operator
};

struct Workflow {
  std::string name;
  DataflowGraph graph;
  Deployment deployment;
  OperatorSet inference;  // operators standing in for model inference
};

std::vector<std::string> catalog_names();
// Throws InputError for an unknown name.
Workflow catalog_workflow(const std::string& name, const CatalogOptions& options = {});

// Updates every listed operator to the next version of its function.
ReconfigurationRequest bump_request(const Workflow& wf, const OperatorSet& ops,
                                    const std::string& transform = "");

// ---------------------------------------------------------------------------
// Experiments.

struct ExperimentSpec {
  std::string name = "experiment";
  std::string workflow = "w1";
  SchedulerKind scheduler = SchedulerKind::kFries;
  FriesOptions options;
  bool reconfigure = true;  // false runs the workflow untouched
  OperatorSet reconfig_ops;
  std::vector<double> inject_ms;
  std::vector<std::pair<double, double>> rates{{0, 1000}};
  double duration_ms = 30000;
  int workers = 1;
  std::optional<double> inference_cost_ms;
  std::map<OperatorId, double> cost_overrides;  // logical operator -> cost_ms
  std::map<OperatorId, double> stragglers;      // worker -> cost multiplier
  std::size_t channel_capacity = 1024;
  double control_latency_ms = 1;
  Mode mode = Mode::kDeterministic;
  std::uint64_t seed = 1;
  int repetitions = 1;
  bool stop_after_reconfig = false;
  // Source tuples carry "ver" = 1 + floor(t / period); each injection is
  // placed `notice` after a version change when set.
  std::optional<double> version_period_ms;
  double latency_window_ms = 10000;
};

// Throws InputError on invalid fields.
ExperimentSpec parse_experiment(const nlohmann::json& j);
void validate_experiment(const ExperimentSpec& spec);

struct RunMetrics {
  std::uint64_t seed = 0;
  std::vector<double> delays_ms;  // one per completed reconfiguration
  std::uint64_t rejected = 0;
  std::uint64_t sink_tuples = 0;
  std::uint64_t invalid_tuples = 0;
  std::vector<std::pair<double, double>> latency_windows;  // (window end, mean)
  std::vector<std::pair<double, std::uint64_t>> invalid_series;  // cumulative
  std::uint64_t steps = 0;
  std::uint64_t log_digest = 0;
};

struct Summary {
  double mean = 0;
  double ci95 = 0;  // normal-approximation half width
  std::size_t n = 0;
};
Summary summarize(const std::vector<double>& values);

struct MetricsReport {
  ExperimentSpec spec;
  std::vector<RunMetrics> runs;
  Summary delay;
  Summary invalid;
  std::vector<std::size_t> component_sizes;
  std::vector<std::size_t> component_paths;
  std::size_t channels = 0;
  std::size_t mcs_channels = 0;

  nlohmann::json to_json() const;
  // Rows: event,vtime_or_wallclock_ms,value
  std::string to_csv() const;
};

// Throws EngineError naming the failing seed.
MetricsReport run_experiment(const ExperimentSpec& spec);
RunMetrics run_once(const ExperimentSpec& spec, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Fuzzing.

enum class GraphClass { kOneToOne, kOneToMany, kAny };

struct FuzzOptions {
  SchedulerKind scheduler = SchedulerKind::kFries;
  FriesOptions options;
  // A catalog name or "random:one_to_one", "random:one_to_many", "random:any".
  std::string graph = "random:any";
  OperatorSet ops;  // fixed request for catalog graphs; empty picks randomly
  std::uint64_t first_seed = 1;
  std::uint64_t runs = 100;
  std::uint64_t tuples = 24;
  bool minimize = true;
  bool stop_on_failure = true;
};

struct FuzzCase {
  Workflow workflow;
  OperatorSet ops;
  RunConfig config;
  std::uint64_t inject_step = 0;
};

struct FuzzOutcome {
  bool serializable = true;
  bool version_consistent = true;
  bool lineage_ok = true;
  bool completed = true;  // the reconfiguration finished
  bool engine_ok = true;
  std::optional<Witness> witness;
  std::string detail;
  bool failed() const {
    return !serializable || !version_consistent || !lineage_ok || !engine_ok;
  }
};

struct FuzzFailure {
  std::uint64_t seed = 0;
  std::uint64_t tuples = 0;  // smallest input size that still fails
  FuzzOutcome outcome;
};

struct FuzzReport {
  std::uint64_t runs = 0;
  std::uint64_t failures = 0;
  std::uint64_t incomplete = 0;
  std::uint64_t version_audits = 0;
  std::optional<FuzzFailure> first_failure;

  nlohmann::json to_json() const;
};

FuzzCase make_fuzz_case(const FuzzOptions& options, std::uint64_t seed, std::uint64_t tuples);
FuzzOutcome run_fuzz_case(const FuzzCase& c, const FuzzOptions& options, RunResult* out = nullptr);
FuzzReport fuzz(const FuzzOptions& options);

// Random DAG with the given operator mix; every operator gets a built-in
// function, sources get `tuples` tuples at time 0.
Workflow random_workflow(GraphClass cls, std::uint64_t seed, std::uint64_t tuples);

// ---------------------------------------------------------------------------
// Delay benchmarks in virtual time.

struct DelayScenario {
  std::string workflow = "w1";
  CatalogOptions catalog;
  std::map<OperatorId, double> cost_overrides;
  SchedulerKind scheduler = SchedulerKind::kFries;
  FriesOptions options;
  OperatorSet ops;
  double inject_ms = 20000;
  std::uint64_t seed = 1;
  std::size_t channel_capacity = 1024;
  double control_latency_ms = 1;
};

// Reconfiguration delay in virtual ms. Throws EngineError if the
// reconfiguration does not complete.
double measure_delay(const DelayScenario& scenario);

struct BenchRow {
  std::string sweep;
  std::string scheduler;
  std::string x;
  Summary delay;
};

// sweep: "rate", "cost", "workers" or "components".
std::vector<BenchRow> bench(const std::string& sweep, int reps, std::uint64_t seed);
std::string bench_csv(const std::vector<BenchRow>& rows);

// Cumulative invalid output tuples at the end of an invalid-tuple run, for
// "none", "epoch" or "fries".
std::uint64_t invalid_tuple_count(const std::string& scheduler, std::uint64_t seed);

}  // namespace reconf

#endif  // RECONF_HARNESS_HPP_
