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

#include <cmath>
#include <sstream>

#include "reconf/error.hpp"
#include "reconf/harness.hpp"

namespace reconf {

namespace {

// The inference stage of w1 runs on four workers; queue size q maps to a
// per-tuple cost of q/5 ms.
constexpr int kW1Workers = 4;
double w1_cost(int queue) { return queue / 5.0; }

DelayScenario w1_scenario(SchedulerKind kind, double rate, int queue, std::uint64_t seed) {
  DelayScenario s;
  s.workflow = "w1";
  s.catalog.workers = kW1Workers;
  s.catalog.rate = rate;
  s.catalog.inference_cost_ms = w1_cost(queue);
  s.inject_ms = 10000;
  s.catalog.tuples = static_cast<std::uint64_t>(rate * 30);
  s.scheduler = kind;
  s.ops = {"FD"};
  s.seed = seed;
  s.channel_capacity = 256;
  return s;
}

// w3 with Src2 feeding J6 faster than J6 can drain.
DelayScenario w3_scenario(SchedulerKind kind, const OperatorSet& ops, std::uint64_t seed) {
  DelayScenario s;
  s.workflow = "w3";
  s.catalog.rate = 100;
  s.catalog.source_rates = {{"Src2", 3000}};
  s.catalog.base_cost_ms = 0.1;
  s.catalog.tuples = 30000;
  s.cost_overrides = {{"J5", 0.5}, {"J6", 0.5}};
  s.inject_ms = 5000;
  s.scheduler = kind;
  s.ops = ops;
  s.seed = seed;
  s.channel_capacity = 256;
  return s;
}

std::string label(SchedulerKind kind) { return to_string(kind); }

std::string number(double v) {
  std::ostringstream out;
  out << v;
  return out.str();
}

BenchRow row(const std::string& sweep, SchedulerKind kind, const std::string& x,
             const std::vector<double>& delays) {
  return BenchRow{sweep, label(kind), x, summarize(delays)};
}

}  // namespace

double measure_delay(const DelayScenario& scenario) {
  Workflow wf = catalog_workflow(scenario.workflow, scenario.catalog);
  for (const auto& [op, cost] : scenario.cost_overrides) {
    if (!wf.graph.contains(op)) throw InputError("cost override names unknown operator '" + op + "'");
    wf.graph.mutable_meta(op).cost_ms = cost;
  }
  RunConfig cfg;
  cfg.seed = scenario.seed;
  cfg.channel_capacity = scenario.channel_capacity;
  cfg.control_latency_ms = scenario.control_latency_ms;
  cfg.stop.when_reconfigs_done = true;
  Engine engine(wf.graph, wf.deployment, cfg);
  ReconfigPlan plan =
      make_plan(scenario.scheduler, scenario.options, engine.parallel(), scenario.ops);
  engine.schedule_reconfiguration(Trigger::at_time(scenario.inject_ms), std::move(plan),
                                  bump_request(wf, scenario.ops));
  const RunResult r = engine.run();
  if (r.reconfigs.empty() || !r.reconfigs.front().delay_ms()) {
    throw EngineError("reconfiguration of " + scenario.workflow + " with seed " +
                      std::to_string(scenario.seed) + " did not complete");
  }
  return *r.reconfigs.front().delay_ms();
}

std::vector<BenchRow> bench(const std::string& sweep, int reps, std::uint64_t seed) {
  if (reps < 1) throw InputError("bench needs at least one repetition");
  const SchedulerKind kinds[] = {SchedulerKind::kEpoch, SchedulerKind::kFries};
  std::vector<BenchRow> rows;
  auto repeat = [&](auto make) {
    std::vector<double> d;
    for (int r = 0; r < reps; ++r) d.push_back(measure_delay(make(seed + r)));
    return d;
  };
  if (sweep == "rate") {
    for (SchedulerKind k : kinds) {
      for (double rate : {500.0, 1000.0, 1500.0, 2000.0, 2500.0}) {
        rows.push_back(row(sweep, k, number(rate), repeat([&](std::uint64_t s) {
                             return w1_scenario(k, rate, 10, s);
                           })));
      }
    }
  } else if (sweep == "cost") {
    for (SchedulerKind k : kinds) {
      for (int queue : {10, 20, 30, 40, 50}) {
        rows.push_back(row(sweep, k, number(queue), repeat([&](std::uint64_t s) {
                             return w1_scenario(k, 1000, queue, s);
                           })));
      }
    }
  } else if (sweep == "workers") {
    for (SchedulerKind k : kinds) {
      for (int w : {1, 2, 3, 4}) {
        rows.push_back(row(sweep, k, number(w), repeat([&](std::uint64_t s) {
                             DelayScenario d;
                             d.workflow = "w2";
                             d.catalog.workers = w;
                             d.catalog.rate = 1900;
                             d.catalog.base_cost_ms = 0.5 * w;  // same load per worker
                             d.catalog.tuples = 19000;
                             d.inject_ms = 5000;
                             d.scheduler = k;
                             d.ops = {"J2"};
                             d.seed = s;
                             d.channel_capacity = 256;
                             return d;
                           })));
      }
    }
  } else if (sweep == "components") {
    const std::pair<const char*, OperatorSet> sets[] = {{"J5", {"J5"}}, {"J5+J6", {"J5", "J6"}}};
    for (SchedulerKind k : kinds) {
      for (const auto& [name, ops] : sets) {
        rows.push_back(row(sweep, k, name, repeat([&](std::uint64_t s) {
                             return w3_scenario(k, ops, s);
                           })));
      }
    }
  } else {
    throw InputError("unknown bench sweep '" + sweep + "'");
  }
  return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::ostringstream out;
  out.precision(10);
  out << "sweep,scheduler,x,delay_mean_ms,delay_ci95_ms,n\n";
  for (const BenchRow& r : rows) {
    out << r.sweep << ',' << r.scheduler << ',' << r.x << ',' << r.delay.mean << ','
        << r.delay.ci95 << ',' << r.delay.n << '\n';
  }
  return out.str();
}

std::uint64_t invalid_tuple_count(const std::string& scheduler, std::uint64_t seed) {
  ExperimentSpec spec;
  spec.name = "invalid-" + scheduler;
  spec.workflow = "w1";
  spec.workers = 4;
  spec.inference_cost_ms = 50;
  spec.rates = {{0, 60}};
  spec.duration_ms = 30000;
  spec.version_period_ms = 5000;
  // Each version change is noticed 150 ms late, about twice the time a
  // tuple spends between the source and the inference stage.
  for (int k = 1; k <= 5; ++k) spec.inject_ms.push_back(5000.0 * k + 150);
  spec.reconfig_ops = {"FD"};
  spec.seed = seed;
  if (scheduler == "none") {
    spec.reconfigure = false;
  } else if (scheduler == "epoch" || scheduler == "fries") {
    spec.scheduler = parse_scheduler(scheduler);
  } else {
    throw InputError("unknown scheduler '" + scheduler + "' for the invalid-tuple run");
  }
  return run_once(spec, seed).invalid_tuples;
}

}  // namespace reconf
