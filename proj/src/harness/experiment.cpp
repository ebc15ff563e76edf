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
#include <cmath>
#include <set>
#include <sstream>

#include "reconf/error.hpp"
#include "reconf/harness.hpp"

namespace reconf {

using nlohmann::json;

namespace {

// Tuples a rate schedule emits strictly before `until_ms`.
std::uint64_t tuples_before(const std::vector<std::pair<double, double>>& rates,
                            double until_ms) {
  double total = 0;
  for (std::size_t i = 0; i < rates.size(); ++i) {
    const double from = rates[i].first;
    const double to = i + 1 < rates.size() ? std::min(rates[i + 1].first, until_ms) : until_ms;
    if (to <= from) continue;
    total += std::ceil((to - from) * rates[i].second / 1000.0 - 1e-9);
  }
  return static_cast<std::uint64_t>(total);
}

std::string versioned(std::string config_id, int steps) {
  for (int i = 0; i < steps; ++i) config_id = next_version(config_id);
  return config_id;
}

template <typename T>
T field(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw InputError(std::string("experiment field '") + key + "' has the wrong type");
  }
}

}  // namespace

ExperimentSpec parse_experiment(const json& j) {
  static const std::set<std::string> kKnown = {
      "name",          "workflow",          "scheduler",          "options",
      "reconfig_ops",  "inject_ms",         "rates",              "duration_ms",
      "workers",       "inference_cost_ms", "cost_overrides",     "stragglers",
      "channel_capacity", "control_latency_ms", "mode",           "seed",
      "repetitions",   "stop_after_reconfig", "version_period_ms", "latency_window_ms"};
  if (!j.is_object()) throw InputError("experiment must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (!kKnown.count(key)) throw InputError("unknown experiment field '" + key + "'");
  }
  ExperimentSpec s;
  s.name = field(j, "name", s.name);
  s.workflow = field(j, "workflow", s.workflow);
  const std::string sched = field<std::string>(j, "scheduler", "fries");
  if (sched == "none") {
    s.reconfigure = false;
  } else {
    s.scheduler = parse_scheduler(sched);
  }
  if (auto it = j.find("options"); it != j.end()) {
    if (!it->is_object()) throw InputError("experiment options must be an object");
    s.options.extended = field(*it, "extended", s.options.extended);
    s.options.pruning = field(*it, "pruning", s.options.pruning);
  }
  for (const auto& op : field<std::vector<std::string>>(j, "reconfig_ops", {})) {
    s.reconfig_ops.insert(op);
  }
  s.inject_ms = field(j, "inject_ms", s.inject_ms);
  if (auto it = j.find("rates"); it != j.end()) {
    s.rates.clear();
    if (!it->is_array()) throw InputError("experiment rates must be a list of [time_ms, rate]");
    for (const json& r : *it) {
      if (!r.is_array() || r.size() != 2 || !r[0].is_number() || !r[1].is_number()) {
        throw InputError("experiment rates must be a list of [time_ms, rate]");
      }
      s.rates.emplace_back(r[0].get<double>(), r[1].get<double>());
    }
  }
  s.duration_ms = field(j, "duration_ms", s.duration_ms);
  s.workers = field(j, "workers", s.workers);
  if (j.contains("inference_cost_ms")) s.inference_cost_ms = field(j, "inference_cost_ms", 0.0);
  s.cost_overrides = field(j, "cost_overrides", s.cost_overrides);
  s.stragglers = field(j, "stragglers", s.stragglers);
  s.channel_capacity = field(j, "channel_capacity", s.channel_capacity);
  s.control_latency_ms = field(j, "control_latency_ms", s.control_latency_ms);
  s.mode = parse_mode(field<std::string>(j, "mode", to_string(s.mode)));
  s.seed = field(j, "seed", s.seed);
  s.repetitions = field(j, "repetitions", s.repetitions);
  s.stop_after_reconfig = field(j, "stop_after_reconfig", s.stop_after_reconfig);
  if (j.contains("version_period_ms")) s.version_period_ms = field(j, "version_period_ms", 0.0);
  s.latency_window_ms = field(j, "latency_window_ms", s.latency_window_ms);
  validate_experiment(s);
  return s;
}

void validate_experiment(const ExperimentSpec& s) {
  const auto names = catalog_names();
  if (std::find(names.begin(), names.end(), s.workflow) == names.end()) {
    throw InputError("unknown workflow '" + s.workflow + "'");
  }
  if (!(s.duration_ms > 0)) throw InputError("duration_ms must be positive");
  if (s.rates.empty()) throw InputError("rate schedule is empty");
  for (std::size_t i = 0; i < s.rates.size(); ++i) {
    if (!(s.rates[i].second > 0)) throw InputError("rates must be positive");
    if (s.rates[i].first < 0 || (i > 0 && s.rates[i].first <= s.rates[i - 1].first)) {
      throw InputError("rate schedule times must be ascending and non-negative");
    }
  }
  if (s.repetitions < 1) throw InputError("repetitions must be at least 1");
  if (s.workers < 1) throw InputError("workers must be at least 1");
  if (s.channel_capacity < 1) throw InputError("channel_capacity must be at least 1");
  if (s.control_latency_ms < 0) throw InputError("control_latency_ms must be non-negative");
  if (!(s.latency_window_ms > 0)) throw InputError("latency_window_ms must be positive");
  if (s.version_period_ms && !(*s.version_period_ms > 0)) {
    throw InputError("version_period_ms must be positive");
  }
  const DataflowGraph graph = catalog_workflow(s.workflow).graph;
  for (const auto& [op, cost] : s.cost_overrides) {
    if (!graph.contains(op)) throw InputError("cost override names unknown operator '" + op + "'");
    if (cost < 0) throw InputError("cost override for '" + op + "' is negative");
  }
  for (const auto& [w, m] : s.stragglers) {
    if (!(m > 0)) throw InputError("straggler multiplier for '" + w + "' must be positive");
  }
  if (!s.reconfigure) return;
  if (s.reconfig_ops.empty()) throw InputError("reconfig_ops is empty");
  for (const OperatorId& op : s.reconfig_ops) {
    if (!graph.contains(op)) throw InputError("unknown operator '" + op + "' in reconfig_ops");
  }
  if (s.inject_ms.empty()) throw InputError("inject_ms is empty");
  for (double t : s.inject_ms) {
    if (t < 0 || t > s.duration_ms) {
      throw InputError("injection time " + std::to_string(t) + " is outside the run");
    }
  }
}

Summary summarize(const std::vector<double>& values) {
  Summary s;
  s.n = values.size();
  if (values.empty()) return s;
  double sum = 0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n < 2) return s;
  double sq = 0;
  for (double v : values) sq += (v - s.mean) * (v - s.mean);
  const double sd = std::sqrt(sq / static_cast<double>(s.n - 1));
  s.ci95 = 1.96 * sd / std::sqrt(static_cast<double>(s.n));
  return s;
}

RunMetrics run_once(const ExperimentSpec& spec, std::uint64_t seed) {
  CatalogOptions copts;
  copts.workers = spec.workers;
  copts.inference_cost_ms = spec.inference_cost_ms;
  Workflow wf = catalog_workflow(spec.workflow, copts);
  for (const auto& [op, cost] : spec.cost_overrides) {
    if (!wf.graph.contains(op)) throw InputError("cost override names unknown operator '" + op + "'");
    wf.graph.mutable_meta(op).cost_ms = cost;
  }
  const std::uint64_t count = tuples_before(spec.rates, spec.duration_ms);
  const std::optional<double> period = spec.version_period_ms;
  for (auto& [src, feed] : wf.deployment.feeds) {
    feed.count = count;
    feed.rates = spec.rates;
    feed.payload = [period](std::uint64_t i, double t) {
      const auto ver = period ? 1 + static_cast<std::uint64_t>(std::floor(t / *period)) : 1;
      return Payload{{"key", i}, {"ver", ver}};
    };
  }

  RunConfig cfg;
  cfg.mode = spec.mode;
  cfg.seed = seed;
  cfg.channel_capacity = spec.channel_capacity;
  cfg.control_latency_ms = spec.control_latency_ms;
  cfg.cost_multiplier = spec.stragglers;
  cfg.stop.until_ms = spec.duration_ms;
  cfg.stop.when_reconfigs_done = spec.stop_after_reconfig;
  Engine engine(wf.graph, wf.deployment, cfg);
  if (spec.reconfigure) {
    std::vector<double> times = spec.inject_ms;
    std::sort(times.begin(), times.end());
    for (std::size_t k = 0; k < times.size(); ++k) {
      ReconfigurationRequest req;
      for (const OperatorId& op : spec.reconfig_ops) {
        auto it = wf.deployment.functions.find(op);
        if (it == wf.deployment.functions.end()) {
          throw InputError("unknown operator '" + op + "' in reconfig_ops");
        }
        req.updates.emplace(
            op, builtin_update(versioned(it->second.config_id, static_cast<int>(k) + 1), ""));
      }
      ReconfigPlan plan =
          make_plan(spec.scheduler, spec.options, engine.parallel(), spec.reconfig_ops);
      engine.schedule_reconfiguration(Trigger::at_time(times[k]), std::move(plan),
                                      std::move(req));
    }
  }
  RunResult r = engine.run();

  RunMetrics m;
  m.seed = seed;
  m.steps = r.steps;
  m.log_digest = r.log.digest();
  for (const ReconfigRecord& rec : r.reconfigs) {
    if (rec.rejected) ++m.rejected;
    if (auto d = rec.delay_ms()) m.delays_ms.push_back(*d);
  }
  std::vector<SinkRecord> sink = r.sink;
  std::stable_sort(sink.begin(), sink.end(), [](const SinkRecord& a, const SinkRecord& b) {
    return a.receive_ms < b.receive_ms;
  });
  m.sink_tuples = sink.size();
  const double window = spec.latency_window_ms;
  std::size_t i = 0;
  for (double end = window; i < sink.size(); end += window) {
    double sum = 0;
    std::size_t n = 0;
    for (; i < sink.size() && sink[i].receive_ms < end; ++i) {
      sum += sink[i].receive_ms - sink[i].tuple.source_time;
      ++n;
      const Payload& p = sink[i].tuple.payload;
      if (p.is_object() && p.contains("valid") && !p["valid"].get<bool>()) ++m.invalid_tuples;
    }
    if (n > 0) m.latency_windows.emplace_back(end, sum / static_cast<double>(n));
    m.invalid_series.emplace_back(end, m.invalid_tuples);
  }
  return m;
}

MetricsReport run_experiment(const ExperimentSpec& spec) {
  validate_experiment(spec);
  MetricsReport report;
  report.spec = spec;
  std::vector<double> delays;
  std::vector<double> invalid;
  for (int rep = 0; rep < spec.repetitions; ++rep) {
    const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(rep);
    try {
      report.runs.push_back(run_once(spec, seed));
    } catch (const EngineError& e) {
      throw EngineError("seed " + std::to_string(seed) + ": " + e.what());
    }
    const RunMetrics& m = report.runs.back();
    delays.insert(delays.end(), m.delays_ms.begin(), m.delays_ms.end());
    invalid.push_back(static_cast<double>(m.invalid_tuples));
  }
  report.delay = summarize(delays);
  report.invalid = summarize(invalid);

  CatalogOptions copts;
  copts.workers = spec.workers;
  const Workflow wf = catalog_workflow(spec.workflow, copts);
  const ParallelGraph pg = expand_parallel(wf.graph);
  report.channels = pg.channel_count();
  if (spec.reconfigure) {
    const FriesAnalysis a = analyze_fries(wf.graph, spec.reconfig_ops, spec.options);
    for (const Component& c : a.mcs.components) {
      report.component_sizes.push_back(c.vertices.size());
      report.component_paths.push_back(c.longest_path_len);
    }
    report.mcs_channels = pg.channel_count_within(pg.workers_of(a.mcs.vertices));
  }
  return report;
}

json MetricsReport::to_json() const {
  json runs_j = json::array();
  for (const RunMetrics& m : runs) {
    json windows = json::array();
    for (const auto& [end, mean] : m.latency_windows) windows.push_back({end, mean});
    json series = json::array();
    for (const auto& [end, n] : m.invalid_series) series.push_back({end, n});
    runs_j.push_back({{"seed", m.seed},
                      {"delays_ms", m.delays_ms},
                      {"rejected", m.rejected},
                      {"sink_tuples", m.sink_tuples},
                      {"invalid_tuples", m.invalid_tuples},
                      {"latency_windows", windows},
                      {"invalid_series", series},
                      {"steps", m.steps},
                      {"log_digest", m.log_digest}});
  }
  auto summary = [](const Summary& s) {
    return json{{"mean", s.mean}, {"ci95", s.ci95}, {"n", s.n}};
  };
  return {{"name", spec.name},
          {"workflow", spec.workflow},
          {"scheduler", spec.reconfigure ? to_string(spec.scheduler) : "none"},
          {"mode", to_string(spec.mode)},
          {"delay_ms", summary(delay)},
          {"invalid_tuples", summary(invalid)},
          {"component_sizes", component_sizes},
          {"component_paths", component_paths},
          {"channels", channels},
          {"mcs_channels", mcs_channels},
          {"runs", runs_j}};
}

std::string MetricsReport::to_csv() const {
  std::ostringstream out;
  out.precision(10);
  out << "seed,event,vtime_or_wallclock_ms,value\n";
  for (const RunMetrics& m : runs) {
    for (std::size_t k = 0; k < m.delays_ms.size(); ++k) {
      const double at = k < spec.inject_ms.size() ? spec.inject_ms[k] : 0;
      out << m.seed << ",delay," << at << ',' << m.delays_ms[k] << '\n';
    }
    for (const auto& [end, mean] : m.latency_windows) {
      out << m.seed << ",latency," << end << ',' << mean << '\n';
    }
    for (const auto& [end, n] : m.invalid_series) {
      out << m.seed << ",invalid," << end << ',' << n << '\n';
    }
  }
  return out.str();
}

}  // namespace reconf
