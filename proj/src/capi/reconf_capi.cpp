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

#include "reconf/reconf.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

#include "reconf/error.hpp"
#include "reconf/harness.hpp"

struct reconf_graph {
  reconf::DataflowGraph graph;
};

struct reconf_log {
  reconf::ScheduleLog log;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_text(const char* text, const char* what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw reconf::InputError(std::string(what) + " is not valid JSON: " + e.what());
  }
}

template <typename F>
reconf_status guarded(F&& body) {
  g_last_error.clear();
  try {
    body();
    return RECONF_OK;
  } catch (const reconf::InputError& e) {
    g_last_error = e.what();
    return RECONF_ERR_INPUT;
  } catch (const reconf::BusyError& e) {
    g_last_error = e.what();
    return RECONF_ERR_BUSY;
  } catch (const reconf::EngineError& e) {
    g_last_error = e.what();
    return RECONF_ERR_ENGINE;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RECONF_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return RECONF_ERR_INTERNAL;
  }
}

void require(const void* p, const char* name) {
  if (!p) throw std::invalid_argument(std::string(name) + " is NULL");
}

reconf::FuzzOptions parse_fuzz_options(const json& j) {
  if (!j.is_object()) throw reconf::InputError("fuzz options must be a JSON object");
  reconf::FuzzOptions o;
  try {
    o.scheduler = reconf::parse_scheduler(j.value("scheduler", std::string("fries")));
    if (auto it = j.find("options"); it != j.end()) {
      o.options.extended = it->value("extended", o.options.extended);
      o.options.pruning = it->value("pruning", o.options.pruning);
      o.options.allow_unsafe_basic = it->value("allow_unsafe_basic", false);
    }
    o.graph = j.value("graph", o.graph);
    for (const auto& op : j.value("ops", std::vector<std::string>{})) o.ops.insert(op);
    o.first_seed = j.value("first_seed", o.first_seed);
    o.runs = j.value("runs", o.runs);
    o.tuples = j.value("tuples", o.tuples);
    o.minimize = j.value("minimize", o.minimize);
    o.stop_on_failure = j.value("stop_on_failure", o.stop_on_failure);
  } catch (const json::exception& e) {
    throw reconf::InputError(std::string("bad fuzz options: ") + e.what());
  }
  return o;
}

}  // namespace

extern "C" {

const char* reconf_version(void) { return "0.1.0"; }

const char* reconf_last_error(void) { return g_last_error.c_str(); }

void reconf_string_free(char* s) { std::free(s); }

reconf_status reconf_graph_load_file(const char* path, reconf_graph** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new reconf_graph{reconf::load_graph_file(path)};
  });
}

reconf_status reconf_graph_from_json(const char* text, reconf_graph** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new reconf_graph{reconf::graph_from_json_text(text)};
  });
}

reconf_status reconf_graph_from_catalog(const char* name, int workers, reconf_graph** out) {
  return guarded([&] {
    require(name, "name");
    require(out, "out");
    reconf::CatalogOptions opts;
    opts.workers = workers;
    *out = new reconf_graph{reconf::catalog_workflow(name, opts).graph};
  });
}

void reconf_graph_free(reconf_graph* g) { delete g; }

reconf_status reconf_graph_json(const reconf_graph* g, char** out_json) {
  return guarded([&] {
    require(g, "graph");
    require(out_json, "out_json");
    *out_json = dup(reconf::graph_to_json_text(g->graph));
  });
}

reconf_status reconf_plan_json(const reconf_graph* g, const char* request_json,
                               char** out_json) {
  return guarded([&] {
    require(g, "graph");
    require(request_json, "request_json");
    require(out_json, "out_json");
    const reconf::RequestDocument doc =
        reconf::parse_request(parse_text(request_json, "request"));
    const reconf::OperatorSet ops = doc.operators();
    const reconf::ParallelGraph pg = reconf::expand_parallel(g->graph);
    const reconf::ReconfigPlan plan = reconf::make_plan(doc.scheduler, doc.options, pg, ops);
    json j = {{"scheduler", reconf::to_string(doc.scheduler)},
              {"operators", ops},
              {"plan", reconf::plan_to_json(plan)},
              {"channels", pg.channel_count()}};
    if (doc.scheduler == reconf::SchedulerKind::kFries) {
      const reconf::FriesAnalysis a = reconf::analyze_fries(g->graph, ops, doc.options);
      j["analysis"] = reconf::analysis_to_json(a);
      j["mcs_channels"] = pg.channel_count_within(pg.workers_of(a.mcs.vertices));
    }
    *out_json = dup(j.dump(2));
  });
}

reconf_status reconf_log_load_file(const char* path, reconf_log** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    std::ifstream in(path);
    if (!in) throw reconf::InputError(std::string("cannot open log '") + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    *out = new reconf_log{reconf::ScheduleLog::from_jsonl(text.str())};
  });
}

reconf_status reconf_log_from_text(const char* text, reconf_log** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new reconf_log{reconf::ScheduleLog::from_jsonl(text)};
  });
}

void reconf_log_free(reconf_log* log) { delete log; }

reconf_status reconf_check_json(const reconf_log* log, int* ok, char** out_json) {
  return guarded([&] {
    require(log, "log");
    require(ok, "ok");
    require(out_json, "out_json");
    const reconf::SerializabilityVerdict v = reconf::check_conflict_serializable(log->log);
    json j = v.to_json();
    bool good = v.serializable;
    bool has_applied = false;
    for (std::uint32_t w = 0; w < log->log.worker_count() && !has_applied; ++w) {
      for (const reconf::LogEvent& e : log->log.events(w)) {
        if (e.kind == reconf::EventKind::kPhi && e.applied >= 0) {
          has_applied = true;
          break;
        }
      }
    }
    if (has_applied) {
      const reconf::VersionAudit a = reconf::audit_version_consistency(log->log);
      json violations = json::array();
      for (const reconf::VersionViolation& x : a.violations) {
        violations.push_back({{"worker", x.worker},
                              {"seq", x.seq},
                              {"txn_id", x.txn},
                              {"tag", x.tag},
                              {"applied", x.applied}});
      }
      j["version_audit"] = {{"consistent", a.consistent},
                            {"checked", a.checked},
                            {"violations", violations}};
      good = good && a.consistent;
    }
    *ok = good ? 1 : 0;
    *out_json = dup(j.dump(2));
  });
}

reconf_status reconf_run_experiment(const char* spec_json, const char* overrides_json,
                                    char** out_json, char** out_csv) {
  return guarded([&] {
    require(spec_json, "spec_json");
    require(out_json, "out_json");
    require(out_csv, "out_csv");
    json spec = parse_text(spec_json, "experiment spec");
    if (overrides_json) spec.merge_patch(parse_text(overrides_json, "overrides"));
    const reconf::MetricsReport report =
        reconf::run_experiment(reconf::parse_experiment(spec));
    *out_json = dup(report.to_json().dump(2));
    *out_csv = dup(report.to_csv());
  });
}

reconf_status reconf_fuzz(const char* options_json, uint64_t* failures, char** out_json) {
  return guarded([&] {
    require(options_json, "options_json");
    require(failures, "failures");
    require(out_json, "out_json");
    const reconf::FuzzReport report =
        reconf::fuzz(parse_fuzz_options(parse_text(options_json, "fuzz options")));
    *failures = report.failures;
    *out_json = dup(report.to_json().dump(2));
  });
}

reconf_status reconf_bench(const char* sweep, int reps, uint64_t seed, char** out_csv) {
  return guarded([&] {
    require(sweep, "sweep");
    require(out_csv, "out_csv");
    if (std::string(sweep) != "invalid") {
      *out_csv = dup(reconf::bench_csv(reconf::bench(sweep, reps, seed)));
      return;
    }
    if (reps < 1) throw reconf::InputError("bench needs at least one repetition");
    std::ostringstream csv;
    csv << "scheduler,seed,invalid_tuples\n";
    for (const char* s : {"none", "epoch", "fries"}) {
      for (int r = 0; r < reps; ++r) {
        const std::uint64_t sd = seed + static_cast<std::uint64_t>(r);
        csv << s << ',' << sd << ',' << reconf::invalid_tuple_count(s, sd) << '\n';
      }
    }
    *out_csv = dup(csv.str());
  });
}

}  // extern "C"
