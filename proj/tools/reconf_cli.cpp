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

// reconf: command-line front end over the C API.
//
// Exit codes: 0 ok, 1 usage or invalid input, 2 checker violation,
// 3 engine error.

#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "reconf/reconf.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitViolation = 2;
constexpr int kExitEngine = 3;

// Owns a string returned by the library.
struct Owned {
  char* p = nullptr;
  ~Owned() { reconf_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

int fail(reconf_status st) {
  std::cerr << "reconf: " << reconf_last_error() << '\n';
  return st == RECONF_ERR_ENGINE ? kExitEngine : kExitUsage;
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) return std::nullopt;
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::filesystem::path out_dir() {
  const char* env = std::getenv("RECONF_OUT_DIR");
  return env && *env ? std::filesystem::path(env) : std::filesystem::current_path();
}

bool write_out(const std::string& name, const std::string& text) {
  std::error_code ec;
  const auto dir = out_dir();
  std::filesystem::create_directories(dir, ec);
  std::ofstream out(dir / name);
  if (!out) {
    std::cerr << "reconf: cannot write " << (dir / name).string() << '\n';
    return false;
  }
  out << text;
  return true;
}

struct GraphHandle {
  reconf_graph* g = nullptr;
  ~GraphHandle() { reconf_graph_free(g); }
};

int cmd_plan(const std::string& graph, const std::string& request_path,
             const std::vector<std::string>& ops, const std::string& scheduler, bool pruning,
             bool basic, int workers) {
  GraphHandle h;
  reconf_status st = std::filesystem::exists(graph)
                         ? reconf_graph_load_file(graph.c_str(), &h.g)
                         : reconf_graph_from_catalog(graph.c_str(), workers, &h.g);
  if (st != RECONF_OK) return fail(st);
  std::string request;
  if (!request_path.empty()) {
    auto text = read_file(request_path);
    if (!text) {
      std::cerr << "reconf: cannot read " << request_path << '\n';
      return kExitUsage;
    }
    request = *text;
  } else {
    if (ops.empty()) {
      std::cerr << "reconf: plan needs --request or --ops\n";
      return kExitUsage;
    }
    json updates = json::array();
    for (const auto& op : ops) updates.push_back({{"operator", op}, {"new_function", "next"}});
    request = json{{"scheduler", scheduler},
                   {"options", {{"extended", !basic}, {"pruning", pruning}}},
                   {"updates", updates}}
                  .dump();
  }
  Owned out;
  st = reconf_plan_json(h.g, request.c_str(), &out.p);
  if (st != RECONF_OK) return fail(st);
  std::cout << out.str() << '\n';
  return kExitOk;
}

int cmd_check(const std::string& path) {
  reconf_log* log = nullptr;
  reconf_status st = reconf_log_load_file(path.c_str(), &log);
  if (st != RECONF_OK) return fail(st);
  int ok = 0;
  Owned out;
  st = reconf_check_json(log, &ok, &out.p);
  reconf_log_free(log);
  if (st != RECONF_OK) return fail(st);
  std::cout << out.str() << '\n';
  return ok ? kExitOk : kExitViolation;
}

int cmd_run(const std::string& spec_path, std::optional<std::uint64_t> seed,
            const std::string& mode, std::optional<int> reps) {
  auto spec = read_file(spec_path);
  if (!spec) {
    std::cerr << "reconf: cannot read " << spec_path << '\n';
    return kExitUsage;
  }
  json overrides = json::object();
  if (seed) overrides["seed"] = *seed;
  if (!mode.empty()) overrides["mode"] = mode;
  if (reps) overrides["repetitions"] = *reps;
  const std::string ov = overrides.dump();
  Owned report;
  Owned csv;
  reconf_status st = reconf_run_experiment(spec->c_str(), ov.c_str(), &report.p, &csv.p);
  if (st != RECONF_OK) return fail(st);
  std::string name = "experiment";
  try {
    name = json::parse(report.str()).value("name", name);
  } catch (const json::exception&) {
  }
  if (!write_out(name + ".json", report.str() + "\n") || !write_out(name + ".csv", csv.str())) {
    return kExitUsage;
  }
  std::cout << report.str() << '\n';
  return kExitOk;
}

int cmd_fuzz(const std::string& scheduler, const std::string& graph,
             const std::vector<std::string>& ops, std::uint64_t seed, std::uint64_t runs,
             std::uint64_t tuples, bool pruning, bool basic, bool no_minimize, bool keep_going,
             bool expect_safe) {
  json options = {{"scheduler", scheduler},
                  {"options",
                   {{"extended", !basic}, {"pruning", pruning}, {"allow_unsafe_basic", basic}}},
                  {"graph", graph},
                  {"ops", ops},
                  {"first_seed", seed},
                  {"runs", runs},
                  {"tuples", tuples},
                  {"minimize", !no_minimize},
                  {"stop_on_failure", !keep_going}};
  std::uint64_t failures = 0;
  Owned out;
  reconf_status st = reconf_fuzz(options.dump().c_str(), &failures, &out.p);
  if (st != RECONF_OK) return fail(st);
  std::cout << out.str() << '\n';
  if (failures > 0) {
    const json r = json::parse(out.str());
    const json& f = r["first_failure"];
    std::cerr << "reconf: failing seed " << f["seed"] << " (minimized to " << f["tuples"]
              << " tuples): " << f["detail"].get<std::string>() << '\n';
  }
  return expect_safe && failures > 0 ? kExitViolation : kExitOk;
}

int cmd_bench(const std::string& sweep, int reps, std::uint64_t seed, const std::string& mode) {
  if (!mode.empty() && mode != "deterministic") {
    std::cerr << "reconf: bench measures virtual time and only runs in deterministic mode\n";
    return kExitUsage;
  }
  Owned csv;
  reconf_status st = reconf_bench(sweep.c_str(), reps, seed, &csv.p);
  if (st != RECONF_OK) return fail(st);
  if (!write_out("bench-" + sweep + ".csv", csv.str())) return kExitUsage;
  std::cout << csv.str();
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Runtime reconfiguration of pipelined dataflows"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(reconf_version()));

  auto* run = app.add_subcommand("run", "Execute an experiment spec");
  std::string spec_path;
  std::optional<std::uint64_t> run_seed;
  std::optional<int> run_reps;
  std::string run_mode;
  run->add_option("spec", spec_path, "Experiment spec (JSON)")->required();
  run->add_option("--seed", run_seed, "First seed");
  run->add_option("--mode", run_mode, "deterministic or concurrent")
      ->check(CLI::IsMember({"deterministic", "concurrent"}));
  run->add_option("--reps", run_reps, "Repetitions")->check(CLI::PositiveNumber);

  auto* check = app.add_subcommand("check", "Check a schedule log for serializability");
  std::string log_path;
  check->add_option("log", log_path, "Schedule log (JSONL)")->required();

  auto* plan = app.add_subcommand("plan", "Print the plan for a graph and request");
  std::string graph;
  std::string request_path;
  std::vector<std::string> plan_ops;
  std::string plan_scheduler = "fries";
  bool plan_pruning = false;
  bool plan_basic = false;
  int plan_workers = 1;
  plan->add_option("graph", graph, "Graph file or catalog name")->required();
  plan->add_option("--request", request_path, "Request document (JSON)");
  plan->add_option("--ops", plan_ops, "Operators to reconfigure")->delimiter(',');
  plan->add_option("--scheduler", plan_scheduler, "epoch, naive, multiversion or fries");
  plan->add_flag("--pruning", plan_pruning, "Enable ancestor pruning");
  plan->add_flag("--basic", plan_basic, "Skip the one-to-many extension");
  plan->add_option("--workers", plan_workers, "Workers per parallel operator (catalog)")
      ->check(CLI::PositiveNumber);

  auto* fz = app.add_subcommand("fuzz", "Randomized safety campaign");
  std::string fz_scheduler = "fries";
  std::string fz_graph = "random:any";
  std::vector<std::string> fz_ops;
  std::uint64_t fz_seed = 1;
  std::uint64_t fz_runs = 100;
  std::uint64_t fz_tuples = 24;
  bool fz_pruning = false;
  bool fz_basic = false;
  bool fz_no_min = false;
  bool fz_keep = false;
  bool fz_expect = false;
  fz->add_option("--scheduler", fz_scheduler, "epoch, naive, multiversion or fries");
  fz->add_option("--graph", fz_graph, "Catalog name or random:one_to_one|one_to_many|any");
  fz->add_option("--ops", fz_ops, "Fixed request operators")->delimiter(',');
  fz->add_option("--seed", fz_seed, "First seed");
  fz->add_option("--runs", fz_runs, "Number of runs");
  fz->add_option("--tuples", fz_tuples, "Tuples per source")->check(CLI::PositiveNumber);
  fz->add_flag("--pruning", fz_pruning, "Enable ancestor pruning");
  fz->add_flag("--basic", fz_basic, "Skip the one-to-many extension");
  fz->add_flag("--no-minimize", fz_no_min, "Report failures without shrinking");
  fz->add_flag("--keep-going", fz_keep, "Continue after the first failure");
  fz->add_flag("--expect-safe", fz_expect, "Exit 2 when any run fails the checker");

  auto* bn = app.add_subcommand("bench", "Delay sweeps as CSV");
  std::string bn_sweep = "rate";
  int bn_reps = 3;
  std::uint64_t bn_seed = 1;
  std::string bn_mode;
  bn->add_option("--sweep", bn_sweep, "rate, cost, workers, components or invalid")
      ->check(CLI::IsMember({"rate", "cost", "workers", "components", "invalid"}));
  bn->add_option("--reps", bn_reps, "Repetitions")->check(CLI::PositiveNumber);
  bn->add_option("--seed", bn_seed, "First seed");
  bn->add_option("--mode", bn_mode, "deterministic");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  if (*run) return cmd_run(spec_path, run_seed, run_mode, run_reps);
  if (*check) return cmd_check(log_path);
  if (*plan) {
    return cmd_plan(graph, request_path, plan_ops, plan_scheduler, plan_pruning, plan_basic,
                    plan_workers);
  }
  if (*fz) {
    return cmd_fuzz(fz_scheduler, fz_graph, fz_ops, fz_seed, fz_runs, fz_tuples, fz_pruning,
                    fz_basic, fz_no_min, fz_keep, fz_expect);
  }
  return cmd_bench(bn_sweep, bn_reps, bn_seed, bn_mode);
}
