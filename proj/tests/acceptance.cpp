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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero when any criterion not listed in --tolerate fails.
//
//   reconf_acceptance [--only 1,4] [--tolerate 2]

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "reconf/engine.hpp"
#include "reconf/harness.hpp"
#include "reconf/mcs.hpp"
#include "reconf/schedulers.hpp"
#include "reconf/txn_check.hpp"

namespace reconf {
namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::string join(const OperatorSet& s) {
  std::string out = "{";
  for (const OperatorId& v : s) out += (out.size() > 1 ? "," : "") + v;
  return out + "}";
}

// Exhaustive MCS comparison on small DAGs plus random larger ones.
Outcome McsOracle() {
  const auto start = std::chrono::steady_clock::now();
  std::uint64_t cases = 0;
  for (int n = 1; n <= 6; ++n) {
    const int pairs = n * (n - 1) / 2;
    for (std::uint64_t mask = 0; mask < (1ULL << pairs); ++mask) {
      const DataflowGraph g = testing::dag_from_mask(n, mask);
      for (std::uint64_t bits = 1; bits < (1ULL << n); ++bits) {
        const std::string diff = testing::compare_mcs(g, testing::subset_of(g, bits));
        if (!diff.empty()) {
          return {false, diff + " at n=" + std::to_string(n) + " mask=" + std::to_string(mask) +
                             " bits=" + std::to_string(bits)};
        }
        ++cases;
      }
    }
  }
  std::mt19937_64 rng(20260101);
  for (int i = 0; i < 1000; ++i) {
    const int n = std::uniform_int_distribution<int>(1, 10)(rng);
    const DataflowGraph g = testing::random_dag(rng, n, 0.3);
    const std::uint64_t bits =
        std::uniform_int_distribution<std::uint64_t>(1, (1ULL << n) - 1)(rng);
    const std::string diff = testing::compare_mcs(g, testing::subset_of(g, bits));
    if (!diff.empty()) return {false, diff + " on random DAG " + std::to_string(i)};
    ++cases;
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << cases << " cases, " << secs << " s";
  return {secs < 120, d.str()};
}

struct PlanRow {
  const char* workflow;
  OperatorSet ops;
  bool pruning;
  std::vector<OperatorSet> components;
  std::vector<OperatorSet> heads;  // empty when unchecked
  // Empty when the table gives no path length.
  std::vector<std::size_t> paths;
};

// Component sets, heads and longest paths for the reference join-tree,
// one-to-many and pruning rows.
Outcome PlanFidelity() {
  const std::vector<PlanRow> rows = {
      {"w2", {"J1"}, false, {{"J1"}}, {{"J1"}}, {0}},
      {"w2", {"J2"}, false, {{"J2"}}, {{"J2"}}, {0}},
      {"w2", {"J1", "J3"}, false, {{"J1", "J2", "J3"}}, {{"J1"}}, {2}},
      {"w2", {"J1", "J4"}, false, {{"J1", "J2", "J3", "J4"}}, {{"J1"}}, {3}},
      {"w2", {"J3", "J4"}, false, {{"J3", "J4"}}, {{"J3"}}, {1}},
      {"w3", {"J5"}, false, {{"J5"}}, {{"J5"}}, {0}},
      {"w3", {"J5", "J6"}, false, {{"J5"}, {"J6"}}, {{"J5"}, {"J6"}}, {0, 0}},
      // Three heads would leave too few vertices for these path lengths, so
      // only sets and paths are compared on the next two rows.
      {"w3", {"J5", "J6", "J7", "J8"}, false, {{"J5", "J6", "J7", "U1", "J8"}}, {}, {3}},
      {"w3", {"J5", "J6", "J7", "J9"}, false, {{"J5", "J6", "J7", "U1", "J8", "J9"}}, {}, {4}},
      {"w3", {"J7", "J8", "J9"}, false, {{"J7", "U1", "J8", "J9"}}, {{"J7"}}, {3}},
      {"w4", {"F1", "U2"}, false, {{"F1", "U2"}}, {{"F1"}}, {1}},
      {"w4", {"FD1"}, false, {{"U2", "FD1"}}, {{"U2"}}, {1}},
      {"w4", {"F2"}, false, {{"U2", "FD1", "FD2", "F2"}}, {{"U2"}}, {5}},
      {"w5", {"FD4"}, true, {{"FD4"}}, {{"FD4"}}, {}},
      {"w5", {"FD4"}, false, {{"RE", "F4", "FD4"}}, {{"RE"}}, {}},
      {"w5", {"F3"}, true, {{"F3"}}, {{"F3"}}, {}},
      {"w5", {"F3"}, false, {{"RE", "FD3", "S1", "F3"}}, {{"RE"}}, {}},
      {"w5", {"F4"}, true, {{"F4"}}, {{"F4"}}, {}},
      {"w5", {"F4"}, false, {{"RE", "F4"}}, {{"RE"}}, {}},
      {"w5", {"FD3", "FD4"}, true, {{"RE", "FD3", "F4", "FD4"}}, {{"RE"}}, {}},
      {"w5", {"FD3", "FD4"}, false, {{"RE", "FD3", "F4", "FD4"}}, {{"RE"}}, {}},
      {"w5", {"E1"}, true, {{"E1"}}, {{"E1"}}, {}},
      {"w5", {"E1"}, false, {{"RE", "FD3", "S1", "F3", "F4", "FD4", "SJ", "E1"}}, {{"RE"}}, {}},
  };
  Outcome o;
  int matched = 0;
  for (const PlanRow& r : rows) {
    FriesOptions opts;
    opts.pruning = r.pruning;
    const FriesAnalysis a = analyze_fries(catalog_workflow(r.workflow).graph, r.ops, opts);
    std::vector<OperatorSet> got;
    std::vector<OperatorSet> heads;
    std::vector<std::size_t> paths;
    for (const Component& c : a.mcs.components) {
      got.push_back(c.vertices);
      heads.push_back(c.heads);
      paths.push_back(c.longest_path_len);
    }
    std::string why;
    if (got != r.components) {
      why = "components";
    } else if (!r.heads.empty() && heads != r.heads) {
      why = "heads";
    } else if (!r.paths.empty() && paths != r.paths) {
      why = "longest path " + std::to_string(paths.front()) + " != " +
            std::to_string(r.paths.front());
    }
    if (why.empty()) {
      ++matched;
      continue;
    }
    o.pass = false;
    o.detail += std::string(o.detail.empty() ? "" : "; ") + r.workflow + " " + join(r.ops) +
                (r.pruning ? " pruned" : "") + ": " + why;
  }
  o.detail = std::to_string(matched) + "/" + std::to_string(rows.size()) + " rows match" +
             (o.detail.empty() ? "" : "; " + o.detail);
  return o;
}

// Safe schedulers never produce a non-serializable log.
Outcome SafetyFuzz() {
  struct Config {
    const char* label;
    SchedulerKind kind;
    const char* graph;
    bool extended;
    bool pruning;
  };
  const Config configs[] = {
      {"epoch/any", SchedulerKind::kEpoch, "random:any", true, false},
      {"fries-basic/one_to_one", SchedulerKind::kFries, "random:one_to_one", false, false},
      {"fries-ext/one_to_many", SchedulerKind::kFries, "random:one_to_many", true, false},
      {"fries-ext-pruned/one_to_many", SchedulerKind::kFries, "random:one_to_many", true, true},
      {"multiversion/any", SchedulerKind::kMultiVersion, "random:any", true, false},
  };
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  std::uint64_t total = 0;
  for (const Config& c : configs) {
    FuzzOptions f;
    f.scheduler = c.kind;
    f.graph = c.graph;
    f.options.extended = c.extended;
    f.options.pruning = c.pruning;
    f.runs = 1000;
    const FuzzReport r = fuzz(f);
    total += r.runs;
    if (r.failures > 0) {
      o.pass = false;
      o.detail += std::string(c.label) + " failed: " + r.to_json().dump() + "; ";
    }
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  std::ostringstream d;
  d << o.detail << total << " runs, " << secs << " s";
  o.pass = o.pass && secs < 600;
  o.detail = d.str();
  return o;
}

// Naive per-operator control messages break serializability.
Outcome NaiveWitness() {
  FuzzOptions f;
  f.scheduler = SchedulerKind::kNaive;
  f.graph = "fig2";
  f.ops = {"FM", "MC"};
  f.runs = 200;
  const FuzzReport r = fuzz(f);
  if (!r.first_failure || !r.first_failure->outcome.witness) {
    return {false, "no violation in 200 seeds"};
  }
  const Witness& w = *r.first_failure->outcome.witness;
  const bool shape = w.phi_before_mu.worker_name == "FM" && w.mu_before_phi.worker_name == "MC";
  return {shape, "seed " + std::to_string(r.first_failure->seed) + ", minimized to " +
                     std::to_string(r.first_failure->tuples) + " tuple(s), phi before mu on " +
                     w.phi_before_mu.worker_name + ", mu before phi on " +
                     w.mu_before_phi.worker_name};
}

Outcome CheckerOracle() {
  std::mt19937_64 rng(777);
  int violations = 0;
  for (int i = 0; i < 500; ++i) {
    const ScheduleLog log = testing::random_log(rng, 6, 4);
    const bool want = testing::serial_order_serializable(log);
    if (check_conflict_serializable(log).serializable != want) {
      return {false, "mismatch on log " + std::to_string(i)};
    }
    violations += want ? 0 : 1;
  }
  return {true, "500 logs agree, " + std::to_string(violations) + " non-serializable"};
}

bool Monotone(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] < v[i - 1]) return false;
  }
  return true;
}

// Epoch delay grows with load while Fries stays small.
Outcome DelayTrends() {
  Outcome o;
  std::ostringstream d;
  for (const char* sweep : {"rate", "cost"}) {
    std::vector<double> epoch;
    std::vector<double> fries;
    for (const BenchRow& r : bench(sweep, 3, 1)) {
      (r.scheduler == "epoch" ? epoch : fries).push_back(r.delay.mean);
    }
    const bool mono = Monotone(epoch);
    const bool small = !fries.empty() && fries.back() < 0.1 * epoch.back();
    o.pass = o.pass && mono && small;
    d << (d.tellp() > 0 ? "; " : "") << sweep << ": epoch " << (mono ? "monotone" : "NOT monotone") << " "
      << epoch.front() << "->" << epoch.back() << " ms, fries at max " << fries.back()
      << " ms";
  }
  o.detail = d.str();
  return o;
}

Outcome ComponentSpeedup() {
  double epoch_one = 0, epoch_two = 0, fries_one = 0, fries_two = 0;
  for (const BenchRow& r : bench("components", 3, 1)) {
    const bool two = r.x == "J5+J6";
    double& slot = r.scheduler == "epoch" ? (two ? epoch_two : epoch_one)
                                          : (two ? fries_two : fries_one);
    slot = r.delay.mean;
  }
  std::ostringstream d;
  d << "fries " << fries_one << " vs " << fries_two << " ms, epoch " << epoch_one << " vs "
    << epoch_two << " ms";
  return {fries_two <= 2 * fries_one && epoch_two > epoch_one, d.str()};
}

Outcome MultiVersionAudit() {
  FuzzOptions f;
  f.scheduler = SchedulerKind::kMultiVersion;
  f.graph = "random:any";
  f.runs = 500;
  f.first_seed = 5001;
  const FuzzReport r = fuzz(f);
  Outcome o;
  o.pass = r.failures == 0 && r.version_audits > 0;

  CatalogOptions opts;
  opts.workers = 2;
  opts.tuples = 80;
  const Workflow wf = catalog_workflow("fig9", opts);
  Engine engine(wf.graph, wf.deployment, RunConfig{});
  engine.schedule_reconfiguration(Trigger::at_step_index(30),
                                  schedule_multi_version(engine.parallel(), {"C", "F", "G"}),
                                  bump_request(wf, {"C", "F", "G"}));
  const RunResult run = engine.run();
  std::size_t doubled = 0;
  for (const auto& [w, a] : run.workers) doubled += a.state_count > 1 ? 1 : 0;
  const bool retired = !run.reconfigs.empty() && run.reconfigs[0].retired_ms.has_value();
  o.pass = o.pass && retired && doubled == 0;
  o.detail = std::to_string(r.runs) + " runs, " + std::to_string(r.version_audits) +
             " audited, " + std::to_string(r.failures) + " failures; retirement " +
             (retired ? "seen" : "missing") + ", " + std::to_string(doubled) +
             " workers holding two states";
  return o;
}

int Version(const std::string& config_id) {
  return std::stoi(config_id.substr(config_id.rfind(".v") + 2));
}

// Versions held by the reconfigured workers in a snapshot.
std::set<int> SnapshotVersions(const CheckpointArtifact& a, const ParallelGraph& pg,
                               const OperatorSet& ops) {
  std::set<int> v;
  for (const OperatorId& w : pg.workers_of(ops)) v.insert(Version(a.workers.at(w).config_id));
  return v;
}

// Checkpoints racing a reconfiguration on a two-component graph.
Outcome CheckpointRaces() {
  const OperatorSet ops{"C", "F", "G"};
  int plain_mixed = 0, safe_mixed = 0, safe_taken = 0, restores = 0, restore_bad = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    std::mt19937_64 rng(seed);
    CatalogOptions opts;
    opts.workers = 2;
    opts.tuples = 60;
    opts.base_cost_ms = 1;
    const Workflow wf = catalog_workflow("fig9", opts);
    RunConfig config;
    config.seed = seed;
    config.control_latency_ms = std::uniform_real_distribution<double>(0, 4)(rng);
    config.control_jitter_ms = 3;
    config.channel_capacity = 8;
    const double reconfig_at = std::uniform_real_distribution<double>(2, 30)(rng);
    const double checkpoint_at = reconfig_at + std::uniform_real_distribution<double>(-6, 6)(rng);
    for (CheckpointPolicy policy : {CheckpointPolicy::kPlain, CheckpointPolicy::kReconfigSafe}) {
      Engine e(wf.graph, wf.deployment, config);
      e.schedule_reconfiguration(Trigger::at_time(reconfig_at),
                                 schedule_fries(e.parallel(), ops, {}), bump_request(wf, ops));
      e.schedule_checkpoint(Trigger::at_time(std::max(0.0, checkpoint_at)), policy);
      const RunResult r = e.run();
      for (const CheckpointArtifact& a : r.artifacts) {
        const bool mixed = SnapshotVersions(a, e.parallel(), ops).size() > 1;
        if (policy == CheckpointPolicy::kPlain) {
          plain_mixed += mixed ? 1 : 0;
          continue;
        }
        ++safe_taken;
        safe_mixed += mixed ? 1 : 0;
        const CheckpointArtifact copy = CheckpointArtifact::from_json(a.to_json());
        Engine restored = Engine::restore(wf.graph, wf.deployment, copy, RunConfig{});
        const RunResult rr = restored.run();
        std::set<int> after;
        for (const OperatorId& w : restored.parallel().workers_of(ops)) {
          after.insert(Version(rr.workers.at(w).config_id));
        }
        ++restores;
        restore_bad += (after.size() == 1 && rr.quiescent) ? 0 : 1;
      }
    }
  }
  std::ostringstream d;
  d << "plain mixed " << plain_mixed << ", safe mixed " << safe_mixed << " of " << safe_taken
    << ", restores " << restores << " with " << restore_bad << " mixed";
  return {plain_mixed >= 1 && safe_mixed == 0 && restore_bad == 0 && restores > 0, d.str()};
}

Outcome InvalidOrdering() {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto none = invalid_tuple_count("none", seed);
    const auto epoch = invalid_tuple_count("epoch", seed);
    const auto fries = invalid_tuple_count("fries", seed);
    if (!(none > epoch && epoch > fries)) {
      return {false, "seed " + std::to_string(seed) + ": none " + std::to_string(none) +
                         ", epoch " + std::to_string(epoch) + ", fries " +
                         std::to_string(fries)};
    }
  }
  return {true, "20 seeds ordered none > epoch > fries (seed 1: " +
                    std::to_string(invalid_tuple_count("none", 1)) + " > " +
                    std::to_string(invalid_tuple_count("epoch", 1)) + " > " +
                    std::to_string(invalid_tuple_count("fries", 1)) + ")"};
}

std::set<int> ParseList(const std::string& text) {
  std::set<int> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace
}  // namespace reconf

int main(int argc, char** argv) {
  using namespace reconf;
  std::set<int> only;
  std::set<int> tolerate;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if ((arg == "--only" || arg == "--tolerate") && i + 1 < argc) {
      (arg == "--only" ? only : tolerate) = ParseList(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N,..] [--tolerate N,..]\n", argv[0]);
      return 1;
    }
  }
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"MCS matches brute force", McsOracle},
      {"plans match reference components", PlanFidelity},
      {"safe schedulers pass fuzzing", SafetyFuzz},
      {"naive scheduler yields a witness", NaiveWitness},
      {"checker matches serial-order oracle", CheckerOracle},
      {"delay trends", DelayTrends},
      {"parallel components", ComponentSpeedup},
      {"multi-version audit and retirement", MultiVersionAudit},
      {"checkpoint and reconfiguration races", CheckpointRaces},
      {"invalid tuple ordering", InvalidOrdering},
  };
  int hard_failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int n = static_cast<int>(i + 1);
    if (!only.empty() && !only.count(n)) continue;
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("%s %2d %s: %s\n", o.pass ? "PASS" : "FAIL", n, criteria[i].first,
                o.detail.c_str());
    std::fflush(stdout);
    if (!o.pass && !tolerate.count(n)) ++hard_failures;
  }
  return hard_failures == 0 ? 0 : 1;
}
