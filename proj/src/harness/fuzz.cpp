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
#include <random>

#include "reconf/error.hpp"
#include "reconf/harness.hpp"

namespace reconf {

using nlohmann::json;

namespace {

using Rng = std::mt19937_64;

std::uint64_t uniform(Rng& rng, std::uint64_t lo, std::uint64_t hi) {
  return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

GraphClass parse_class(const std::string& graph) {
  if (graph == "random:one_to_one") return GraphClass::kOneToOne;
  if (graph == "random:one_to_many") return GraphClass::kOneToMany;
  if (graph == "random:any") return GraphClass::kAny;
  throw InputError("unknown fuzz graph '" + graph + "'");
}

// Separate streams keep the topology fixed while the tuple count shrinks.
Rng stream(std::uint64_t seed, std::uint64_t salt) {
  std::seed_seq seq{seed, salt, std::uint64_t{0x5eed}};
  return Rng(seq);
}

}  // namespace

Workflow random_workflow(GraphClass cls, std::uint64_t seed, std::uint64_t tuples) {
  Rng rng = stream(seed, 1);
  const int n = static_cast<int>(uniform(rng, 3, 8));
  const int nsrc = n >= 5 && coin(rng, 0.4) ? 2 : 1;
  std::vector<std::vector<int>> preds(n);
  std::vector<int> outdeg(n, 0);
  for (int i = nsrc; i < n; ++i) {
    const int k = coin(rng, 0.3) && i >= 2 ? 2 : 1;
    std::vector<int> pool(i);
    for (int j = 0; j < i; ++j) pool[j] = j;
    std::shuffle(pool.begin(), pool.end(), rng);
    // Prefer predecessors without outputs so few vertices end up as sinks.
    std::stable_partition(pool.begin(), pool.end(), [&](int j) { return outdeg[j] == 0; });
    for (int c = 0; c < k; ++c) {
      preds[i].push_back(pool[c]);
      ++outdeg[pool[c]];
    }
  }
  // Pick the one-to-many vertices among those with outputs.
  std::vector<int> interior;
  for (int i = 0; i < n; ++i) {
    if (i >= nsrc && outdeg[i] > 0) interior.push_back(i);
  }
  std::vector<int> fanout_kind(n, 0);  // 0 none, 1 fanout, 2 replicate
  if (cls != GraphClass::kOneToOne) {
    for (int i : interior) {
      if (coin(rng, cls == GraphClass::kOneToMany ? 0.5 : 0.3)) {
        fanout_kind[i] = outdeg[i] >= 2 && coin(rng, 0.5) ? 2 : 1;
      }
    }
    if (cls == GraphClass::kOneToMany &&
        std::none_of(fanout_kind.begin(), fanout_kind.end(), [](int k) { return k != 0; })) {
      // Guarantee one: reuse a source when there is no interior vertex.
      const int v = interior.empty() ? 0 : interior[uniform(rng, 0, interior.size() - 1)];
      fanout_kind[v] = outdeg[v] >= 2 ? 2 : 1;
    }
  }

  Workflow wf;
  wf.name = "random-" + std::to_string(seed);
  for (int i = 0; i < n; ++i) {
    const OperatorId id = "o" + std::to_string(i);
    OperatorMeta meta;
    meta.worker_count = static_cast<int>(uniform(rng, 1, 2));
    meta.cost_ms = static_cast<double>(uniform(rng, 0, 6)) * 0.5;
    std::string fn = "pass.v1";
    if (outdeg[i] == 0) {
      fn = "sink.v1";
    } else if (fanout_kind[i] == 1) {
      meta.arity = Arity::kOneToMany;
      fn = "fanout:" + std::to_string(uniform(rng, 2, 3)) + ".v1";
    } else if (fanout_kind[i] == 2) {
      meta.arity = Arity::kOneToMany;
      meta.per_edge_one_to_one = true;
      fn = "replicate.v1";
    } else if (i >= nsrc) {
      const auto pick = uniform(rng, 0, 9);
      if (pick < 2) {
        fn = "filter.v1";
      } else if (pick < 4 && cls != GraphClass::kOneToOne) {
        // Copies of one transaction may take different routes, so only a
        // single worker can promise one output per transaction.
        fn = "dedup.v1";
        meta.uniqueness = true;
        meta.worker_count = 1;
      }
    }
    if (cls != GraphClass::kOneToOne && meta.worker_count > 1 && coin(rng, 0.15)) {
      meta.partitioning = Partitioning::kBroadcast;
      if (meta.arity == Arity::kOneToOne) meta.arity = Arity::kOneToMany;
    } else if (coin(rng, 0.3)) {
      meta.partitioning = Partitioning::kRange;
    }
    wf.graph.add_operator(id, meta);
    wf.deployment.functions.emplace(id, require_function(fn));
  }
  for (int i = 0; i < n; ++i) {
    for (int p : preds[i]) wf.graph.add_edge("o" + std::to_string(p), "o" + std::to_string(i));
  }
  wf.graph.derive_roles();
  wf.graph.validate();
  for (const OperatorId& s : wf.graph.sources()) {
    SourceFeed feed;
    feed.count = tuples;
    feed.payload = [](std::uint64_t i, double) { return Payload{{"key", i}, {"ver", 1}}; };
    wf.deployment.feeds.emplace(s, std::move(feed));
  }
  wf.deployment.resolve = builtin_function;
  return wf;
}

FuzzCase make_fuzz_case(const FuzzOptions& options, std::uint64_t seed, std::uint64_t tuples) {
  FuzzCase c;
  Rng rng = stream(seed, 2);
  if (options.graph.rfind("random:", 0) == 0) {
    c.workflow = random_workflow(parse_class(options.graph), seed, tuples);
  } else {
    CatalogOptions copts;
    copts.tuples = tuples;
    copts.inference_cost_ms = 0;
    c.workflow = catalog_workflow(options.graph, copts);
    for (const OperatorId& op : c.workflow.graph.operators()) {
      c.workflow.graph.mutable_meta(op).cost_ms = static_cast<double>(uniform(rng, 0, 6)) * 0.5;
    }
  }
  const DataflowGraph& g = c.workflow.graph;
  if (!options.ops.empty()) {
    for (const OperatorId& op : options.ops) {
      if (!g.contains(op)) throw InputError("unknown operator '" + op + "' in fuzz request");
    }
    c.ops = options.ops;
  } else {
    const auto& all = g.operators();
    const std::uint64_t k = uniform(rng, 1, std::min<std::uint64_t>(3, all.size()));
    while (c.ops.size() < k) c.ops.insert(all[uniform(rng, 0, all.size() - 1)]);
  }
  RunConfig& cfg = c.config;
  cfg.mode = Mode::kDeterministic;
  cfg.seed = seed;
  static constexpr std::size_t kCapacities[] = {1, 2, 4, 16};
  cfg.channel_capacity = kCapacities[uniform(rng, 0, 3)];
  cfg.control_latency_ms = static_cast<double>(uniform(rng, 0, 6)) * 0.5;
  cfg.notice_latency_ms = static_cast<double>(uniform(rng, 0, 4)) * 0.5;
  cfg.control_jitter_ms = static_cast<double>(uniform(rng, 0, 4)) * 0.5;
  c.inject_step = uniform(rng, 0, tuples * g.size() * 2);
  return c;
}

FuzzOutcome run_fuzz_case(const FuzzCase& c, const FuzzOptions& options, RunResult* out) {
  FuzzOutcome o;
  RunResult r;
  try {
    Engine engine(c.workflow.graph, c.workflow.deployment, c.config);
    ReconfigPlan plan = make_plan(options.scheduler, options.options, engine.parallel(), c.ops);
    engine.schedule_reconfiguration(Trigger::at_step_index(c.inject_step), std::move(plan),
                                    bump_request(c.workflow, c.ops));
    r = engine.run();
  } catch (const EngineError& e) {
    o.engine_ok = false;
    o.detail = std::string("engine error: ") + e.what();
    return o;
  }
  o.completed = !r.reconfigs.empty() && r.reconfigs.front().complete_ms.has_value();
  const Transactions txns = build_transactions(r.log);
  const SerializabilityVerdict v = check_conflict_serializable(r.log, txns);
  o.serializable = v.serializable;
  o.witness = v.witness;
  if (r.quiescent) {
    for (const DataTransaction& t : txns.data) {
      if (!t.lineage_closed()) {
        o.lineage_ok = false;
        o.detail = "transaction " + std::to_string(t.txn) + " is not lineage-closed";
        break;
      }
    }
  }
  if (options.scheduler == SchedulerKind::kMultiVersion) {
    try {
      const VersionAudit a = audit_version_consistency(r.log);
      o.version_consistent = a.consistent;
      if (!a.consistent) {
        const VersionViolation& x = a.violations.front();
        o.detail = "worker " + x.worker + " processed tag " + std::to_string(x.tag) +
                   " with version " + std::to_string(x.applied);
      }
    } catch (const InputError&) {
      // No tuple ran under an applied-version record; nothing to audit.
    }
  }
  if (!o.serializable && o.detail.empty()) {
    o.detail = "transaction " + std::to_string(o.witness->txn) + " straddles the update";
  }
  if (out) *out = std::move(r);
  return o;
}

FuzzReport fuzz(const FuzzOptions& options) {
  if (options.tuples < 1) throw InputError("fuzz needs at least one tuple");
  FuzzReport report;
  for (std::uint64_t i = 0; i < options.runs; ++i) {
    const std::uint64_t seed = options.first_seed + i;
    const FuzzCase c = make_fuzz_case(options, seed, options.tuples);
    RunResult r;
    FuzzOutcome o = run_fuzz_case(c, options, &r);
    ++report.runs;
    if (!o.completed) ++report.incomplete;
    if (options.scheduler == SchedulerKind::kMultiVersion && r.log.count(EventKind::kPhi) > 0) {
      ++report.version_audits;
    }
    if (!o.failed()) continue;
    ++report.failures;
    if (!report.first_failure) {
      FuzzFailure f{seed, options.tuples, o};
      if (options.minimize) {
        for (std::uint64_t t = 1; t < options.tuples; ++t) {
          FuzzOutcome smaller = run_fuzz_case(make_fuzz_case(options, seed, t), options);
          if (smaller.failed()) {
            f.tuples = t;
            f.outcome = std::move(smaller);
            break;
          }
        }
      }
      report.first_failure = std::move(f);
    }
    if (options.stop_on_failure) break;
  }
  return report;
}

json FuzzReport::to_json() const {
  json j = {{"runs", runs},
            {"failures", failures},
            {"incomplete", incomplete},
            {"version_audits", version_audits}};
  if (first_failure) {
    const FuzzOutcome& o = first_failure->outcome;
    json f = {{"seed", first_failure->seed},
              {"tuples", first_failure->tuples},
              {"serializable", o.serializable},
              {"version_consistent", o.version_consistent},
              {"lineage_ok", o.lineage_ok},
              {"engine_ok", o.engine_ok},
              {"detail", o.detail}};
    if (o.witness) {
      auto point = [](const ConflictPoint& p) {
        return json{{"worker", p.worker_name}, {"phi_seq", p.phi_seq}, {"mu_seq", p.mu_seq}};
      };
      f["witness"] = {{"txn_id", o.witness->txn},
                      {"phi_before_mu", point(o.witness->phi_before_mu)},
                      {"mu_before_phi", point(o.witness->mu_before_phi)}};
    }
    j["first_failure"] = std::move(f);
  }
  return j;
}

}  // namespace reconf
