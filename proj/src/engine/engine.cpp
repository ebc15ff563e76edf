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

#include "engine/core.hpp"
#include "reconf/error.hpp"

namespace reconf {

struct Engine::Impl {
  std::unique_ptr<detail::Model> model;
  bool ran = false;
};

Engine::Engine(const DataflowGraph& logical, Deployment deployment, RunConfig config)
    : impl_(std::make_unique<Impl>()) {
  impl_->model =
      std::make_unique<detail::Model>(logical, std::move(deployment), std::move(config), nullptr);
}

Engine::~Engine() = default;
Engine::Engine(Engine&&) noexcept = default;
Engine& Engine::operator=(Engine&&) noexcept = default;

Engine Engine::restore(const DataflowGraph& logical, Deployment deployment,
                       const CheckpointArtifact& artifact, RunConfig config) {
  Engine e(logical, deployment, config);
  e.impl_->model = std::make_unique<detail::Model>(logical, std::move(deployment),
                                                   std::move(config), &artifact);
  return e;
}

const ParallelGraph& Engine::parallel() const { return impl_->model->parallel; }
const DataflowGraph& Engine::logical() const { return impl_->model->logical; }
const RunConfig& Engine::config() const { return impl_->model->config; }

std::uint64_t Engine::schedule_reconfiguration(Trigger when, ReconfigPlan plan,
                                               ReconfigurationRequest request) {
  detail::Model& m = *impl_->model;
  m.expand_updates(request);  // validates operator names early
  for (const OperatorId& w : plan.reconfig_workers) {
    if (!m.index.count(w)) throw InputError("plan names unknown worker '" + w + "'");
  }
  detail::ScheduledAction a;
  a.kind = detail::ActionKind::kReconfig;
  a.when = when;
  a.id = ++m.next_request;
  a.plan = std::move(plan);
  a.request = std::move(request);
  m.actions.push_back(std::move(a));
  return m.next_request;
}

std::uint64_t Engine::schedule_checkpoint(Trigger when, CheckpointPolicy policy) {
  detail::Model& m = *impl_->model;
  detail::ScheduledAction a;
  a.kind = detail::ActionKind::kCheckpoint;
  a.when = when;
  a.id = ++m.next_checkpoint;
  a.policy = policy;
  m.actions.push_back(std::move(a));
  return m.next_checkpoint;
}

std::uint64_t Engine::schedule_epoch(Trigger when) {
  detail::Model& m = *impl_->model;
  detail::ScheduledAction a;
  a.kind = detail::ActionKind::kEpoch;
  a.when = when;
  m.actions.push_back(std::move(a));
  return m.actions.size();
}

RunResult Engine::run() {
  if (impl_->ran) throw EngineError("engine already ran");
  impl_->ran = true;
  detail::Model& m = *impl_->model;
  if (m.config.mode == Mode::kDeterministic) {
    detail::run_simulation(m);
  } else {
    detail::run_threads(m);
  }
  return std::move(m.result);
}

}  // namespace reconf
