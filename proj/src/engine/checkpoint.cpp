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

#include "reconf/engine.hpp"
#include "reconf/error.hpp"

namespace reconf {

using nlohmann::json;

json CheckpointArtifact::to_json() const {
  json workers_json = json::object();
  for (const auto& [name, s] : workers) {
    workers_json[name] = {{"config_id", s.config_id},
                          {"state", s.state},
                          {"source_offset", s.source_offset},
                          {"source_version", s.source_version}};
  }
  return {{"format", "reconf-checkpoint/1"},
          {"id", id},
          {"taken_ms", taken_ms},
          {"workers", std::move(workers_json)}};
}

CheckpointArtifact CheckpointArtifact::from_json(const json& j) {
  CheckpointArtifact a;
  try {
    if (j.at("format").get<std::string>() != "reconf-checkpoint/1") {
      throw InputError("corrupt checkpoint: unsupported format");
    }
    a.id = j.at("id").get<std::uint64_t>();
    a.taken_ms = j.at("taken_ms").get<double>();
    const json& ws = j.at("workers");
    if (!ws.is_object() || ws.empty()) throw InputError("corrupt checkpoint: no workers");
    for (const auto& [name, s] : ws.items()) {
      WorkerSnapshot snap;
      snap.config_id = s.at("config_id").get<std::string>();
      snap.state = s.at("state");
      snap.source_offset = s.at("source_offset").get<std::uint64_t>();
      snap.source_version = s.at("source_version").get<std::uint32_t>();
      a.workers.emplace(name, std::move(snap));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("corrupt checkpoint: ") + e.what());
  }
  return a;
}

}  // namespace reconf
