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

#ifndef RECONF_PARALLEL_HPP_
#define RECONF_PARALLEL_HPP_

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "reconf/graph.hpp"

namespace reconf {

struct WorkerInfo {
  OperatorId op;       // logical operator; for a synthetic replicate, the sender
  int index = 0;       // worker index within the operator
  bool synthetic = false;
  OperatorId broadcast_target;  // set on synthetic replicates
};

// Worker-level expansion of a dataflow. Operators with one worker keep their
// id; others become "<op>#<k>". A broadcasting worker sends through a
// synthetic replicate vertex "<op>#<k>~<target>" (or "<op>~<target>").
struct ParallelGraph {
  DataflowGraph graph;
  std::map<OperatorId, WorkerInfo> info;
  std::map<OperatorId, std::vector<OperatorId>> workers;

  OperatorSet workers_of(const OperatorSet& ops) const;
  const OperatorId& logical_of(const OperatorId& worker) const;

  // Data channels between workers. Hops from a worker into its own
  // synthetic replicate are local and not counted.
  std::size_t channel_count() const;
  std::size_t channel_count_within(const OperatorSet& worker_vertices) const;
};

std::string worker_name(const OperatorId& op, int index, int worker_count);

// Requires worker_count >= 1 everywhere.
ParallelGraph expand_parallel(const DataflowGraph& graph);

// Splits a DAG at blocking operators into pipelined sub-dataflows, in
// execution order. A blocking operator ends the segment of its inputs (as a
// sink) and starts the segments of its outputs (as a source).
std::vector<DataflowGraph> segment_by_blocking(const DataflowGraph& graph);

// Index of the segment that holds every operator in `ops` and is not yet
// finished, scanning from `current`. Throws InputError otherwise.
std::size_t route_to_segment(const std::vector<DataflowGraph>& segments,
                             std::size_t current, const OperatorSet& ops);

}  // namespace reconf

#endif  // RECONF_PARALLEL_HPP_
