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
#include <limits>

#include "reconf/engine.hpp"
#include "reconf/error.hpp"

namespace reconf {

std::string to_string(SchedulerKind kind) {
  switch (kind) {
    case SchedulerKind::kEpoch:
      return "epoch";
    case SchedulerKind::kNaive:
      return "naive";
    case SchedulerKind::kMultiVersion:
      return "multiversion";
    case SchedulerKind::kFries:
      return "fries";
  }
  return "unknown";
}

SchedulerKind parse_scheduler(const std::string& text) {
  if (text == "epoch") return SchedulerKind::kEpoch;
  if (text == "naive") return SchedulerKind::kNaive;
  if (text == "multiversion" || text == "multi_version") return SchedulerKind::kMultiVersion;
  if (text == "fries") return SchedulerKind::kFries;
  throw InputError("unknown scheduler '" + text + "'");
}

std::string to_string(Mode mode) {
  return mode == Mode::kDeterministic ? "deterministic" : "concurrent";
}

Mode parse_mode(const std::string& text) {
  if (text == "deterministic") return Mode::kDeterministic;
  if (text == "concurrent") return Mode::kConcurrent;
  throw InputError("unknown mode '" + text + "'");
}

OperatorSet ReconfigurationRequest::operators() const {
  OperatorSet out;
  for (const auto& [op, u] : updates) out.insert(op);
  return out;
}

std::optional<double> feed_time(const SourceFeed& feed, std::uint64_t index) {
  if (index >= feed.count) return std::nullopt;
  if (feed.rates.empty()) return 0.0;
  double remaining = static_cast<double>(index);
  for (std::size_t i = 0; i < feed.rates.size(); ++i) {
    const auto [from, rate] = feed.rates[i];
    if (rate <= 0) continue;
    const double gap = 1000.0 / rate;
    if (i + 1 == feed.rates.size()) return from + remaining * gap;
    const double span = feed.rates[i + 1].first - from;
    const double fits = std::ceil(span / gap - 1e-9);
    if (remaining < fits) return from + remaining * gap;
    remaining -= fits;
  }
  return std::nullopt;
}

}  // namespace reconf
