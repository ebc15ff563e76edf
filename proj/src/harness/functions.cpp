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

#include <stdexcept>

#include "reconf/error.hpp"
#include "reconf/harness.hpp"

namespace reconf {

namespace {

struct ParsedId {
  std::string kind;
  int param = 0;
  int version = 1;
};

std::optional<ParsedId> parse_id(const std::string& id) {
  const auto dot = id.rfind(".v");
  if (dot == std::string::npos || dot + 2 >= id.size()) return std::nullopt;
  ParsedId p;
  try {
    std::size_t used = 0;
    p.version = std::stoi(id.substr(dot + 2), &used);
    if (used != id.size() - dot - 2 || p.version < 0) return std::nullopt;
    std::string head = id.substr(0, dot);
    const auto colon = head.find(':');
    if (colon != std::string::npos) {
      p.param = std::stoi(head.substr(colon + 1), &used);
      if (used != head.size() - colon - 1 || p.param < 1) return std::nullopt;
      head.resize(colon);
    }
    p.kind = std::move(head);
  } catch (const std::exception&) {
    return std::nullopt;
  }
  return p;
}

std::uint64_t key_of(const Tuple& t) {
  if (t.payload.is_object()) {
    auto it = t.payload.find("key");
    if (it != t.payload.end() && it->is_number_unsigned()) return it->get<std::uint64_t>();
    if (it != t.payload.end() && it->is_number_integer()) {
      return static_cast<std::uint64_t>(it->get<std::int64_t>());
    }
  }
  return t.txn_id;
}

OperatorId pick(const std::vector<OperatorId>& downstream, std::uint64_t k) {
  if (downstream.size() <= 1) return {};
  return downstream[k % downstream.size()];
}

void count(State& state) {
  if (!state.is_object()) state = State::object();
  state["n"] = state.value("n", std::uint64_t{0}) + 1;
}

}  // namespace

std::optional<OperatorFunction> builtin_function(const std::string& config_id) {
  const auto parsed = parse_id(config_id);
  if (!parsed) return std::nullopt;
  const std::string& kind = parsed->kind;
  const int param = parsed->param;
  const int version = parsed->version;
  OperatorFunction::Apply apply;
  if (kind == "pass") {
    apply = [](State& s, const Tuple& t, const std::vector<OperatorId>& ds,
               std::vector<Emission>& out) {
      count(s);
      out.push_back({t.payload, pick(ds, key_of(t))});
    };
  } else if (kind == "filter") {
    apply = [](State& s, const Tuple& t, const std::vector<OperatorId>& ds,
               std::vector<Emission>& out) {
      count(s);
      if (key_of(t) % 7 == 3) return;
      out.push_back({t.payload, pick(ds, key_of(t))});
    };
  } else if (kind == "fanout") {
    const int k = param > 0 ? param : 2;
    apply = [k](State& s, const Tuple& t, const std::vector<OperatorId>& ds,
                std::vector<Emission>& out) {
      count(s);
      const std::uint64_t base = key_of(t);
      for (int i = 0; i < k; ++i) {
        Payload p = t.payload.is_object() ? t.payload : Payload::object();
        p["key"] = base * static_cast<std::uint64_t>(k) + static_cast<std::uint64_t>(i);
        p["sub"] = i;
        out.push_back({std::move(p), pick(ds, static_cast<std::uint64_t>(i))});
      }
    };
  } else if (kind == "replicate") {
    apply = [](State& s, const Tuple& t, const std::vector<OperatorId>& ds,
               std::vector<Emission>& out) {
      count(s);
      if (ds.size() <= 1) {
        out.push_back({t.payload, {}});
        return;
      }
      for (const OperatorId& d : ds) out.push_back({t.payload, d});
    };
  } else if (kind == "dedup") {
    apply = [](State& s, const Tuple& t, const std::vector<OperatorId>& ds,
               std::vector<Emission>& out) {
      count(s);
      const std::string id = std::to_string(t.txn_id);
      State& seen = s["seen"];
      if (seen.is_object() && seen.contains(id)) return;
      seen[id] = true;
      out.push_back({t.payload, pick(ds, key_of(t))});
    };
  } else if (kind == "selfjoin") {
    const int copies = param > 0 ? param : 2;
    apply = [copies](State& s, const Tuple& t, const std::vector<OperatorId>& ds,
                     std::vector<Emission>& out) {
      count(s);
      const std::string id = std::to_string(t.txn_id);
      State& pending = s["pending"];
      const int got = (pending.is_object() ? pending.value(id, 0) : 0) + 1;
      if (got < copies) {
        pending[id] = got;
        return;
      }
      if (pending.is_object()) pending.erase(id);
      out.push_back({t.payload, pick(ds, key_of(t))});
    };
  } else if (kind == "fd") {
    apply = [version](State& s, const Tuple& t, const std::vector<OperatorId>& ds,
                      std::vector<Emission>& out) {
      count(s);
      Payload p = t.payload.is_object() ? t.payload : Payload::object();
      const int ver = p.value("ver", version);
      p["valid"] = ver == version;
      out.push_back({std::move(p), pick(ds, key_of(t))});
    };
  } else if (kind == "sink") {
    apply = [](State& s, const Tuple&, const std::vector<OperatorId>&, std::vector<Emission>&) {
      count(s);
    };
  } else {
    return std::nullopt;
  }
  return OperatorFunction(config_id, std::move(apply));
}

OperatorFunction require_function(const std::string& config_id) {
  auto fn = builtin_function(config_id);
  if (!fn) throw InputError("unknown function '" + config_id + "'");
  return *fn;
}

StateTransform builtin_transform(const std::string& name) {
  if (name.empty() || name == "identity") return {};
  if (name == "reset") return [](const State&) { return State(); };
  if (name == "count_reset") {
    return [](const State& s) {
      State out = s.is_object() ? s : State::object();
      out["n"] = 0;
      return out;
    };
  }
  if (name == "fail") {
    return [](const State&) -> State { throw std::runtime_error("transform refused the state"); };
  }
  throw InputError("unknown state transform '" + name + "'");
}

FunctionUpdate builtin_update(const std::string& config_id, const std::string& transform) {
  FunctionUpdate u;
  u.new_function = require_function(config_id);
  u.state_transform = builtin_transform(transform);
  return u;
}

std::string next_version(const std::string& config_id) {
  const auto parsed = parse_id(config_id);
  if (!parsed) throw InputError("config id '" + config_id + "' has no version");
  return config_id.substr(0, config_id.rfind(".v")) + ".v" + std::to_string(parsed->version + 1);
}

}  // namespace reconf
