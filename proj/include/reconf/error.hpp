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

#ifndef RECONF_ERROR_HPP_
#define RECONF_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace reconf {

// Malformed graphs, unknown operators, bad documents.
class InputError : public std::runtime_error {
 public:
  explicit InputError(const std::string& what) : std::runtime_error(what) {}
};

// Runtime failures inside an execution: arity violations, bad routing,
// state-transform failures.
class EngineError : public std::runtime_error {
 public:
  explicit EngineError(const std::string& what) : std::runtime_error(what) {}
};

// A reconfiguration was submitted while another one is still active.
class BusyError : public std::runtime_error {
 public:
  explicit BusyError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace reconf

#endif  // RECONF_ERROR_HPP_
