// Copyright 2026 The SBM Cavity Authors.
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

#ifndef SBM_CAVITY_ERROR_H_
#define SBM_CAVITY_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace sbm_cavity {

// Failure categories. Each maps onto one CLI exit code.
enum class ErrorKind {
  kUsage,          // bad flags or inconsistent options
  kParse,          // malformed input file
  kParameter,      // model parameters outside their domain
  kRange,          // ids or labels outside the graph / group range
  kSize,           // exact enumeration guard exceeded
  kEstimation,     // not enough information to estimate parameters
  kContradiction,  // BP normalizer vanished
  kInfeasible,     // every assignment has zero weight
  kGroupDeath,     // EM drove a group prior to zero
  kInternal,
};

std::string_view ErrorKindName(ErrorKind kind);

// Exit code convention of the command line tool:
// 1 usage, 2 data/parse, 3 infeasible/contradiction, 4 internal.
int ExitCodeFor(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_ERROR_H_
