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

#include "sbm_cavity/error.h"

namespace sbm_cavity {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
      return "usage";
    case ErrorKind::kParse:
      return "parse";
    case ErrorKind::kParameter:
      return "parameter";
    case ErrorKind::kRange:
      return "range";
    case ErrorKind::kSize:
      return "size";
    case ErrorKind::kEstimation:
      return "estimation";
    case ErrorKind::kContradiction:
      return "contradiction";
    case ErrorKind::kInfeasible:
      return "infeasible";
    case ErrorKind::kGroupDeath:
      return "group_death";
    case ErrorKind::kInternal:
      return "internal";
  }
  return "internal";
}

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kUsage:
    case ErrorKind::kSize:
      return 1;
    case ErrorKind::kParse:
    case ErrorKind::kParameter:
    case ErrorKind::kRange:
    case ErrorKind::kEstimation:
      return 2;
    case ErrorKind::kContradiction:
    case ErrorKind::kInfeasible:
    case ErrorKind::kGroupDeath:
      return 3;
    case ErrorKind::kInternal:
      return 4;
  }
  return 4;
}

}  // namespace sbm_cavity
