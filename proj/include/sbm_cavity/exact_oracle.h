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

#ifndef SBM_CAVITY_EXACT_ORACLE_H_
#define SBM_CAVITY_EXACT_ORACLE_H_

#include <span>
#include <vector>

#include "sbm_cavity/block_model.h"
#include "sbm_cavity/graph.h"

namespace sbm_cavity {

inline constexpr NodeId kOracleMaxNodes = 16;
inline constexpr double kOracleMaxAssignments = 1e8;

struct OracleResult {
  std::vector<double> marginals;  // n * k
  double log_partition = 0.0;
  LabelVector joint_mode;

  std::span<const double> marginal(NodeId i, int k) const {
    return {marginals.data() + static_cast<size_t>(i) * k,
            static_cast<size_t>(k)};
  }
};

// Exact marginals of the measure BP targets,
//   w(t) = prod_i q^i_{t_i} exp(-h_{t_i}) prod_{(ij) in E} c_{t_i t_j},
// by enumerating every assignment consistent with the revealed labels.
// Throws kSize when n > 16 or k^n > 1e8, and kInfeasible when every
// assignment has zero weight.
OracleResult ExactInference(const Graph& graph, const BlockModelParams& params,
                            const SeedSet& seeds,
                            std::span<const double> field);

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_EXACT_ORACLE_H_
