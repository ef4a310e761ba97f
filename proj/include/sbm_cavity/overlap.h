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

#ifndef SBM_CAVITY_OVERLAP_H_
#define SBM_CAVITY_OVERLAP_H_

#include <vector>

#include "sbm_cavity/block_model.h"
#include "sbm_cavity/graph.h"

namespace sbm_cavity {

enum class OverlapMode {
  kIdentity,        // labels compared as given
  kPermutationMax,  // best relabeling of the predicted groups
};

// Fraction of nodes whose predicted label equals the true one. With
// `exclude_revealed` the revealed nodes of `seeds` are left out of both the
// numerator and the count. Returns 0 when no node is scored.
double Overlap(const LabelVector& predicted, const LabelVector& truth, int k,
               OverlapMode mode, bool exclude_revealed = false,
               const SeedSet* seeds = nullptr);

// Default convention: identity when labels were revealed (they fix the
// group names), permutation-max otherwise.
inline OverlapMode DefaultOverlapMode(const SeedSet& seeds) {
  return seeds.empty() ? OverlapMode::kPermutationMax : OverlapMode::kIdentity;
}

// Maximum-weight perfect matching on a square matrix (Hungarian method).
// Returns assignment[row] = column.
std::vector<int> MaxWeightAssignment(const std::vector<double>& weights,
                                     int size);

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_OVERLAP_H_
