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

#include "sbm_cavity/overlap.h"

#include <limits>

#include "sbm_cavity/error.h"

namespace sbm_cavity {

std::vector<int> MaxWeightAssignment(const std::vector<double>& weights,
                                     int size) {
  // Shortest augmenting path formulation on costs = -weights, 1-indexed.
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(size + 1, 0.0), v(size + 1, 0.0);
  std::vector<int> match(size + 1, 0), way(size + 1, 0);
  for (int row = 1; row <= size; ++row) {
    match[0] = row;
    int col0 = 0;
    std::vector<double> min_v(size + 1, inf);
    std::vector<bool> used(size + 1, false);
    do {
      used[col0] = true;
      const int row0 = match[col0];
      double delta = inf;
      int col1 = 0;
      for (int col = 1; col <= size; ++col) {
        if (used[col]) continue;
        const double cost = -weights[(row0 - 1) * size + (col - 1)];
        const double reduced = cost - u[row0] - v[col];
        if (reduced < min_v[col]) {
          min_v[col] = reduced;
          way[col] = col0;
        }
        if (min_v[col] < delta) {
          delta = min_v[col];
          col1 = col;
        }
      }
      for (int col = 0; col <= size; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          min_v[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const int col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<int> assignment(size, 0);
  for (int col = 1; col <= size; ++col) {
    if (match[col] != 0) assignment[match[col] - 1] = col - 1;
  }
  return assignment;
}

double Overlap(const LabelVector& predicted, const LabelVector& truth, int k,
               OverlapMode mode, bool exclude_revealed, const SeedSet* seeds) {
  if (predicted.size() != truth.size()) {
    throw Error(ErrorKind::kUsage, "predicted and true labels differ in length");
  }
  std::vector<bool> skip(truth.size(), false);
  if (exclude_revealed && seeds != nullptr) {
    for (const auto& [node, label] : seeds->revealed) skip[node] = true;
  }
  // confusion[predicted * k + true]
  std::vector<double> confusion(static_cast<size_t>(k) * k, 0.0);
  double scored = 0.0;
  for (size_t i = 0; i < truth.size(); ++i) {
    if (skip[i]) continue;
    if (truth[i] < 0 || truth[i] >= k || predicted[i] < 0 ||
        predicted[i] >= k) {
      throw Error(ErrorKind::kRange,
                  "overlap needs complete labels in 0..k-1 (node " +
                      std::to_string(i) + ")");
    }
    confusion[predicted[i] * k + truth[i]] += 1.0;
    scored += 1.0;
  }
  if (scored == 0.0) return 0.0;
  double correct = 0.0;
  if (mode == OverlapMode::kIdentity) {
    for (int a = 0; a < k; ++a) correct += confusion[a * k + a];
  } else {
    const auto assignment = MaxWeightAssignment(confusion, k);
    for (int a = 0; a < k; ++a) correct += confusion[a * k + assignment[a]];
  }
  return correct / scored;
}

}  // namespace sbm_cavity
