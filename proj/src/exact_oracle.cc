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

#include "sbm_cavity/exact_oracle.h"

#include <cmath>
#include <limits>
#include <string>

#include "sbm_cavity/error.h"

namespace sbm_cavity {

OracleResult ExactInference(const Graph& graph, const BlockModelParams& params,
                            const SeedSet& seeds,
                            std::span<const double> field) {
  params.Validate();
  const int k = params.k;
  const NodeId n = graph.num_nodes();
  if (n > kOracleMaxNodes || std::pow(static_cast<double>(k), n) >
                                 kOracleMaxAssignments) {
    throw Error(ErrorKind::kSize,
                "exact enumeration limited to n <= 16 and k^n <= 1e8 (n = " +
                    std::to_string(n) + ", k = " + std::to_string(k) + ")");
  }
  if (field.size() != static_cast<size_t>(k)) {
    throw Error(ErrorKind::kUsage, "field must have k entries");
  }
  const LabelVector pinned = seeds.Pinning(n);
  for (Label label : pinned) {
    if (label != kUnknownLabel && (label < 0 || label >= k)) {
      throw Error(ErrorKind::kRange, "revealed label outside 0..k-1");
    }
  }

  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  // log(q^i_a exp(-h_a)) with q^i the point mass for pinned nodes.
  std::vector<double> log_node(k);
  for (int a = 0; a < k; ++a) {
    log_node[a] = params.q[a] > 0.0 ? std::log(params.q[a]) - field[a]
                                    : kNegInf;
  }
  std::vector<double> log_c(static_cast<size_t>(k) * k);
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      log_c[a * k + b] = params.c(a, b) > 0.0 ? std::log(params.c(a, b))
                                              : kNegInf;
    }
  }

  std::vector<NodeId> free_nodes;
  LabelVector assignment(static_cast<size_t>(n), 0);
  for (NodeId i = 0; i < n; ++i) {
    if (pinned[i] == kUnknownLabel) {
      free_nodes.push_back(i);
    } else {
      assignment[i] = pinned[i];
    }
  }

  // Streaming log-sum-exp: totals are stored relative to exp(scale).
  double scale = kNegInf;
  double total = 0.0;
  std::vector<double> marginal_sums(static_cast<size_t>(n) * k, 0.0);
  double best = kNegInf;
  LabelVector best_assignment;

  while (true) {
    double log_w = 0.0;
    for (NodeId i = 0; i < n && log_w != kNegInf; ++i) {
      log_w += pinned[i] == kUnknownLabel ? log_node[assignment[i]]
                                          : -field[assignment[i]];
    }
    for (const auto& e : graph.edges()) {
      if (log_w == kNegInf) break;
      log_w += log_c[assignment[e.u] * k + assignment[e.v]];
    }
    if (log_w != kNegInf) {
      if (log_w > scale) {
        const double shrink = scale == kNegInf ? 0.0 : std::exp(scale - log_w);
        total *= shrink;
        for (double& value : marginal_sums) value *= shrink;
        scale = log_w;
      }
      const double w = std::exp(log_w - scale);
      total += w;
      for (NodeId i = 0; i < n; ++i) {
        marginal_sums[static_cast<size_t>(i) * k + assignment[i]] += w;
      }
      if (log_w > best) {
        best = log_w;
        best_assignment = assignment;
      }
    }
    // Lexicographic odometer over the free nodes, last node fastest.
    int pos = static_cast<int>(free_nodes.size()) - 1;
    while (pos >= 0 && assignment[free_nodes[pos]] == k - 1) {
      assignment[free_nodes[pos]] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++assignment[free_nodes[pos]];
  }

  if (scale == kNegInf) {
    throw Error(ErrorKind::kInfeasible,
                "every assignment has zero weight under the given model");
  }
  OracleResult result;
  result.log_partition = scale + std::log(total);
  result.marginals.resize(marginal_sums.size());
  for (size_t idx = 0; idx < marginal_sums.size(); ++idx) {
    result.marginals[idx] = marginal_sums[idx] / total;
  }
  result.joint_mode = std::move(best_assignment);
  return result;
}

}  // namespace sbm_cavity
