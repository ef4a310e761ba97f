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

// Sparse stochastic block model: parameters, planted instances, and the
// revealed seed labels of the semisupervised setting.
//
// Affinities are kept in the sparse scaling c_ab = n * p_ab, so c is measured
// in units of expected degree and stays O(1) as n grows.

#ifndef SBM_CAVITY_BLOCK_MODEL_H_
#define SBM_CAVITY_BLOCK_MODEL_H_

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sbm_cavity/graph.h"

namespace sbm_cavity {

struct BlockModelParams {
  int k = 0;
  std::vector<double> q;         // group priors, sum to one
  std::vector<double> affinity;  // k x k row-major, symmetric

  double c(int a, int b) const { return affinity[a * k + b]; }
  double& c(int a, int b) { return affinity[a * k + b]; }

  // sum_ab q_a q_b c_ab
  double average_degree() const;

  // True when the diagonal is one constant and the off-diagonal another,
  // which lets BP evaluate sum_b c_ab psi_b in O(1) per group.
  bool is_two_valued() const;

  // Throws kParameter unless q is a distribution, c is symmetric and
  // non-negative, and the average degree is finite and positive.
  void Validate() const;

  friend bool operator==(const BlockModelParams&,
                         const BlockModelParams&) = default;
};

// Equal groups, c_in on the diagonal and c_out = epsilon * c_in elsewhere,
// chosen so the average degree is `avg_degree`. Epsilon above one
// (disassortative) is rejected unless `allow_disassortative` is set.
BlockModelParams PlantedPartitionParams(int k, double avg_degree,
                                        double epsilon,
                                        bool allow_disassortative = false);

// Planted coloring: c_in = 0, c_out = k * c / (k - 1).
BlockModelParams PlantedColoringParams(int k, double avg_degree);

// Ratio of the Kesten-Stigum threshold c_in - c_out = k sqrt(c) for the
// planted partition, i.e. the epsilon at which the factorized fixed point
// changes stability at average degree c.
double KestenStigumEpsilon(int k, double avg_degree);

struct PlantedInstance {
  Graph graph;
  LabelVector truth;
  BlockModelParams params;
  uint64_t seed = 0;
};

// Labels are drawn i.i.d. from q. For each unordered block pair the edge
// count is binomial over the available node pairs and the endpoints are drawn
// uniformly without replacement, which is distributed exactly like the
// independent Bernoulli(c_ab / n) model. Throws kParameter when some
// c_ab >= n or n < 2.
PlantedInstance SamplePlantedInstance(const BlockModelParams& params,
                                      NodeId n, uint64_t seed);

struct SeedSet {
  std::vector<std::pair<NodeId, Label>> revealed;  // sorted by node
  double alpha_requested = 0.0;

  size_t size() const { return revealed.size(); }
  bool empty() const { return revealed.empty(); }
  // Per-node pinned label, kUnknownLabel for free nodes.
  LabelVector Pinning(NodeId num_nodes) const;
};

// floor(alpha * n) distinct nodes drawn uniformly without replacement.
SeedSet RevealLabels(const LabelVector& truth, double alpha, uint64_t seed);

// Seed set holding every known entry of `labels`.
SeedSet SeedSetFromLabels(const LabelVector& labels);

// Block-count estimate from the edges whose endpoints are both revealed.
// q_a is the revealed group fraction; c_ab = n * e_ab / pairs_ab where
// pairs_ab counts revealed node pairs in groups (a, b). Entries with no
// revealed pairs, or the whole matrix when no edge joins two revealed nodes,
// fall back to 2m/n. Throws kEstimation with fewer than two revealed nodes.
BlockModelParams ParamsFromSeedEdges(const Graph& graph, const SeedSet& seeds,
                                     int k);

// key=value form: `k = 2`, `q = 0.5 0.5`, `c = 4 1 1 4` (row-major).
std::string FormatParams(const BlockModelParams& params);
BlockModelParams ParseParams(std::string_view text);

// Metadata block written next to an instance's edge list and label file.
std::string FormatInstanceMetadata(const PlantedInstance& instance);

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_BLOCK_MODEL_H_
