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

#include "sbm_cavity/block_model.h"

#include <cmath>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include "test_support.h"

namespace sbm_cavity {
namespace {

using testing::KindOf;

TEST(PlantedPartitionTest, ErdosRenyiPoint) {
  const auto p = PlantedPartitionParams(2, 3.0, 1.0);
  EXPECT_DOUBLE_EQ(p.c(0, 0), 3.0);
  EXPECT_DOUBLE_EQ(p.c(0, 1), 3.0);
  EXPECT_EQ(p.q, (std::vector<double>{0.5, 0.5}));
}

// c_in + (k-1) c_out = k c and c_in - c_out = k sqrt(c), solved by hand.
double ThresholdEpsilon(int k, double c) {
  const double c_out = (k * c - k * std::sqrt(c)) / k;
  const double c_in = c_out + k * std::sqrt(c);
  return c_out / c_in;
}

TEST(PlantedPartitionTest, KestenStigumRatio) {
  EXPECT_NEAR(KestenStigumEpsilon(2, 3.0), 0.2679, 5e-5);
  EXPECT_NEAR(KestenStigumEpsilon(10, 10.0), 0.1778, 5e-5);
  for (int k : {2, 3, 5, 10}) {
    for (double c : {2.0, 3.0, 10.0, 16.0}) {
      const double eps = ThresholdEpsilon(k, c);
      EXPECT_NEAR(KestenStigumEpsilon(k, c), eps, 1e-12);
      const auto p = PlantedPartitionParams(k, c, eps);
      EXPECT_NEAR(p.c(0, 0) - p.c(0, 1), k * std::sqrt(c), 1e-9);
    }
  }
}

TEST(PlantedPartitionTest, AverageDegreeIsExact) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 9);
    const double c = 0.1 + 30.0 * unit(rng);
    const double eps = unit(rng);
    const auto p = PlantedPartitionParams(k, c, eps);
    EXPECT_NEAR(p.average_degree(), c, 1e-12 * c);
    EXPECT_NEAR(p.c(0, 1), eps * p.c(0, 0), 1e-12 * c);
    EXPECT_TRUE(p.is_two_valued());
  }
}

TEST(PlantedPartitionTest, RejectsBadInputs) {
  EXPECT_EQ(KindOf([] { PlantedPartitionParams(2, 3.0, -0.1); }),
            ErrorKind::kParameter);
  EXPECT_EQ(KindOf([] { PlantedPartitionParams(2, 3.0, 1.5); }),
            ErrorKind::kParameter);
  EXPECT_EQ(KindOf([] { PlantedPartitionParams(1, 3.0, 0.5); }),
            ErrorKind::kParameter);
  EXPECT_EQ(KindOf([] { PlantedPartitionParams(2, 0.0, 0.5); }),
            ErrorKind::kParameter);
  const auto p = PlantedPartitionParams(2, 3.0, 1.5, true);
  EXPECT_GT(p.c(0, 1), p.c(0, 0));
  EXPECT_NEAR(p.average_degree(), 3.0, 1e-12);
}

TEST(PlantedColoringTest, Values) {
  EXPECT_DOUBLE_EQ(PlantedColoringParams(5, 16.0).c(0, 1), 20.0);
  EXPECT_DOUBLE_EQ(PlantedColoringParams(5, 16.0).c(2, 2), 0.0);
  EXPECT_DOUBLE_EQ(PlantedColoringParams(2, 1.0).c(0, 1), 2.0);
  EXPECT_DOUBLE_EQ(PlantedColoringParams(5, 12.0).c(0, 1), 15.0);
  EXPECT_NEAR(PlantedColoringParams(5, 12.0).average_degree(), 12.0, 1e-12);
}

TEST(ParamsTest, ValidateRejectsMalformed) {
  auto p = testing::TwoValued(2, 3.0, 1.0);
  p.Validate();
  auto bad_q = p;
  bad_q.q = {0.7, 0.7};
  EXPECT_EQ(KindOf([&] { bad_q.Validate(); }), ErrorKind::kParameter);
  auto asym = p;
  asym.c(0, 1) = 2.0;
  EXPECT_EQ(KindOf([&] { asym.Validate(); }), ErrorKind::kParameter);
  auto negative = p;
  negative.c(0, 0) = -1.0;
  EXPECT_EQ(KindOf([&] { negative.Validate(); }), ErrorKind::kParameter);
  auto zero = testing::TwoValued(2, 0.0, 0.0);
  EXPECT_EQ(KindOf([&] { zero.Validate(); }), ErrorKind::kParameter);
}

TEST(ParamsTest, FormatParseRoundTrip) {
  std::mt19937_64 rng(4);
  for (int k = 1; k <= 4; ++k) {
    const auto p = testing::RandomParams(k, rng);
    EXPECT_EQ(ParseParams(FormatParams(p)), p);
  }
}

// Independent O(n^2) Bernoulli sampler with its own RNG.
std::pair<LabelVector, std::vector<std::pair<NodeId, NodeId>>> NaiveSample(
    const BlockModelParams& params, NodeId n, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::discrete_distribution<int> group(params.q.begin(), params.q.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  LabelVector labels(n);
  for (auto& label : labels) label = group(rng);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j = i + 1; j < n; ++j) {
      if (unit(rng) < params.c(labels[i], labels[j]) / n) {
        edges.emplace_back(i, j);
      }
    }
  }
  return {labels, edges};
}

// Per block pair (a <= b): observed count minus its conditional mean given
// the labels, and the conditional variance.
struct BlockResidual {
  std::vector<double> residual, variance;
};

BlockResidual Residuals(const BlockModelParams& params, NodeId n,
                        const LabelVector& labels,
                        const std::vector<std::pair<NodeId, NodeId>>& edges) {
  const int k = params.k;
  std::vector<double> size(k, 0.0);
  for (Label t : labels) size[t] += 1.0;
  BlockResidual out;
  out.residual.assign(k * k, 0.0);
  out.variance.assign(k * k, 0.0);
  for (const auto& [u, v] : edges) {
    const int a = std::min(labels[u], labels[v]);
    const int b = std::max(labels[u], labels[v]);
    out.residual[a * k + b] += 1.0;
  }
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      const double pairs =
          a == b ? size[a] * (size[a] - 1) / 2 : size[a] * size[b];
      const double p = params.c(a, b) / n;
      out.residual[a * k + b] -= pairs * p;
      out.variance[a * k + b] = pairs * p * (1 - p);
    }
  }
  return out;
}

// Sums residuals over many seeds and checks each block pair's z-score, plus
// the label histogram against q.
template <typename Sampler>
void CheckBlockCounts(const BlockModelParams& params, NodeId n, int seeds,
                      Sampler sample) {
  const int k = params.k;
  std::vector<double> residual(k * k, 0.0), variance(k * k, 0.0);
  std::vector<double> histogram(k, 0.0);
  for (int s = 0; s < seeds; ++s) {
    const auto [labels, edges] = sample(s);
    const auto r = Residuals(params, n, labels, edges);
    for (int idx = 0; idx < k * k; ++idx) {
      residual[idx] += r.residual[idx];
      variance[idx] += r.variance[idx];
    }
    for (Label t : labels) histogram[t] += 1.0;
  }
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      if (variance[a * k + b] == 0.0) {
        EXPECT_EQ(residual[a * k + b], 0.0);
        continue;
      }
      EXPECT_LT(std::abs(residual[a * k + b]) / std::sqrt(variance[a * k + b]),
                4.5)
          << "block pair " << a << "," << b;
    }
    const double draws = static_cast<double>(n) * seeds;
    const double sigma = std::sqrt(draws * params.q[a] * (1 - params.q[a]));
    EXPECT_LT(std::abs(histogram[a] - draws * params.q[a]), 4.5 * sigma);
  }
}

TEST(SamplerTest, MatchesBernoulliModelInDistribution) {
  BlockModelParams skewed;
  skewed.k = 3;
  skewed.q = {0.2, 0.3, 0.5};
  skewed.affinity = {9, 1, 3, 1, 0, 5, 3, 5, 2};
  // Same model with groups 0 and 2 exchanged.
  BlockModelParams swapped;
  swapped.k = 3;
  swapped.q = {0.5, 0.3, 0.2};
  swapped.affinity = {2, 5, 3, 5, 0, 1, 3, 1, 9};
  for (const auto& params :
       {PlantedPartitionParams(2, 6.0, 0.25), skewed, swapped}) {
    const NodeId n = 300;
    auto library = [&](int s) {
      const auto instance = SamplePlantedInstance(params, n, 1000 + s);
      std::vector<std::pair<NodeId, NodeId>> edges;
      for (const auto& e : instance.graph.edges()) edges.emplace_back(e.u, e.v);
      return std::make_pair(instance.truth, edges);
    };
    auto naive = [&](int s) { return NaiveSample(params, n, 5000 + s); };
    CheckBlockCounts(params, n, 400, library);
    CheckBlockCounts(params, n, 400, naive);
  }
}

TEST(SamplerTest, DenseBlocksUsePartialShuffle) {
  // c_in close to n forces more than half of the within-block pairs.
  const NodeId n = 40;
  BlockModelParams dense = testing::TwoValued(2, 36.0, 1.0);
  auto library = [&](int s) {
    const auto instance = SamplePlantedInstance(dense, n, 77 + s);
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& e : instance.graph.edges()) edges.emplace_back(e.u, e.v);
    return std::make_pair(instance.truth, edges);
  };
  CheckBlockCounts(dense, n, 300, library);
}

TEST(SamplerTest, MeanDegreeOfErdosRenyi) {
  for (uint64_t seed = 0; seed < 10; ++seed) {
    const auto instance =
        SamplePlantedInstance(PlantedPartitionParams(2, 3.0, 1.0), 10000, seed);
    const double mean = 2.0 * instance.graph.num_edges() / 10000.0;
    EXPECT_GE(mean, 2.85);
    EXPECT_LE(mean, 3.15);
  }
}

TEST(SamplerTest, ColoringHasNoMonochromaticEdges) {
  const auto instance =
      SamplePlantedInstance(PlantedColoringParams(5, 14.0), 5000, 3);
  for (const auto& e : instance.graph.edges()) {
    EXPECT_NE(instance.truth[e.u], instance.truth[e.v]);
  }
}

TEST(SamplerTest, ZeroEpsilonKeepsEdgesInsideGroups) {
  const auto instance =
      SamplePlantedInstance(PlantedPartitionParams(2, 3.0, 0.0), 1000, 3);
  EXPECT_GT(instance.graph.num_edges(), 0);
  for (const auto& e : instance.graph.edges()) {
    EXPECT_EQ(instance.truth[e.u], instance.truth[e.v]);
  }
}

TEST(SamplerTest, DeterministicAndGuarded) {
  const auto params = PlantedPartitionParams(3, 4.0, 0.3);
  const auto a = SamplePlantedInstance(params, 2000, 9);
  const auto b = SamplePlantedInstance(params, 2000, 9);
  EXPECT_EQ(a.graph.edges(), b.graph.edges());
  EXPECT_EQ(a.truth, b.truth);
  EXPECT_EQ(KindOf([&] { SamplePlantedInstance(params, 1, 9); }),
            ErrorKind::kParameter);
  EXPECT_EQ(KindOf([] {
              SamplePlantedInstance(PlantedColoringParams(2, 5.0), 10, 1);
            }),
            ErrorKind::kParameter);
}

TEST(RevealTest, FloorRuleAndExtremes) {
  const auto instance =
      SamplePlantedInstance(PlantedPartitionParams(2, 3.0, 0.2), 1000, 1);
  EXPECT_TRUE(RevealLabels(instance.truth, 0.0, 1).empty());
  EXPECT_EQ(RevealLabels(instance.truth, 1.0, 1).size(), 1000u);
  EXPECT_EQ(RevealLabels(instance.truth, 0.1, 1).size(), 100u);
  EXPECT_EQ(RevealLabels(instance.truth, 0.29, 1).size(), 290u);
  EXPECT_EQ(RevealLabels(instance.truth, 0.1, 1).size(),
            RevealLabels(instance.truth, 0.1, 2).size());
}

TEST(RevealTest, LabelsAgreeAndSetsNest) {
  const auto instance =
      SamplePlantedInstance(PlantedPartitionParams(2, 3.0, 0.2), 500, 2);
  const auto small = RevealLabels(instance.truth, 0.1, 8);
  const auto large = RevealLabels(instance.truth, 0.3, 8);
  std::set<NodeId> large_nodes;
  for (const auto& [node, label] : large.revealed) {
    EXPECT_EQ(label, instance.truth[node]);
    large_nodes.insert(node);
  }
  EXPECT_EQ(large_nodes.size(), large.size());
  for (const auto& [node, label] : small.revealed) {
    EXPECT_TRUE(large_nodes.contains(node));
  }
  const auto pinning = small.Pinning(500);
  int pinned = 0;
  for (Label label : pinning) pinned += label != kUnknownLabel;
  EXPECT_EQ(pinned, 50);
}

TEST(SeedEdgeEstimateTest, FullyRevealedRecoversPlantedValues) {
  const auto params = PlantedPartitionParams(2, 3.0, 0.15);
  const auto instance = SamplePlantedInstance(params, 10000, 12);
  const auto estimate =
      ParamsFromSeedEdges(instance.graph, SeedSetFromLabels(instance.truth), 2);
  EXPECT_NEAR(estimate.c(0, 0), params.c(0, 0), 0.1 * params.c(0, 0));
  EXPECT_NEAR(estimate.c(1, 1), params.c(1, 1), 0.1 * params.c(1, 1));
  EXPECT_NEAR(estimate.c(0, 1), params.c(0, 1), 0.1 * params.c(0, 1));
  EXPECT_NEAR(estimate.q[0], 0.5, 0.02);
}

TEST(SeedEdgeEstimateTest, DegenerateFallbacks) {
  const auto g = testing::MakeGraph(6, {{0, 1}, {1, 2}, {2, 3}, {4, 5}});
  const double global = 2.0 * 4 / 6;
  SeedSet one_group;
  one_group.revealed = {{0, 0}, {1, 0}, {2, 0}};
  const auto p = ParamsFromSeedEdges(g, one_group, 2);
  EXPECT_EQ(p.q, (std::vector<double>{1.0, 0.0}));
  EXPECT_DOUBLE_EQ(p.c(1, 1), global);
  EXPECT_DOUBLE_EQ(p.c(0, 1), global);
  // 3 revealed nodes, 2 edges, 3 pairs: c_00 = n * 2 / 3.
  EXPECT_DOUBLE_EQ(p.c(0, 0), 6.0 * 2 / 3);

  SeedSet no_edge;
  no_edge.revealed = {{0, 0}, {3, 1}};
  const auto flat = ParamsFromSeedEdges(g, no_edge, 2);
  for (double value : flat.affinity) EXPECT_DOUBLE_EQ(value, global);

  SeedSet lonely;
  lonely.revealed = {{0, 0}};
  EXPECT_EQ(KindOf([&] { ParamsFromSeedEdges(g, lonely, 2); }),
            ErrorKind::kEstimation);
}

}  // namespace
}  // namespace sbm_cavity
