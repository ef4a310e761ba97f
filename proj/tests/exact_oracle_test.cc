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

#include <algorithm>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "test_support.h"

namespace sbm_cavity {
namespace {

using testing::KindOf;

const std::vector<double> kZeroField{0.0, 0.0};

TEST(OracleTest, SymmetricEdge) {
  const auto g = testing::MakeGraph(2, {{0, 1}});
  const auto r =
      ExactInference(g, testing::TwoValued(2, 4.0, 1.0), {}, kZeroField);
  for (double value : r.marginals) EXPECT_NEAR(value, 0.5, 1e-15);
  // Z = sum_ab q_a q_b c_ab = (4 + 1 + 1 + 4) / 4.
  EXPECT_NEAR(r.log_partition, std::log(2.5), 1e-14);
}

TEST(OracleTest, PinnedNeighborGivesFourToOne) {
  const auto g = testing::MakeGraph(2, {{0, 1}});
  SeedSet seeds;
  seeds.revealed = {{0, 0}};
  const auto r =
      ExactInference(g, testing::TwoValued(2, 4.0, 1.0), seeds, kZeroField);
  EXPECT_NEAR(r.marginal(1, 2)[0], 0.8, 1e-15);
  EXPECT_NEAR(r.marginal(1, 2)[1], 0.2, 1e-15);
  EXPECT_EQ(r.marginal(0, 2)[0], 1.0);
  EXPECT_EQ(r.joint_mode, (LabelVector{0, 0}));
}

TEST(OracleTest, OddCycleIsNotTwoColorable) {
  const auto g = testing::MakeGraph(3, {{0, 1}, {1, 2}, {0, 2}});
  EXPECT_EQ(KindOf([&] {
              ExactInference(g, PlantedColoringParams(2, 1.0), {}, kZeroField);
            }),
            ErrorKind::kInfeasible);
}

TEST(OracleTest, SizeGuards) {
  const auto big = testing::MakeGraph(17, {});
  EXPECT_EQ(KindOf([&] {
              ExactInference(big, testing::TwoValued(2, 1, 1), {}, kZeroField);
            }),
            ErrorKind::kSize);
  // 10^9 assignments with only 9 nodes free of the node cap.
  const auto wide = testing::MakeGraph(9, {});
  const std::vector<double> field(10, 0.0);
  EXPECT_EQ(KindOf([&] {
              ExactInference(wide, testing::TwoValued(10, 1, 1), {}, field);
            }),
            ErrorKind::kSize);
}

// Random small graphs (with cycles) against the naive enumeration.
TEST(OracleTest, MatchesNaiveEnumeration) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  for (int trial = 0; trial < 60; ++trial) {
    const int k = 2 + static_cast<int>(rng() % 2);
    const NodeId n = 2 + static_cast<NodeId>(rng() % 7);
    std::vector<std::pair<NodeId, NodeId>> pairs;
    for (int e = 0; e < 2 * n; ++e) {
      pairs.emplace_back(rng() % n, rng() % n);
    }
    const auto g = Graph::FromPairs(n, pairs);
    const auto params = testing::RandomParams(k, rng);
    std::vector<double> field(k);
    for (double& h : field) h = unit(rng);
    SeedSet seeds;
    LabelVector pinned(n, kUnknownLabel);
    for (NodeId i = 0; i < n; ++i) {
      if (rng() % 4 == 0) {
        pinned[i] = static_cast<Label>(rng() % k);
        seeds.revealed.emplace_back(i, pinned[i]);
      }
    }
    const auto got = ExactInference(g, params, seeds, field);
    const auto want = testing::NaivePosterior(g, params, pinned, field);
    EXPECT_NEAR(got.log_partition, want.log_z, 1e-12);
    for (size_t idx = 0; idx < want.marginals.size(); ++idx) {
      EXPECT_NEAR(got.marginals[idx], want.marginals[idx], 1e-12);
    }
  }
}

TEST(OracleTest, InvariantUnderNodeRelabeling) {
  std::mt19937_64 rng(5);
  const NodeId n = 7;
  const auto g = testing::MakeGraph(
      n, {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {3, 4}, {4, 5}, {5, 6}, {6, 4}});
  const auto params = testing::RandomParams(3, rng);
  const std::vector<double> field{0.3, -0.2, 0.1};
  std::vector<NodeId> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::pair<NodeId, NodeId>> moved;
  for (const auto& e : g.edges()) moved.emplace_back(perm[e.u], perm[e.v]);
  SeedSet seeds, moved_seeds;
  seeds.revealed = {{2, 1}};
  moved_seeds.revealed = {{perm[2], 1}};
  const auto a = ExactInference(g, params, seeds, field);
  const auto b =
      ExactInference(Graph::FromPairs(n, moved), params, moved_seeds, field);
  EXPECT_NEAR(a.log_partition, b.log_partition, 1e-12);
  for (NodeId i = 0; i < n; ++i) {
    for (int x = 0; x < 3; ++x) {
      EXPECT_NEAR(a.marginal(i, 3)[x], b.marginal(perm[i], 3)[x], 1e-12);
    }
  }
}

// Pinning node i to a equals conditioning the unpinned posterior on t_i = a
// once the pinned node's prior q_a is divided out.
TEST(OracleTest, PinningEqualsConditioning) {
  std::mt19937_64 rng(8);
  const auto g = testing::MakeGraph(5, {{0, 1}, {1, 2}, {2, 3}, {3, 1}, {3, 4}});
  const auto params = testing::RandomParams(2, rng);
  const auto free = ExactInference(g, params, {}, kZeroField);
  for (int a = 0; a < 2; ++a) {
    SeedSet seeds;
    seeds.revealed = {{1, a}};
    const auto pinned = ExactInference(g, params, seeds, kZeroField);
    // log Z_pinned = log Z + log P(t_1 = a) - log q_a.
    EXPECT_NEAR(pinned.log_partition,
                free.log_partition + std::log(free.marginal(1, 2)[a]) -
                    std::log(params.q[a]),
                1e-12);
  }
}

}  // namespace
}  // namespace sbm_cavity
