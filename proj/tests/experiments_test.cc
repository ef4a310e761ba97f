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

#include "sbm_cavity/experiments.h"

#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "sbm_cavity/graph_io.h"
#include "test_support.h"

namespace sbm_cavity {
namespace {

using testing::KindOf;

constexpr char kSmallSweep[] =
    "model = planted_partition_epsilon\n"
    "k = 2\n"
    "c = 3\n"
    "epsilon_grid = 0.1:0.5:0.2\n"
    "alpha_grid = [0, 0.2]\n"
    "n = 1500\n"
    "seeds = 2\n"
    "inits = [random, planted]\n"
    "max_sweeps = 200\n"
    "seed = 11\n";

std::string RunToCsv(const SweepSpec& spec) {
  std::string csv(kSweepCsvHeader);
  csv += '\n';
  RunSweep(spec, [&](const SweepPoint& point) {
    csv += FormatSweepRow(spec, point);
    csv += '\n';
  });
  return csv;
}

// Drops the runtime_ms column, the one field allowed to differ between runs.
std::string WithoutRuntime(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream parts(line);
    std::string field;
    while (std::getline(parts, field, ',')) fields.push_back(field);
    fields.erase(fields.begin() + 14);
    for (const auto& kept : fields) out += kept + ',';
    out += '\n';
  }
  return out;
}

TEST(SweepSpecTest, ParseFormatRoundTrip) {
  const auto spec = SweepSpec::Parse(kSmallSweep);
  EXPECT_EQ(spec.model, SweepModel::kPartitionEpsilon);
  EXPECT_EQ(spec.grid, (std::vector<double>{0.1, 0.3, 0.5}));
  EXPECT_EQ(spec.alpha_grid, (std::vector<double>{0, 0.2}));
  EXPECT_EQ(spec.inits,
            (std::vector<InitMode>{InitMode::kRandom, InitMode::kPlanted}));
  EXPECT_EQ(spec.bp.max_sweeps, 200);
  const auto again = SweepSpec::Parse(spec.Format());
  EXPECT_EQ(again.Format(), spec.Format());
  EXPECT_EQ(again.grid, spec.grid);
  EXPECT_EQ(again.seed, spec.seed);
}

TEST(SweepSpecTest, RejectsBadSpecs) {
  EXPECT_EQ(KindOf([] {
              SweepSpec::Parse("model = planted_coloring\nk = 5\n"
                               "c_grid = [3, 2]\nn = 100\nseed = 1\n");
            }),
            ErrorKind::kUsage);
  EXPECT_EQ(KindOf([] {
              SweepSpec::Parse("model = planted_coloring\nk = 5\n"
                               "c_grid = [2]\nn = 100\n");
            }),
            ErrorKind::kParse);
  EXPECT_EQ(KindOf([] {
              SweepSpec::Parse("model = mystery\nk = 5\nc_grid = [2]\n"
                               "n = 100\nseed = 1\n");
            }),
            ErrorKind::kUsage);
}

TEST(SweepSpecTest, ParamsAtFollowsModel) {
  SweepSpec spec;
  spec.model = SweepModel::kColoring;
  spec.k = 5;
  EXPECT_EQ(spec.ParamsAt(16.0), PlantedColoringParams(5, 16.0));
  spec.model = SweepModel::kPartitionEpsilon;
  spec.k = 2;
  spec.c = 3.0;
  EXPECT_EQ(spec.ParamsAt(0.25), PlantedPartitionParams(2, 3.0, 0.25));
  spec.model = SweepModel::kPartitionDegree;
  spec.epsilon = 0.1;
  EXPECT_EQ(spec.ParamsAt(4.0), PlantedPartitionParams(2, 4.0, 0.1));
}

TEST(SweepTest, RowsCoverEveryCombinationInOrder) {
  const auto spec = SweepSpec::Parse(kSmallSweep);
  const auto points = RunSweep(spec);
  ASSERT_EQ(points.size(), 3u * 2 * 2 * 2);
  size_t row = 0;
  for (size_t g = 0; g < 3; ++g) {
    for (size_t a = 0; a < 2; ++a) {
      for (int s = 0; s < 2; ++s) {
        for (InitMode init : spec.inits) {
          const auto& point = points[row++];
          EXPECT_EQ(point.grid_index, g);
          EXPECT_EQ(point.alpha_index, a);
          EXPECT_EQ(point.seed_index, s);
          EXPECT_EQ(point.init, init);
          EXPECT_EQ(point.epsilon, spec.grid[g]);
          EXPECT_EQ(point.c, 3.0);
          EXPECT_TRUE(point.ok()) << point.status;
          // Overlap never falls far below chance, never above one.
          const double chance = ChanceLevel(2, point.alpha);
          EXPECT_GE(point.overlap, chance - 3 * std::sqrt(0.25 / 1500));
          EXPECT_LE(point.overlap, 1.0);
        }
      }
    }
  }
}

TEST(SweepTest, FullRevealGivesPerfectOverlap) {
  auto spec = SweepSpec::Parse(kSmallSweep);
  spec.alpha_grid = {1.0};
  spec.seeds = 1;
  for (const auto& point : RunSweep(spec)) {
    EXPECT_EQ(point.overlap, 1.0);
    EXPECT_TRUE(point.converged);
  }
}

TEST(SweepTest, SinglePointGrid) {
  auto spec = SweepSpec::Parse(kSmallSweep);
  spec.grid = {0.2};
  spec.alpha_grid = {0.0};
  spec.seeds = 1;
  spec.inits = {InitMode::kRandom};
  EXPECT_EQ(RunSweep(spec).size(), 1u);
}

TEST(SweepTest, ByteIdenticalAcrossThreadCounts) {
  auto spec = SweepSpec::Parse(kSmallSweep);
  const std::string one = WithoutRuntime(RunToCsv(spec));
  spec.threads = 3;
  const std::string three = WithoutRuntime(RunToCsv(spec));
  EXPECT_EQ(one, three);
  spec.threads = 1;
  EXPECT_EQ(WithoutRuntime(RunToCsv(spec)), one);
}

TEST(SweepTest, CsvRoundTrip) {
  const auto spec = SweepSpec::Parse(kSmallSweep);
  const auto points = RunSweep(spec);
  std::string csv(kSweepCsvHeader);
  csv += '\n';
  for (const auto& point : points) csv += FormatSweepRow(spec, point) + '\n';
  const auto parsed = ParseSweepCsv(csv);
  ASSERT_EQ(parsed.size(), points.size());
  for (size_t i = 0; i < points.size(); ++i) {
    EXPECT_EQ(parsed[i].grid_index, points[i].grid_index);
    EXPECT_EQ(parsed[i].alpha_index, points[i].alpha_index);
    EXPECT_EQ(parsed[i].overlap, points[i].overlap);
    EXPECT_EQ(parsed[i].free_energy, points[i].free_energy);
    EXPECT_EQ(parsed[i].free_energy_factorized,
              points[i].free_energy_factorized);
    EXPECT_EQ(parsed[i].sweeps, points[i].sweeps);
    EXPECT_EQ(parsed[i].converged, points[i].converged);
    EXPECT_EQ(parsed[i].init, points[i].init);
  }
  EXPECT_EQ(KindOf([] { ParseSweepCsv("c,alpha\n1,0\n"); }),
            ErrorKind::kParse);
}

// Synthetic sweep points on a c grid for the detector.
std::vector<SweepPoint> Synthetic(const std::vector<double>& grid,
                                  const std::vector<double>& random_overlap,
                                  const std::vector<double>& planted_overlap,
                                  const std::vector<double>& gap,
                                  double alpha = 0.0,
                                  double random_shift = 0.0) {
  std::vector<SweepPoint> points;
  for (size_t g = 0; g < grid.size(); ++g) {
    for (InitMode init : {InitMode::kRandom, InitMode::kPlanted}) {
      SweepPoint point;
      point.grid_index = g;
      point.c = grid[g];
      point.alpha = alpha;
      point.init = init;
      point.free_energy_factorized = -100.0 * grid[g];
      if (init == InitMode::kRandom) {
        point.overlap = random_overlap[g];
        point.free_energy = point.free_energy_factorized + random_shift;
      } else {
        point.overlap = planted_overlap[g];
        point.free_energy = point.free_energy_factorized + gap[g];
      }
      points.push_back(point);
    }
  }
  return points;
}

TEST(TransitionTest, OrderedLinesAndInterpolatedCrossing) {
  const std::vector<double> grid{12, 13, 14, 15, 16, 17};
  const auto points =
      Synthetic(grid, {0.2, 0.2, 0.21, 0.2, 0.9, 0.95},
                {0.2, 0.8, 0.85, 0.9, 0.92, 0.95}, {0, 30, 10, -10, -50, -80});
  const auto estimate = DetectTransitions(points, 5, {});
  EXPECT_TRUE(estimate.all_valid());
  EXPECT_FALSE(estimate.merged);
  EXPECT_EQ(estimate.c_ks, 16.0);
  EXPECT_EQ(estimate.c_sp, 13.0);
  // Gap goes 10 -> -10 between 14 and 15.
  EXPECT_DOUBLE_EQ(estimate.c_det, 14.5);
  EXPECT_EQ(FormatTransitionRow(estimate),
            "0,16,13,14.5,ks=1;sp=1;det=1;merged=0;ks_saturated=0;"
            "sp_saturated=0");
}

// A partially recovered random run is still on its way to the accurate
// branch; the lines meet only once the overlaps agree within delta.
TEST(TransitionTest, KestenStigumWaitsForTheBranchesToMeet) {
  const std::vector<double> grid{12, 13, 14, 15};
  const auto points = Synthetic(grid, {0.2, 0.2, 0.6, 0.9},
                                {0.2, 0.8, 0.9, 0.92}, {0, -10, -20, -30});
  const auto estimate = DetectTransitions(points, 5, {});
  EXPECT_TRUE(estimate.all_valid());
  EXPECT_EQ(estimate.c_sp, 13.0);
  EXPECT_EQ(estimate.c_ks, 15.0);
  EXPECT_EQ(estimate.c_det, 13.0);
}

// Revealed labels lift the low branch above chance and move its free
// energy off the factorized value; the split and the crossing still show.
TEST(TransitionTest, SemisupervisedLinesUseTheLowBranch) {
  const std::vector<double> grid{12, 13, 14, 15};
  const auto points =
      Synthetic(grid, {0.45, 0.5, 0.55, 0.93}, {0.45, 0.9, 0.92, 0.93},
                {-1000, -990, -1010, -1000}, 0.04, -1000);
  const auto estimate = DetectTransitions(points, 5, {});
  EXPECT_TRUE(estimate.all_valid());
  EXPECT_FALSE(estimate.merged);
  EXPECT_TRUE(estimate.ks_saturated);
  EXPECT_EQ(estimate.c_sp, 13.0);
  EXPECT_EQ(estimate.c_ks, 15.0);
  // Gap to the random-init branch goes 10 -> -10 between 13 and 14.
  EXPECT_DOUBLE_EQ(estimate.c_det, 13.5);
}

TEST(TransitionTest, MergedAndSaturatedLines) {
  const std::vector<double> grid{12, 13, 14};
  const auto points = Synthetic(grid, {0.8, 0.9, 0.95}, {0.8, 0.9, 0.95},
                                {-5, -6, -7}, 0.08);
  const auto estimate = DetectTransitions(points, 5, {});
  EXPECT_TRUE(estimate.merged);
  EXPECT_FALSE(estimate.all_valid());
  EXPECT_TRUE(estimate.ks_saturated);
  EXPECT_TRUE(estimate.sp_saturated);
  EXPECT_EQ(estimate.alpha, 0.08);
}

TEST(TransitionTest, MissingEventsAreInvalid) {
  const std::vector<double> grid{12, 13, 14};
  const auto points =
      Synthetic(grid, {0.2, 0.2, 0.2}, {0.2, 0.9, 0.9}, {5, 4, 3});
  const auto estimate = DetectTransitions(points, 5, {});
  EXPECT_FALSE(estimate.ks_valid);
  EXPECT_TRUE(estimate.sp_valid);
  EXPECT_FALSE(estimate.det_valid);
  EXPECT_EQ(FormatTransitionRow(estimate).substr(0, 14), "0,nan,13,nan,k");
}

TEST(TransitionTest, ThresholdTracksRevealedFraction) {
  EXPECT_DOUBLE_EQ(ChanceLevel(5, 0.0), 0.2);
  EXPECT_DOUBLE_EQ(ChanceLevel(5, 0.5), 0.6);
  // 0.3 is above chance + delta at alpha = 0 but not at alpha = 0.1.
  const std::vector<double> grid{1, 2};
  const auto at_zero =
      Synthetic(grid, {0.2, 0.3}, {0.2, 0.3}, {1, 1}, 0.0);
  const auto at_tenth =
      Synthetic(grid, {0.29, 0.3}, {0.29, 0.3}, {1, 1}, 0.1);
  EXPECT_TRUE(DetectTransitions(at_zero, 5, {}).merged);
  EXPECT_FALSE(DetectTransitions(at_tenth, 5, {}).ks_valid);
}

TEST(TransitionTest, InputErrors) {
  const std::vector<double> grid{1, 2};
  auto mixed = Synthetic(grid, {0.2, 0.3}, {0.2, 0.3}, {1, 1}, 0.0);
  mixed.back().alpha = 0.5;
  EXPECT_EQ(KindOf([&] { DetectTransitions(mixed, 5, {}); }),
            ErrorKind::kUsage);
  auto random_only = Synthetic(grid, {0.2, 0.3}, {0.2, 0.3}, {1, 1});
  std::erase_if(random_only, [](const SweepPoint& point) {
    return point.init == InitMode::kPlanted;
  });
  EXPECT_EQ(KindOf([&] { DetectTransitions(random_only, 5, {}); }),
            ErrorKind::kUsage);
  auto grouped = Synthetic(grid, {0.2, 0.3}, {0.2, 0.3}, {1, 1}, 0.0);
  auto other = Synthetic(grid, {0.2, 0.3}, {0.2, 0.3}, {1, 1}, 0.1);
  grouped.insert(grouped.end(), other.begin(), other.end());
  EXPECT_EQ(DetectAllTransitions(grouped, 5, {}).size(), 2u);
}

TEST(RealNetworkTest, KarateGivenParamsRows) {
  const auto graph =
      ParseGml(ReadFile(std::string(SBM_CAVITY_DATA_DIR) + "/karate.gml"));
  RealExperimentSpec spec;
  spec.network = "karate";
  spec.alpha_grid = {0.0, 0.5};
  spec.restarts = 3;
  spec.seed = 4;
  const auto rows = RunRealNetworkExperiment(graph.graph, graph.labels, spec);
  ASSERT_EQ(rows.size(), 6u);
  for (const auto& row : rows) {
    EXPECT_TRUE(row.ok()) << row.status;
    EXPECT_GE(row.overlap, 0.5);
    EXPECT_LE(row.overlap, 1.0);
  }
  const auto header = RealExperimentCsvHeader(2);
  EXPECT_EQ(header.substr(0, 22), "network,mode,alpha,res");
  const auto line = FormatRealExperimentRow(spec, rows.front());
  EXPECT_EQ(std::count(line.begin(), line.end(), ','),
            std::count(header.begin(), header.end(), ','));
}

TEST(RealNetworkTest, EMModeFlagsOneBestRunPerAlpha) {
  const auto graph =
      ParseGml(ReadFile(std::string(SBM_CAVITY_DATA_DIR) + "/karate.gml"));
  RealExperimentSpec spec;
  spec.alpha_grid = {0.0, 0.3};
  spec.source = ParamSource::kEM;
  spec.restarts = 2;
  spec.em.max_em_iters = 10;
  const auto rows = RunRealNetworkExperiment(graph.graph, graph.labels, spec);
  int best_at_zero = 0, best_at_point3 = 0, seeded = 0;
  for (const auto& row : rows) {
    if (row.best) (row.alpha == 0.0 ? best_at_zero : best_at_point3)++;
    seeded += row.from_seed_edges;
  }
  EXPECT_EQ(best_at_zero, 1);
  EXPECT_EQ(best_at_point3, 1);
  EXPECT_EQ(seeded, 1);  // only alpha = 0.3 reveals labels
}

}  // namespace
}  // namespace sbm_cavity
