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

// Phase-diagram sweeps over synthetic block models, transition-line
// detection, and semisupervised runs on real networks.

#ifndef SBM_CAVITY_EXPERIMENTS_H_
#define SBM_CAVITY_EXPERIMENTS_H_

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "sbm_cavity/belief_propagation.h"
#include "sbm_cavity/block_model.h"
#include "sbm_cavity/em_learner.h"
#include "sbm_cavity/graph.h"

namespace sbm_cavity {

enum class SweepModel {
  kPartitionEpsilon,  // planted partition, fixed c, epsilon grid
  kPartitionDegree,   // planted partition, fixed epsilon, c grid
  kColoring,          // planted coloring, c grid
};

const char* SweepModelName(SweepModel model);
SweepModel ParseSweepModel(const std::string& name);

struct SweepSpec {
  SweepModel model = SweepModel::kColoring;
  int k = 2;
  double c = 0.0;        // fixed degree for kPartitionEpsilon
  double epsilon = 0.0;  // fixed ratio for kPartitionDegree
  std::vector<double> grid;  // epsilon or c values, strictly increasing
  std::vector<double> alpha_grid;
  NodeId n = 10000;
  int seeds = 1;
  std::vector<InitMode> inits{InitMode::kRandom};
  BPOptions bp;
  int threads = 1;
  uint64_t seed = 0;

  // Throws kUsage when grids are empty or not increasing, etc.
  void Validate() const;

  // Parses the key=value sweep document:
  //   model = planted_coloring | planted_partition_epsilon |
  //           planted_partition_degree
  //   k = 5
  //   c_grid = 12:20:0.5        (or c = 3 with epsilon_grid = [...])
  //   alpha_grid = [0, 0.02, 0.04]
  //   n = 100000
  //   seeds = 3
  //   inits = [random, planted]
  //   tol / max_sweeps / damping / perturbation / random_spread / seed /
  //   threads
  static SweepSpec Parse(std::string_view text);
  std::string Format() const;

  BlockModelParams ParamsAt(double grid_value) const;
};

struct SweepPoint {
  size_t grid_index = 0;
  size_t alpha_index = 0;
  double c = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
  int seed_index = 0;
  InitMode init = InitMode::kRandom;
  double overlap = 0.0;
  double overlap_unrevealed = 0.0;
  int sweeps = 0;
  bool converged = false;
  double free_energy = 0.0;
  double free_energy_factorized = 0.0;
  double runtime_ms = 0.0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

inline constexpr std::string_view kSweepCsvHeader =
    "model,k,n,c,epsilon,alpha,seed,init,overlap,overlap_unrevealed,sweeps,"
    "converged,free_energy,free_energy_factorized,runtime_ms,status";

std::string FormatSweepRow(const SweepSpec& spec, const SweepPoint& point);

// Parses rows written by FormatSweepRow (header line required).
std::vector<SweepPoint> ParseSweepCsv(std::string_view text);

// Every grid value x alpha x seed generates one instance, reveals labels, and
// runs BP once per init mode on that same instance. Instance and revealed set
// depend only on (grid value, seed), so revealed sets are nested in alpha.
// Rows arrive at `on_row` in canonical order (grid, alpha, seed, init) as
// soon as the prefix is complete; failures are recorded in the row status.
std::vector<SweepPoint> RunSweep(
    const SweepSpec& spec,
    const std::function<void(const SweepPoint&)>& on_row = {});

struct TransitionThresholds {
  double delta = 0.05;
};

// Baseline accuracy with a fraction alpha of labels revealed and the rest
// guessed at chance: alpha + (1 - alpha) / k.
double ChanceLevel(int k, double alpha);

struct TransitionEstimate {
  double alpha = 0.0;
  double c_ks = 0.0;   // random init joins the accurate branch
  double c_sp = 0.0;   // accurate branch appears (lower spinodal)
  double c_det = 0.0;  // free-energy crossing of the two branches
  bool ks_valid = false;
  bool sp_valid = false;
  bool det_valid = false;
  bool ks_saturated = false;  // above chance already at the grid minimum
  bool sp_saturated = false;
  bool merged = false;  // curves leave chance without ever splitting

  bool all_valid() const { return ks_valid && sp_valid && det_valid; }
};

// Medians over seeds give a random-init and a planted-init curve. The
// accurate branch coexists with the low one where planted beats random by
// more than delta: c_sp is the first such grid point, c_ks the next point
// where the curves meet again. c_det interpolates the zero of the median
// per-instance gap F(planted) - F(low branch) between them, the low branch
// being the factorized state at alpha = 0 and the random-init run otherwise.
// Points must share one alpha (kUsage otherwise), lie on a c grid, and
// include random and planted inits.
TransitionEstimate DetectTransitions(const std::vector<SweepPoint>& points,
                                     int k,
                                     const TransitionThresholds& thresholds);

// Groups by alpha and runs DetectTransitions on each group.
std::vector<TransitionEstimate> DetectAllTransitions(
    const std::vector<SweepPoint>& points, int k,
    const TransitionThresholds& thresholds);

inline constexpr std::string_view kTransitionCsvHeader =
    "alpha,c_ks,c_sp,c_det,valid_flags";
std::string FormatTransitionRow(const TransitionEstimate& estimate);

// Median over seeds of a per-point quantity for one init mode, indexed by
// grid position. Failed rows are skipped; positions without rows are NaN.
std::vector<double> MedianCurve(const std::vector<SweepPoint>& points,
                                InitMode init, size_t grid_size,
                                double SweepPoint::*field);

enum class ParamSource { kGiven, kEM };

struct RealExperimentSpec {
  std::string network = "network";
  int k = 2;
  std::vector<double> alpha_grid;
  ParamSource source = ParamSource::kGiven;
  int restarts = 10;
  uint64_t seed = 0;
  BPOptions bp;
  EMOptions em;
  int threads = 1;
};

struct RealExperimentRow {
  double alpha = 0.0;
  int restart = 0;
  bool from_seed_edges = false;
  bool best = false;
  double overlap = 0.0;
  double overlap_unrevealed = 0.0;
  double free_energy = 0.0;
  int sweeps = 0;
  bool converged = false;
  BlockModelParams params;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

// kGiven: parameters fit to the full truth, one reveal + random-init BP run
// per restart. kEM: per alpha one revealed set and an EM multistart seeded
// from the known edges; one row per EM run.
std::vector<RealExperimentRow> RunRealNetworkExperiment(
    const Graph& graph, const LabelVector& truth,
    const RealExperimentSpec& spec);

std::string RealExperimentCsvHeader(int k);
std::string FormatRealExperimentRow(const RealExperimentSpec& spec,
                                    const RealExperimentRow& row);

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_EXPERIMENTS_H_
