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

#include "sbm_cavity/em_learner.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sbm_cavity/key_value.h"
#include "sbm_cavity/overlap.h"
#include "sbm_cavity/parallel.h"
#include "sbm_cavity/random.h"

namespace sbm_cavity {
namespace {

// Smallest prior a group may keep before it counts as dead.
constexpr double kDeadGroup = 1e-12;

double MaxParamChange(const BlockModelParams& before,
                      const BlockModelParams& after) {
  double change = 0.0;
  for (size_t a = 0; a < before.q.size(); ++a) {
    change = std::max(change, std::abs(after.q[a] - before.q[a]));
  }
  for (size_t idx = 0; idx < before.affinity.size(); ++idx) {
    change = std::max(change,
                      std::abs(after.affinity[idx] - before.affinity[idx]));
  }
  return change;
}

}  // namespace

BlockModelParams MStep(const Graph& graph, const BlockModelParams& params,
                       const BeliefState& state, bool hold_q) {
  const int k = params.k;
  const NodeId n = graph.num_nodes();
  BlockModelParams next;
  next.k = k;
  next.q = params.q;
  if (!hold_q) {
    std::fill(next.q.begin(), next.q.end(), 0.0);
    for (NodeId i = 0; i < n; ++i) {
      const auto psi = state.marginal(i);
      for (int a = 0; a < k; ++a) next.q[a] += psi[a];
    }
    for (double& qa : next.q) qa /= n;
  }
  for (int a = 0; a < k; ++a) {
    if (!(next.q[a] > kDeadGroup)) {
      throw Error(ErrorKind::kGroupDeath,
                  "group " + std::to_string(a) + " lost all its weight");
    }
  }

  // joint[a * k + b] = sum over edges of mu_ij(a, b).
  std::vector<double> joint(static_cast<size_t>(k) * k, 0.0);
  std::vector<double> local(static_cast<size_t>(k) * k);
  for (const auto& e : graph.edges()) {
    const int64_t forward = *graph.directed_index(e.u, e.v);
    const auto from_u = state.message(forward);
    const auto from_v = state.message(graph.reverse(forward));
    double z = 0.0;
    for (int a = 0; a < k; ++a) {
      for (int b = 0; b < k; ++b) {
        local[a * k + b] = params.c(a, b) * from_u[a] * from_v[b];
        z += local[a * k + b];
      }
    }
    if (!(z > 0.0)) {
      throw Error(ErrorKind::kContradiction,
                  "edge " + std::to_string(e.u) + "-" + std::to_string(e.v) +
                      " has zero weight under the current parameters");
    }
    for (size_t idx = 0; idx < joint.size(); ++idx) joint[idx] += local[idx] / z;
  }
  next.affinity.assign(static_cast<size_t>(k) * k, 0.0);
  // Fill one triangle and mirror it so c stays exactly symmetric.
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      next.c(a, b) = (joint[a * k + b] + joint[b * k + a]) /
                     (n * next.q[a] * next.q[b]);
      next.c(b, a) = next.c(a, b);
    }
  }
  return next;
}

EMResult EMFit(const Graph& graph, const SeedSet& seeds,
               const BlockModelParams& init, const EMOptions& options,
               const LabelVector* truth) {
  init.Validate();
  if (options.max_em_iters < 1 || !(options.param_tol > 0.0)) {
    throw Error(ErrorKind::kUsage,
                "EM needs max_em_iters >= 1 and param_tol > 0");
  }
  const OverlapMode mode = DefaultOverlapMode(seeds);
  EMResult result;
  BlockModelParams params = init;
  std::optional<BeliefState> warm;
  for (int iter = 0; iter < options.max_em_iters; ++iter) {
    BPOptions bp = options.bp;
    bp.seed = DeriveSeed(options.bp.seed, {static_cast<uint64_t>(iter)});
    BPResult run;
    if (warm) {
      warm->field = RecomputeField(*warm, params);
      run = RunBPFrom(graph, params, std::move(*warm), bp);
    } else {
      run = RunBP(graph, params, seeds, bp, truth);
    }

    EMIteration record;
    record.params = params;
    record.free_energy = run.bethe_free_energy;
    record.bp_sweeps = run.sweeps_used;
    record.bp_converged = run.converged;
    if (truth != nullptr) {
      record.overlap = Overlap(run.predicted, *truth, params.k, mode);
    }
    result.trace.push_back(record);

    BlockModelParams next;
    try {
      next = MStep(graph, params, run.state, options.hold_q);
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::kGroupDeath) {
        throw GroupDeathError(
            std::string(e.what()) + " at EM iteration " + std::to_string(iter),
            result.trace);
      }
      throw;
    }
    const double change = MaxParamChange(params, next);
    warm = run.state;
    result.bp = std::move(run);
    params = std::move(next);
    if (change < options.param_tol) {
      result.converged = true;
      break;
    }
  }
  result.params = std::move(params);
  return result;
}

BlockModelParams RandomInitialParams(const Graph& graph, int k,
                                     uint64_t seed) {
  if (k < 1) throw Error(ErrorKind::kParameter, "k must be at least 1");
  if (graph.num_edges() == 0) {
    throw Error(ErrorKind::kEstimation, "graph has no edges");
  }
  Rng rng(seed);
  BlockModelParams params;
  params.k = k;
  params.q.resize(k);
  double total = 0.0;
  for (double& qa : params.q) {
    qa = 0.5 + UniformUnit(rng);
    total += qa;
  }
  for (double& qa : params.q) qa /= total;
  params.affinity.assign(static_cast<size_t>(k) * k, 0.0);
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      const double value = 0.5 + UniformUnit(rng);
      params.c(a, b) = value;
      params.c(b, a) = value;
    }
  }
  const double target = 2.0 * graph.num_edges() / graph.num_nodes();
  const double scale = target / params.average_degree();
  for (double& value : params.affinity) value *= scale;
  return params;
}

MultiStartResult EMMultiStart(const Graph& graph, const SeedSet& seeds, int k,
                              int restarts, uint64_t seed,
                              const EMOptions& options,
                              const LabelVector* truth) {
  if (restarts < 1) throw Error(ErrorKind::kUsage, "restarts must be >= 1");
  MultiStartResult out;
  if (seeds.size() >= 2) {
    try {
      EMRun run;
      run.init = ParamsFromSeedEdges(graph, seeds, k);
      run.init.Validate();
      run.from_seed_edges = true;
      out.runs.push_back(std::move(run));
    } catch (const Error&) {
      // Not enough revealed structure; random draws only.
    }
  }
  for (int r = 0; r < restarts; ++r) {
    EMRun run;
    run.init = RandomInitialParams(
        graph, k, DeriveSeed(seed, {static_cast<uint64_t>(r), 0}));
    out.runs.push_back(std::move(run));
  }

  ParallelFor(out.runs.size(), options.threads, [&](size_t index) {
    EMRun& run = out.runs[index];
    EMOptions local = options;
    local.bp.seed = DeriveSeed(seed, {static_cast<uint64_t>(index), 1});
    try {
      run.result = EMFit(graph, seeds, run.init, local, truth);
    } catch (const Error& e) {
      run.error = std::string(ErrorKindName(e.kind())) + ": " + e.what();
    }
  });

  double best_energy = std::numeric_limits<double>::infinity();
  bool any = false;
  for (size_t index = 0; index < out.runs.size(); ++index) {
    const auto& run = out.runs[index];
    if (!run.result) continue;
    const double energy = run.result->bp.bethe_free_energy;
    if (!any || energy < best_energy) {
      best_energy = energy;
      out.best = index;
      any = true;
    }
  }
  if (!any) {
    throw Error(ErrorKind::kInfeasible,
                "all " + std::to_string(out.runs.size()) +
                    " EM runs failed; first: " + out.runs.front().error);
  }
  return out;
}

}  // namespace sbm_cavity
