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

// Belief propagation for the sparse stochastic block model with revealed
// (pinned) nodes.
//
// Messages and marginals follow the cavity equations
//
//   psi^{i->l}_a  ~  q_a exp(-h_a) prod_{j in di \ l} sum_b c_ab psi^{j->i}_b
//   psi^i_a       ~  q_a exp(-h_a) prod_{j in di}     sum_b c_ab psi^{j->i}_b
//   h_a           =  (1/n) sum_i sum_b c_ab psi^i_b
//
// where the field h accounts for the non-edges: each absent pair contributes
// a factor (1 - c_ab / n) ~ exp(-c_ab / n), which aggregates into exp(-h_a).
// Revealed nodes send and hold the point mass on their label.
//
// Fixed points are stationary points of
//
//   F = sum_{(ij)} log Z_ij - sum_i log Z_i
//   Z_ij = sum_ab c_ab psi^{i->j}_a psi^{j->i}_b
//   Z_i  = sum_a q^i_a exp(-h_a) prod_{j in di} sum_b c_ab psi^{j->i}_b
//
// with q^i = q for free nodes and the point mass for pinned ones. F is the
// Bethe free energy up to an additive constant; on a tree it equals -log Z
// of the measure prod_i q^i_{t_i} exp(-h_{t_i}) prod_{(ij)} c_{t_i t_j}.

#ifndef SBM_CAVITY_BELIEF_PROPAGATION_H_
#define SBM_CAVITY_BELIEF_PROPAGATION_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "sbm_cavity/block_model.h"
#include "sbm_cavity/graph.h"

namespace sbm_cavity {

enum class InitMode { kRandom, kFactorized, kPlanted };

const char* InitModeName(InitMode mode);
// Throws kUsage for names other than random / factorized / planted.
InitMode ParseInitMode(const std::string& name);

struct BPOptions {
  int max_sweeps = 2000;
  double tol = 1e-6;
  double damping = 0.0;
  InitMode init = InitMode::kRandom;
  double perturbation = 1e-6;  // noise amplitude for kFactorized
  // kRandom draws (1 - s) q + s u with u uniform on the simplex. s = 1 gives
  // fully random messages; those polarize so strongly after one sweep that
  // planted colorings freeze into glassy states far above the threshold where
  // weakly random messages recover the planted labels.
  double random_spread = 0.01;
  uint64_t seed = 0;
  // Keep the field at its initial value instead of adapting it. Used to
  // compare against exact enumeration under a prescribed h.
  bool freeze_field = false;

  // Throws kUsage on out-of-range values.
  void Validate() const;
};

// Messages live in one flat array indexed by directed edge: the message
// psi^{i->j} occupies [e * k, (e + 1) * k) with e = graph.directed_index(i, j).
struct BeliefState {
  int k = 0;
  std::vector<double> messages;
  std::vector<double> marginals;  // n * k
  std::vector<double> field;      // k
  LabelVector pinned;             // kUnknownLabel for free nodes
  int sweeps = 0;

  std::span<const double> message(int64_t e) const {
    return {messages.data() + e * k, static_cast<size_t>(k)};
  }
  std::span<double> message(int64_t e) {
    return {messages.data() + e * k, static_cast<size_t>(k)};
  }
  std::span<const double> marginal(NodeId i) const {
    return {marginals.data() + static_cast<int64_t>(i) * k,
            static_cast<size_t>(k)};
  }
  std::span<double> marginal(NodeId i) {
    return {marginals.data() + static_cast<int64_t>(i) * k,
            static_cast<size_t>(k)};
  }
  bool is_pinned(NodeId i) const { return pinned[i] != kUnknownLabel; }
};

struct BPResult {
  BeliefState state;
  bool converged = false;
  int sweeps_used = 0;
  double max_change = 0.0;  // L1 change in the final sweep
  double bethe_free_energy = 0.0;
  LabelVector predicted;
};

// Builds the initial state. Pinned nodes carry point masses in every mode;
// kPlanted requires `truth`. The field is computed from the initial
// marginals (which are drawn like the messages).
BeliefState InitMessages(const Graph& graph, const BlockModelParams& params,
                         const SeedSet& seeds, const BPOptions& options,
                         const LabelVector* truth = nullptr);

// Normalized update of psi^{i->l} from the current incoming messages and
// field, where `directed_edge` is the index of (i -> l). Does not modify the
// state. Throws kContradiction when every component vanishes.
std::vector<double> UpdateMessage(const BeliefState& state, const Graph& graph,
                                  const BlockModelParams& params,
                                  int64_t directed_edge);

// h_a = (1/n) sum_i sum_b c_ab psi^i_b from the stored marginals.
std::vector<double> RecomputeField(const BeliefState& state,
                                   const BlockModelParams& params);

// Normalized marginal of node i from its incoming messages; pinned nodes
// return their point mass. Throws kContradiction on a zero normalizer.
std::vector<double> ComputeMarginal(const BeliefState& state,
                                    const Graph& graph,
                                    const BlockModelParams& params, NodeId i);

// Asynchronous sweeps in a fresh random node order until the largest L1
// change of any message in a sweep drops below tol, or max_sweeps.
BPResult RunBP(const Graph& graph, const BlockModelParams& params,
               const SeedSet& seeds, const BPOptions& options,
               const LabelVector* truth = nullptr);

// Same, continuing from a prepared state (e.g. a warm start or a permuted
// copy). The node order still comes from options.seed.
BPResult RunBPFrom(const Graph& graph, const BlockModelParams& params,
                   BeliefState state, const BPOptions& options);

double BetheFreeEnergy(const BeliefState& state, const Graph& graph,
                       const BlockModelParams& params);

// Free energy of the factorized state: free messages equal q, pinned nodes
// keep their point masses, and h is the field of those marginals.
double FactorizedFreeEnergy(const Graph& graph, const BlockModelParams& params,
                            const SeedSet& seeds);
BeliefState FactorizedState(const Graph& graph, const BlockModelParams& params,
                            const SeedSet& seeds);

// Argmax of each marginal, lowest index on ties; pinned nodes keep their
// label.
LabelVector PredictLabels(const BeliefState& state);

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_BELIEF_PROPAGATION_H_
