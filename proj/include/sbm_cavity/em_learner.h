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

// Expectation-maximization of the block-model parameters around BP.
//
// E-step: run BP to a fixed point under the current (q, c).
// M-step: the stationarity conditions of the Bethe free energy,
//
//   q_a  <- (1/n) sum_i psi^i_a
//   c_ab <- (1 / (n q_a q_b)) sum_{(ij)} [mu_ij(a,b) + mu_ij(b,a)]
//   mu_ij(a,b) = c_ab psi^{i->j}_a psi^{j->i}_b / Z_ij
//
// Revealed nodes enter both sums with their point masses. These updates keep
// sum_a q_a = 1 and sum_ab q_a q_b c_ab = 2m/n exactly.

#ifndef SBM_CAVITY_EM_LEARNER_H_
#define SBM_CAVITY_EM_LEARNER_H_

#include <optional>
#include <string>
#include <vector>

#include "sbm_cavity/belief_propagation.h"
#include "sbm_cavity/block_model.h"
#include "sbm_cavity/error.h"
#include "sbm_cavity/graph.h"

namespace sbm_cavity {

struct EMOptions {
  int max_em_iters = 50;
  double param_tol = 1e-4;
  bool hold_q = false;
  BPOptions bp;
  int threads = 1;  // em_multistart only
};

struct EMIteration {
  BlockModelParams params;  // parameters the E-step ran with
  double free_energy = 0.0;
  std::optional<double> overlap;
  int bp_sweeps = 0;
  bool bp_converged = false;
};

using EMTrace = std::vector<EMIteration>;

struct EMResult {
  BlockModelParams params;
  BPResult bp;
  EMTrace trace;
  bool converged = false;
};

// Raised when an M-step drives some q_a to zero; carries the trace so far.
class GroupDeathError : public Error {
 public:
  GroupDeathError(const std::string& message, EMTrace trace)
      : Error(ErrorKind::kGroupDeath, message), trace_(std::move(trace)) {}
  const EMTrace& trace() const { return trace_; }

 private:
  EMTrace trace_;
};

// One M-step from a converged state. With hold_q the priors are kept and
// only c is re-estimated (against the held q).
BlockModelParams MStep(const Graph& graph, const BlockModelParams& params,
                       const BeliefState& state, bool hold_q);

// Alternates E and M steps from `init` until every |delta q_a| and
// |delta c_ab| falls below param_tol, or max_em_iters. The E-step warm-starts
// from the previous fixed point. `truth` only feeds the trace's overlap.
EMResult EMFit(const Graph& graph, const SeedSet& seeds,
               const BlockModelParams& init, const EMOptions& options,
               const LabelVector* truth = nullptr);

struct EMRun {
  BlockModelParams init;
  bool from_seed_edges = false;
  std::optional<EMResult> result;
  std::string error;  // set when result is empty
};

struct MultiStartResult {
  size_t best = 0;  // index into runs
  std::vector<EMRun> runs;

  const EMResult& best_result() const { return *runs[best].result; }
};

// Random parameter draw for restarts: q_a ~ U(0.5, 1.5) normalized, c_ab ~
// U(0.5, 1.5) symmetric, rescaled to the observed average degree 2m/n.
BlockModelParams RandomInitialParams(const Graph& graph, int k, uint64_t seed);

// EMFit from `restarts` random parameter draws, plus the known-edge estimate
// first when at least two labels are revealed. Restart r uses streams
// derived from (seed, r). Picks the lowest final free energy. Throws when
// every run fails.
MultiStartResult EMMultiStart(const Graph& graph, const SeedSet& seeds, int k,
                              int restarts, uint64_t seed,
                              const EMOptions& options,
                              const LabelVector* truth = nullptr);

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_EM_LEARNER_H_
