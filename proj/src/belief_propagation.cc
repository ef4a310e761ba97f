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

#include "sbm_cavity/belief_propagation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "sbm_cavity/error.h"
#include "sbm_cavity/key_value.h"
#include "sbm_cavity/random.h"

namespace sbm_cavity {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Below this a linear-domain product is recomputed in the log domain.
constexpr double kUnderflowGuard = 1e-280;
constexpr double kMessageFloor = 1e-200;

// out_a = sum_b c_ab v_b. Two-valued matrices take the O(k) route
// out_a = c_in * v_a + c_out * sum_{b != a} v_b, with the excluded sum built
// from prefix and suffix sums. Forming sum(v) - v_a instead cancels to an
// exact zero once v_a rounds to one, which is fatal for colorings (c_in = 0).
class AffinityKernel {
 public:
  explicit AffinityKernel(const BlockModelParams& params)
      : params_(params),
        k_(params.k),
        two_valued_(params.is_two_valued()),
        c_in_(params.c(0, 0)),
        c_out_(params.k > 1 ? params.c(0, 1) : 0.0) {}

  void Apply(const double* v, double* out) const {
    if (two_valued_) {
      double before = 0.0;
      for (int a = 0; a < k_; ++a) {
        out[a] = before;
        before += v[a];
      }
      double after = 0.0;
      for (int a = k_ - 1; a >= 0; --a) {
        out[a] = c_in_ * v[a] + c_out_ * (out[a] + after);
        after += v[a];
      }
      return;
    }
    for (int a = 0; a < k_; ++a) {
      const double* row = params_.affinity.data() + a * k_;
      double total = 0.0;
      for (int b = 0; b < k_; ++b) total += row[b] * v[b];
      out[a] = total;
    }
  }

 private:
  const BlockModelParams& params_;
  int k_;
  bool two_valued_;
  double c_in_;
  double c_out_;
};

[[noreturn]] void Contradiction(const std::string& where) {
  throw Error(ErrorKind::kContradiction,
              "all components vanish at " + where +
                  " (revealed labels incompatible with the model)");
}

std::string EdgeName(const Graph& graph, int64_t e) {
  return "message " + std::to_string(graph.source(e)) + "->" +
         std::to_string(graph.target(e));
}

// Scales v so its largest entry is one; returns false if all are zero.
bool ScaleToMax(double* v, int k) {
  double largest = 0.0;
  for (int a = 0; a < k; ++a) largest = std::max(largest, v[a]);
  if (!(largest > 0.0)) return false;
  const double inv = 1.0 / largest;
  for (int a = 0; a < k; ++a) v[a] *= inv;
  return true;
}

// Rescales v by its sum when the sum leaves [1e-150, 1e150]; returns false
// if v is all zero.
bool KeepInRange(double* v, int k) {
  double total = 0.0;
  for (int a = 0; a < k; ++a) total += v[a];
  if (total >= 1e-150 && total <= 1e150) return true;
  if (!(total > 0.0)) return false;
  const double inv = 1.0 / total;
  for (int a = 0; a < k; ++a) v[a] *= inv;
  return true;
}

// Normalizes log-weights into probabilities; false if all are -inf.
bool NormalizeLog(const double* log_w, double* out, int k) {
  double top = kNegInf;
  for (int a = 0; a < k; ++a) top = std::max(top, log_w[a]);
  if (top == kNegInf) return false;
  double total = 0.0;
  for (int a = 0; a < k; ++a) {
    out[a] = std::exp(log_w[a] - top);
    total += out[a];
  }
  for (int a = 0; a < k; ++a) out[a] /= total;
  return true;
}

double LogSumExp(const double* log_w, int k) {
  double top = kNegInf;
  for (int a = 0; a < k; ++a) top = std::max(top, log_w[a]);
  if (top == kNegInf) return kNegInf;
  double total = 0.0;
  for (int a = 0; a < k; ++a) total += std::exp(log_w[a] - top);
  return top + std::log(total);
}

// Lifts components of a free node's message below kMessageFloor. Without it
// strongly polarized messages (colorings at large degree) underflow to exact
// point masses mid-run, and a node whose every group is excluded by some such
// neighbor reports a contradiction that exact arithmetic would not produce.
// Pinned nodes keep their exact zeros, so genuine contradictions remain.
void ApplyFloor(double* v, int k) {
  for (int a = 0; a < k; ++a) v[a] = std::max(v[a], kMessageFloor);
}

void PointMass(double* v, int k, Label label) {
  std::fill(v, v + k, 0.0);
  v[label] = 1.0;
}

// log q^i_a - h_a for node i.
void LogNodeWeight(const BeliefState& state, const BlockModelParams& params,
                   NodeId i, double* out) {
  const int k = state.k;
  for (int a = 0; a < k; ++a) {
    if (state.is_pinned(i)) {
      out[a] = a == state.pinned[i] ? -state.field[a] : kNegInf;
    } else {
      out[a] = params.q[a] > 0.0 ? std::log(params.q[a]) - state.field[a]
                                 : kNegInf;
    }
  }
}

// Log-domain cavity product for node i, skipping the neighbor slot `skip`
// (or none when skip < 0). Writes log weights into out.
void LogCavityProduct(const BeliefState& state, const Graph& graph,
                      const BlockModelParams& params,
                      const AffinityKernel& kernel, NodeId i, int skip,
                      double* out) {
  const int k = state.k;
  LogNodeWeight(state, params, i, out);
  std::vector<double> factor(k);
  const int64_t first = graph.first_out(i);
  for (int t = 0; t < graph.degree(i); ++t) {
    if (t == skip) continue;
    const int64_t incoming = graph.reverse(first + t);
    kernel.Apply(state.messages.data() + incoming * k, factor.data());
    for (int a = 0; a < k; ++a) {
      out[a] += factor[a] > 0.0 ? std::log(factor[a]) : kNegInf;
    }
  }
}

// Scratch space and the asynchronous per-node update.
class NodeUpdater {
 public:
  NodeUpdater(const Graph& graph, const BlockModelParams& params,
              const AffinityKernel& kernel, BeliefState& state,
              double damping)
      : graph_(graph),
        params_(params),
        kernel_(kernel),
        state_(state),
        k_(params.k),
        damping_(damping) {
    const size_t width = static_cast<size_t>(graph.max_degree()) + 1;
    factors_.resize(width * k_);
    prefix_.resize(width * k_);
    suffix_.resize(width * k_);
    fresh_.resize(k_);
    old_marginal_.resize(k_);
    delta_.resize(k_);
    delta_field_.resize(k_);
  }

  // Recomputes every outgoing message and the marginal of free node i.
  // Returns the largest L1 change among its outgoing messages.
  double Update(NodeId i, bool adapt_field) {
    const int k = k_;
    const int d = graph_.degree(i);
    const int64_t first = graph_.first_out(i);
    std::copy_n(state_.marginal(i).data(), k, old_marginal_.data());

    // Node weight q_a exp(-h_a), shifted by min h for range.
    double* base = prefix_.data();
    const double h_min =
        *std::min_element(state_.field.begin(), state_.field.end());
    for (int a = 0; a < k; ++a) {
      base[a] = params_.q[a] * std::exp(-(state_.field[a] - h_min));
    }
    bool linear_ok = ScaleToMax(base, k);

    // Factors are bounded by max c_ab, so only the running products need
    // rescaling, and only when they drift far from one.
    for (int t = 0; t < d; ++t) {
      kernel_.Apply(state_.messages.data() + graph_.reverse(first + t) * k,
                    factors_.data() + t * k);
    }
    // prefix_[t] = base * f_0 ... f_{t-1}, suffix_[t] = f_t ... f_{d-1}.
    for (int t = 0; t < d && linear_ok; ++t) {
      const double* prev = prefix_.data() + t * k;
      const double* f = factors_.data() + t * k;
      double* next = prefix_.data() + (t + 1) * k;
      for (int a = 0; a < k; ++a) next[a] = prev[a] * f[a];
      linear_ok = KeepInRange(next, k);
    }
    std::fill_n(suffix_.data() + d * k, k, 1.0);
    for (int t = d - 1; t >= 0 && linear_ok; --t) {
      const double* after = suffix_.data() + (t + 1) * k;
      const double* f = factors_.data() + t * k;
      double* here = suffix_.data() + t * k;
      for (int a = 0; a < k; ++a) here[a] = f[a] * after[a];
      linear_ok = KeepInRange(here, k);
    }

    double max_change = 0.0;
    for (int t = 0; t < d; ++t) {
      ComputeOutgoing(i, t, linear_ok);
      double* stored = state_.messages.data() + (first + t) * k;
      double change = 0.0;
      for (int a = 0; a < k; ++a) {
        const double updated =
            damping_ > 0.0 ? (1.0 - damping_) * fresh_[a] + damping_ * stored[a]
                           : fresh_[a];
        change += std::abs(updated - stored[a]);
        stored[a] = updated;
      }
      max_change = std::max(max_change, change);
    }

    ComputeMarginal(i, linear_ok);
    double* marginal = state_.marginal(i).data();
    std::copy_n(fresh_.data(), k, marginal);

    if (adapt_field) {
      const double inv_n = 1.0 / graph_.num_nodes();
      for (int a = 0; a < k; ++a) delta_[a] = marginal[a] - old_marginal_[a];
      kernel_.Apply(delta_.data(), delta_field_.data());
      for (int a = 0; a < k; ++a) state_.field[a] += inv_n * delta_field_[a];
    }
    return max_change;
  }

 private:
  void ComputeOutgoing(NodeId i, int t, bool linear_ok) {
    const int k = k_;
    if (linear_ok) {
      const double* before = prefix_.data() + t * k;
      const double* after = suffix_.data() + (t + 1) * k;
      double total = 0.0;
      for (int a = 0; a < k; ++a) {
        fresh_[a] = before[a] * after[a];
        total += fresh_[a];
      }
      if (total > kUnderflowGuard) {
        const double inv = 1.0 / total;
        for (int a = 0; a < k; ++a) fresh_[a] *= inv;
        ApplyFloor(fresh_.data(), k);
        return;
      }
    }
    std::vector<double> log_w(k);
    LogCavityProduct(state_, graph_, params_, kernel_, i, t, log_w.data());
    if (!NormalizeLog(log_w.data(), fresh_.data(), k)) {
      Contradiction(EdgeName(graph_, graph_.first_out(i) + t));
    }
    ApplyFloor(fresh_.data(), k);
  }

  void ComputeMarginal(NodeId i, bool linear_ok) {
    const int k = k_;
    if (linear_ok) {
      const double* full = prefix_.data() + graph_.degree(i) * k;
      double total = 0.0;
      for (int a = 0; a < k; ++a) total += full[a];
      if (total > kUnderflowGuard) {
        for (int a = 0; a < k; ++a) fresh_[a] = full[a] / total;
        return;
      }
    }
    std::vector<double> log_w(k);
    LogCavityProduct(state_, graph_, params_, kernel_, i, -1, log_w.data());
    if (!NormalizeLog(log_w.data(), fresh_.data(), k)) {
      Contradiction("marginal of node " + std::to_string(i));
    }
  }

  const Graph& graph_;
  const BlockModelParams& params_;
  const AffinityKernel& kernel_;
  BeliefState& state_;
  int k_;
  double damping_;
  std::vector<double> factors_;
  std::vector<double> prefix_;
  std::vector<double> suffix_;
  std::vector<double> fresh_;
  std::vector<double> old_marginal_;
  std::vector<double> delta_;
  std::vector<double> delta_field_;
};

// The random node order defeats the cache; start loading the next node's
// incoming messages while the current one is processed.
void Prefetch(const Graph& graph, const BeliefState& state, NodeId i) {
  const int64_t first = graph.first_out(i);
  const int d = graph.degree(i);
  const double* base = state.messages.data();
  for (int t = 0; t < d; ++t) {
    __builtin_prefetch(base + graph.reverse(first + t) * state.k);
  }
  __builtin_prefetch(base + first * state.k, 1);
  __builtin_prefetch(state.marginals.data() + static_cast<int64_t>(i) * state.k,
                     1);
}

void CheckSeeds(const SeedSet& seeds, int k, NodeId n) {
  for (const auto& [node, label] : seeds.revealed) {
    if (node < 0 || node >= n) {
      throw Error(ErrorKind::kRange,
                  "revealed node " + std::to_string(node) + " outside graph");
    }
    if (label < 0 || label >= k) {
      throw Error(ErrorKind::kRange, "revealed label " +
                                         std::to_string(label) +
                                         " outside 0.." +
                                         std::to_string(k - 1));
    }
  }
}

}  // namespace

const char* InitModeName(InitMode mode) {
  switch (mode) {
    case InitMode::kRandom:
      return "random";
    case InitMode::kFactorized:
      return "factorized";
    case InitMode::kPlanted:
      return "planted";
  }
  return "random";
}

InitMode ParseInitMode(const std::string& name) {
  if (name == "random") return InitMode::kRandom;
  if (name == "factorized") return InitMode::kFactorized;
  if (name == "planted") return InitMode::kPlanted;
  throw Error(ErrorKind::kUsage, "unknown init mode '" + name +
                                     "' (expected random, factorized or "
                                     "planted)");
}

void BPOptions::Validate() const {
  if (max_sweeps < 1) throw Error(ErrorKind::kUsage, "max_sweeps must be >= 1");
  if (!(tol > 0.0)) throw Error(ErrorKind::kUsage, "tol must be > 0");
  if (!(damping >= 0.0 && damping < 1.0)) {
    throw Error(ErrorKind::kUsage, "damping must lie in [0, 1)");
  }
  if (!(random_spread > 0.0 && random_spread <= 1.0)) {
    throw Error(ErrorKind::kUsage, "random_spread must lie in (0, 1]");
  }
  if (!(perturbation >= 0.0)) {
    throw Error(ErrorKind::kUsage, "perturbation must be >= 0");
  }
}

BeliefState InitMessages(const Graph& graph, const BlockModelParams& params,
                         const SeedSet& seeds, const BPOptions& options,
                         const LabelVector* truth) {
  params.Validate();
  options.Validate();
  const int k = params.k;
  const NodeId n = graph.num_nodes();
  CheckSeeds(seeds, k, n);
  if (options.init == InitMode::kPlanted) {
    if (truth == nullptr || truth->size() != static_cast<size_t>(n)) {
      throw Error(ErrorKind::kUsage, "planted init needs the true labels");
    }
    for (Label t : *truth) {
      if (t < 0 || t >= k) {
        throw Error(ErrorKind::kUsage,
                    "planted init needs a complete truth with labels < k");
      }
    }
  }

  BeliefState state;
  state.k = k;
  state.pinned = seeds.Pinning(n);
  state.messages.resize(static_cast<size_t>(graph.num_directed_edges()) * k);
  state.marginals.resize(static_cast<size_t>(n) * k);
  Rng rng(DeriveSeed(options.seed, {0}));

  auto draw = [&](double* v, NodeId owner) {
    switch (options.init) {
      case InitMode::kRandom: {
        // Uniform on the simplex (normalized Exp(1) variates), pulled toward q.
        double total = 0.0;
        for (int a = 0; a < k; ++a) {
          v[a] = -std::log(1.0 - UniformUnit(rng));
          total += v[a];
        }
        const double s = options.random_spread;
        for (int a = 0; a < k; ++a) {
          v[a] = (1.0 - s) * params.q[a] + s * v[a] / total;
        }
        break;
      }
      case InitMode::kFactorized: {
        double total = 0.0;
        for (int a = 0; a < k; ++a) {
          double value = params.q[a];
          if (options.perturbation > 0.0) {
            value += options.perturbation * (2.0 * UniformUnit(rng) - 1.0);
          }
          v[a] = std::max(value, 0.0);
          total += v[a];
        }
        for (int a = 0; a < k; ++a) v[a] /= total;
        break;
      }
      case InitMode::kPlanted:
        PointMass(v, k, (*truth)[owner]);
        break;
    }
  };

  for (NodeId i = 0; i < n; ++i) {
    const int64_t first = graph.first_out(i);
    for (int t = 0; t < graph.degree(i); ++t) {
      double* v = state.messages.data() + (first + t) * k;
      if (state.is_pinned(i)) {
        PointMass(v, k, state.pinned[i]);
      } else {
        draw(v, i);
      }
    }
    double* marginal = state.marginal(i).data();
    if (state.is_pinned(i)) {
      PointMass(marginal, k, state.pinned[i]);
    } else {
      draw(marginal, i);
    }
  }
  state.field = RecomputeField(state, params);
  return state;
}

std::vector<double> UpdateMessage(const BeliefState& state, const Graph& graph,
                                  const BlockModelParams& params,
                                  int64_t directed_edge) {
  const NodeId i = graph.source(directed_edge);
  const int k = state.k;
  std::vector<double> out(k);
  if (state.is_pinned(i)) {
    PointMass(out.data(), k, state.pinned[i]);
    return out;
  }
  const AffinityKernel kernel(params);
  std::vector<double> log_w(k);
  const int skip = static_cast<int>(directed_edge - graph.first_out(i));
  LogCavityProduct(state, graph, params, kernel, i, skip, log_w.data());
  if (!NormalizeLog(log_w.data(), out.data(), k)) {
    Contradiction(EdgeName(graph, directed_edge));
  }
  ApplyFloor(out.data(), k);
  return out;
}

std::vector<double> RecomputeField(const BeliefState& state,
                                   const BlockModelParams& params) {
  const int k = state.k;
  const auto n = static_cast<int64_t>(state.marginals.size() / k);
  std::vector<double> totals(k, 0.0);
  for (int64_t i = 0; i < n; ++i) {
    const double* psi = state.marginals.data() + i * k;
    for (int b = 0; b < k; ++b) totals[b] += psi[b];
  }
  const AffinityKernel kernel(params);
  std::vector<double> field(k, 0.0);
  if (n == 0) return field;
  kernel.Apply(totals.data(), field.data());
  for (double& h : field) h /= static_cast<double>(n);
  return field;
}

std::vector<double> ComputeMarginal(const BeliefState& state,
                                    const Graph& graph,
                                    const BlockModelParams& params, NodeId i) {
  const int k = state.k;
  std::vector<double> out(k);
  if (state.is_pinned(i)) {
    PointMass(out.data(), k, state.pinned[i]);
    return out;
  }
  const AffinityKernel kernel(params);
  std::vector<double> log_w(k);
  LogCavityProduct(state, graph, params, kernel, i, -1, log_w.data());
  if (!NormalizeLog(log_w.data(), out.data(), k)) {
    Contradiction("marginal of node " + std::to_string(i));
  }
  return out;
}

BPResult RunBP(const Graph& graph, const BlockModelParams& params,
               const SeedSet& seeds, const BPOptions& options,
               const LabelVector* truth) {
  return RunBPFrom(graph, params,
                   InitMessages(graph, params, seeds, options, truth),
                   options);
}

BPResult RunBPFrom(const Graph& graph, const BlockModelParams& params,
                   BeliefState state, const BPOptions& options) {
  params.Validate();
  options.Validate();
  if (state.k != params.k ||
      state.messages.size() !=
          static_cast<size_t>(graph.num_directed_edges()) * params.k ||
      state.pinned.size() != static_cast<size_t>(graph.num_nodes())) {
    throw Error(ErrorKind::kUsage, "belief state does not match the graph");
  }
  const NodeId n = graph.num_nodes();
  const AffinityKernel kernel(params);
  NodeUpdater updater(graph, params, kernel, state, options.damping);
  Rng order_rng(DeriveSeed(options.seed, {1}));
  std::vector<NodeId> order(static_cast<size_t>(n));
  std::iota(order.begin(), order.end(), 0);

  BPResult result;
  const bool adapt = !options.freeze_field;
  for (int sweep = 0; sweep < options.max_sweeps; ++sweep) {
    Shuffle(order.begin(), order.end(), order_rng);
    double max_change = 0.0;
    for (size_t p = 0; p < order.size(); ++p) {
      if (p + 1 < order.size()) Prefetch(graph, state, order[p + 1]);
      const NodeId i = order[p];
      if (state.is_pinned(i)) continue;
      max_change = std::max(max_change, updater.Update(i, adapt));
    }
    if (adapt) state.field = RecomputeField(state, params);
    ++state.sweeps;
    result.sweeps_used = sweep + 1;
    result.max_change = max_change;
    if (max_change < options.tol) {
      result.converged = true;
      break;
    }
  }
  result.bethe_free_energy = BetheFreeEnergy(state, graph, params);
  result.predicted = PredictLabels(state);
  result.state = std::move(state);
  return result;
}

double BetheFreeEnergy(const BeliefState& state, const Graph& graph,
                       const BlockModelParams& params) {
  const int k = state.k;
  const AffinityKernel kernel(params);
  std::vector<double> factor(k);
  double edge_term = 0.0;
  for (const auto& e : graph.edges()) {
    const int64_t forward = *graph.directed_index(e.u, e.v);
    const int64_t backward = graph.reverse(forward);
    kernel.Apply(state.messages.data() + backward * k, factor.data());
    double z = 0.0;
    const double* psi = state.messages.data() + forward * k;
    for (int a = 0; a < k; ++a) z += psi[a] * factor[a];
    if (!(z > 0.0)) {
      Contradiction("edge " + std::to_string(e.u) + "-" + std::to_string(e.v));
    }
    edge_term += std::log(z);
  }
  double node_term = 0.0;
  std::vector<double> log_w(k);
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    LogCavityProduct(state, graph, params, kernel, i, -1, log_w.data());
    const double log_z = LogSumExp(log_w.data(), k);
    if (log_z == kNegInf) Contradiction("node " + std::to_string(i));
    node_term += log_z;
  }
  return edge_term - node_term;
}

BeliefState FactorizedState(const Graph& graph, const BlockModelParams& params,
                            const SeedSet& seeds) {
  BPOptions options;
  options.init = InitMode::kFactorized;
  options.perturbation = 0.0;
  return InitMessages(graph, params, seeds, options);
}

double FactorizedFreeEnergy(const Graph& graph, const BlockModelParams& params,
                            const SeedSet& seeds) {
  return BetheFreeEnergy(FactorizedState(graph, params, seeds), graph, params);
}

LabelVector PredictLabels(const BeliefState& state) {
  const auto n = static_cast<NodeId>(state.pinned.size());
  LabelVector labels(static_cast<size_t>(n));
  for (NodeId i = 0; i < n; ++i) {
    if (state.is_pinned(i)) {
      labels[i] = state.pinned[i];
      continue;
    }
    const auto psi = state.marginal(i);
    labels[i] = static_cast<Label>(
        std::max_element(psi.begin(), psi.end()) - psi.begin());
  }
  return labels;
}

}  // namespace sbm_cavity
