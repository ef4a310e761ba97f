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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <unordered_set>

#include "sbm_cavity/error.h"
#include "sbm_cavity/key_value.h"
#include "sbm_cavity/random.h"

namespace sbm_cavity {
namespace {

[[noreturn]] void ParamFail(const std::string& what) {
  throw Error(ErrorKind::kParameter, what);
}

BlockModelParams TwoValued(int k, double c_in, double c_out) {
  BlockModelParams params;
  params.k = k;
  params.q.assign(k, 1.0 / k);
  params.affinity.assign(static_cast<size_t>(k) * k, c_out);
  for (int a = 0; a < k; ++a) params.c(a, a) = c_in;
  return params;
}

// Draws `count` distinct pairs among `num_pairs` candidates. `pair_at` maps a
// uniformly drawn candidate rank to its (u, v) nodes.
template <typename PairAt>
void SampleDistinctPairs(int64_t count, int64_t num_pairs, Rng& rng,
                         PairAt pair_at,
                         std::vector<std::pair<NodeId, NodeId>>& out) {
  if (count <= 0) return;
  if (2 * count > num_pairs) {
    // Dense block: select `count` ranks by a partial shuffle.
    std::vector<int64_t> ranks(static_cast<size_t>(num_pairs));
    std::iota(ranks.begin(), ranks.end(), 0);
    for (int64_t i = 0; i < count; ++i) {
      const auto j = i + static_cast<int64_t>(UniformIndex(
                             rng, static_cast<uint64_t>(num_pairs - i)));
      std::swap(ranks[i], ranks[j]);
      out.push_back(pair_at(ranks[i]));
    }
    return;
  }
  std::unordered_set<int64_t> chosen;
  chosen.reserve(static_cast<size_t>(count) * 2);
  while (static_cast<int64_t>(chosen.size()) < count) {
    const auto rank =
        static_cast<int64_t>(UniformIndex(rng, static_cast<uint64_t>(num_pairs)));
    if (chosen.insert(rank).second) out.push_back(pair_at(rank));
  }
}

}  // namespace

double BlockModelParams::average_degree() const {
  double total = 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) total += q[a] * q[b] * c(a, b);
  }
  return total;
}

bool BlockModelParams::is_two_valued() const {
  if (k < 1) return false;
  const double diag = c(0, 0);
  const double off = k > 1 ? c(0, 1) : 0.0;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (c(a, b) != (a == b ? diag : off)) return false;
    }
  }
  return true;
}

void BlockModelParams::Validate() const {
  if (k < 1) ParamFail("k must be at least 1");
  if (q.size() != static_cast<size_t>(k) ||
      affinity.size() != static_cast<size_t>(k) * k) {
    ParamFail("q must have k entries and c must be k x k");
  }
  double total = 0.0;
  for (double qa : q) {
    if (!(qa >= 0.0) || !std::isfinite(qa)) ParamFail("q must be >= 0");
    total += qa;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    ParamFail("q must sum to 1 (sum = " + FormatDouble(total) + ")");
  }
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      if (!(c(a, b) >= 0.0) || !std::isfinite(c(a, b))) {
        ParamFail("c entries must be finite and >= 0");
      }
      if (c(a, b) != c(b, a)) ParamFail("c must be symmetric");
    }
  }
  const double avg = average_degree();
  if (!(avg > 0.0) || !std::isfinite(avg)) {
    ParamFail("average degree must be finite and > 0");
  }
}

BlockModelParams PlantedPartitionParams(int k, double avg_degree,
                                        double epsilon,
                                        bool allow_disassortative) {
  if (k < 2) ParamFail("planted partition needs k >= 2");
  if (!(avg_degree > 0.0)) ParamFail("average degree must be > 0");
  if (!(epsilon >= 0.0) || (!allow_disassortative && epsilon > 1.0)) {
    ParamFail("epsilon must lie in [0, 1], got " + FormatDouble(epsilon));
  }
  const double c_in = k * avg_degree / (1.0 + (k - 1) * epsilon);
  return TwoValued(k, c_in, epsilon * c_in);
}

BlockModelParams PlantedColoringParams(int k, double avg_degree) {
  if (k < 2) ParamFail("planted coloring needs k >= 2");
  if (!(avg_degree > 0.0)) ParamFail("average degree must be > 0");
  return TwoValued(k, 0.0, k * avg_degree / (k - 1));
}

double KestenStigumEpsilon(int k, double avg_degree) {
  const double root = std::sqrt(avg_degree);
  return (root - 1.0) / (root + k - 1.0);
}

PlantedInstance SamplePlantedInstance(const BlockModelParams& params,
                                      NodeId n, uint64_t seed) {
  params.Validate();
  if (n < 2) ParamFail("n must be at least 2");
  for (double value : params.affinity) {
    if (value >= n) {
      ParamFail("c_ab = " + FormatDouble(value) + " >= n = " +
                std::to_string(n) + " is not a probability");
    }
  }
  const int k = params.k;
  Rng rng(seed);

  PlantedInstance instance;
  instance.params = params;
  instance.seed = seed;
  instance.truth.resize(n);
  std::vector<double> cumulative(k);
  std::partial_sum(params.q.begin(), params.q.end(), cumulative.begin());
  std::vector<std::vector<NodeId>> members(k);
  for (NodeId i = 0; i < n; ++i) {
    const double u = UniformUnit(rng) * cumulative.back();
    int a = static_cast<int>(
        std::upper_bound(cumulative.begin(), cumulative.end(), u) -
        cumulative.begin());
    a = std::min(a, k - 1);
    instance.truth[i] = a;
    members[a].push_back(i);
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  for (int a = 0; a < k; ++a) {
    for (int b = a; b < k; ++b) {
      const auto size_a = static_cast<int64_t>(members[a].size());
      const auto size_b = static_cast<int64_t>(members[b].size());
      const int64_t num_pairs =
          a == b ? size_a * (size_a - 1) / 2 : size_a * size_b;
      const double p = params.c(a, b) / n;
      if (num_pairs == 0 || p == 0.0) continue;
      std::binomial_distribution<int64_t> count_dist(num_pairs, p);
      const int64_t count = count_dist(rng);
      const auto& ma = members[a];
      const auto& mb = members[b];
      if (a == b) {
        // Rank r -> (x, y) with x < y via the triangular enumeration.
        SampleDistinctPairs(
            count, num_pairs, rng,
            [&](int64_t r) {
              auto y = static_cast<int64_t>(
                  (1.0 + std::sqrt(1.0 + 8.0 * static_cast<double>(r))) / 2.0);
              while (y * (y - 1) / 2 > r) --y;
              while ((y + 1) * y / 2 <= r) ++y;
              const int64_t x = r - y * (y - 1) / 2;
              return std::pair<NodeId, NodeId>(ma[x], ma[y]);
            },
            pairs);
      } else {
        SampleDistinctPairs(
            count, num_pairs, rng,
            [&](int64_t r) {
              return std::pair<NodeId, NodeId>(ma[r / size_b], mb[r % size_b]);
            },
            pairs);
      }
    }
  }
  instance.graph = Graph::FromPairs(n, pairs);
  return instance;
}

LabelVector SeedSet::Pinning(NodeId num_nodes) const {
  LabelVector pinned(static_cast<size_t>(num_nodes), kUnknownLabel);
  for (const auto& [node, label] : revealed) {
    if (node < 0 || node >= num_nodes) {
      throw Error(ErrorKind::kRange,
                  "revealed node " + std::to_string(node) + " outside graph");
    }
    pinned[node] = label;
  }
  return pinned;
}

SeedSet RevealLabels(const LabelVector& truth, double alpha, uint64_t seed) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    ParamFail("alpha must lie in [0, 1], got " + FormatDouble(alpha));
  }
  const auto n = static_cast<int64_t>(truth.size());
  // The small epsilon keeps e.g. 0.29 * 100 from flooring to 28.
  const auto count = std::min<int64_t>(
      n, static_cast<int64_t>(std::floor(alpha * n + 1e-9)));
  std::vector<NodeId> nodes(static_cast<size_t>(n));
  std::iota(nodes.begin(), nodes.end(), 0);
  Rng rng(seed);
  for (int64_t i = 0; i < count; ++i) {
    const auto j = i + static_cast<int64_t>(
                           UniformIndex(rng, static_cast<uint64_t>(n - i)));
    std::swap(nodes[i], nodes[j]);
  }
  nodes.resize(static_cast<size_t>(count));
  std::sort(nodes.begin(), nodes.end());

  SeedSet seeds;
  seeds.alpha_requested = alpha;
  seeds.revealed.reserve(nodes.size());
  for (NodeId node : nodes) {
    if (truth[node] == kUnknownLabel) {
      throw Error(ErrorKind::kRange, "cannot reveal node " +
                                         std::to_string(node) +
                                         " without a true label");
    }
    seeds.revealed.emplace_back(node, truth[node]);
  }
  return seeds;
}

SeedSet SeedSetFromLabels(const LabelVector& labels) {
  SeedSet seeds;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != kUnknownLabel) {
      seeds.revealed.emplace_back(static_cast<NodeId>(i), labels[i]);
    }
  }
  seeds.alpha_requested =
      labels.empty() ? 0.0
                     : static_cast<double>(seeds.revealed.size()) /
                           static_cast<double>(labels.size());
  return seeds;
}

BlockModelParams ParamsFromSeedEdges(const Graph& graph, const SeedSet& seeds,
                                     int k) {
  if (k < 1) ParamFail("k must be at least 1");
  if (seeds.size() < 2) {
    throw Error(ErrorKind::kEstimation,
                "need at least two revealed nodes to estimate parameters");
  }
  const NodeId n = graph.num_nodes();
  const LabelVector pinned = seeds.Pinning(n);
  std::vector<double> group_size(k, 0.0);
  for (const auto& [node, label] : seeds.revealed) {
    if (label < 0 || label >= k) {
      throw Error(ErrorKind::kRange,
                  "revealed label " + std::to_string(label) + " >= k");
    }
    group_size[label] += 1.0;
  }

  std::vector<double> edge_count(static_cast<size_t>(k) * k, 0.0);
  int64_t observed = 0;
  for (const auto& e : graph.edges()) {
    const Label a = pinned[e.u];
    const Label b = pinned[e.v];
    if (a == kUnknownLabel || b == kUnknownLabel) continue;
    ++observed;
    edge_count[a * k + b] += 1.0;
    if (a != b) edge_count[b * k + a] += 1.0;
  }

  BlockModelParams params;
  params.k = k;
  params.q.resize(k);
  const auto total = static_cast<double>(seeds.size());
  for (int a = 0; a < k; ++a) params.q[a] = group_size[a] / total;

  const double fallback = n > 0 ? 2.0 * graph.num_edges() / n : 0.0;
  params.affinity.assign(static_cast<size_t>(k) * k, fallback);
  if (observed == 0) return params;
  for (int a = 0; a < k; ++a) {
    for (int b = 0; b < k; ++b) {
      const double pair_count = a == b
                                    ? group_size[a] * (group_size[a] - 1) / 2
                                    : group_size[a] * group_size[b];
      if (pair_count > 0) params.c(a, b) = n * edge_count[a * k + b] / pair_count;
    }
  }
  return params;
}

std::string FormatParams(const BlockModelParams& params) {
  std::ostringstream out;
  out << "k = " << params.k << "\nq =";
  for (double qa : params.q) out << ' ' << FormatDouble(qa);
  out << "\nc =";
  for (double value : params.affinity) out << ' ' << FormatDouble(value);
  out << '\n';
  return out.str();
}

BlockModelParams ParseParams(std::string_view text) {
  const auto doc = KeyValueDocument::Parse(text);
  BlockModelParams params;
  params.k = static_cast<int>(doc.GetInt("k"));
  params.q = doc.GetDoubles("q");
  params.affinity = doc.GetDoubles("c");
  params.Validate();
  return params;
}

std::string FormatInstanceMetadata(const PlantedInstance& instance) {
  std::ostringstream out;
  out << FormatParams(instance.params);
  out << "n = " << instance.graph.num_nodes() << '\n';
  out << "m = " << instance.graph.num_edges() << '\n';
  out << "seed = " << instance.seed << '\n';
  return out.str();
}

}  // namespace sbm_cavity
