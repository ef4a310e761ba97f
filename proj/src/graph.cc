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

#include "sbm_cavity/graph.h"

#include <algorithm>
#include <string>

#include "sbm_cavity/error.h"

namespace sbm_cavity {

Graph Graph::FromPairs(NodeId num_nodes,
                       std::span<const std::pair<NodeId, NodeId>> pairs,
                       BuildStats* stats) {
  if (num_nodes < 0) {
    throw Error(ErrorKind::kRange, "negative node count");
  }
  BuildStats local;
  std::vector<UndirectedEdge> edges;
  edges.reserve(pairs.size());
  for (const auto& [a, b] : pairs) {
    if (a < 0 || b < 0 || a >= num_nodes || b >= num_nodes) {
      throw Error(ErrorKind::kRange,
                  "edge (" + std::to_string(a) + ", " + std::to_string(b) +
                      ") outside node range 0.." +
                      std::to_string(num_nodes - 1));
    }
    if (a == b) {
      ++local.self_loops;
      continue;
    }
    edges.push_back({std::min(a, b), std::max(a, b)});
  }
  std::sort(edges.begin(), edges.end());
  const auto last = std::unique(edges.begin(), edges.end());
  local.duplicates = std::distance(last, edges.end());
  edges.erase(last, edges.end());

  Graph g;
  g.num_nodes_ = num_nodes;
  g.offsets_.assign(static_cast<size_t>(num_nodes) + 1, 0);
  for (const auto& e : edges) {
    ++g.offsets_[e.u + 1];
    ++g.offsets_[e.v + 1];
  }
  for (NodeId i = 0; i < num_nodes; ++i) g.offsets_[i + 1] += g.offsets_[i];

  const int64_t num_directed = 2 * static_cast<int64_t>(edges.size());
  g.targets_.resize(num_directed);
  g.sources_.resize(num_directed);
  std::vector<int64_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (const auto& e : edges) {
    g.targets_[fill[e.u]++] = e.v;
    g.targets_[fill[e.v]++] = e.u;
  }
  // Neighbor lists must be sorted for directed_index().
  for (NodeId i = 0; i < num_nodes; ++i) {
    std::sort(g.targets_.begin() + g.offsets_[i],
              g.targets_.begin() + g.offsets_[i + 1]);
    std::fill(g.sources_.begin() + g.offsets_[i],
              g.sources_.begin() + g.offsets_[i + 1], i);
  }
  g.edges_ = std::move(edges);

  g.reverse_.resize(num_directed);
  for (int64_t e = 0; e < num_directed; ++e) {
    // Always found: adjacency is symmetric by construction.
    g.reverse_[e] = *g.directed_index(g.targets_[e], g.sources_[e]);
  }

  if (stats != nullptr) *stats = local;
  return g;
}

std::optional<int64_t> Graph::directed_index(NodeId i, NodeId j) const {
  if (i < 0 || i >= num_nodes_) return std::nullopt;
  const auto begin = targets_.begin() + offsets_[i];
  const auto end = targets_.begin() + offsets_[i + 1];
  const auto it = std::lower_bound(begin, end, j);
  if (it == end || *it != j) return std::nullopt;
  return static_cast<int64_t>(it - targets_.begin());
}

int32_t Graph::max_degree() const {
  int32_t best = 0;
  for (NodeId i = 0; i < num_nodes_; ++i) best = std::max(best, degree(i));
  return best;
}

}  // namespace sbm_cavity
