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

#ifndef SBM_CAVITY_GRAPH_H_
#define SBM_CAVITY_GRAPH_H_

#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sbm_cavity {

using NodeId = int32_t;
using Label = int32_t;

// Sentinel for nodes whose group is not known.
inline constexpr Label kUnknownLabel = -1;

// One group id per node, kUnknownLabel where the label is missing.
using LabelVector = std::vector<Label>;

struct UndirectedEdge {
  NodeId u;  // u < v
  NodeId v;

  friend bool operator==(const UndirectedEdge&, const UndirectedEdge&) =
      default;
  friend auto operator<=>(const UndirectedEdge&, const UndirectedEdge&) =
      default;
};

// Immutable sparse undirected simple graph stored in compressed sparse row
// form. Neighbor lists are sorted. Every ordered pair (i -> j) of adjacent
// nodes owns a directed edge index in [0, 2m): the index of the slot that
// holds j inside i's neighbor list.
class Graph {
 public:
  // Self-loops and duplicate pairs in `pairs` are dropped and counted.
  struct BuildStats {
    int64_t self_loops = 0;
    int64_t duplicates = 0;
  };

  Graph() = default;

  // Builds a graph on nodes 0..num_nodes-1. Pair endpoints must lie in that
  // range (checked). Order of `pairs` does not matter.
  static Graph FromPairs(NodeId num_nodes,
                         std::span<const std::pair<NodeId, NodeId>> pairs,
                         BuildStats* stats = nullptr);

  NodeId num_nodes() const { return num_nodes_; }
  int64_t num_edges() const { return static_cast<int64_t>(edges_.size()); }
  int64_t num_directed_edges() const { return 2 * num_edges(); }

  int32_t degree(NodeId i) const {
    return static_cast<int32_t>(offsets_[i + 1] - offsets_[i]);
  }
  std::span<const NodeId> neighbors(NodeId i) const {
    return {targets_.data() + offsets_[i],
            static_cast<size_t>(offsets_[i + 1] - offsets_[i])};
  }

  // Undirected edges with u < v, sorted lexicographically.
  const std::vector<UndirectedEdge>& edges() const { return edges_; }

  // Directed edges leaving i occupy [first_out(i), first_out(i) + degree(i)).
  int64_t first_out(NodeId i) const { return offsets_[i]; }
  NodeId source(int64_t e) const { return sources_[e]; }
  NodeId target(int64_t e) const { return targets_[e]; }
  // Index of (j -> i) given the index of (i -> j).
  int64_t reverse(int64_t e) const { return reverse_[e]; }

  // Index of (i -> j), or nullopt when i and j are not adjacent.
  std::optional<int64_t> directed_index(NodeId i, NodeId j) const;

  bool has_edge(NodeId i, NodeId j) const {
    return directed_index(i, j).has_value();
  }

  int32_t max_degree() const;

 private:
  NodeId num_nodes_ = 0;
  std::vector<int64_t> offsets_{0};
  std::vector<NodeId> targets_;
  std::vector<NodeId> sources_;
  std::vector<int64_t> reverse_;
  std::vector<UndirectedEdge> edges_;
};

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_GRAPH_H_
