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

// Text formats for graphs and labels.
//
//   edge list   "i j" per line, '#' comment lines, ids used literally so
//               n = 1 + max id and unused ids become isolated nodes.
//   GML subset  graph [ node [ id A value V ] ... edge [ source A target B ] ]
//               ids are remapped to 0..n-1 in order of appearance and the
//               optional integer `value` becomes the node's label.
//   labels      "node_id label" per line, 0-indexed labels, may be partial.
//
// All readers accept LF or CRLF line endings. Errors are reported as
// sbm_cavity::Error with kind kParse (with a line number) or kRange.

#ifndef SBM_CAVITY_GRAPH_IO_H_
#define SBM_CAVITY_GRAPH_IO_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sbm_cavity/graph.h"

namespace sbm_cavity {

struct EdgeListParse {
  Graph graph;
  int64_t self_loops = 0;
  int64_t duplicates = 0;
};

EdgeListParse ParseEdgeList(std::string_view text);

struct GmlParse {
  Graph graph;
  LabelVector labels;  // kUnknownLabel where a node had no value
  std::vector<std::string> original_ids;
  int64_t self_loops = 0;
  int64_t duplicates = 0;  // includes a->b / b->a pairs collapsed together
};

GmlParse ParseGml(std::string_view text);

// Labels for nodes 0..num_nodes-1; uncovered nodes stay unknown. When
// `num_groups` is given every label must be below it.
LabelVector ParseLabels(std::string_view text, NodeId num_nodes,
                        std::optional<int> num_groups = std::nullopt);

std::string WriteEdgeList(const Graph& graph);
// Unknown entries are omitted.
std::string WriteLabels(const LabelVector& labels);

// Emits a GML document readable by ParseGml; node ids are 0..n-1.
std::string WriteGml(const Graph& graph, const LabelVector& labels);

std::string ReadFile(const std::string& path);
void WriteFile(const std::string& path, std::string_view content);

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_GRAPH_IO_H_
