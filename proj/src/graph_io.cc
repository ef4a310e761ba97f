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

#include "sbm_cavity/graph_io.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <utility>

#include "sbm_cavity/error.h"

namespace sbm_cavity {
namespace {

[[noreturn]] void ParseFail(int64_t line, const std::string& what) {
  throw Error(ErrorKind::kParse,
              "line " + std::to_string(line) + ": " + what);
}

// Splits on ASCII whitespace; '\r' counts as whitespace.
std::vector<std::string_view> Tokens(std::string_view line) {
  std::vector<std::string_view> out;
  size_t pos = 0;
  auto is_space = [](char ch) {
    return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\n' ||
           ch == '\v' || ch == '\f';
  };
  while (pos < line.size()) {
    while (pos < line.size() && is_space(line[pos])) ++pos;
    size_t end = pos;
    while (end < line.size() && !is_space(line[end])) ++end;
    if (end > pos) out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

std::optional<int64_t> ToInt(std::string_view token) {
  int64_t value = 0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) return std::nullopt;
  return value;
}

// Calls fn(line_number, line) for each non-empty, non-comment line.
template <typename Fn>
void ForEachDataLine(std::string_view text, Fn&& fn) {
  int64_t line_number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_number;
    const auto first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line[first] != '#') {
      fn(line_number, line);
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
}

NodeId CheckedNodeId(int64_t line, std::string_view token) {
  const auto value = ToInt(token);
  if (!value) ParseFail(line, "not an integer: '" + std::string(token) + "'");
  if (*value < 0) ParseFail(line, "negative node id " + std::to_string(*value));
  if (*value > INT32_MAX - 1) ParseFail(line, "node id too large");
  return static_cast<NodeId>(*value);
}

// GML tokenizer: bare words, quoted strings, and brackets.
struct GmlToken {
  std::string text;
  bool quoted = false;
  int64_t line = 0;
};

std::vector<GmlToken> GmlTokens(std::string_view text) {
  std::vector<GmlToken> out;
  int64_t line = 1;
  size_t pos = 0;
  while (pos < text.size()) {
    const char ch = text[pos];
    if (ch == '\n') {
      ++line;
      ++pos;
    } else if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++pos;
    } else if (ch == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
    } else if (ch == '[' || ch == ']') {
      out.push_back({std::string(1, ch), false, line});
      ++pos;
    } else if (ch == '"') {
      const int64_t start_line = line;
      size_t end = pos + 1;
      while (end < text.size() && text[end] != '"') {
        if (text[end] == '\n') ++line;
        ++end;
      }
      if (end >= text.size()) ParseFail(start_line, "unterminated string");
      out.push_back(
          {std::string(text.substr(pos + 1, end - pos - 1)), true, start_line});
      pos = end + 1;
    } else {
      size_t end = pos;
      while (end < text.size() && text[end] != ' ' && text[end] != '\t' &&
             text[end] != '\r' && text[end] != '\n' && text[end] != '[' &&
             text[end] != ']') {
        ++end;
      }
      out.push_back({std::string(text.substr(pos, end - pos)), false, line});
      pos = end;
    }
  }
  return out;
}

// Flat key/value view of one `node [...]` or `edge [...]` block; nested lists
// inside the block (graphics etc.) are skipped.
struct GmlRecord {
  std::map<std::string, GmlToken> values;
  int64_t line = 0;
};

class GmlReader {
 public:
  explicit GmlReader(std::vector<GmlToken> tokens)
      : tokens_(std::move(tokens)) {}

  bool done() const { return pos_ >= tokens_.size(); }
  const GmlToken& peek() const { return tokens_[pos_]; }
  GmlToken next() {
    if (done()) ParseFail(last_line(), "unexpected end of document");
    return tokens_[pos_++];
  }
  int64_t last_line() const {
    return tokens_.empty() ? 1 : tokens_.back().line;
  }

  void Expect(std::string_view what) {
    const GmlToken tok = next();
    if (tok.quoted || tok.text != what) {
      ParseFail(tok.line, "expected '" + std::string(what) + "', found '" +
                              tok.text + "'");
    }
  }

  bool AtClose() const {
    return !done() && !peek().quoted && peek().text == "]";
  }

  // Consumes a value: either a scalar token or a bracketed list.
  void SkipValue() {
    const GmlToken tok = next();
    if (tok.quoted || tok.text != "[") {
      if (!tok.quoted && tok.text == "]") ParseFail(tok.line, "unbalanced ']'");
      return;
    }
    int depth = 1;
    while (depth > 0) {
      const GmlToken inner = next();
      if (inner.quoted) continue;
      if (inner.text == "[") ++depth;
      if (inner.text == "]") --depth;
    }
  }

  GmlRecord ReadRecord() {
    GmlRecord record;
    record.line = done() ? last_line() : peek().line;
    Expect("[");
    while (!AtClose()) {
      const GmlToken key = next();
      if (key.quoted || key.text == "[") {
        ParseFail(key.line, "expected a key, found '" + key.text + "'");
      }
      if (!done() && !peek().quoted && peek().text == "[") {
        SkipValue();
      } else {
        record.values[key.text] = next();
      }
    }
    Expect("]");
    return record;
  }

 private:
  std::vector<GmlToken> tokens_;
  size_t pos_ = 0;
};

}  // namespace

EdgeListParse ParseEdgeList(std::string_view text) {
  std::vector<std::pair<NodeId, NodeId>> pairs;
  NodeId max_id = -1;
  ForEachDataLine(text, [&](int64_t line, std::string_view content) {
    const auto tokens = Tokens(content);
    if (tokens.size() != 2) {
      ParseFail(line, "expected two node ids, found " +
                          std::to_string(tokens.size()) + " tokens");
    }
    const NodeId a = CheckedNodeId(line, tokens[0]);
    const NodeId b = CheckedNodeId(line, tokens[1]);
    max_id = std::max({max_id, a, b});
    pairs.emplace_back(a, b);
  });
  EdgeListParse result;
  Graph::BuildStats stats;
  result.graph = Graph::FromPairs(max_id + 1, pairs, &stats);
  result.self_loops = stats.self_loops;
  result.duplicates = stats.duplicates;
  return result;
}

GmlParse ParseGml(std::string_view text) {
  GmlReader reader(GmlTokens(text));

  // Skip header keys until `graph [`.
  bool found_graph = false;
  while (!reader.done()) {
    const GmlToken key = reader.next();
    if (!key.quoted && key.text == "graph") {
      found_graph = true;
      break;
    }
    if (!key.quoted && (key.text == "[" || key.text == "]")) {
      ParseFail(key.line, "unexpected '" + key.text + "' before graph");
    }
    reader.SkipValue();
  }
  if (!found_graph) ParseFail(reader.last_line(), "no 'graph [' section");
  reader.Expect("[");

  GmlParse result;
  std::unordered_map<std::string, NodeId> index_of;
  std::vector<GmlRecord> edge_records;
  while (!reader.AtClose()) {
    const GmlToken key = reader.next();
    if (key.quoted || key.text == "[") {
      ParseFail(key.line, "expected a key, found '" + key.text + "'");
    }
    if (key.text == "node") {
      const GmlRecord node = reader.ReadRecord();
      const auto id = node.values.find("id");
      if (id == node.values.end()) ParseFail(node.line, "node without id");
      const std::string& name = id->second.text;
      if (index_of.contains(name)) {
        ParseFail(node.line, "duplicate node id '" + name + "'");
      }
      index_of.emplace(name, static_cast<NodeId>(result.original_ids.size()));
      result.original_ids.push_back(name);
      Label label = kUnknownLabel;
      if (const auto value = node.values.find("value");
          value != node.values.end()) {
        const auto parsed = ToInt(value->second.text);
        if (!parsed || *parsed < 0 || *parsed > INT32_MAX) {
          ParseFail(value->second.line,
                    "node value must be a non-negative integer, found '" +
                        value->second.text + "'");
        }
        label = static_cast<Label>(*parsed);
      }
      result.labels.push_back(label);
    } else if (key.text == "edge") {
      edge_records.push_back(reader.ReadRecord());
    } else {
      reader.SkipValue();
    }
  }
  reader.Expect("]");
  while (!reader.done()) {
    const GmlToken extra = reader.next();
    if (!extra.quoted && (extra.text == "[" || extra.text == "]")) {
      ParseFail(extra.line, "unbalanced '" + extra.text + "' after graph");
    }
  }

  std::vector<std::pair<NodeId, NodeId>> pairs;
  pairs.reserve(edge_records.size());
  for (const GmlRecord& edge : edge_records) {
    auto endpoint = [&](const char* field) {
      const auto it = edge.values.find(field);
      if (it == edge.values.end()) {
        ParseFail(edge.line, std::string("edge without ") + field);
      }
      const auto node = index_of.find(it->second.text);
      if (node == index_of.end()) {
        ParseFail(it->second.line,
                  "edge references unknown node '" + it->second.text + "'");
      }
      return node->second;
    };
    pairs.emplace_back(endpoint("source"), endpoint("target"));
  }
  Graph::BuildStats stats;
  result.graph = Graph::FromPairs(
      static_cast<NodeId>(result.original_ids.size()), pairs, &stats);
  result.self_loops = stats.self_loops;
  result.duplicates = stats.duplicates;
  return result;
}

LabelVector ParseLabels(std::string_view text, NodeId num_nodes,
                        std::optional<int> num_groups) {
  LabelVector labels(static_cast<size_t>(num_nodes), kUnknownLabel);
  ForEachDataLine(text, [&](int64_t line, std::string_view content) {
    const auto tokens = Tokens(content);
    if (tokens.size() != 2) {
      ParseFail(line, "expected 'node_id label', found " +
                          std::to_string(tokens.size()) + " tokens");
    }
    const NodeId node = CheckedNodeId(line, tokens[0]);
    const auto label = ToInt(tokens[1]);
    if (!label) {
      ParseFail(line, "not an integer: '" + std::string(tokens[1]) + "'");
    }
    if (node >= num_nodes) {
      throw Error(ErrorKind::kRange, "line " + std::to_string(line) +
                                         ": node id " + std::to_string(node) +
                                         " >= n = " +
                                         std::to_string(num_nodes));
    }
    if (*label < 0 || (num_groups && *label >= *num_groups)) {
      throw Error(ErrorKind::kRange,
                  "line " + std::to_string(line) + ": label " +
                      std::to_string(*label) + " outside 0.." +
                      (num_groups ? std::to_string(*num_groups - 1) : "inf"));
    }
    if (labels[node] != kUnknownLabel && labels[node] != *label) {
      ParseFail(line, "conflicting labels for node " + std::to_string(node));
    }
    labels[node] = static_cast<Label>(*label);
  });
  return labels;
}

std::string WriteEdgeList(const Graph& graph) {
  std::string out;
  out.reserve(static_cast<size_t>(graph.num_edges()) * 12);
  for (const auto& e : graph.edges()) {
    out += std::to_string(e.u);
    out += ' ';
    out += std::to_string(e.v);
    out += '\n';
  }
  return out;
}

std::string WriteLabels(const LabelVector& labels) {
  std::string out;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kUnknownLabel) continue;
    out += std::to_string(i);
    out += ' ';
    out += std::to_string(labels[i]);
    out += '\n';
  }
  return out;
}

std::string WriteGml(const Graph& graph, const LabelVector& labels) {
  std::ostringstream out;
  out << "graph [\n";
  for (NodeId i = 0; i < graph.num_nodes(); ++i) {
    out << "  node [ id " << i;
    if (static_cast<size_t>(i) < labels.size() &&
        labels[i] != kUnknownLabel) {
      out << " value " << labels[i];
    }
    out << " ]\n";
  }
  for (const auto& e : graph.edges()) {
    out << "  edge [ source " << e.u << " target " << e.v << " ]\n";
  }
  out << "]\n";
  return out.str();
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kParse, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void WriteFile(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kParse, "cannot write '" + path + "'");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorKind::kParse, "write failed for '" + path + "'");
}

}  // namespace sbm_cavity
