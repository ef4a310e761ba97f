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

#include "sbm_cavity/key_value.h"

#include <charconv>
#include <cmath>

#include "sbm_cavity/error.h"

namespace sbm_cavity {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double ToDouble(std::string_view token, const std::string& context) {
  token = Trim(token);
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last) {
    throw Error(ErrorKind::kParse,
                context + ": not a number: '" + std::string(token) + "'");
  }
  return value;
}

std::vector<std::string> SplitList(std::string_view text) {
  text = Trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') {
      throw Error(ErrorKind::kParse,
                  "unterminated list: '" + std::string(text) + "'");
    }
    text = text.substr(1, text.size() - 2);
  }
  std::vector<std::string> items;
  std::string current;
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\t' || ch == ';') {
      if (!current.empty()) items.push_back(current);
      current.clear();
    } else {
      current += ch;
    }
  }
  if (!current.empty()) items.push_back(current);
  return items;
}

}  // namespace

KeyValueDocument KeyValueDocument::Parse(std::string_view text) {
  KeyValueDocument doc;
  int line_number = 0;
  size_t pos = 0;
  while (pos <= text.size()) {
    size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    ++line_number;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = Trim(line);
    if (!line.empty()) {
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) {
        throw Error(ErrorKind::kParse, "line " + std::to_string(line_number) +
                                           ": expected key = value");
      }
      std::string key(Trim(line.substr(0, eq)));
      if (key.empty()) {
        throw Error(ErrorKind::kParse,
                    "line " + std::to_string(line_number) + ": empty key");
      }
      if (doc.entries_.contains(key)) {
        throw Error(ErrorKind::kParse, "line " + std::to_string(line_number) +
                                           ": duplicate key '" + key + "'");
      }
      doc.lines_[key] = line_number;
      doc.entries_[key] = std::string(Trim(line.substr(eq + 1)));
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return doc;
}

std::string KeyValueDocument::GetString(const std::string& key) const {
  const auto it = entries_.find(key);
  if (it == entries_.end()) {
    throw Error(ErrorKind::kParse, "missing key '" + key + "'");
  }
  return it->second;
}

std::string KeyValueDocument::GetString(const std::string& key,
                                        const std::string& fallback) const {
  return contains(key) ? GetString(key) : fallback;
}

double KeyValueDocument::GetDouble(const std::string& key) const {
  return ToDouble(GetString(key), "key '" + key + "'");
}

double KeyValueDocument::GetDouble(const std::string& key,
                                   double fallback) const {
  return contains(key) ? GetDouble(key) : fallback;
}

long long KeyValueDocument::GetInt(const std::string& key) const {
  const double value = GetDouble(key);
  if (value != std::floor(value) || std::abs(value) > 9.0e15) {
    throw Error(ErrorKind::kParse,
                "key '" + key + "': expected an integer, found '" +
                    GetString(key) + "'");
  }
  return static_cast<long long>(value);
}

long long KeyValueDocument::GetInt(const std::string& key,
                                   long long fallback) const {
  return contains(key) ? GetInt(key) : fallback;
}

std::vector<double> KeyValueDocument::GetDoubles(
    const std::string& key) const {
  try {
    return ParseNumberList(GetString(key));
  } catch (const Error& e) {
    throw Error(e.kind(), "key '" + key + "': " + e.what());
  }
}

std::vector<std::string> KeyValueDocument::GetStrings(
    const std::string& key) const {
  return SplitList(GetString(key));
}

std::vector<double> ParseNumberList(std::string_view text) {
  text = Trim(text);
  if (text.find(':') != std::string_view::npos && text.front() != '[') {
    const auto first = text.find(':');
    const auto second = text.find(':', first + 1);
    if (second == std::string_view::npos) {
      throw Error(ErrorKind::kParse,
                  "range must be start:stop:step, found '" +
                      std::string(text) + "'");
    }
    const double start = ToDouble(text.substr(0, first), "range");
    const double stop =
        ToDouble(text.substr(first + 1, second - first - 1), "range");
    const double step = ToDouble(text.substr(second + 1), "range");
    if (!(step > 0.0) || stop < start) {
      throw Error(ErrorKind::kParse,
                  "range needs step > 0 and stop >= start: '" +
                      std::string(text) + "'");
    }
    const auto count =
        static_cast<long long>(std::floor((stop - start) / step + 1e-9)) + 1;
    std::vector<double> values;
    values.reserve(static_cast<size_t>(count));
    for (long long i = 0; i < count; ++i) {
      // Snap to 12 decimals so 0.05 + 3 * 0.025 prints as 0.125.
      values.push_back(std::round((start + i * step) * 1e12) / 1e12);
    }
    return values;
  }
  std::vector<double> values;
  for (const auto& item : SplitList(text)) {
    values.push_back(ToDouble(item, "list"));
  }
  return values;
}

std::string FormatDouble(double value) {
  char buffer[64];
  const auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), value);
  if (ec != std::errc()) return "nan";
  return std::string(buffer, ptr);
}

}  // namespace sbm_cavity
