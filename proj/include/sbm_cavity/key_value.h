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

#ifndef SBM_CAVITY_KEY_VALUE_H_
#define SBM_CAVITY_KEY_VALUE_H_

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace sbm_cavity {

// `key = value` lines; '#' starts a comment, blank lines are ignored, keys
// and values are trimmed. Duplicate keys are a parse error.
class KeyValueDocument {
 public:
  static KeyValueDocument Parse(std::string_view text);

  bool contains(const std::string& key) const {
    return entries_.contains(key);
  }
  const std::map<std::string, std::string>& entries() const {
    return entries_;
  }

  std::string GetString(const std::string& key) const;
  std::string GetString(const std::string& key,
                        const std::string& fallback) const;
  double GetDouble(const std::string& key) const;
  double GetDouble(const std::string& key, double fallback) const;
  long long GetInt(const std::string& key) const;
  long long GetInt(const std::string& key, long long fallback) const;

  // Lists are written `[a, b, c]`, `a b c`, or `a,b,c`. Numeric lists may
  // also be given as an inclusive range `start:stop:step`.
  std::vector<double> GetDoubles(const std::string& key) const;
  std::vector<std::string> GetStrings(const std::string& key) const;

 private:
  std::map<std::string, std::string> entries_;
  std::map<std::string, int> lines_;
};

// Parses a number list in any of the forms accepted by GetDoubles.
std::vector<double> ParseNumberList(std::string_view text);

// Shortest decimal text that round-trips the double.
std::string FormatDouble(double value);

}  // namespace sbm_cavity

#endif  // SBM_CAVITY_KEY_VALUE_H_
