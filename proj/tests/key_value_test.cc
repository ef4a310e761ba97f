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

#include <cmath>

#include <gtest/gtest.h>

#include "test_support.h"

namespace sbm_cavity {
namespace {

using testing::KindOf;

TEST(KeyValueTest, ParsesScalarsListsAndComments) {
  const auto doc = KeyValueDocument::Parse(
      "# comment\n k = 5 \nname = planted_coloring\n"
      "grid = [1, 2.5, 3]\nwords = a b,c\n\n");
  EXPECT_EQ(doc.GetInt("k"), 5);
  EXPECT_EQ(doc.GetString("name"), "planted_coloring");
  EXPECT_EQ(doc.GetDoubles("grid"), (std::vector<double>{1, 2.5, 3}));
  EXPECT_EQ(doc.GetStrings("words"),
            (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(doc.GetInt("missing", 7), 7);
  EXPECT_DOUBLE_EQ(doc.GetDouble("missing", 0.5), 0.5);
}

TEST(KeyValueTest, Errors) {
  EXPECT_EQ(KindOf([] { KeyValueDocument::Parse("a = 1\na = 2\n"); }),
            ErrorKind::kParse);
  EXPECT_EQ(KindOf([] { KeyValueDocument::Parse("no equals sign\n"); }),
            ErrorKind::kParse);
  const auto doc = KeyValueDocument::Parse("x = abc\n");
  EXPECT_EQ(KindOf([&] { doc.GetDouble("x"); }), ErrorKind::kParse);
  EXPECT_EQ(KindOf([&] { doc.GetInt("y"); }), ErrorKind::kParse);
}

TEST(KeyValueTest, InclusiveRanges) {
  const auto grid = ParseNumberList("12:20:0.5");
  ASSERT_EQ(grid.size(), 17u);
  EXPECT_EQ(grid.front(), 12.0);
  EXPECT_EQ(grid.back(), 20.0);
  EXPECT_EQ(grid[7], 15.5);
  // Decimal steps land on the decimal values, not accumulated sums.
  const auto eps = ParseNumberList("0.05:0.5:0.025");
  ASSERT_EQ(eps.size(), 19u);
  EXPECT_EQ(eps[3], 0.125);
  EXPECT_EQ(eps[9], 0.275);
  EXPECT_EQ(eps.back(), 0.5);
  EXPECT_EQ(KindOf([] { ParseNumberList("1:0:1"); }), ErrorKind::kParse);
  EXPECT_EQ(KindOf([] { ParseNumberList("0:1:0"); }), ErrorKind::kParse);
}

TEST(KeyValueTest, FormatDoubleRoundTrips) {
  for (double value : {0.1, 1.0 / 3.0, 1e-300, 12345.678, -2.5, 0.0}) {
    EXPECT_EQ(std::stod(FormatDouble(value)), value);
  }
  EXPECT_EQ(FormatDouble(0.5), "0.5");
  EXPECT_EQ(FormatDouble(3.0), "3");
}

}  // namespace
}  // namespace sbm_cavity
