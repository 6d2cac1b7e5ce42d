//
// Copyright 2026 The TabPerturb Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "tabperturb/mask.h"

#include <cctype>
#include <string>

#include "gtest/gtest.h"
#include "tabperturb/random.h"
#include "test_util.h"

namespace tabperturb {
namespace {

std::string MaskWith(std::string_view rule_name, std::string_view cell) {
  auto rule = FindMaskRule(DefaultMaskRules(), rule_name);
  EXPECT_TRUE(rule.ok());
  auto out = rule->Apply(cell);
  EXPECT_TRUE(out.ok());
  return out->value_or("<no match>");
}

TEST(MaskTest, PrintedGoldens) {
  EXPECT_EQ(MaskWith("phone", "555.192.9277"), "555.XXX.XXXX");
  EXPECT_EQ(MaskWith("credit_card", "5423 3428 2372 9072"),
            "5XX3 XXXX XXXX 9072");
  EXPECT_EQ(MaskWith("street_number", "123 Any Street, Canada City, Canada"),
            "XXX Any Street, Canada City, Canada");
}

TEST(MaskTest, NonMatchingCellsPassThrough) {
  auto rule = FindMaskRule(DefaultMaskRules(), "phone");
  ASSERT_TRUE(rule.ok());
  auto r = Mask(testing::Labels({"555.192.9277", "no phone here"}), *rule);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r->cells[1], "no phone here");
  EXPECT_EQ(r->matched_cells, 1u);
  EXPECT_EQ(r->unmatched_cells, 1u);
  TextCells with_missing = {std::nullopt};
  auto m = Mask(with_missing, *rule);
  ASSERT_TRUE(m.ok());
  EXPECT_FALSE(m->cells[0].has_value());
}

TEST(MaskTest, PreservesLengthAndUnmaskedBytes) {
  auto rule = FindMaskRule(DefaultMaskRules(), "phone");
  ASSERT_TRUE(rule.ok());
  RandomSource src(41, 1);
  for (int i = 0; i < 2000; ++i) {
    std::string cell = "id ";
    for (int k = 0; k < 3; ++k) cell += static_cast<char>('0' + src.NextBelow(10));
    const char sep = ".- "[src.NextBelow(3)];
    cell += sep;
    for (int k = 0; k < 3; ++k) cell += static_cast<char>('0' + src.NextBelow(10));
    cell += sep;
    for (int k = 0; k < 4; ++k) cell += static_cast<char>('0' + src.NextBelow(10));
    cell += " tail";
    auto out = rule->Apply(cell);
    ASSERT_TRUE(out.ok());
    ASSERT_TRUE(out->has_value()) << cell;
    const std::string& m = **out;
    ASSERT_EQ(m.size(), cell.size());
    for (size_t p = 0; p < cell.size(); ++p) {
      // Positions 7..9 and 11..14 are the masked groups.
      const bool masked = (p >= 7 && p <= 9) || (p >= 11 && p <= 14);
      if (masked) {
        EXPECT_EQ(m[p], 'X');
      } else {
        EXPECT_EQ(m[p], cell[p]);
      }
    }
  }
}

TEST(MaskTest, CustomRulesAndTemplateEscapes) {
  auto rules = ParseMaskRules(
      "# comment\n\nssn = (\\d{3})-(\\d{2})-(\\d{4}) => %1-%2-$3\n"
      "price = \\$(\\d+) => $$%1\n");
  ASSERT_TRUE(rules.ok()) << rules.status();
  ASSERT_EQ(rules->size(), 2u);
  EXPECT_EQ(*(*(*rules)[0].Apply("123-45-6789")), "XXX-XX-6789");
  EXPECT_EQ(*(*(*rules)[1].Apply("cost $250")), "cost $XXX");
}

TEST(MaskTest, RejectsBadRules) {
  EXPECT_FALSE(MaskRule::Create("bad", "(", "%1").ok());
  EXPECT_FALSE(MaskRule::Create("group", "(\\d)", "%2").ok());
  EXPECT_FALSE(ParseMaskRules("no arrow here\n").ok());
  EXPECT_FALSE(FindMaskRule(DefaultMaskRules(), "nope").ok());
  // A template that changes the match length is refused at apply time.
  auto longer = MaskRule::Create("longer", "(\\d+)", "%1%1");
  if (longer.ok()) EXPECT_FALSE(longer->Apply("123").ok());
}

}  // namespace
}  // namespace tabperturb
