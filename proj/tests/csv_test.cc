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

#include "tabperturb/csv.h"

#include <string>

#include "gtest/gtest.h"
#include "test_util.h"

namespace tabperturb {
namespace {

TEST(CsvTest, InfersKindsAndMissingCells) {
  auto t = ParseCsv("id,age,city\n1,29,Oslo\n2,,Bergen\n3,31.5,\n");
  ASSERT_TRUE(t.ok()) << t.status();
  ASSERT_EQ(t->row_count(), 3u);
  EXPECT_EQ(t->column(0).schema.kind, ColumnKind::kNumeric);
  EXPECT_EQ(t->column(1).schema.kind, ColumnKind::kNumeric);
  EXPECT_EQ(t->column(2).schema.kind, ColumnKind::kCategorical);
  EXPECT_FALSE(t->column(1).numeric()[1].has_value());
  EXPECT_DOUBLE_EQ(*t->column(1).numeric()[2], 31.5);
  EXPECT_FALSE(t->column(2).text()[2].has_value());
}

TEST(CsvTest, NonFiniteSpellingsAreText) {
  auto t = ParseCsv("x\nnan\n1\n");
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(t->column(0).schema.kind, ColumnKind::kCategorical);
}

TEST(CsvTest, HintsOverrideInference) {
  SchemaHints hints;
  hints["zip"].kind = ColumnKind::kCategorical;
  hints["zip"].sensitivity = Sensitivity::kQuasiIdentifier;
  auto t = ParseCsv("zip\n02134\n", hints);
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(t->column(0).schema.kind, ColumnKind::kCategorical);
  EXPECT_EQ(t->column(0).schema.sensitivity, Sensitivity::kQuasiIdentifier);
  EXPECT_EQ(*t->column(0).text()[0], "02134");

  SchemaHints numeric;
  numeric["name"].kind = ColumnKind::kNumeric;
  EXPECT_FALSE(ParseCsv("name\nAda\n", numeric).ok());
  SchemaHints unknown;
  unknown["nope"].kind = ColumnKind::kText;
  EXPECT_FALSE(ParseCsv("a\n1\n", unknown).ok());
}

TEST(CsvTest, RejectsRaggedRowsAndDuplicateHeaders) {
  auto ragged = ParseCsv("a,b\n1,2\n3\n");
  ASSERT_FALSE(ragged.ok());
  EXPECT_NE(ragged.status().message().find("row 3"), std::string::npos);
  EXPECT_FALSE(ParseCsv("a,a\n1,2\n").ok());
  EXPECT_FALSE(ParseCsv("").ok());
}

TEST(CsvTest, QuotingAndLineEndings) {
  auto t = ParseCsv(
      "note,n\r\n\"hello, world\",1\r\n\"she said \"\"hi\"\"\",2\r\n"
      "\"two\nlines\",3\r\n");
  ASSERT_TRUE(t.ok()) << t.status();
  ASSERT_EQ(t->row_count(), 3u);
  EXPECT_EQ(*t->column(0).text()[0], "hello, world");
  EXPECT_EQ(*t->column(0).text()[1], "she said \"hi\"");
  EXPECT_EQ(*t->column(0).text()[2], "two\nlines");
  EXPECT_FALSE(ParseCsv("a\n\"open\n").ok());
}

TEST(CsvTest, StripsByteOrderMark) {
  auto t = ParseCsv("\xEF\xBB\xBF" "age\n1\n");
  ASSERT_TRUE(t.ok());
  EXPECT_EQ(t->column(0).schema.name, "age");
}

TEST(CsvTest, RoundTripIsByteIdentical) {
  const std::string text =
      "id,amount,label\n1,1.50,\"a,b\"\n2,,\"q\"\"uote\"\n3,1e3,plain\n";
  auto t = ParseCsv(text);
  ASSERT_TRUE(t.ok());
  // Numeric source text is preserved, so "1.50" and "1e3" survive.
  const std::string out = SerializeCsv(*t);
  EXPECT_EQ(out, "id,amount,label\n1,1.50,\"a,b\"\n2,,\"q\"\"uote\"\n3,1e3,plain\n");
  auto again = ParseCsv(out);
  ASSERT_TRUE(again.ok());
  EXPECT_TRUE(again->SameContent(*t));
}

TEST(CsvTest, ComputedColumnsUseShortestForm) {
  Table t;
  ASSERT_TRUE(t.AddColumn(Column::Numeric("x", testing::Cells({0.1, 1200, -3.25}))).ok());
  EXPECT_EQ(SerializeCsv(t), "x\n0.1\n1200\n-3.25\n");
}

TEST(CsvTest, FileHelpers) {
  testing::TempDir dir;
  auto t = ParseCsv("a,b\n1,x\n");
  ASSERT_TRUE(t.ok());
  ASSERT_TRUE(WriteCsv(*t, dir / "t.csv").ok());
  auto back = LoadCsv(dir / "t.csv");
  ASSERT_TRUE(back.ok());
  EXPECT_TRUE(back->SameContent(*t));
  EXPECT_EQ(LoadCsv(dir / "missing.csv").status().code(),
            absl::StatusCode::kUnavailable);
}

TEST(CsvTest, LoadsBundledSample) {
  auto t = LoadCsv(testing::DataPath("sample_loans.csv"));
  ASSERT_TRUE(t.ok()) << t.status();
  EXPECT_EQ(t->row_count(), 10000u);
  EXPECT_EQ(t->column_count(), 10u);
}

}  // namespace
}  // namespace tabperturb
