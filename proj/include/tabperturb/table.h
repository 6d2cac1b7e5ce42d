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

#ifndef TABPERTURB_TABLE_H_
#define TABPERTURB_TABLE_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"

namespace tabperturb {

enum class ColumnKind { kNumeric, kCategorical, kText };

// Declared sensitivity of a column. Informational; recorded in manifests.
enum class Sensitivity { kPublic, kQuasiIdentifier, kSensitive };

std::string_view ColumnKindName(ColumnKind kind);
absl::StatusOr<ColumnKind> ParseColumnKind(std::string_view name);
std::string_view SensitivityName(Sensitivity sensitivity);
absl::StatusOr<Sensitivity> ParseSensitivity(std::string_view name);

struct ColumnSchema {
  std::string name;
  ColumnKind kind = ColumnKind::kNumeric;
  Sensitivity sensitivity = Sensitivity::kPublic;

  bool operator==(const ColumnSchema&) const = default;
};

// std::nullopt is the missing-value marker in both cell vectors.
using NumericCells = std::vector<std::optional<double>>;
using TextCells = std::vector<std::optional<std::string>>;

struct Column {
  ColumnSchema schema;
  std::variant<NumericCells, TextCells> cells;
  // Field text of numeric cells as read from CSV, so that untouched columns
  // serialize byte-identically. Empty for computed columns.
  std::vector<std::string> source_text;

  static Column Numeric(std::string name, NumericCells cells);
  static Column Text(std::string name, TextCells cells,
                     ColumnKind kind = ColumnKind::kCategorical);

  size_t size() const;
  bool is_numeric() const { return std::holds_alternative<NumericCells>(cells); }
  const NumericCells& numeric() const { return std::get<NumericCells>(cells); }
  NumericCells& numeric() { return std::get<NumericCells>(cells); }
  const TextCells& text() const { return std::get<TextCells>(cells); }
  TextCells& text() { return std::get<TextCells>(cells); }

  // Schema and cells; source_text is ignored.
  bool SameContent(const Column& other) const;
};

// In-memory columnar dataset. All columns have the same length and unique
// names.
class Table {
 public:
  Table() = default;

  absl::Status AddColumn(Column column);
  absl::Status ReplaceColumn(size_t index, Column column);

  size_t row_count() const { return row_count_; }
  size_t column_count() const { return columns_.size(); }
  const std::vector<Column>& columns() const { return columns_; }
  const Column& column(size_t index) const { return columns_[index]; }

  std::optional<size_t> IndexOf(std::string_view name) const;
  const Column* Find(std::string_view name) const;

  bool SameContent(const Table& other) const;

 private:
  std::vector<Column> columns_;
  size_t row_count_ = 0;
};

}  // namespace tabperturb

#endif  // TABPERTURB_TABLE_H_
