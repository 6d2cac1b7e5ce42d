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

#include "tabperturb/table.h"

#include <utility>

#include "absl/strings/str_cat.h"

namespace tabperturb {

std::string_view ColumnKindName(ColumnKind kind) {
  switch (kind) {
    case ColumnKind::kNumeric:
      return "numeric";
    case ColumnKind::kCategorical:
      return "categorical";
    case ColumnKind::kText:
      return "text";
  }
  return "unknown";
}

absl::StatusOr<ColumnKind> ParseColumnKind(std::string_view name) {
  if (name == "numeric") return ColumnKind::kNumeric;
  if (name == "categorical") return ColumnKind::kCategorical;
  if (name == "text" || name == "text_pii") return ColumnKind::kText;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown column kind '", std::string(name), "'"));
}

std::string_view SensitivityName(Sensitivity sensitivity) {
  switch (sensitivity) {
    case Sensitivity::kPublic:
      return "public";
    case Sensitivity::kQuasiIdentifier:
      return "quasi_identifier";
    case Sensitivity::kSensitive:
      return "sensitive";
  }
  return "unknown";
}

absl::StatusOr<Sensitivity> ParseSensitivity(std::string_view name) {
  if (name == "public") return Sensitivity::kPublic;
  if (name == "quasi_identifier") return Sensitivity::kQuasiIdentifier;
  if (name == "sensitive") return Sensitivity::kSensitive;
  return absl::InvalidArgumentError(
      absl::StrCat("unknown sensitivity '", std::string(name), "'"));
}

Column Column::Numeric(std::string name, NumericCells cells) {
  Column c;
  c.schema = {std::move(name), ColumnKind::kNumeric, Sensitivity::kPublic};
  c.cells = std::move(cells);
  return c;
}

Column Column::Text(std::string name, TextCells cells, ColumnKind kind) {
  Column c;
  c.schema = {std::move(name), kind, Sensitivity::kPublic};
  c.cells = std::move(cells);
  return c;
}

size_t Column::size() const {
  return std::visit([](const auto& v) { return v.size(); }, cells);
}

bool Column::SameContent(const Column& other) const {
  return schema == other.schema && cells == other.cells;
}

absl::Status Table::AddColumn(Column column) {
  if (IndexOf(column.schema.name).has_value()) {
    return absl::InvalidArgumentError(
        absl::StrCat("duplicate column name '", column.schema.name, "'"));
  }
  if (!columns_.empty() && column.size() != row_count_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "column '", column.schema.name, "' has ", column.size(),
        " cells, table has ", row_count_, " rows"));
  }
  const bool numeric_kind = column.schema.kind == ColumnKind::kNumeric;
  if (numeric_kind != column.is_numeric()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "column '", column.schema.name, "' cell type does not match its kind"));
  }
  row_count_ = column.size();
  columns_.push_back(std::move(column));
  return absl::OkStatus();
}

absl::Status Table::ReplaceColumn(size_t index, Column column) {
  if (index >= columns_.size()) {
    return absl::OutOfRangeError("column index out of range");
  }
  if (column.size() != row_count_) {
    return absl::InvalidArgumentError(absl::StrCat(
        "replacement for column '", column.schema.name, "' has ",
        column.size(), " cells, table has ", row_count_, " rows"));
  }
  columns_[index] = std::move(column);
  return absl::OkStatus();
}

std::optional<size_t> Table::IndexOf(std::string_view name) const {
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].schema.name == name) return i;
  }
  return std::nullopt;
}

const Column* Table::Find(std::string_view name) const {
  const auto index = IndexOf(name);
  return index ? &columns_[*index] : nullptr;
}

bool Table::SameContent(const Table& other) const {
  if (row_count_ != other.row_count_ || columns_.size() != other.columns_.size()) {
    return false;
  }
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (!columns_[i].SameContent(other.columns_[i])) return false;
  }
  return true;
}

}  // namespace tabperturb
