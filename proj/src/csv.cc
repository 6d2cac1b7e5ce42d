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

#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "absl/strings/str_cat.h"
#include "tabperturb/text_util.h"
#include "tabperturb/status_macros.h"

namespace tabperturb {
namespace {

using Record = std::vector<std::string>;

// Splits CSV content into records, honoring quoted fields.
absl::StatusOr<std::vector<Record>> Tokenize(std::string_view content) {
  std::vector<Record> records;
  Record record;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  size_t line = 1;
  size_t i = 0;
  auto end_record = [&]() {
    record.push_back(std::move(field));
    field.clear();
    records.push_back(std::move(record));
    record.clear();
    field_started = false;
  };
  while (i < content.size()) {
    const char c = content[i];
    if (in_quotes) {
      if (c == '"') {
        if (i + 1 < content.size() && content[i + 1] == '"') {
          field.push_back('"');
          i += 2;
          continue;
        }
        in_quotes = false;
        ++i;
        continue;
      }
      if (c == '\n') ++line;
      field.push_back(c);
      ++i;
      continue;
    }
    switch (c) {
      case '"':
        if (!field.empty()) {
          return absl::InvalidArgumentError(absl::StrCat(
              "CSV line ", line, ": quote inside an unquoted field"));
        }
        in_quotes = true;
        field_started = true;
        ++i;
        break;
      case ',':
        record.push_back(std::move(field));
        field.clear();
        field_started = true;
        ++i;
        break;
      case '\r':
        if (i + 1 < content.size() && content[i + 1] == '\n') ++i;
        [[fallthrough]];
      case '\n':
        end_record();
        ++line;
        ++i;
        break;
      default:
        field.push_back(c);
        field_started = true;
        ++i;
    }
  }
  if (in_quotes) {
    return absl::InvalidArgumentError(
        absl::StrCat("CSV line ", line, ": unterminated quoted field"));
  }
  if (field_started || !field.empty() || !record.empty()) end_record();
  return records;
}

bool NeedsQuoting(std::string_view field) {
  return field.find_first_of(",\"\r\n") != std::string_view::npos;
}

void AppendField(std::string& out, std::string_view field) {
  if (!NeedsQuoting(field)) {
    out.append(field);
    return;
  }
  out.push_back('"');
  for (char c : field) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
}

// "nan" and "inf" stay text: downstream statistics need finite values.
std::optional<double> ParseCell(std::string_view field) {
  const auto value = ParseDouble(field);
  if (!value || !std::isfinite(*value)) return std::nullopt;
  return value;
}

}  // namespace

absl::StatusOr<Table> ParseCsv(std::string_view content,
                               const SchemaHints& hints) {
  if (content.starts_with("\xEF\xBB\xBF")) content.remove_prefix(3);
  TP_ASSIGN_OR_RETURN(std::vector<Record> records, Tokenize(content));
  if (records.empty()) {
    return absl::InvalidArgumentError("CSV input has no header row");
  }
  const Record& header = records.front();
  const size_t width = header.size();
  for (size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != width) {
      return absl::InvalidArgumentError(absl::StrCat(
          "CSV row ", r + 1, " has ", records[r].size(), " fields, expected ",
          width));
    }
  }
  for (const auto& [name, hint] : hints) {
    bool found = false;
    for (const std::string& h : header) found = found || h == name;
    if (!found) {
      return absl::InvalidArgumentError(
          absl::StrCat("schema hint names unknown column '", name, "'"));
    }
  }

  Table table;
  const size_t rows = records.size() - 1;
  for (size_t c = 0; c < width; ++c) {
    const std::string& name = header[c];
    std::optional<ColumnKind> kind;
    std::optional<Sensitivity> sensitivity;
    if (auto it = hints.find(name); it != hints.end()) {
      kind = it->second.kind;
      sensitivity = it->second.sensitivity;
    }
    if (!kind.has_value()) {
      bool all_numeric = true;
      for (size_t r = 1; r <= rows && all_numeric; ++r) {
        const std::string& f = records[r][c];
        all_numeric = f.empty() || ParseCell(f).has_value();
      }
      kind = all_numeric ? ColumnKind::kNumeric : ColumnKind::kCategorical;
    }
    Column column;
    column.schema = {name, *kind, sensitivity.value_or(Sensitivity::kPublic)};
    if (*kind == ColumnKind::kNumeric) {
      NumericCells cells(rows);
      column.source_text.resize(rows);
      for (size_t r = 0; r < rows; ++r) {
        std::string& f = records[r + 1][c];
        if (f.empty()) continue;
        const auto value = ParseCell(f);
        if (!value) {
          return absl::InvalidArgumentError(absl::StrCat(
              "CSV row ", r + 2, ": column '", name, "' is declared numeric "
              "but cell is not a number"));
        }
        cells[r] = *value;
        column.source_text[r] = std::move(f);
      }
      column.cells = std::move(cells);
    } else {
      TextCells cells(rows);
      for (size_t r = 0; r < rows; ++r) {
        std::string& f = records[r + 1][c];
        if (!f.empty()) cells[r] = std::move(f);
      }
      column.cells = std::move(cells);
    }
    TP_RETURN_IF_ERROR(table.AddColumn(std::move(column)));
  }
  return table;
}

absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    return absl::UnavailableError(
        absl::StrCat("cannot open '", path.string(), "' for reading"));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) {
    return absl::UnavailableError(
        absl::StrCat("error while reading '", path.string(), "'"));
  }
  return std::move(buffer).str();
}

absl::Status WriteFile(const std::filesystem::path& path,
                       std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    return absl::UnavailableError(
        absl::StrCat("cannot open '", path.string(), "' for writing"));
  }
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  out.close();
  if (!out) {
    return absl::UnavailableError(
        absl::StrCat("error while writing '", path.string(), "'"));
  }
  return absl::OkStatus();
}

absl::StatusOr<Table> LoadCsv(const std::filesystem::path& path,
                              const SchemaHints& hints) {
  TP_ASSIGN_OR_RETURN(const std::string content, ReadFile(path));
  auto table = ParseCsv(content, hints);
  if (!table.ok()) {
    return absl::Status(table.status().code(),
                        absl::StrCat(path.string(), ": ",
                                     table.status().message()));
  }
  return table;
}

std::string SerializeCsv(const Table& table) {
  std::string out;
  for (size_t c = 0; c < table.column_count(); ++c) {
    if (c > 0) out.push_back(',');
    AppendField(out, table.column(c).schema.name);
  }
  out.push_back('\n');
  for (size_t r = 0; r < table.row_count(); ++r) {
    for (size_t c = 0; c < table.column_count(); ++c) {
      if (c > 0) out.push_back(',');
      const Column& column = table.column(c);
      if (column.is_numeric()) {
        const auto& cell = column.numeric()[r];
        if (!cell) continue;
        if (!column.source_text.empty()) {
          out.append(column.source_text[r]);
        } else {
          out.append(FormatDouble(*cell));
        }
      } else {
        const auto& cell = column.text()[r];
        if (cell) AppendField(out, *cell);
      }
    }
    out.push_back('\n');
  }
  return out;
}

absl::Status WriteCsv(const Table& table, const std::filesystem::path& path) {
  return WriteFile(path, SerializeCsv(table));
}

}  // namespace tabperturb
