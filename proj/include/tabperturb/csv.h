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

#ifndef TABPERTURB_CSV_H_
#define TABPERTURB_CSV_H_

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tabperturb/table.h"

namespace tabperturb {

struct SchemaHint {
  std::optional<ColumnKind> kind;
  std::optional<Sensitivity> sensitivity;
};
using SchemaHints = std::map<std::string, SchemaHint, std::less<>>;

// Parses UTF-8 CSV with a header row. An empty field is a missing cell. A
// column is numeric when every non-missing cell parses as a real, otherwise
// categorical; hints override the inferred kind.
absl::StatusOr<Table> ParseCsv(std::string_view content,
                               const SchemaHints& hints = {});

// Reads `path` and parses it. I/O failures are reported as Unavailable.
absl::StatusOr<Table> LoadCsv(const std::filesystem::path& path,
                              const SchemaHints& hints = {});

// RFC 4180 text with '\n' line endings. Numeric cells use the text they were
// read from when available, else the shortest round-tripping form.
std::string SerializeCsv(const Table& table);

absl::Status WriteCsv(const Table& table, const std::filesystem::path& path);

// Whole-file helpers shared by the CLI and pipeline.
absl::StatusOr<std::string> ReadFile(const std::filesystem::path& path);
absl::Status WriteFile(const std::filesystem::path& path,
                       std::string_view content);

}  // namespace tabperturb

#endif  // TABPERTURB_CSV_H_
