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

// Helpers for reading the JSON configuration and query formats. Every
// accessor records the key it touched so unknown keys can be listed
// afterwards.

#ifndef TABPERTURB_SRC_JSON_UTIL_H_
#define TABPERTURB_SRC_JSON_UTIL_H_

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "json.hpp"
#include "tabperturb/transforms.h"

namespace tabperturb::internal {

using Json = nlohmann::ordered_json;

absl::StatusOr<Json> ParseJson(std::string_view text, std::string_view what);

class JsonObject {
 public:
  // `path` names the object in diagnostics, e.g. "columns[2].steps[0]".
  static absl::StatusOr<JsonObject> From(const Json& value, std::string path);

  bool Has(std::string_view key) const;
  const std::string& path() const { return path_; }
  std::string KeyPath(std::string_view key) const;

  // Raw child, or nullptr when absent.
  const Json* Child(std::string_view key);

  absl::StatusOr<double> Number(std::string_view key);
  absl::StatusOr<std::optional<double>> OptionalNumber(std::string_view key);
  absl::StatusOr<double> NumberOr(std::string_view key, double fallback);
  absl::StatusOr<uint64_t> Unsigned(std::string_view key);
  absl::StatusOr<std::string> String(std::string_view key);
  absl::StatusOr<std::optional<std::string>> OptionalString(
      std::string_view key);
  absl::StatusOr<bool> BoolOr(std::string_view key, bool fallback);
  absl::StatusOr<std::vector<double>> NumberArray(std::string_view key);
  absl::StatusOr<std::vector<std::string>> StringArray(std::string_view key);

  // Dotted paths of keys never read through this object.
  std::vector<std::string> UnknownKeys() const;

 private:
  JsonObject(const Json* value, std::string path)
      : value_(value), path_(std::move(path)) {}
  absl::StatusOr<const Json*> Required(std::string_view key);

  const Json* value_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

// {"edges": [...], "labels": [...]}, {"preset": "credit_score"} or
// {"integer_ranges": {"start": 20, "width": 10, "count": 5}}.
// Unknown keys are appended to `unknown`.
absl::StatusOr<BinningScheme> ParseBinning(const Json& value,
                                           const std::string& path,
                                           std::vector<std::string>& unknown);

Json BinningToJson(const BinningScheme& scheme);
// Inverse of BinningToJson.
absl::StatusOr<BinningScheme> BinningFromJson(const Json& value);

// Numbers that JSON cannot carry are written as strings.
Json NumberToJson(double value);

}  // namespace tabperturb::internal

#endif  // TABPERTURB_SRC_JSON_UTIL_H_
