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

#include "json_util.h"

#include <cmath>
#include <limits>

#include "absl/strings/str_cat.h"
#include "tabperturb/status_macros.h"

namespace tabperturb::internal {

absl::StatusOr<Json> ParseJson(std::string_view text, std::string_view what) {
  Json value = Json::parse(text.begin(), text.end(), nullptr,
                           /*allow_exceptions=*/false);
  if (value.is_discarded()) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(what), " is not valid JSON"));
  }
  return value;
}

absl::StatusOr<JsonObject> JsonObject::From(const Json& value,
                                            std::string path) {
  if (!value.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", path.empty() ? "<root>" : path, "' must be an object"));
  }
  return JsonObject(&value, std::move(path));
}

bool JsonObject::Has(std::string_view key) const {
  return value_->contains(std::string(key));
}

std::string JsonObject::KeyPath(std::string_view key) const {
  return path_.empty() ? std::string(key) : absl::StrCat(path_, ".", std::string(key));
}

const Json* JsonObject::Child(std::string_view key) {
  seen_.insert(std::string(key));
  auto it = value_->find(std::string(key));
  return it == value_->end() ? nullptr : &*it;
}

absl::StatusOr<const Json*> JsonObject::Required(std::string_view key) {
  const Json* child = Child(key);
  if (child == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("missing required key '", KeyPath(key), "'"));
  }
  return child;
}

absl::StatusOr<double> JsonObject::Number(std::string_view key) {
  TP_ASSIGN_OR_RETURN(const Json* child, Required(key));
  if (!child->is_number()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", KeyPath(key), "' must be a number"));
  }
  return child->get<double>();
}

absl::StatusOr<std::optional<double>> JsonObject::OptionalNumber(
    std::string_view key) {
  if (!Has(key)) {
    seen_.insert(std::string(key));
    return std::optional<double>();
  }
  TP_ASSIGN_OR_RETURN(double v, Number(key));
  return std::optional<double>(v);
}

absl::StatusOr<double> JsonObject::NumberOr(std::string_view key,
                                            double fallback) {
  TP_ASSIGN_OR_RETURN(std::optional<double> v, OptionalNumber(key));
  return v.value_or(fallback);
}

absl::StatusOr<uint64_t> JsonObject::Unsigned(std::string_view key) {
  TP_ASSIGN_OR_RETURN(const Json* child, Required(key));
  if (!child->is_number_unsigned()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", KeyPath(key), "' must be a non-negative integer"));
  }
  return child->get<uint64_t>();
}

absl::StatusOr<std::string> JsonObject::String(std::string_view key) {
  TP_ASSIGN_OR_RETURN(const Json* child, Required(key));
  if (!child->is_string()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", KeyPath(key), "' must be a string"));
  }
  return child->get<std::string>();
}

absl::StatusOr<std::optional<std::string>> JsonObject::OptionalString(
    std::string_view key) {
  if (!Has(key)) {
    seen_.insert(std::string(key));
    return std::optional<std::string>();
  }
  TP_ASSIGN_OR_RETURN(std::string v, String(key));
  return std::optional<std::string>(std::move(v));
}

absl::StatusOr<bool> JsonObject::BoolOr(std::string_view key, bool fallback) {
  const Json* child = Child(key);
  if (child == nullptr) return fallback;
  if (!child->is_boolean()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", KeyPath(key), "' must be true or false"));
  }
  return child->get<bool>();
}

absl::StatusOr<std::vector<double>> JsonObject::NumberArray(
    std::string_view key) {
  TP_ASSIGN_OR_RETURN(const Json* child, Required(key));
  std::vector<double> out;
  if (child->is_array()) {
    for (const Json& item : *child) {
      if (!item.is_number()) break;
      out.push_back(item.get<double>());
    }
    if (out.size() == child->size()) return out;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("'", KeyPath(key), "' must be an array of numbers"));
}

absl::StatusOr<std::vector<std::string>> JsonObject::StringArray(
    std::string_view key) {
  TP_ASSIGN_OR_RETURN(const Json* child, Required(key));
  std::vector<std::string> out;
  if (child->is_array()) {
    for (const Json& item : *child) {
      if (!item.is_string()) break;
      out.push_back(item.get<std::string>());
    }
    if (out.size() == child->size()) return out;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("'", KeyPath(key), "' must be an array of strings"));
}

std::vector<std::string> JsonObject::UnknownKeys() const {
  std::vector<std::string> out;
  for (const auto& [key, unused] : value_->items()) {
    if (!seen_.contains(key)) out.push_back(KeyPath(key));
  }
  return out;
}

absl::StatusOr<BinningScheme> ParseBinning(const Json& value,
                                           const std::string& path,
                                           std::vector<std::string>& unknown) {
  TP_ASSIGN_OR_RETURN(JsonObject bins, JsonObject::From(value, path));
  absl::StatusOr<BinningScheme> scheme;
  if (bins.Has("preset")) {
    TP_ASSIGN_OR_RETURN(std::string preset, bins.String("preset"));
    if (preset != "credit_score") {
      return absl::InvalidArgumentError(absl::StrCat(
          "'", bins.KeyPath("preset"), "': unknown preset '", preset,
          "' (known: credit_score)"));
    }
    scheme = BinningScheme::CreditScoreBands();
  } else if (bins.Has("integer_ranges")) {
    TP_ASSIGN_OR_RETURN(
        JsonObject ranges,
        JsonObject::From(*bins.Child("integer_ranges"),
                         bins.KeyPath("integer_ranges")));
    TP_ASSIGN_OR_RETURN(double start, ranges.Number("start"));
    TP_ASSIGN_OR_RETURN(uint64_t width, ranges.Unsigned("width"));
    TP_ASSIGN_OR_RETURN(uint64_t count, ranges.Unsigned("count"));
    if (start != std::floor(start)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "'", ranges.KeyPath("start"), "' must be an integer"));
    }
    for (auto& k : ranges.UnknownKeys()) unknown.push_back(std::move(k));
    scheme = BinningScheme::IntegerRanges(static_cast<int64_t>(start),
                                          static_cast<int64_t>(width), count);
  } else {
    TP_ASSIGN_OR_RETURN(std::vector<double> edges, bins.NumberArray("edges"));
    TP_ASSIGN_OR_RETURN(std::vector<std::string> labels,
                        bins.StringArray("labels"));
    TP_ASSIGN_OR_RETURN(bool last_closed, bins.BoolOr("last_closed", true));
    scheme = BinningScheme::Create(std::move(edges), std::move(labels),
                                   last_closed);
  }
  for (auto& k : bins.UnknownKeys()) unknown.push_back(std::move(k));
  if (!scheme.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat("'", path, "': ", scheme.status().message()));
  }
  return scheme;
}

Json NumberToJson(double value) {
  if (std::isfinite(value)) return value;
  if (std::isnan(value)) return "nan";
  return value > 0 ? "inf" : "-inf";
}

Json BinningToJson(const BinningScheme& scheme) {
  Json edges = Json::array();
  for (double e : scheme.edges()) edges.push_back(NumberToJson(e));
  Json out{{"edges", std::move(edges)}, {"labels", scheme.labels()}};
  if (!scheme.last_closed()) out["last_closed"] = false;
  return out;
}

absl::StatusOr<BinningScheme> BinningFromJson(const Json& value) {
  if (!value.is_object() || !value.contains("edges") ||
      !value.contains("labels") || !value["edges"].is_array() ||
      !value["labels"].is_array()) {
    return absl::InvalidArgumentError("binning record needs edges and labels");
  }
  std::vector<double> edges;
  for (const Json& e : value["edges"]) {
    if (e.is_number()) {
      edges.push_back(e.get<double>());
    } else if (e == "inf") {
      edges.push_back(std::numeric_limits<double>::infinity());
    } else if (e == "-inf") {
      edges.push_back(-std::numeric_limits<double>::infinity());
    } else {
      return absl::InvalidArgumentError("binning edge is not a number");
    }
  }
  std::vector<std::string> labels;
  for (const Json& l : value["labels"]) {
    if (!l.is_string()) {
      return absl::InvalidArgumentError("binning label is not a string");
    }
    labels.push_back(l.get<std::string>());
  }
  bool last_closed = true;
  if (value.contains("last_closed")) {
    if (!value["last_closed"].is_boolean()) {
      return absl::InvalidArgumentError("binning last_closed is not a boolean");
    }
    last_closed = value["last_closed"].get<bool>();
  }
  return BinningScheme::Create(std::move(edges), std::move(labels),
                               last_closed);
}

}  // namespace tabperturb::internal
