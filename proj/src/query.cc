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

#include "tabperturb/query.h"

#include <algorithm>
#include <cmath>

#include "absl/strings/str_cat.h"
#include "json_util.h"
#include "tabperturb/status_macros.h"
#include "tabperturb/text_util.h"

namespace tabperturb {
namespace {

using internal::Json;
using internal::JsonObject;

constexpr std::pair<QueryKind, std::string_view> kKindNames[] = {
    {QueryKind::kCount, "count"},
    {QueryKind::kSum, "sum"},
    {QueryKind::kMean, "mean"},
    {QueryKind::kHistogram, "histogram"},
};

constexpr std::pair<QueryMechanism, std::string_view> kMechanismNames[] = {
    {QueryMechanism::kLaplace, "laplace"},
    {QueryMechanism::kGaussian, "gaussian"},
    {QueryMechanism::kGeometric, "geometric"},
};

constexpr std::pair<Comparator, std::string_view> kComparators[] = {
    {Comparator::kEq, "=="}, {Comparator::kNe, "!="}, {Comparator::kLt, "<"},
    {Comparator::kLe, "<="}, {Comparator::kGt, ">"},  {Comparator::kGe, ">="},
};

template <typename T>
bool Compare(const T& lhs, Comparator op, const T& rhs) {
  switch (op) {
    case Comparator::kEq: return lhs == rhs;
    case Comparator::kNe: return lhs != rhs;
    case Comparator::kLt: return lhs < rhs;
    case Comparator::kLe: return lhs <= rhs;
    case Comparator::kGt: return lhs > rhs;
    case Comparator::kGe: return lhs >= rhs;
  }
  return false;
}

// Row mask of the predicate, or all rows when there is none.
absl::StatusOr<std::vector<bool>> Select(const Table& table,
                                         const std::optional<Predicate>& p) {
  std::vector<bool> selected(table.row_count(), true);
  if (!p) return selected;
  const Column* column = table.Find(p->column);
  if (column == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("predicate column '", p->column, "' does not exist"));
  }
  if (column->is_numeric()) {
    auto literal = ParseDouble(p->literal);
    if (!literal) {
      return absl::InvalidArgumentError(
          absl::StrCat("predicate value '", p->literal,
                       "' is not a number but column '", p->column,
                       "' is numeric"));
    }
    const NumericCells& cells = column->numeric();
    for (size_t r = 0; r < cells.size(); ++r) {
      selected[r] = cells[r] && Compare(*cells[r], p->op, *literal);
    }
  } else {
    const TextCells& cells = column->text();
    for (size_t r = 0; r < cells.size(); ++r) {
      selected[r] = cells[r] && Compare(*cells[r], p->op, p->literal);
    }
  }
  return selected;
}

absl::StatusOr<const Column*> NumericColumn(const Table& table,
                                            const QuerySpec& spec) {
  const Column* column = table.Find(spec.column);
  if (column == nullptr) {
    return absl::InvalidArgumentError(
        absl::StrCat("query column '", spec.column, "' does not exist"));
  }
  if (!column->is_numeric()) {
    return absl::InvalidArgumentError(absl::StrCat(
        std::string(QueryKindName(spec.kind)), " needs a numeric column; '", spec.column,
        "' is ", std::string(ColumnKindName(column->schema.kind))));
  }
  return column;
}

absl::Status CheckKind(const QuerySpec& spec, QueryKind expected) {
  if (spec.kind != expected) {
    return absl::InvalidArgumentError(
        absl::StrCat("query kind is ", std::string(QueryKindName(spec.kind)), ", expected ",
                     std::string(QueryKindName(expected))));
  }
  return spec.Validate();
}

PrivacyParams MechanismParams(const QuerySpec& spec, double sensitivity) {
  PrivacyParams p = spec.params;
  p.sensitivity = sensitivity;
  return p;
}

std::string LedgerLabel(const QuerySpec& spec) {
  return absl::StrCat("query:", std::string(QueryKindName(spec.kind)), "(",
                      spec.column.empty() ? std::string("*") : spec.column, ")");
}

QueryResult ResultSkeleton(const QuerySpec& spec, double sensitivity) {
  QueryResult r;
  r.kind = spec.kind;
  r.mechanism = spec.mechanism;
  r.column = spec.column;
  r.epsilon = spec.params.epsilon;
  r.delta = spec.mechanism == QueryMechanism::kGaussian ? spec.params.delta : 0.0;
  r.sensitivity = sensitivity;
  const PrivacyParams p = MechanismParams(spec, sensitivity);
  switch (spec.mechanism) {
    case QueryMechanism::kLaplace: r.noise_scale = LaplaceScale(p); break;
    case QueryMechanism::kGaussian: r.noise_scale = GaussianSigma(p); break;
    case QueryMechanism::kGeometric: r.noise_scale = spec.params.epsilon; break;
  }
  return r;
}

// Charges the ledger for `spec`; nothing is computed on refusal.
absl::Status ChargeFor(const QuerySpec& spec, PrivacyLedger& ledger) {
  const double delta =
      spec.mechanism == QueryMechanism::kGaussian ? spec.params.delta : 0.0;
  return ledger.Charge(LedgerLabel(spec), spec.params.epsilon, delta);
}

absl::StatusOr<double> Release(double true_value, const QuerySpec& spec,
                               double sensitivity, RandomSource& src) {
  const PrivacyParams p = MechanismParams(spec, sensitivity);
  switch (spec.mechanism) {
    case QueryMechanism::kLaplace:
      return LaplaceMechanism(true_value, p, src);
    case QueryMechanism::kGaussian:
      return GaussianMechanism(true_value, p, src, spec.calibration);
    case QueryMechanism::kGeometric: {
      TP_ASSIGN_OR_RETURN(
          int64_t noisy,
          GeometricMechanism(static_cast<int64_t>(std::llround(true_value)),
                             spec.params.epsilon, src));
      return static_cast<double>(noisy);
    }
  }
  return absl::InternalError("unhandled mechanism");
}

struct ClampedSum {
  double sum = 0.0;
  size_t n = 0;
};

absl::StatusOr<ClampedSum> SumSelected(const Table& table,
                                       const QuerySpec& spec) {
  TP_ASSIGN_OR_RETURN(const Column* column, NumericColumn(table, spec));
  TP_ASSIGN_OR_RETURN(std::vector<bool> selected, Select(table, spec.predicate));
  const auto [lo, hi] = *spec.value_bounds;
  ClampedSum out;
  const NumericCells& cells = column->numeric();
  for (size_t r = 0; r < cells.size(); ++r) {
    if (!selected[r] || !cells[r] || std::isnan(*cells[r])) continue;
    out.sum += std::clamp(*cells[r], lo, hi);
    ++out.n;
  }
  return out;
}

}  // namespace

std::string_view QueryKindName(QueryKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

absl::StatusOr<QueryKind> ParseQueryKind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown query kind '", std::string(name), "' (expected count, sum, mean or histogram)"));
}

std::string_view QueryMechanismName(QueryMechanism mechanism) {
  for (const auto& [m, name] : kMechanismNames) {
    if (m == mechanism) return name;
  }
  return "unknown";
}

absl::StatusOr<QueryMechanism> ParseQueryMechanism(std::string_view name) {
  for (const auto& [m, n] : kMechanismNames) {
    if (n == name) return m;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "unknown mechanism '", std::string(name), "' (expected laplace, gaussian or geometric)"));
}

std::string_view ComparatorSymbol(Comparator op) {
  for (const auto& [c, symbol] : kComparators) {
    if (c == op) return symbol;
  }
  return "?";
}

absl::StatusOr<Comparator> ParseComparator(std::string_view symbol) {
  if (symbol == "=") return Comparator::kEq;
  for (const auto& [c, s] : kComparators) {
    if (s == symbol) return c;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown comparator '", std::string(symbol), "'"));
}

absl::Status QuerySpec::Validate() const {
  PrivacyParams p = params;
  p.sensitivity = 1.0;
  TP_RETURN_IF_ERROR(p.Validate());
  switch (mechanism) {
    case QueryMechanism::kLaplace:
    case QueryMechanism::kGeometric:
      if (params.delta != 0.0) {
        return absl::FailedPreconditionError(absl::StrCat(
            "mechanism mismatch: ", std::string(QueryMechanismName(mechanism)),
            " is pure DP and needs delta = 0"));
      }
      break;
    case QueryMechanism::kGaussian:
      TP_RETURN_IF_ERROR(CheckGaussianParams(p, calibration));
      break;
  }
  if (mechanism == QueryMechanism::kGeometric &&
      (kind == QueryKind::kSum || kind == QueryKind::kMean)) {
    return absl::InvalidArgumentError(
        "the geometric mechanism is only valid for count and histogram");
  }
  if (kind == QueryKind::kHistogram) {
    if (mechanism == QueryMechanism::kGaussian) {
      return absl::InvalidArgumentError(
          "histograms take the laplace or geometric mechanism");
    }
    if (!bins) return absl::InvalidArgumentError("histogram needs bins");
  }
  if (kind != QueryKind::kCount && column.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(QueryKindName(kind)), " needs a column"));
  }
  if (kind == QueryKind::kSum || kind == QueryKind::kMean) {
    if (!value_bounds) {
      return absl::InvalidArgumentError(absl::StrCat(
          std::string(QueryKindName(kind)), " needs value bounds [lo, hi]"));
    }
    const auto [lo, hi] = *value_bounds;
    if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
      return absl::InvalidArgumentError(
          "value bounds must be finite with lo < hi");
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<QueryResult> DpCount(const Table& table, const QuerySpec& spec,
                                    PrivacyLedger& ledger, RandomSource& src) {
  TP_RETURN_IF_ERROR(CheckKind(spec, QueryKind::kCount));
  const Column* column = nullptr;
  if (!spec.column.empty()) {
    column = table.Find(spec.column);
    if (column == nullptr) {
      return absl::InvalidArgumentError(
          absl::StrCat("query column '", spec.column, "' does not exist"));
    }
  }
  TP_ASSIGN_OR_RETURN(std::vector<bool> selected, Select(table, spec.predicate));
  TP_RETURN_IF_ERROR(ChargeFor(spec, ledger));

  size_t count = 0;
  for (size_t r = 0; r < table.row_count(); ++r) {
    if (!selected[r]) continue;
    if (column != nullptr) {
      const bool present = column->is_numeric() ? column->numeric()[r].has_value()
                                                : column->text()[r].has_value();
      if (!present) continue;
    }
    ++count;
  }
  QueryResult result = ResultSkeleton(spec, 1.0);
  TP_ASSIGN_OR_RETURN(result.value,
                      Release(static_cast<double>(count), spec, 1.0, src));
  return result;
}

absl::StatusOr<QueryResult> DpSum(const Table& table, const QuerySpec& spec,
                                  PrivacyLedger& ledger, RandomSource& src) {
  TP_RETURN_IF_ERROR(CheckKind(spec, QueryKind::kSum));
  TP_ASSIGN_OR_RETURN(ClampedSum clamped, SumSelected(table, spec));
  TP_RETURN_IF_ERROR(ChargeFor(spec, ledger));
  const double sensitivity = spec.value_bounds->second - spec.value_bounds->first;
  QueryResult result = ResultSkeleton(spec, sensitivity);
  TP_ASSIGN_OR_RETURN(result.value, Release(clamped.sum, spec, sensitivity, src));
  result.assumptions.push_back("values clamped to the declared bounds");
  return result;
}

absl::StatusOr<QueryResult> DpMean(const Table& table, const QuerySpec& spec,
                                   PrivacyLedger& ledger, RandomSource& src) {
  TP_RETURN_IF_ERROR(CheckKind(spec, QueryKind::kMean));
  TP_ASSIGN_OR_RETURN(ClampedSum clamped, SumSelected(table, spec));
  if (clamped.n == 0) {
    return absl::InvalidArgumentError("mean over an empty selection");
  }
  TP_RETURN_IF_ERROR(ChargeFor(spec, ledger));
  const double sensitivity = spec.value_bounds->second - spec.value_bounds->first;
  QueryResult result = ResultSkeleton(spec, sensitivity);
  TP_ASSIGN_OR_RETURN(double noisy_sum,
                      Release(clamped.sum, spec, sensitivity, src));
  result.value = noisy_sum / static_cast<double>(clamped.n);
  result.public_n = clamped.n;
  result.assumptions.push_back("values clamped to the declared bounds");
  result.assumptions.push_back(
      "row count n is treated as public; noise is calibrated to the sum only");
  return result;
}

absl::StatusOr<QueryResult> DpHistogram(const Table& table,
                                        const QuerySpec& spec,
                                        PrivacyLedger& ledger,
                                        RandomSource& src) {
  TP_RETURN_IF_ERROR(CheckKind(spec, QueryKind::kHistogram));
  TP_ASSIGN_OR_RETURN(const Column* column, NumericColumn(table, spec));
  TP_ASSIGN_OR_RETURN(std::vector<bool> selected, Select(table, spec.predicate));
  TP_RETURN_IF_ERROR(ChargeFor(spec, ledger));

  const BinningScheme& scheme = *spec.bins;
  const size_t bins = scheme.labels().size();
  std::vector<size_t> counts(bins + 1, 0);
  const NumericCells& cells = column->numeric();
  for (size_t r = 0; r < cells.size(); ++r) {
    if (!selected[r] || !cells[r]) continue;
    const auto bin = std::isfinite(*cells[r]) ? scheme.Assign(*cells[r])
                                              : std::optional<size_t>();
    ++counts[bin.value_or(bins)];
  }
  QueryResult result = ResultSkeleton(spec, 1.0);
  for (size_t b = 0; b <= bins; ++b) {
    TP_ASSIGN_OR_RETURN(double noisy,
                        Release(static_cast<double>(counts[b]), spec, 1.0, src));
    if (spec.non_negative) noisy = std::max(noisy, 0.0);
    result.histogram.push_back(
        {b < bins ? scheme.labels()[b] : std::string(kOutOfRangeLabel), noisy});
  }
  if (spec.non_negative) {
    result.assumptions.push_back("noisy counts clamped at zero (post-processing)");
  }
  return result;
}

absl::StatusOr<QueryResult> RunQuery(const Table& table, const QuerySpec& spec,
                                     PrivacyLedger& ledger, RandomSource& src) {
  switch (spec.kind) {
    case QueryKind::kCount: return DpCount(table, spec, ledger, src);
    case QueryKind::kSum: return DpSum(table, spec, ledger, src);
    case QueryKind::kMean: return DpMean(table, spec, ledger, src);
    case QueryKind::kHistogram: return DpHistogram(table, spec, ledger, src);
  }
  return absl::InternalError("unhandled query kind");
}

std::string QueryResult::ToJson() const {
  Json j;
  j["query"] = std::string((QueryKindName(kind)));
  j["column"] = column.empty() ? Json(nullptr) : Json(column);
  j["mechanism"] = std::string((QueryMechanismName(mechanism)));
  j["epsilon"] = epsilon;
  j["delta"] = delta;
  j["sensitivity"] = sensitivity;
  j[mechanism == QueryMechanism::kLaplace    ? "laplace_scale"
    : mechanism == QueryMechanism::kGaussian ? "gaussian_sigma"
                                             : "geometric_epsilon"] = noise_scale;
  if (value) j["result"] = internal::NumberToJson(*value);
  if (!histogram.empty()) {
    Json bins = Json::array();
    for (const auto& h : histogram) {
      bins.push_back({{"label", h.label},
                      {"noisy_count", internal::NumberToJson(h.noisy_count)}});
    }
    j["histogram"] = std::move(bins);
  }
  if (public_n) j["public_n"] = *public_n;
  j["assumptions"] = assumptions;
  return j.dump(2) + "\n";
}

absl::StatusOr<QuerySpec> ParseQuerySpec(std::string_view text) {
  TP_ASSIGN_OR_RETURN(Json root, internal::ParseJson(text, "query file"));
  TP_ASSIGN_OR_RETURN(JsonObject q, JsonObject::From(root, ""));
  std::vector<std::string> unknown;
  QuerySpec spec;
  TP_ASSIGN_OR_RETURN(std::string kind, q.String("kind"));
  TP_ASSIGN_OR_RETURN(spec.kind, ParseQueryKind(kind));
  TP_ASSIGN_OR_RETURN(std::optional<std::string> column, q.OptionalString("column"));
  spec.column = column.value_or("");
  if (const Json* where = q.Child("where")) {
    TP_ASSIGN_OR_RETURN(JsonObject w, JsonObject::From(*where, "where"));
    Predicate p;
    TP_ASSIGN_OR_RETURN(p.column, w.String("column"));
    TP_ASSIGN_OR_RETURN(std::string op, w.String("op"));
    TP_ASSIGN_OR_RETURN(p.op, ParseComparator(op));
    const Json* value = w.Child("value");
    if (value == nullptr) {
      return absl::InvalidArgumentError("missing required key 'where.value'");
    }
    if (value->is_string()) {
      p.literal = value->get<std::string>();
    } else if (value->is_number()) {
      p.literal = FormatDouble(value->get<double>());
    } else {
      return absl::InvalidArgumentError(
          "'where.value' must be a string or a number");
    }
    for (auto& k : w.UnknownKeys()) unknown.push_back(std::move(k));
    spec.predicate = std::move(p);
  }
  if (q.Has("bounds")) {
    TP_ASSIGN_OR_RETURN(std::vector<double> bounds, q.NumberArray("bounds"));
    if (bounds.size() != 2) {
      return absl::InvalidArgumentError("'bounds' must be [lo, hi]");
    }
    spec.value_bounds = std::make_pair(bounds[0], bounds[1]);
  } else {
    q.Child("bounds");
  }
  if (const Json* bins = q.Child("bins")) {
    TP_ASSIGN_OR_RETURN(spec.bins, internal::ParseBinning(*bins, "bins", unknown));
  }
  TP_ASSIGN_OR_RETURN(std::optional<std::string> mechanism,
                      q.OptionalString("mechanism"));
  if (mechanism) {
    TP_ASSIGN_OR_RETURN(spec.mechanism, ParseQueryMechanism(*mechanism));
  }
  TP_ASSIGN_OR_RETURN(spec.params.epsilon, q.Number("epsilon"));
  TP_ASSIGN_OR_RETURN(spec.params.delta, q.NumberOr("delta", 0.0));
  TP_ASSIGN_OR_RETURN(spec.non_negative, q.BoolOr("non_negative", false));
  TP_ASSIGN_OR_RETURN(bool permissive, q.BoolOr("permissive", false));
  spec.calibration =
      permissive ? CalibrationMode::kPermissive : CalibrationMode::kStrict;
  for (auto& k : q.UnknownKeys()) unknown.push_back(std::move(k));
  if (!unknown.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown key '", unknown.front(), "' in query file"));
  }
  TP_RETURN_IF_ERROR(spec.Validate());
  return spec;
}

}  // namespace tabperturb
