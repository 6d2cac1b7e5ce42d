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

#ifndef TABPERTURB_QUERY_H_
#define TABPERTURB_QUERY_H_

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tabperturb/ledger.h"
#include "tabperturb/mechanisms.h"
#include "tabperturb/random.h"
#include "tabperturb/table.h"
#include "tabperturb/transforms.h"

namespace tabperturb {

enum class QueryKind { kCount, kSum, kMean, kHistogram };
enum class QueryMechanism { kLaplace, kGaussian, kGeometric };
enum class Comparator { kEq, kNe, kLt, kLe, kGt, kGe };

std::string_view QueryKindName(QueryKind kind);
absl::StatusOr<QueryKind> ParseQueryKind(std::string_view name);
std::string_view QueryMechanismName(QueryMechanism mechanism);
absl::StatusOr<QueryMechanism> ParseQueryMechanism(std::string_view name);
std::string_view ComparatorSymbol(Comparator op);
absl::StatusOr<Comparator> ParseComparator(std::string_view symbol);

// One comparison clause. Numeric columns compare as reals; other columns
// compare as byte strings. Missing cells never satisfy a predicate.
struct Predicate {
  std::string column;
  Comparator op = Comparator::kEq;
  std::string literal;
};

struct QuerySpec {
  QueryKind kind = QueryKind::kCount;
  // Required except for count, where it optionally restricts the count to
  // rows with a present cell.
  std::string column;
  std::optional<Predicate> predicate;
  // Clamping range for sum and mean; defines the sensitivity hi - lo.
  std::optional<std::pair<double, double>> value_bounds;
  std::optional<BinningScheme> bins;
  QueryMechanism mechanism = QueryMechanism::kLaplace;
  // `sensitivity` is derived from the query and ignored here.
  PrivacyParams params;
  // Histogram only: clamp noisy counts at zero (post-processing).
  bool non_negative = false;
  CalibrationMode calibration = CalibrationMode::kStrict;

  // Table-independent checks.
  absl::Status Validate() const;
};

struct HistogramCount {
  std::string label;
  double noisy_count = 0.0;
};

// Everything a query releases. Parameters are public; the exact statistic
// is never part of the result.
struct QueryResult {
  QueryKind kind = QueryKind::kCount;
  QueryMechanism mechanism = QueryMechanism::kLaplace;
  std::string column;
  double epsilon = 0.0;
  double delta = 0.0;
  double sensitivity = 1.0;
  // Laplace b, Gaussian sigma, or the geometric epsilon.
  double noise_scale = 0.0;
  // count, sum and mean.
  std::optional<double> value;
  // histogram: one entry per scheme label, then the out-of-range bucket.
  std::vector<HistogramCount> histogram;
  // mean: the selected row count, treated as public.
  std::optional<size_t> public_n;
  std::vector<std::string> assumptions;

  std::string ToJson() const;
};

// Each query validates against the table, then charges the ledger, then
// computes. Refusals leave the ledger unchanged and carry no data.
absl::StatusOr<QueryResult> DpCount(const Table& table, const QuerySpec& spec,
                                    PrivacyLedger& ledger, RandomSource& src);
absl::StatusOr<QueryResult> DpSum(const Table& table, const QuerySpec& spec,
                                  PrivacyLedger& ledger, RandomSource& src);
// Noisy clamped sum divided by the selected row count n, which is assumed
// public. One charge.
absl::StatusOr<QueryResult> DpMean(const Table& table, const QuerySpec& spec,
                                   PrivacyLedger& ledger, RandomSource& src);
// Per-bin noise at sensitivity 1 under one charge (disjoint bins).
absl::StatusOr<QueryResult> DpHistogram(const Table& table,
                                        const QuerySpec& spec,
                                        PrivacyLedger& ledger,
                                        RandomSource& src);
// Dispatches on spec.kind.
absl::StatusOr<QueryResult> RunQuery(const Table& table, const QuerySpec& spec,
                                     PrivacyLedger& ledger, RandomSource& src);

// JSON query file, for example
//   {"kind": "sum", "column": "income", "bounds": [0, 200000],
//    "where": {"column": "age", "op": ">=", "value": 30},
//    "mechanism": "laplace", "epsilon": 0.5}
// Histograms take "bins" in the pipeline binning format. Unknown keys are
// errors naming the key.
absl::StatusOr<QuerySpec> ParseQuerySpec(std::string_view json);

}  // namespace tabperturb

#endif  // TABPERTURB_QUERY_H_
