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

#ifndef TABPERTURB_FIDELITY_H_
#define TABPERTURB_FIDELITY_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tabperturb/table.h"
#include "tabperturb/transforms.h"

namespace tabperturb {

// Two-sample Kolmogorov-Smirnov statistic: the largest distance between the
// two empirical CDFs, computed exactly by merging the sorted samples. Both
// samples must be non-empty and finite.
absl::StatusOr<double> KsTwoSample(std::span<const double> a,
                                   std::span<const double> b);

struct ChiSquareResult {
  double statistic = 0.0;
  size_t dof = 0;
};

// Pearson chi-square of b's category counts against a's distribution scaled
// to b's size. Categories with zero expected count are pooled into one
// "other" bucket, which is folded into the smallest expected bucket when it
// would still have zero expectation.
absl::StatusOr<ChiSquareResult> ChiSquareCategorical(
    std::span<const std::string> a, std::span<const std::string> b);

struct MomentDeltas {
  double mean_delta = 0.0;
  // var(b) / var(a) with unbiased variances; nullopt when var(a) == 0.
  std::optional<double> variance_ratio;
};

absl::StatusOr<MomentDeltas> ComputeMomentDeltas(std::span<const double> a,
                                                 std::span<const double> b);

struct CorrelationDelta {
  // Largest absolute entrywise difference of the Pearson matrices; nullopt
  // when fewer than two usable columns remain.
  std::optional<double> max_abs_delta;
  std::vector<std::string> columns;
  std::vector<std::string> notices;
};

// Compares Pearson correlation matrices of `columns` in the two tables. Each
// pair uses the rows where both cells are present in both tables. Columns
// that are constant in either table are excluded with a notice.
absl::StatusOr<CorrelationDelta> ComputeCorrelationDelta(
    const Table& original, const Table& processed,
    std::span<const std::string> columns);

struct NumericColumnFidelity {
  std::string column;
  double ks_statistic = 0.0;
  double mean_delta = 0.0;
  std::optional<double> variance_ratio;
  double min_delta = 0.0;
  double max_delta = 0.0;
  size_t n_original = 0;
  size_t n_processed = 0;
  size_t excluded_original = 0;
  size_t excluded_processed = 0;
};

struct CategoricalColumnFidelity {
  std::string column;
  double chi2_statistic = 0.0;
  size_t dof = 0;
  int64_t category_count_delta = 0;
  bool compared_after_binning = false;
  size_t n_original = 0;
  size_t n_processed = 0;
  size_t excluded_original = 0;
  size_t excluded_processed = 0;
};

struct TextColumnFidelity {
  std::string column;
  double information_loss = 0.0;
};

// What the report needs to know about how the processed table was made.
struct ReportContext {
  // Columns converted numeric -> categorical, with the scheme used.
  std::map<std::string, BinningScheme> binning;
  // Columns rewritten by masking or PII substitution.
  std::set<std::string> text_columns;
  std::string manifest_digest;
};

struct FidelityReport {
  size_t rows_original = 0;
  size_t rows_processed = 0;
  std::vector<NumericColumnFidelity> numeric;
  std::vector<CategoricalColumnFidelity> categorical;
  std::vector<TextColumnFidelity> text;
  CorrelationDelta correlation;
  std::vector<std::string> notices;
  std::string manifest_digest;

  // Machine-readable form. Includes a reserved, empty slot for externally
  // supplied model-utility metrics.
  std::string ToJson() const;
  // Human-readable summary table.
  std::string ToText() const;
};

// Fails when the column sets differ or a kind change is not explained by
// binning.
absl::StatusOr<FidelityReport> BuildReport(const Table& original,
                                           const Table& processed,
                                           const ReportContext& context);

}  // namespace tabperturb

#endif  // TABPERTURB_FIDELITY_H_
