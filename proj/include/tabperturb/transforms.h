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

#ifndef TABPERTURB_TRANSFORMS_H_
#define TABPERTURB_TRANSFORMS_H_

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tabperturb/distributions.h"
#include "tabperturb/random.h"
#include "tabperturb/table.h"

namespace tabperturb {

// A cell that a transform could not process. The cell is passed through
// unchanged and the row is flagged.
struct CellIssue {
  size_t row = 0;
  std::string message;
};

struct NumericResult {
  NumericCells cells;
  size_t cells_affected = 0;
  std::vector<CellIssue> issues;
};

// output[i] = column[i] + noise_i for a continuous scalar noise spec.
absl::StatusOr<NumericResult> AddNoise(const NumericCells& column,
                                       const NoiseSpec& spec,
                                       RandomSource& src);

// output[i] = column[i] * factors[i]. Non-positive inputs are reported and
// passed through.
absl::StatusOr<NumericResult> ScaleByFactors(const NumericCells& column,
                                             std::span<const double> factors);

// Draws k_i ~ Uniform[lo, hi) per present cell and scales by it. Requires
// 0 < lo and hi - lo >= 1e-12.
absl::StatusOr<NumericResult> MultiplicativePerturbation(
    const NumericCells& column, double lo, double hi, RandomSource& src);

// Multiplicative scaling followed by Lap(sensitivity / epsilon) noise.
absl::StatusOr<NumericResult> HybridPerturbation(const NumericCells& column,
                                                 double lo, double hi,
                                                 double sensitivity,
                                                 double epsilon,
                                                 RandomSource& src);

// Label emitted for finite values outside the scheme's range and for
// non-finite values.
inline constexpr std::string_view kOutOfRangeLabel = "<out of range>";

// Left-closed, right-open intervals. The last interval is closed on both
// ends unless `last_closed` is false.
class BinningScheme {
 public:
  static absl::StatusOr<BinningScheme> Create(std::vector<double> edges,
                                              std::vector<std::string> labels,
                                              bool last_closed = true);

  // Consecutive integer ranges labelled "a–b" (en dash), e.g. 20–29. Every
  // interval is right-open, so 100 falls outside a last range "90–99".
  static absl::StatusOr<BinningScheme> IntegerRanges(int64_t start,
                                                     int64_t width,
                                                     size_t count);

  // 300–579 Poor, 580–669 Fair, 670–739 Good, 740–799 Very Good,
  // 800–850 Excellent.
  static BinningScheme CreditScoreBands();

  // Index of the interval holding `value`, or nullopt when out of range.
  std::optional<size_t> Assign(double value) const;

  const std::vector<double>& edges() const { return edges_; }
  const std::vector<std::string>& labels() const { return labels_; }
  bool last_closed() const { return last_closed_; }

 private:
  BinningScheme() = default;
  std::vector<double> edges_;
  std::vector<std::string> labels_;
  bool last_closed_ = true;
};

struct BinResult {
  TextCells labels;
  size_t out_of_range = 0;
};

BinResult Bin(const NumericCells& column, const BinningScheme& scheme);

enum class ClipDerivation { kExplicit, kMeanPlusMinus3Sigma, kQuantile };

struct ClipBounds {
  double lo = 0.0;
  double hi = 0.0;
  ClipDerivation derivation = ClipDerivation::kExplicit;
};

// Bounds from the finite cells of `column`: sample mean +/- 3 sample
// standard deviations, or the (p_lo, p_hi) quantiles with linear
// interpolation between order statistics.
absl::StatusOr<ClipBounds> DeriveClipBounds(const NumericCells& column,
                                            ClipDerivation derivation,
                                            std::string_view column_name,
                                            double p_lo = 0.0,
                                            double p_hi = 1.0);

struct ClipReport {
  size_t low = 0;
  size_t high = 0;
};

struct ClipResult {
  NumericCells cells;
  ClipReport report;
};

absl::StatusOr<ClipResult> Clip(const NumericCells& column,
                                const ClipBounds& bounds);

// Reflects `perturbed` across `threshold` when it lies on the other side
// from `original` (sides: below, at-or-above).
double ReflectAcrossThreshold(double original, double perturbed,
                              double threshold);

// Applies ReflectAcrossThreshold for each threshold in order. Returns the
// number of reflected cells.
size_t ApplyThresholds(const NumericCells& original, NumericCells& perturbed,
                       std::span<const double> thresholds);

}  // namespace tabperturb

#endif  // TABPERTURB_TRANSFORMS_H_
