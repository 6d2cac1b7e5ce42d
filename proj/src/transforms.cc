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

#include "tabperturb/transforms.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "absl/strings/str_cat.h"
#include "tabperturb/text_util.h"
#include "tabperturb/status_macros.h"

namespace tabperturb {
namespace {

constexpr double kMinFactorWidth = 1e-12;

absl::Status CheckFactorRange(double lo, double hi) {
  if (!(lo > 0.0) || !std::isfinite(lo) || !std::isfinite(hi)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "multiplicative factor range needs 0 < lo, got lo=", lo));
  }
  if (!(hi - lo >= kMinFactorWidth)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "multiplicative factor range needs hi - lo >= 1e-12, got [", lo, ", ",
        hi, ")"));
  }
  return absl::OkStatus();
}

std::string RangeLabel(int64_t lo, int64_t hi) {
  return absl::StrCat(lo, "–", hi);
}

}  // namespace

absl::StatusOr<NumericResult> AddNoise(const NumericCells& column,
                                       const NoiseSpec& spec,
                                       RandomSource& src) {
  TP_RETURN_IF_ERROR(spec.Validate());
  if (!spec.IsContinuousScalar()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "additive noise needs a continuous scalar family, got ",
        std::string(NoiseFamilyName(spec.family))));
  }
  NumericResult result{column, 0, {}};
  for (size_t i = 0; i < column.size(); ++i) {
    if (!column[i]) continue;
    if (!std::isfinite(*column[i])) {
      result.issues.push_back({i, "non-finite value left unperturbed"});
      continue;
    }
    TP_ASSIGN_OR_RETURN(const double noise, DrawNoise(spec, src));
    result.cells[i] = *column[i] + noise;
    ++result.cells_affected;
  }
  return result;
}

absl::StatusOr<NumericResult> ScaleByFactors(const NumericCells& column,
                                             std::span<const double> factors) {
  if (factors.size() != column.size()) {
    return absl::InvalidArgumentError(absl::StrCat(
        "got ", factors.size(), " factors for ", column.size(), " cells"));
  }
  NumericResult result{column, 0, {}};
  for (size_t i = 0; i < column.size(); ++i) {
    if (!column[i]) continue;
    const double x = *column[i];
    if (!(x > 0.0) || !std::isfinite(x)) {
      result.issues.push_back(
          {i, absl::StrCat("row ", i, ": multiplicative perturbation needs a "
                                      "positive finite value, got ",
                           FormatDouble(x))});
      continue;
    }
    result.cells[i] = x * factors[i];
    ++result.cells_affected;
  }
  return result;
}

absl::StatusOr<NumericResult> MultiplicativePerturbation(
    const NumericCells& column, double lo, double hi, RandomSource& src) {
  TP_RETURN_IF_ERROR(CheckFactorRange(lo, hi));
  std::vector<double> factors(column.size(), 1.0);
  for (size_t i = 0; i < column.size(); ++i) {
    if (column[i]) factors[i] = DrawUniform(src, lo, hi);
  }
  return ScaleByFactors(column, factors);
}

absl::StatusOr<NumericResult> HybridPerturbation(const NumericCells& column,
                                                 double lo, double hi,
                                                 double sensitivity,
                                                 double epsilon,
                                                 RandomSource& src) {
  TP_RETURN_IF_ERROR(CheckFactorRange(lo, hi));
  if (!(sensitivity > 0.0) || !(epsilon > 0.0) || !std::isfinite(sensitivity) ||
      !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        "hybrid perturbation needs positive sensitivity and epsilon");
  }
  const double scale = sensitivity / epsilon;
  NumericResult result{column, 0, {}};
  for (size_t i = 0; i < column.size(); ++i) {
    if (!column[i]) continue;
    const double x = *column[i];
    if (!(x > 0.0) || !std::isfinite(x)) {
      result.issues.push_back(
          {i, absl::StrCat("row ", i, ": hybrid perturbation needs a positive "
                                      "finite value, got ",
                           FormatDouble(x))});
      continue;
    }
    const double factor = DrawUniform(src, lo, hi);
    result.cells[i] = x * factor + DrawLaplace(src, scale);
    ++result.cells_affected;
  }
  return result;
}

absl::StatusOr<BinningScheme> BinningScheme::Create(
    std::vector<double> edges, std::vector<std::string> labels,
    bool last_closed) {
  if (edges.size() < 2) {
    return absl::InvalidArgumentError("binning needs at least two edges");
  }
  for (size_t i = 0; i < edges.size(); ++i) {
    if (!std::isfinite(edges[i])) {
      return absl::InvalidArgumentError("bin edges must be finite");
    }
    if (i > 0 && !(edges[i - 1] < edges[i])) {
      return absl::InvalidArgumentError(absl::StrCat(
          "bin edges must be strictly increasing at index ", i));
    }
  }
  if (labels.size() + 1 != edges.size()) {
    return absl::InvalidArgumentError(
        absl::StrCat("binning with ", edges.size(), " edges needs ",
                     edges.size() - 1, " labels, got ", labels.size()));
  }
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == kOutOfRangeLabel) {
      return absl::InvalidArgumentError("bin label collides with the "
                                        "out-of-range marker");
    }
    for (size_t j = 0; j < i; ++j) {
      if (labels[i] == labels[j]) {
        return absl::InvalidArgumentError(
            absl::StrCat("duplicate bin label '", labels[i], "'"));
      }
    }
  }
  BinningScheme scheme;
  scheme.edges_ = std::move(edges);
  scheme.labels_ = std::move(labels);
  scheme.last_closed_ = last_closed;
  return scheme;
}

absl::StatusOr<BinningScheme> BinningScheme::IntegerRanges(int64_t start,
                                                           int64_t width,
                                                           size_t count) {
  if (width <= 0 || count == 0) {
    return absl::InvalidArgumentError(
        "integer ranges need a positive width and count");
  }
  std::vector<double> edges;
  std::vector<std::string> labels;
  for (size_t i = 0; i <= count; ++i) {
    edges.push_back(static_cast<double>(start + static_cast<int64_t>(i) * width));
  }
  for (size_t i = 0; i < count; ++i) {
    const int64_t lo = start + static_cast<int64_t>(i) * width;
    labels.push_back(RangeLabel(lo, lo + width - 1));
  }
  return Create(std::move(edges), std::move(labels), /*last_closed=*/false);
}

BinningScheme BinningScheme::CreditScoreBands() {
  BinningScheme scheme;
  scheme.edges_ = {300, 580, 670, 740, 800, 850};
  scheme.labels_ = {"Poor", "Fair", "Good", "Very Good", "Excellent"};
  return scheme;
}

std::optional<size_t> BinningScheme::Assign(double value) const {
  if (!std::isfinite(value) || value < edges_.front() || value > edges_.back()) {
    return std::nullopt;
  }
  if (value == edges_.back()) {
    if (!last_closed_) return std::nullopt;
    return labels_.size() - 1;
  }
  const auto it = std::upper_bound(edges_.begin(), edges_.end(), value);
  return static_cast<size_t>(it - edges_.begin()) - 1;
}

BinResult Bin(const NumericCells& column, const BinningScheme& scheme) {
  BinResult result;
  result.labels.resize(column.size());
  for (size_t i = 0; i < column.size(); ++i) {
    if (!column[i]) continue;
    if (const auto index = scheme.Assign(*column[i])) {
      result.labels[i] = scheme.labels()[*index];
    } else {
      result.labels[i] = std::string(kOutOfRangeLabel);
      ++result.out_of_range;
    }
  }
  return result;
}

absl::StatusOr<ClipBounds> DeriveClipBounds(const NumericCells& column,
                                            ClipDerivation derivation,
                                            std::string_view column_name,
                                            double p_lo, double p_hi) {
  if (derivation == ClipDerivation::kExplicit) {
    return absl::InvalidArgumentError("explicit bounds are not derived");
  }
  std::vector<double> values;
  for (const auto& cell : column) {
    if (cell && std::isfinite(*cell)) values.push_back(*cell);
  }
  if (values.size() < 2) {
    return absl::InvalidArgumentError(absl::StrCat(
        "column '", std::string(column_name),
        "' needs at least two finite values to derive clip bounds"));
  }
  ClipBounds bounds;
  bounds.derivation = derivation;
  if (derivation == ClipDerivation::kMeanPlusMinus3Sigma) {
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double sigma = std::sqrt(ss / static_cast<double>(values.size() - 1));
    if (!(sigma > 0.0)) {
      return absl::InvalidArgumentError(
          absl::StrCat("column '", std::string(column_name),
                       "' has zero standard deviation; clip bounds are "
                       "degenerate"));
    }
    bounds.lo = mean - 3.0 * sigma;
    bounds.hi = mean + 3.0 * sigma;
    return bounds;
  }
  if (!(p_lo >= 0.0 && p_lo < p_hi && p_hi <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "quantile clip needs 0 <= p_lo < p_hi <= 1, got ", p_lo, ", ", p_hi));
  }
  std::sort(values.begin(), values.end());
  auto quantile = [&values](double p) {
    const double h = p * static_cast<double>(values.size() - 1);
    const size_t below = static_cast<size_t>(std::floor(h));
    const size_t above = std::min(below + 1, values.size() - 1);
    return values[below] + (h - static_cast<double>(below)) *
                               (values[above] - values[below]);
  };
  bounds.lo = quantile(p_lo);
  bounds.hi = quantile(p_hi);
  if (!(bounds.lo < bounds.hi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("column '", std::string(column_name),
                     "' quantile clip bounds are degenerate"));
  }
  return bounds;
}

absl::StatusOr<ClipResult> Clip(const NumericCells& column,
                                const ClipBounds& bounds) {
  if (!(bounds.lo < bounds.hi)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "clip bounds need lo < hi, got [", bounds.lo, ", ", bounds.hi, "]"));
  }
  ClipResult result{column, {}};
  for (auto& cell : result.cells) {
    if (!cell || std::isnan(*cell)) continue;
    if (*cell < bounds.lo) {
      *cell = bounds.lo;
      ++result.report.low;
    } else if (*cell > bounds.hi) {
      *cell = bounds.hi;
      ++result.report.high;
    }
  }
  return result;
}

double ReflectAcrossThreshold(double original, double perturbed,
                              double threshold) {
  const bool was_below = original < threshold;
  const bool is_below = perturbed < threshold;
  if (was_below == is_below) return perturbed;
  const double reflected = 2.0 * threshold - perturbed;
  if (was_below && !(reflected < threshold)) {
    return std::nextafter(threshold, -INFINITY);
  }
  return reflected;
}

size_t ApplyThresholds(const NumericCells& original, NumericCells& perturbed,
                       std::span<const double> thresholds) {
  size_t reflected = 0;
  for (size_t i = 0; i < original.size() && i < perturbed.size(); ++i) {
    if (!original[i] || !perturbed[i]) continue;
    bool changed = false;
    for (double t : thresholds) {
      const double next = ReflectAcrossThreshold(*original[i], *perturbed[i], t);
      if (next != *perturbed[i]) {
        perturbed[i] = next;
        changed = true;
      }
    }
    reflected += changed ? 1 : 0;
  }
  return reflected;
}

}  // namespace tabperturb
