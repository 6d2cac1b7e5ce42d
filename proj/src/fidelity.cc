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

#include "tabperturb/fidelity.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <utility>

#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "tabperturb/pii.h"
#include "tabperturb/status_macros.h"
#include "tabperturb/text_util.h"

namespace tabperturb {
namespace {

using Json = nlohmann::ordered_json;

struct FiniteValues {
  std::vector<double> values;
  size_t excluded = 0;
};

FiniteValues CollectFinite(const NumericCells& cells) {
  FiniteValues out;
  for (const auto& c : cells) {
    if (c && std::isfinite(*c)) {
      out.values.push_back(*c);
    } else {
      ++out.excluded;
    }
  }
  return out;
}

struct Labels {
  std::vector<std::string> values;
  size_t excluded = 0;
};

Labels CollectLabels(const TextCells& cells) {
  Labels out;
  for (const auto& c : cells) {
    if (c) {
      out.values.push_back(*c);
    } else {
      ++out.excluded;
    }
  }
  return out;
}

double Mean(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

double UnbiasedVariance(std::span<const double> v, double mean) {
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return ss / static_cast<double>(v.size() - 1);
}

std::optional<double> Pearson(std::span<const double> x,
                              std::span<const double> y) {
  if (x.size() < 2) return std::nullopt;
  const double mx = Mean(x);
  const double my = Mean(y);
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0) || !(syy > 0.0)) return std::nullopt;
  return sxy / std::sqrt(sxx * syy);
}

bool IsConstant(const NumericCells& cells) {
  std::optional<double> first;
  for (const auto& c : cells) {
    if (!c || !std::isfinite(*c)) continue;
    if (!first) {
      first = *c;
    } else if (*c != *first) {
      return false;
    }
  }
  return true;
}

Json OptionalNumber(const std::optional<double>& v) {
  return v ? Json(*v) : Json(nullptr);
}

std::string Fixed(double v, int precision = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
  return buf;
}

}  // namespace

absl::StatusOr<double> KsTwoSample(std::span<const double> a,
                                   std::span<const double> b) {
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError("KS statistic needs two non-empty samples");
  }
  for (std::span<const double> s : {a, b}) {
    for (double x : s) {
      if (!std::isfinite(x)) {
        return absl::InvalidArgumentError("KS statistic needs finite values");
      }
    }
  }
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const uint64_t n = x.size();
  const uint64_t m = y.size();
  // |i/n - j/m| is tracked as |i*m - j*n| to keep ties and symmetry exact.
  uint64_t best = 0;
  size_t i = 0, j = 0;
  while (i < n && j < m) {
    const double v = std::min(x[i], y[j]);
    while (i < n && x[i] == v) ++i;
    while (j < m && y[j] == v) ++j;
    const uint64_t lhs = i * m;
    const uint64_t rhs = j * n;
    best = std::max(best, lhs > rhs ? lhs - rhs : rhs - lhs);
  }
  return static_cast<double>(best) / (static_cast<double>(n) * static_cast<double>(m));
}

absl::StatusOr<ChiSquareResult> ChiSquareCategorical(
    std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() || b.empty()) {
    return absl::InvalidArgumentError(
        "chi-square needs non-zero category counts in both samples");
  }
  std::map<std::string, size_t> count_a, count_b;
  for (const std::string& s : a) ++count_a[s];
  for (const std::string& s : b) ++count_b[s];
  const double scale =
      static_cast<double>(b.size()) / static_cast<double>(a.size());

  struct Bucket {
    double observed = 0.0;
    double expected = 0.0;
  };
  std::vector<Bucket> buckets;
  for (const auto& [label, ca] : count_a) {
    const auto it = count_b.find(label);
    const double observed = it == count_b.end() ? 0.0 : static_cast<double>(it->second);
    buckets.push_back({observed, static_cast<double>(ca) * scale});
  }
  double other_observed = 0.0;
  for (const auto& [label, cb] : count_b) {
    if (!count_a.contains(label)) other_observed += static_cast<double>(cb);
  }
  if (other_observed > 0.0) {
    auto smallest = std::min_element(
        buckets.begin(), buckets.end(),
        [](const Bucket& l, const Bucket& r) { return l.expected < r.expected; });
    smallest->observed += other_observed;
  }
  std::vector<double> terms;
  terms.reserve(buckets.size());
  for (const Bucket& bucket : buckets) {
    const double d = bucket.observed - bucket.expected;
    terms.push_back(d * d / bucket.expected);
  }
  // Summing in sorted order makes the statistic independent of labels.
  std::sort(terms.begin(), terms.end());
  ChiSquareResult result;
  for (double t : terms) result.statistic += t;
  result.dof = buckets.size() - 1;
  return result;
}

absl::StatusOr<MomentDeltas> ComputeMomentDeltas(std::span<const double> a,
                                                 std::span<const double> b) {
  if (a.size() < 2 || b.size() < 2) {
    return absl::InvalidArgumentError(
        "moment deltas need at least two finite values in each sample");
  }
  const double mean_a = Mean(a);
  const double mean_b = Mean(b);
  MomentDeltas out;
  out.mean_delta = mean_b - mean_a;
  const double var_a = UnbiasedVariance(a, mean_a);
  if (var_a > 0.0) out.variance_ratio = UnbiasedVariance(b, mean_b) / var_a;
  return out;
}

absl::StatusOr<CorrelationDelta> ComputeCorrelationDelta(
    const Table& original, const Table& processed,
    std::span<const std::string> columns) {
  if (original.row_count() != processed.row_count()) {
    return absl::InvalidArgumentError(
        "correlation delta needs tables with the same row count");
  }
  std::vector<const Column*> orig_cols, proc_cols;
  CorrelationDelta out;
  for (const std::string& name : columns) {
    const Column* a = original.Find(name);
    const Column* b = processed.Find(name);
    if (a == nullptr || b == nullptr || !a->is_numeric() || !b->is_numeric()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "column '", name, "' is not numeric in both tables"));
    }
    if (IsConstant(a->numeric()) || IsConstant(b->numeric())) {
      out.notices.push_back(absl::StrCat(
          "column '", name, "' is constant and was excluded from correlations"));
      continue;
    }
    orig_cols.push_back(a);
    proc_cols.push_back(b);
    out.columns.push_back(name);
  }
  if (columns.size() < 2) {
    return absl::InvalidArgumentError(
        "correlation delta needs at least two numeric columns");
  }
  if (out.columns.size() < 2) return out;

  double max_delta = 0.0;
  std::vector<double> ox, oy, px, py;
  for (size_t p = 0; p < out.columns.size(); ++p) {
    for (size_t q = p + 1; q < out.columns.size(); ++q) {
      ox.clear();
      oy.clear();
      px.clear();
      py.clear();
      const NumericCells& a1 = orig_cols[p]->numeric();
      const NumericCells& a2 = orig_cols[q]->numeric();
      const NumericCells& b1 = proc_cols[p]->numeric();
      const NumericCells& b2 = proc_cols[q]->numeric();
      for (size_t r = 0; r < original.row_count(); ++r) {
        if (!a1[r] || !a2[r] || !b1[r] || !b2[r]) continue;
        if (!std::isfinite(*a1[r]) || !std::isfinite(*a2[r]) ||
            !std::isfinite(*b1[r]) || !std::isfinite(*b2[r])) {
          continue;
        }
        ox.push_back(*a1[r]);
        oy.push_back(*a2[r]);
        px.push_back(*b1[r]);
        py.push_back(*b2[r]);
      }
      const auto ro = Pearson(ox, oy);
      const auto rp = Pearson(px, py);
      if (!ro || !rp) {
        out.notices.push_back(absl::StrCat(
            "correlation of '", out.columns[p], "' and '", out.columns[q],
            "' is undefined on the complete rows and was skipped"));
        continue;
      }
      max_delta = std::max(max_delta, std::fabs(*ro - *rp));
    }
  }
  out.max_abs_delta = max_delta;
  return out;
}

absl::StatusOr<FidelityReport> BuildReport(const Table& original,
                                           const Table& processed,
                                           const ReportContext& context) {
  for (const Column& c : processed.columns()) {
    if (original.Find(c.schema.name) == nullptr) {
      return absl::InvalidArgumentError(absl::StrCat(
          "processed table has column '", c.schema.name,
          "' that the original lacks"));
    }
  }
  FidelityReport report;
  report.rows_original = original.row_count();
  report.rows_processed = processed.row_count();
  report.manifest_digest = context.manifest_digest;
  std::vector<std::string> numeric_both;

  for (const Column& a : original.columns()) {
    const std::string& name = a.schema.name;
    const Column* b = processed.Find(name);
    if (b == nullptr) {
      return absl::InvalidArgumentError(
          absl::StrCat("processed table is missing column '", name, "'"));
    }
    if (a.is_numeric() && b->is_numeric()) {
      numeric_both.push_back(name);
      const FiniteValues va = CollectFinite(a.numeric());
      const FiniteValues vb = CollectFinite(b->numeric());
      NumericColumnFidelity f;
      f.column = name;
      f.n_original = va.values.size();
      f.n_processed = vb.values.size();
      f.excluded_original = va.excluded;
      f.excluded_processed = vb.excluded;
      auto ks = KsTwoSample(va.values, vb.values);
      auto moments = ComputeMomentDeltas(va.values, vb.values);
      if (!ks.ok() || !moments.ok()) {
        report.notices.push_back(absl::StrCat(
            "column '", name, "': numeric metrics skipped: ",
            (!ks.ok() ? ks.status() : moments.status()).message()));
        continue;
      }
      f.ks_statistic = *ks;
      f.mean_delta = moments->mean_delta;
      f.variance_ratio = moments->variance_ratio;
      f.min_delta = *std::min_element(vb.values.begin(), vb.values.end()) -
                    *std::min_element(va.values.begin(), va.values.end());
      f.max_delta = *std::max_element(vb.values.begin(), vb.values.end()) -
                    *std::max_element(va.values.begin(), va.values.end());
      report.numeric.push_back(std::move(f));
      continue;
    }
    if (!a.is_numeric() && b->is_numeric()) {
      return absl::InvalidArgumentError(absl::StrCat(
          "column '", name, "' changed from ",
          std::string(ColumnKindName(a.schema.kind)), " to numeric"));
    }
    TextCells original_labels;
    bool binned = false;
    if (a.is_numeric()) {
      const auto it = context.binning.find(name);
      if (it == context.binning.end()) {
        return absl::InvalidArgumentError(absl::StrCat(
            "column '", name,
            "' changed from numeric to categorical without a binning scheme"));
      }
      original_labels = Bin(a.numeric(), it->second).labels;
      binned = true;
    } else {
      original_labels = a.text();
    }
    const bool is_text = a.schema.kind == ColumnKind::kText ||
                         b->schema.kind == ColumnKind::kText ||
                         context.text_columns.contains(name);
    if (is_text && !binned) {
      auto loss = InformationLoss(original_labels, b->text());
      if (!loss.ok()) {
        report.notices.push_back(absl::StrCat(
            "column '", name, "': information loss skipped: ",
            loss.status().message()));
        continue;
      }
      report.text.push_back({name, *loss});
      continue;
    }
    const Labels la = CollectLabels(original_labels);
    const Labels lb = CollectLabels(b->text());
    CategoricalColumnFidelity f;
    f.column = name;
    f.compared_after_binning = binned;
    f.n_original = la.values.size();
    f.n_processed = lb.values.size();
    f.excluded_original = la.excluded;
    f.excluded_processed = lb.excluded;
    auto chi2 = ChiSquareCategorical(la.values, lb.values);
    if (!chi2.ok()) {
      report.notices.push_back(absl::StrCat("column '", name,
                                            "': chi-square skipped: ",
                                            chi2.status().message()));
      continue;
    }
    f.chi2_statistic = chi2->statistic;
    f.dof = chi2->dof;
    const std::set<std::string> ca(la.values.begin(), la.values.end());
    const std::set<std::string> cb(lb.values.begin(), lb.values.end());
    f.category_count_delta =
        static_cast<int64_t>(cb.size()) - static_cast<int64_t>(ca.size());
    report.categorical.push_back(std::move(f));
  }

  if (numeric_both.size() >= 2 && original.row_count() == processed.row_count()) {
    TP_ASSIGN_OR_RETURN(report.correlation,
                        ComputeCorrelationDelta(original, processed, numeric_both));
  } else {
    report.correlation.notices.push_back(
        "correlation delta needs two numeric columns and equal row counts");
  }
  return report;
}

std::string FidelityReport::ToJson() const {
  Json j;
  j["report_version"] = 1;
  j["manifest_digest"] = manifest_digest.empty() ? Json(nullptr) : Json(manifest_digest);
  j["rows"] = {{"original", rows_original}, {"processed", rows_processed}};
  Json numeric_json = Json::array();
  for (const auto& f : numeric) {
    numeric_json.push_back({{"column", f.column},
                            {"ks_statistic", f.ks_statistic},
                            {"mean_delta", f.mean_delta},
                            {"variance_ratio", OptionalNumber(f.variance_ratio)},
                            {"min_delta", f.min_delta},
                            {"max_delta", f.max_delta},
                            {"n_original", f.n_original},
                            {"n_processed", f.n_processed},
                            {"excluded_original", f.excluded_original},
                            {"excluded_processed", f.excluded_processed}});
  }
  j["numeric"] = std::move(numeric_json);
  Json categorical_json = Json::array();
  for (const auto& f : categorical) {
    categorical_json.push_back({{"column", f.column},
                                {"chi2_statistic", f.chi2_statistic},
                                {"dof", f.dof},
                                {"category_count_delta", f.category_count_delta},
                                {"compared_after_binning", f.compared_after_binning},
                                {"n_original", f.n_original},
                                {"n_processed", f.n_processed},
                                {"excluded_original", f.excluded_original},
                                {"excluded_processed", f.excluded_processed}});
  }
  j["categorical"] = std::move(categorical_json);
  Json text_json = Json::array();
  for (const auto& f : text) {
    text_json.push_back({{"column", f.column}, {"information_loss", f.information_loss}});
  }
  j["text"] = std::move(text_json);
  j["correlation"] = {{"max_abs_delta", OptionalNumber(correlation.max_abs_delta)},
                      {"columns", correlation.columns},
                      {"notices", correlation.notices}};
  j["notices"] = notices;
  j["external_model_metrics"] = nullptr;
  return j.dump(2) + "\n";
}

std::string FidelityReport::ToText() const {
  std::string out;
  absl::StrAppend(&out, "Fidelity report\n");
  absl::StrAppend(&out, "manifest: ",
                  manifest_digest.empty() ? std::string("none") : manifest_digest,
                  "\n");
  absl::StrAppend(&out, "rows: original ", rows_original, ", processed ",
                  rows_processed, "\n\n");
  char line[256];
  if (!numeric.empty()) {
    std::snprintf(line, sizeof(line), "%-24s %10s %14s %12s %14s %14s\n",
                  "numeric column", "ks", "mean_delta", "var_ratio",
                  "min_delta", "max_delta");
    out += line;
    for (const auto& f : numeric) {
      std::snprintf(line, sizeof(line), "%-24s %10s %14s %12s %14s %14s\n",
                    f.column.c_str(), Fixed(f.ks_statistic).c_str(),
                    Fixed(f.mean_delta, 4).c_str(),
                    f.variance_ratio ? Fixed(*f.variance_ratio).c_str() : "undefined",
                    Fixed(f.min_delta, 4).c_str(), Fixed(f.max_delta, 4).c_str());
      out += line;
    }
    out += "\n";
  }
  if (!categorical.empty()) {
    std::snprintf(line, sizeof(line), "%-24s %12s %6s %16s %8s\n",
                  "categorical column", "chi2", "dof", "category_delta",
                  "binned");
    out += line;
    for (const auto& f : categorical) {
      std::snprintf(line, sizeof(line), "%-24s %12s %6zu %16lld %8s\n",
                    f.column.c_str(), Fixed(f.chi2_statistic, 4).c_str(), f.dof,
                    static_cast<long long>(f.category_count_delta),
                    f.compared_after_binning ? "yes" : "no");
      out += line;
    }
    out += "\n";
  }
  if (!text.empty()) {
    std::snprintf(line, sizeof(line), "%-24s %18s\n", "text column",
                  "information_loss");
    out += line;
    for (const auto& f : text) {
      std::snprintf(line, sizeof(line), "%-24s %18s\n", f.column.c_str(),
                    Fixed(f.information_loss).c_str());
      out += line;
    }
    out += "\n";
  }
  absl::StrAppend(&out, "correlation max |delta|: ",
                  correlation.max_abs_delta ? Fixed(*correlation.max_abs_delta)
                                            : std::string("undefined"),
                  "\n");
  for (const auto& n : correlation.notices) absl::StrAppend(&out, "note: ", n, "\n");
  for (const auto& n : notices) absl::StrAppend(&out, "note: ", n, "\n");
  return out;
}

}  // namespace tabperturb
