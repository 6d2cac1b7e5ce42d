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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any
// criterion fails. Oracles here are written independently of the library.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "tabperturb/csv.h"
#include "tabperturb/distributions.h"
#include "tabperturb/fidelity.h"
#include "tabperturb/mask.h"
#include "tabperturb/mechanisms.h"
#include "tabperturb/pii.h"
#include "tabperturb/pipeline.h"
#include "tabperturb/transforms.h"
#include "test_util.h"

namespace tabperturb {
namespace {

namespace fs = std::filesystem;

// Collects the failed sub-checks of one criterion.
class Checker {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok) failures_.push_back(what);
  }
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0: no runtime bound
  std::function<void(Checker&)> body;
};

std::string Fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

// ---- oracles ---------------------------------------------------------------

double GeometricPmfOracle(int64_t k, double eps) {
  const double a = std::exp(-eps);
  return (1 - a) / (1 + a) * std::pow(a, std::fabs(static_cast<double>(k)));
}

bool LuhnOracle(const std::string& s) {
  std::vector<int> d;
  for (char c : s) {
    if (c >= '0' && c <= '9') d.push_back(c - '0');
  }
  int sum = 0;
  for (size_t i = 0; i < d.size(); ++i) {
    int x = d[d.size() - 1 - i];
    if (i % 2 == 1) x = x * 2 > 9 ? x * 2 - 9 : x * 2;
    sum += x;
  }
  return !d.empty() && sum % 10 == 0;
}

std::string ClassSignature(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c >= '0' && c <= '9') {
      out += 'D';
    } else if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) {
      out += 'A';
    } else {
      out += c;
    }
  }
  return out;
}

double Quantile(std::vector<double> v, double p) {
  std::sort(v.begin(), v.end());
  const double h = (v.size() - 1) * p;
  const size_t lo = static_cast<size_t>(h);
  return v[lo] + (h - lo) * (v[std::min(lo + 1, v.size() - 1)] - v[lo]);
}

// ---- criteria --------------------------------------------------------------

void CheckGoldenTables(Checker& c) {
  const std::vector<double> factors = {1.2, 0.8};
  auto scaled = ScaleByFactors({1000.0, 2000.0}, factors);
  c.Expect(scaled.ok() && *scaled->cells[0] == 1200.0 &&
               *scaled->cells[1] == 1600.0,
           "multiplicative 1000->1200, 2000->1600");

  const std::vector<std::pair<std::string, std::pair<std::string, std::string>>>
      masks = {{"phone", {"555.192.9277", "555.XXX.XXXX"}},
               {"credit_card", {"5423 3428 2372 9072", "5XX3 XXXX XXXX 9072"}},
               {"street_number",
                {"123 Any Street, Canada City, Canada",
                 "XXX Any Street, Canada City, Canada"}}};
  for (const auto& [rule_name, io] : masks) {
    auto rule = FindMaskRule(DefaultMaskRules(), rule_name);
    auto out = rule.ok() ? rule->Apply(io.first)
                         : absl::StatusOr<std::optional<std::string>>(rule.status());
    c.Expect(out.ok() && out->has_value() && **out == io.second,
             "mask " + rule_name);
  }

  const BinningScheme credit = BinningScheme::CreditScoreBands();
  auto label = [&](double v) {
    auto i = credit.Assign(v);
    return i ? credit.labels()[*i] : std::string(kOutOfRangeLabel);
  };
  c.Expect(label(669) == "Fair", "credit 669 -> Fair");
  c.Expect(label(671) == "Good", "credit 671 -> Good");
  auto ages = BinningScheme::IntegerRanges(10, 10, 9);
  c.Expect(ages.ok(), "decade scheme");
  if (ages.ok()) {
    auto r = Bin({29.0, 31.0}, *ages);
    c.Expect(*r.labels[0] == "20–29", "age 29 -> 20–29");
    c.Expect(*r.labels[1] == "30–39", "age 31 -> 30–39");
  }
}

void CheckGeometricMechanism(Checker& c) {
  constexpr size_t kN = 1000000;
  for (double eps : {0.1, 0.5, 1.0, 2.0}) {
    const std::string tag = " eps=" + Fmt(eps);
    // Normalization: explicit sum over |k| <= K plus analytic tail.
    const int K = 400;
    const double a = std::exp(-eps);
    double total = 0;
    for (int k = -K; k <= K; ++k) total += TwoSidedGeometricPmf(k, eps);
    total += 2 * (1 - a) / (1 + a) * std::pow(a, K + 1) / (1 - a);
    c.Expect(std::fabs(total - 1) <= 1e-9, "normalization" + tag);

    RandomSource src(1001, static_cast<uint64_t>(eps * 100));
    auto draws = SampleTwoSidedGeometric(src, eps, kN);
    c.Expect(draws.ok(), "sampling" + tag);
    if (!draws.ok()) continue;
    std::map<int64_t, size_t> counts;
    for (int64_t k : *draws) ++counts[k];
    // The normal approximation behind a 3-SE band needs an expected count
    // of at least 5; rarer outcomes are pooled into one tail bucket.
    double tail_p = 1.0;
    size_t tail_count = kN;
    for (int64_t k = -10; k <= 10; ++k) {
      const double p = GeometricPmfOracle(k, eps);
      if (p * kN < 5) continue;
      tail_p -= p;
      tail_count -= counts[k];
      const double se = std::sqrt(p * (1 - p) / kN);
      const double freq = static_cast<double>(counts[k]) / kN;
      c.Expect(std::fabs(freq - p) <= 3 * se,
               "frequency k=" + std::to_string(k) + tag + " got " + Fmt(freq) +
                   " want " + Fmt(p));
    }
    const double tail_freq = static_cast<double>(tail_count) / kN;
    const double tail_se = std::sqrt(tail_p * (1 - tail_p) / kN);
    c.Expect(std::fabs(tail_freq - tail_p) <= 3 * tail_se + 1e-12,
             "pooled tail" + tag + " got " + Fmt(tail_freq) + " want " +
                 Fmt(tail_p));
    for (int64_t r = 10 - 40; r <= 11 + 40; ++r) {
      const double p = GeometricMechanismPmf(10, r, eps);
      const double q = GeometricMechanismPmf(11, r, eps);
      c.Expect(p / q <= std::exp(eps) + 1e-9 && q / p <= std::exp(eps) + 1e-9,
               "ratio r=" + std::to_string(r) + tag);
    }
  }
}

void CheckGaussianCalibration(Checker& c) {
  const double oracle = 1.0 * std::sqrt(2 * std::log(1.25 / 1e-5)) / 1.0;
  const double sigma = GaussianSigma({1.0, 1e-5, 1.0});
  c.Expect(std::fabs(sigma - oracle) <= 1e-3,
           "sigma " + Fmt(sigma) + " vs " + Fmt(oracle));
  c.Expect(std::fabs(sigma - 4.8448) <= 1e-3, "sigma near 4.8448");
}

void CheckExponentialMechanism(Checker& c) {
  constexpr int kN = 1000000;
  auto run = [&](const std::vector<double>& scores, const std::string& tag) {
    std::vector<ScoredCandidate> cands;
    std::vector<double> w;
    for (size_t i = 0; i < scores.size(); ++i) {
      cands.push_back({std::to_string(i), scores[i]});
      w.push_back(std::exp(2.0 * scores[i] / 2.0));
    }
    const double z = std::accumulate(w.begin(), w.end(), 0.0);
    RandomSource src(1002, scores.size());
    std::vector<size_t> hits(scores.size(), 0);
    for (int i = 0; i < kN; ++i) {
      auto pick = ExponentialMechanism(cands, {2.0, 0.0, 1.0}, src);
      if (!pick.ok()) {
        c.Expect(false, tag + " sampling failed");
        return;
      }
      ++hits[std::stoul(pick->value)];
    }
    for (size_t i = 0; i < scores.size(); ++i) {
      const double f = static_cast<double>(hits[i]) / kN;
      c.Expect(std::fabs(f - w[i] / z) <= 0.01,
               tag + " candidate " + std::to_string(i) + " freq " + Fmt(f));
    }
  };
  run({0, 1}, "scores {0,1}");
  c.Expect(std::fabs(std::exp(0.0) / (1 + std::exp(1.0)) - 0.2689) < 1e-4,
           "oracle 0.2689");
  run({1, 1, 1, 1, 1}, "uniform scores");
}

void CheckRandomizedResponse(Checker& c) {
  auto population = [](size_t n) {
    std::vector<bool> v(n, false);
    std::fill(v.begin(), v.begin() + static_cast<long>(std::llround(0.3 * n)), true);
    return v;
  };
  RandomSource big(1003, 1);
  auto r = RandomizedResponse(population(1000000), 0.75, big);
  c.Expect(r.ok() && std::fabs(r->estimate - 0.30) <= 0.01,
           "n=1e6 estimate " + (r.ok() ? Fmt(r->estimate) : std::string("error")));
  std::vector<double> est;
  const auto pop = population(10000);
  for (int t = 0; t < 200; ++t) {
    RandomSource src(1004, t);
    auto trial = RandomizedResponse(pop, 0.75, src);
    if (trial.ok()) est.push_back(trial->raw_estimate);
  }
  c.Expect(est.size() == 200, "200 trials ran");
  const double mean = testing::SampleMean(est);
  const double se = std::sqrt(testing::SampleVariance(est) / est.size());
  c.Expect(std::fabs(mean - 0.30) <= 3 * se,
           "trial mean " + Fmt(mean) + " se " + Fmt(se));
}

void CheckSamplerMoments(Checker& c) {
  constexpr size_t kN = 1000000;
  for (double b : {0.1, 1.0, 2.0}) {
    RandomSource src(1005, static_cast<uint64_t>(b * 10));
    auto s = SampleLaplace(src, 0, b, kN);
    const double ratio = s.ok() ? testing::SampleVariance(*s) / (2 * b * b) : 0;
    c.Expect(std::fabs(ratio - 1) <= 0.02, "laplace b=" + Fmt(b) + " ratio " + Fmt(ratio));
  }
  for (double sigma : {0.1, 1.0, 3.0}) {
    RandomSource src(1006, static_cast<uint64_t>(sigma * 10));
    auto s = SampleGaussian(src, 0, sigma, kN);
    const double ratio = s.ok() ? testing::SampleVariance(*s) / (sigma * sigma) : 0;
    c.Expect(std::fabs(ratio - 1) <= 0.02,
             "gaussian sigma=" + Fmt(sigma) + " ratio " + Fmt(ratio));
  }
  for (double scale : {0.1, 1.0}) {
    RandomSource src(1007, static_cast<uint64_t>(scale * 10));
    auto s = SampleCauchy(src, 5.0, scale, kN);
    if (!s.ok()) {
      c.Expect(false, "cauchy sampling");
      continue;
    }
    const double median = Quantile(*s, 0.5);
    const double iqr = Quantile(*s, 0.75) - Quantile(*s, 0.25);
    c.Expect(std::fabs(median - 5.0) <= 0.002, "cauchy median " + Fmt(median));
    c.Expect(std::fabs(iqr / (2 * scale) - 1) <= 0.02, "cauchy iqr " + Fmt(iqr));
  }
}

void CheckClippingTailMass(Checker& c) {
  RandomSource src(1008, 1);
  NumericCells z;
  for (int i = 0; i < 100000; ++i) z.push_back(DrawStandardNormal(src));
  auto bounds = DeriveClipBounds(z, ClipDerivation::kMeanPlusMinus3Sigma, "z");
  c.Expect(bounds.ok(), "derive bounds");
  if (!bounds.ok()) return;
  auto r = Clip(z, *bounds);
  const double fraction = (r->report.low + r->report.high) / 100000.0;
  c.Expect(std::fabs(fraction - 0.0027) <= 0.001, "fraction " + Fmt(fraction));
}

void CheckFidelityMetrics(Checker& c) {
  const std::vector<double> a = {1, 2, 3}, b = {1, 2, 4};
  c.Expect(*KsTwoSample(a, a) == 0.0, "ks(a,a) = 0");
  c.Expect(*KsTwoSample(a, b) == 1.0 / 3.0, "ks hand case = 1/3");
  std::vector<std::string> x(100, "X"), y(100, "Y"), o1, o2;
  o1.insert(o1.end(), x.begin(), x.end());
  o1.insert(o1.end(), y.begin(), y.end());
  o2.insert(o2.end(), 150, "X");
  o2.insert(o2.end(), 50, "Y");
  auto chi = ChiSquareCategorical(o1, o2);
  c.Expect(chi.ok() && chi->statistic == 50.0, "chi2 hand case = 50");

  auto config = PipelineConfig::Parse(
      *ReadFile(testing::DataPath("identity_config.json")));
  auto table = LoadCsv(testing::DataPath("sample_loans.csv"));
  c.Expect(config.ok() && table.ok(), "load identity inputs");
  if (!config.ok() || !table.ok()) return;
  auto run = Execute(*config, *table);
  c.Expect(run.ok(), "identity execute");
  if (!run.ok()) return;
  auto report = BuildReport(*table, run->table, run->manifest.ToReportContext());
  c.Expect(report.ok(), "identity report");
  if (!report.ok()) return;
  for (const auto& n : report->numeric) {
    c.Expect(n.ks_statistic == 0 && n.mean_delta == 0 && n.min_delta == 0 &&
                 n.max_delta == 0 &&
                 (!n.variance_ratio || *n.variance_ratio == 1.0),
             "numeric column " + n.column + " not all-zero");
  }
  for (const auto& k : report->categorical) {
    c.Expect(k.chi2_statistic == 0 && k.category_count_delta == 0,
             "categorical column " + k.column + " not all-zero");
  }
  for (const auto& t : report->text) {
    c.Expect(t.information_loss == 0, "text column " + t.column);
  }
  c.Expect(report->correlation.max_abs_delta.value_or(0) == 0,
           "correlation delta");
}

void CheckPiiProperties(Checker& c) {
  PiiKey key;
  key.fill(0x5a);
  RandomSource surfaces(1009, 1), gen(1009, 2);
  auto digits = [&](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) s += static_cast<char>('0' + surfaces.NextBelow(10));
    return s;
  };
  size_t luhn_ok = 0, signature_ok = 0;
  const FauxMapping independent{key, FauxMode::kIndependent, nullptr};
  for (int i = 0; i < 10000; ++i) {
    const std::string card = digits(4) + " " + digits(4) + " " + digits(4) + " " + digits(4);
    auto faux = GenerateFaux({PiiKind::kCreditCard, 0, card.size(), card}, independent, gen);
    luhn_ok += faux.ok() && LuhnOracle(*faux) &&
               ClassSignature(*faux) == ClassSignature(card);
    const char sep = ".- "[surfaces.NextBelow(3)];
    const std::string phone = digits(3) + sep + digits(3) + sep + digits(4);
    auto fp = GenerateFaux({PiiKind::kPhone, 0, phone.size(), phone}, independent, gen);
    signature_ok += fp.ok() && *fp != phone &&
                    ClassSignature(*fp) == ClassSignature(phone);
  }
  c.Expect(luhn_ok == 10000, "luhn-valid cards " + std::to_string(luhn_ok));
  c.Expect(signature_ok == 10000, "phone signatures " + std::to_string(signature_ok));

  // Join two 1000-row name columns before and after consistent substitution.
  const auto names = NameDictionary::Default();
  RandomSource pick(1009, 3);
  std::vector<std::string> left, right;
  for (int i = 0; i < 1000; ++i) {
    left.push_back(names->first_names()[pick.NextBelow(30)] + " " +
                   names->last_names()[pick.NextBelow(20)]);
    right.push_back(names->first_names()[pick.NextBelow(30)] + " " +
                    names->last_names()[pick.NextBelow(20)]);
  }
  auto join = [](const std::vector<std::string>& l, const std::vector<std::string>& r) {
    std::map<std::string, size_t> counts;
    for (const auto& s : r) ++counts[s];
    size_t n = 0;
    for (const auto& s : l) {
      auto it = counts.find(s);
      if (it != counts.end()) n += it->second;
    }
    return n;
  };
  const FauxMapping consistent{key, FauxMode::kConsistent, nullptr};
  auto transform = [&](const std::vector<std::string>& col) {
    std::vector<std::string> out;
    for (const auto& s : col) {
      auto t = TransformCell(s, DetectorSet::Default(), consistent, gen);
      out.push_back(t.ok() ? t->cell : std::string());
    }
    return out;
  };
  const size_t before = join(left, right);
  const size_t after = join(transform(left), transform(right));
  c.Expect(before > 0 && before == after,
           "join cardinality " + std::to_string(before) + " vs " + std::to_string(after));
}

int Cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  return cli::Run(args, out, err);
}

void CheckEndToEndDeterminism(Checker& c) {
  testing::TempDir dir;
  const std::string input = testing::DataPath("sample_loans.csv");
  auto table = LoadCsv(input);
  c.Expect(table.ok() && table->column_count() == 10 && table->row_count() == 10000,
           "sample dataset is 10 columns x 10^4 rows");
  std::vector<std::string> outputs;
  for (const char* workers : {"1", "8", "8"}) {
    const fs::path out = dir / ("out" + std::to_string(outputs.size()) + ".csv");
    const int code = Cli({"perturb", "--input", input, "--config",
                          testing::DataPath("sample_config.json"), "--output",
                          out.string(), "--workers", workers, "--key-file",
                          testing::DataPath("demo_pii.key")});
    c.Expect(code == 0, std::string("perturb exit with workers ") + workers);
    auto bytes = ReadFile(out);
    outputs.push_back(bytes.ok() ? *bytes : std::string());
  }
  c.Expect(!outputs[0].empty() && outputs[0] == outputs[1] &&
               outputs[1] == outputs[2],
           "bit-identical outputs");
  c.Expect(outputs[0] != *ReadFile(input), "output differs from input");

  testing::TempDir empty;
  const fs::path out = empty / "over.csv";
  const int code = Cli({"perturb", "--input", input, "--config",
                        testing::DataPath("over_budget_config.json"),
                        "--output", out.string()});
  c.Expect(code == 3, "over-budget exit " + std::to_string(code));
  c.Expect(fs::is_empty(empty.path()), "no artifact after budget exhaustion");
}

}  // namespace
}  // namespace tabperturb

int main() {
  using tabperturb::Criterion;
  const std::vector<Criterion> criteria = {
      {1, "golden-table reproduction", 1.0, tabperturb::CheckGoldenTables},
      {2, "geometric mechanism correctness", 30.0, tabperturb::CheckGeometricMechanism},
      {3, "gaussian calibration", 0.0, tabperturb::CheckGaussianCalibration},
      {4, "exponential mechanism", 0.0, tabperturb::CheckExponentialMechanism},
      {5, "randomized response", 60.0, tabperturb::CheckRandomizedResponse},
      {6, "sampler moments", 0.0, tabperturb::CheckSamplerMoments},
      {7, "clipping tail mass", 0.0, tabperturb::CheckClippingTailMass},
      {8, "fidelity metrics", 0.0, tabperturb::CheckFidelityMetrics},
      {9, "PII properties", 0.0, tabperturb::CheckPiiProperties},
      {10, "end-to-end determinism", 0.0, tabperturb::CheckEndToEndDeterminism},
  };
  int failed = 0;
  for (const Criterion& c : criteria) {
    tabperturb::Checker checker;
    const auto start = std::chrono::steady_clock::now();
    c.body(checker);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (c.time_limit_s > 0 && seconds >= c.time_limit_s) {
      checker.Expect(false, "runtime " + tabperturb::Fmt(seconds) + " s over limit");
    }
    const bool pass = checker.failures().empty();
    failed += !pass;
    std::printf("%s criterion %d: %s (%.2f s)\n", pass ? "PASS" : "FAIL", c.id,
                c.name.c_str(), seconds);
    for (const std::string& f : checker.failures()) {
      std::printf("    failed: %s\n", f.c_str());
    }
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n",
              static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
