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

#include "tabperturb/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <thread>
#include <utility>

#include "absl/strings/str_cat.h"
#include "json_util.h"
#include "tabperturb/digest.h"
#include "tabperturb/distributions.h"
#include "tabperturb/mask.h"
#include "tabperturb/mechanisms.h"
#include "tabperturb/random.h"
#include "tabperturb/status_macros.h"
#include "tabperturb/text_util.h"

namespace tabperturb {
namespace {

using internal::Json;
using internal::JsonObject;

enum class Technique {
  kAdditiveNoise,
  kLaplaceMechanism,
  kGaussianMechanism,
  kGeometricMechanism,
  kMultiplicative,
  kHybrid,
  kBin,
  kClip,
  kMask,
  kPii,
  kRandomizedResponse,
};

constexpr std::pair<Technique, std::string_view> kTechniques[] = {
    {Technique::kAdditiveNoise, "additive_noise"},
    {Technique::kLaplaceMechanism, "laplace_mechanism"},
    {Technique::kGaussianMechanism, "gaussian_mechanism"},
    {Technique::kGeometricMechanism, "geometric_mechanism"},
    {Technique::kMultiplicative, "multiplicative"},
    {Technique::kHybrid, "hybrid"},
    {Technique::kBin, "bin"},
    {Technique::kClip, "clip"},
    {Technique::kMask, "mask"},
    {Technique::kPii, "pii"},
    {Technique::kRandomizedResponse, "randomized_response"},
};

std::optional<Technique> FindTechnique(std::string_view name) {
  for (const auto& [t, n] : kTechniques) {
    if (n == name) return t;
  }
  return std::nullopt;
}

bool IsTextLike(ColumnKind kind) { return kind != ColumnKind::kNumeric; }

// A step with parsed parameters.
struct CompiledStep {
  Technique technique = Technique::kAdditiveNoise;
  std::string name;
  std::string params_json;
  NoiseSpec noise;
  PrivacyParams dp;
  double lo = 0.0;
  double hi = 0.0;
  std::optional<BinningScheme> bins;
  ClipDerivation clip = ClipDerivation::kExplicit;
  double p_lo = 0.0;
  double p_hi = 1.0;
  std::optional<MaskRule> mask;
  std::vector<PiiKind> pii_kinds;
  FauxMode pii_mode = FauxMode::kConsistent;
  double p_truth = 0.75;
  std::string positive;
  std::string negative;
  bool charges = false;
  double epsilon = 0.0;
  double delta = 0.0;
};

struct StepError {
  ViolationKind kind;
  std::string message;
};

// Reads epsilon (and delta when `needs_delta`) for a DP step.
std::optional<StepError> ReadDpParams(JsonObject& o, bool needs_delta,
                                      bool has_sensitivity, PrivacyParams& dp) {
  std::vector<std::string> missing;
  if (!o.Has("epsilon")) missing.push_back("epsilon");
  if (needs_delta && !o.Has("delta")) missing.push_back("delta");
  if (!missing.empty()) {
    std::string names;
    for (const auto& m : missing) {
      absl::StrAppend(&names, names.empty() ? "" : ", ", o.KeyPath(m));
    }
    return StepError{ViolationKind::kMissingDpParams,
                     absl::StrCat("DP step needs ", names)};
  }
  auto eps = o.Number("epsilon");
  if (!eps.ok()) return StepError{ViolationKind::kInvalidParams,
                                  std::string(eps.status().message())};
  dp.epsilon = *eps;
  if (needs_delta) {
    auto delta = o.Number("delta");
    if (!delta.ok()) return StepError{ViolationKind::kInvalidParams,
                                      std::string(delta.status().message())};
    dp.delta = *delta;
  } else if (o.Has("delta")) {
    auto delta = o.Number("delta");
    if (!delta.ok() || *delta != 0.0) {
      return StepError{ViolationKind::kInvalidParams,
                       absl::StrCat("mechanism mismatch: '", o.KeyPath("delta"),
                                    "' must be 0 for a pure DP step")};
    }
  }
  if (has_sensitivity) {
    auto s = o.NumberOr("sensitivity", 1.0);
    if (!s.ok()) return StepError{ViolationKind::kInvalidParams,
                                  std::string(s.status().message())};
    dp.sensitivity = *s;
  }
  if (absl::Status st = dp.Validate(); !st.ok()) {
    return StepError{ViolationKind::kInvalidParams, std::string(st.message())};
  }
  return std::nullopt;
}

#define TP_STEP_ASSIGN(lhs, expr)                                         \
  do {                                                                    \
    auto _tp_v = (expr);                                                  \
    if (!_tp_v.ok()) {                                                    \
      return StepError{ViolationKind::kInvalidParams,                     \
                       std::string(_tp_v.status().message())};            \
    }                                                                     \
    lhs = *std::move(_tp_v);                                              \
  } while (false)

#define TP_STEP_CHECK(expr)                                               \
  do {                                                                    \
    absl::Status _tp_s = (expr);                                          \
    if (!_tp_s.ok()) {                                                    \
      return StepError{ViolationKind::kInvalidParams,                     \
                       std::string(_tp_s.message())};                     \
    }                                                                     \
  } while (false)

std::optional<StepError> ParseStepParams(Technique t, JsonObject& o,
                                         bool strict, CompiledStep& step,
                                         std::vector<std::string>& unknown) {
  switch (t) {
    case Technique::kAdditiveNoise: {
      std::string family;
      TP_STEP_ASSIGN(family, o.String("family"));
      TP_STEP_ASSIGN(step.noise.family, ParseNoiseFamily(family));
      TP_STEP_ASSIGN(step.noise.location, o.NumberOr("location", 0.0));
      switch (step.noise.family) {
        case NoiseFamily::kUniform: {
          std::vector<double> bounds;
          TP_STEP_ASSIGN(bounds, o.NumberArray("bounds"));
          if (bounds.size() != 2) {
            return StepError{ViolationKind::kInvalidParams,
                             absl::StrCat("'", o.KeyPath("bounds"),
                                          "' must be [lo, hi]")};
          }
          step.noise.bounds = std::make_pair(bounds[0], bounds[1]);
          break;
        }
        case NoiseFamily::kTwoSidedGeometric:
          return StepError{ViolationKind::kInvalidParams,
                           "additive_noise takes continuous families; use "
                           "geometric_mechanism for integer noise"};
        case NoiseFamily::kCholeskyCorrelated: {
          const Json* cov = o.Child("covariance");
          if (cov == nullptr || !cov->is_array()) {
            return StepError{ViolationKind::kInvalidParams,
                             absl::StrCat("'", o.KeyPath("covariance"),
                                          "' must be a matrix")};
          }
          std::vector<std::vector<double>> rows;
          for (const Json& row : *cov) {
            if (!row.is_array()) break;
            std::vector<double> r;
            for (const Json& v : row) {
              if (v.is_number()) r.push_back(v.get<double>());
            }
            if (r.size() != row.size()) break;
            rows.push_back(std::move(r));
          }
          if (rows.size() != cov->size()) {
            return StepError{ViolationKind::kInvalidParams,
                             absl::StrCat("'", o.KeyPath("covariance"),
                                          "' must be a matrix of numbers")};
          }
          step.noise.covariance = Matrix::FromRows(rows);
          break;
        }
        default:
          TP_STEP_ASSIGN(step.noise.scale, o.Number("scale"));
      }
      TP_STEP_CHECK(step.noise.Validate());
      if (!step.noise.IsContinuousScalar()) {
        return StepError{ViolationKind::kInvalidParams,
                         "additive_noise needs a scalar (1 x 1) covariance"};
      }
      return std::nullopt;
    }
    case Technique::kLaplaceMechanism:
    case Technique::kGeometricMechanism:
    case Technique::kGaussianMechanism: {
      const bool gaussian = t == Technique::kGaussianMechanism;
      if (auto e = ReadDpParams(o, gaussian, t != Technique::kGeometricMechanism,
                                step.dp)) {
        return e;
      }
      if (gaussian) {
        TP_STEP_CHECK(CheckGaussianParams(
            step.dp, strict ? CalibrationMode::kStrict
                            : CalibrationMode::kPermissive));
      }
      step.charges = true;
      step.epsilon = step.dp.epsilon;
      step.delta = gaussian ? step.dp.delta : 0.0;
      return std::nullopt;
    }
    case Technique::kMultiplicative:
    case Technique::kHybrid: {
      TP_STEP_ASSIGN(step.lo, o.Number("lo"));
      TP_STEP_ASSIGN(step.hi, o.Number("hi"));
      if (!(step.lo > 0.0) || !(step.hi - step.lo >= 1e-12) ||
          !std::isfinite(step.hi)) {
        return StepError{ViolationKind::kInvalidParams,
                         "factor range needs 0 < lo and hi - lo >= 1e-12"};
      }
      if (t == Technique::kHybrid) {
        if (auto e = ReadDpParams(o, false, true, step.dp)) return e;
        step.charges = true;
        step.epsilon = step.dp.epsilon;
      }
      return std::nullopt;
    }
    case Technique::kBin: {
      const Json* bins = o.Child("bins");
      if (bins == nullptr) {
        return StepError{ViolationKind::kInvalidParams,
                         absl::StrCat("missing required key '",
                                      o.KeyPath("bins"), "'")};
      }
      TP_STEP_ASSIGN(step.bins,
                     internal::ParseBinning(*bins, o.KeyPath("bins"), unknown));
      return std::nullopt;
    }
    case Technique::kClip: {
      std::optional<std::string> method;
      TP_STEP_ASSIGN(method, o.OptionalString("method"));
      const std::string m = method.value_or("explicit");
      if (m == "explicit") {
        TP_STEP_ASSIGN(step.lo, o.Number("lo"));
        TP_STEP_ASSIGN(step.hi, o.Number("hi"));
        if (!(step.lo < step.hi)) {
          return StepError{ViolationKind::kInvalidParams,
                           "clip bounds need lo < hi"};
        }
        step.clip = ClipDerivation::kExplicit;
      } else if (m == "mean_3sigma") {
        step.clip = ClipDerivation::kMeanPlusMinus3Sigma;
      } else if (m == "quantile") {
        step.clip = ClipDerivation::kQuantile;
        TP_STEP_ASSIGN(step.p_lo, o.Number("p_lo"));
        TP_STEP_ASSIGN(step.p_hi, o.Number("p_hi"));
        if (!(0.0 <= step.p_lo && step.p_lo < step.p_hi && step.p_hi <= 1.0)) {
          return StepError{ViolationKind::kInvalidParams,
                           "quantile clip needs 0 <= p_lo < p_hi <= 1"};
        }
      } else {
        return StepError{ViolationKind::kInvalidParams,
                         absl::StrCat("unknown clip method '", m,
                                      "' (explicit, mean_3sigma, quantile)")};
      }
      return std::nullopt;
    }
    case Technique::kMask: {
      std::optional<std::string> rule;
      TP_STEP_ASSIGN(rule, o.OptionalString("rule"));
      if (rule) {
        TP_STEP_ASSIGN(step.mask, FindMaskRule(DefaultMaskRules(), *rule));
      } else {
        std::string pattern, templ;
        TP_STEP_ASSIGN(pattern, o.String("pattern"));
        TP_STEP_ASSIGN(templ, o.String("template"));
        TP_STEP_ASSIGN(step.mask, MaskRule::Create("custom", pattern, templ));
      }
      return std::nullopt;
    }
    case Technique::kPii: {
      if (o.Has("kinds")) {
        std::vector<std::string> kinds;
        TP_STEP_ASSIGN(kinds, o.StringArray("kinds"));
        for (const auto& k : kinds) {
          PiiKind kind;
          TP_STEP_ASSIGN(kind, ParsePiiKind(k));
          step.pii_kinds.push_back(kind);
        }
      }
      std::optional<std::string> mode;
      TP_STEP_ASSIGN(mode, o.OptionalString("mode"));
      if (!mode || *mode == "consistent") {
        step.pii_mode = FauxMode::kConsistent;
      } else if (*mode == "independent") {
        step.pii_mode = FauxMode::kIndependent;
      } else {
        return StepError{ViolationKind::kInvalidParams,
                         absl::StrCat("unknown pii mode '", *mode,
                                      "' (consistent, independent)")};
      }
      return std::nullopt;
    }
    case Technique::kRandomizedResponse: {
      if (!o.Has("p_truth")) {
        return StepError{ViolationKind::kMissingDpParams,
                         absl::StrCat("DP step needs ", o.KeyPath("p_truth"))};
      }
      TP_STEP_ASSIGN(step.p_truth, o.Number("p_truth"));
      if (!(step.p_truth > 0.5 && step.p_truth < 1.0)) {
        return StepError{ViolationKind::kInvalidParams,
                         "p_truth must lie in (0.5, 1) for a finite privacy "
                         "cost"};
      }
      std::optional<std::string> positive, negative;
      TP_STEP_ASSIGN(positive, o.OptionalString("positive"));
      TP_STEP_ASSIGN(negative, o.OptionalString("negative"));
      step.positive = positive.value_or("");
      step.negative = negative.value_or("");
      step.charges = true;
      step.epsilon = RandomizedResponseLocalEpsilon(step.p_truth);
      return std::nullopt;
    }
  }
  return StepError{ViolationKind::kUnknownTechnique, "unhandled technique"};
}

#undef TP_STEP_ASSIGN
#undef TP_STEP_CHECK

// Output kind of `t` on `input`, or an explanation of the mismatch.
absl::StatusOr<ColumnKind> OutputKind(Technique t, ColumnKind input,
                                      const CompiledStep& step) {
  const auto need_numeric = [&]() -> absl::StatusOr<ColumnKind> {
    if (input != ColumnKind::kNumeric) {
      return absl::InvalidArgumentError(
          absl::StrCat(step.name, " needs a numeric column but the chain "
                                  "provides ",
                       std::string(ColumnKindName(input))));
    }
    return ColumnKind::kNumeric;
  };
  switch (t) {
    case Technique::kBin: {
      TP_RETURN_IF_ERROR(need_numeric().status());
      return ColumnKind::kCategorical;
    }
    case Technique::kMask:
    case Technique::kPii:
      if (!IsTextLike(input)) {
        return absl::InvalidArgumentError(absl::StrCat(
            step.name, " needs a text or categorical column but the chain "
                       "provides numeric"));
      }
      return t == Technique::kPii ? ColumnKind::kText : input;
    case Technique::kRandomizedResponse:
      if (input == ColumnKind::kText) {
        return absl::InvalidArgumentError(
            "randomized_response needs a numeric 0/1 or categorical column");
      }
      if (input == ColumnKind::kCategorical &&
          (step.positive.empty() || step.negative.empty() ||
           step.positive == step.negative)) {
        return absl::InvalidArgumentError(
            "randomized_response on a categorical column needs distinct "
            "'positive' and 'negative' labels");
      }
      return input;
    default:
      return need_numeric();
  }
}

std::string LedgerLabel(const std::string& column, size_t step,
                        std::string_view technique) {
  return absl::StrCat(column, "#", step, ":", std::string(technique));
}

struct CompiledPlan {
  std::string column;
  std::vector<CompiledStep> steps;
};

// Effective kind of a loaded column under the config's schema hints.
std::optional<ColumnKind> EffectiveKind(const Column& column,
                                        const PipelineConfig& config) {
  const auto it = config.schema.find(column.schema.name);
  if (it == config.schema.end() || !it->second.kind) return column.schema.kind;
  const ColumnKind hinted = *it->second.kind;
  if (hinted == column.schema.kind) return hinted;
  if (IsTextLike(hinted) && IsTextLike(column.schema.kind)) return hinted;
  return std::nullopt;
}

// Shared by Validate and Execute so both see the same compiled plan.
std::vector<CompiledPlan> Compile(const PipelineConfig& config,
                                  const Table& table,
                                  ValidationResult& result) {
  auto add = [&](ViolationKind kind, std::string column,
                 std::optional<size_t> step, std::string message) {
    result.violations.push_back(
        {kind, std::move(column), step, std::move(message)});
  };
  auto unknown_key = [&](const std::string& column, std::optional<size_t> step,
                         const std::string& key) {
    if (config.strict) {
      add(ViolationKind::kUnknownKey, column, step,
          absl::StrCat("unknown key '", key, "'"));
    } else {
      result.warnings.push_back(absl::StrCat("unknown key '", key, "' ignored"));
    }
  };

  if (config.version != kConfigVersion) {
    add(ViolationKind::kUnsupportedVersion, "", std::nullopt,
        absl::StrCat("config version ", config.version,
                     " is not supported (expected ", kConfigVersion, ")"));
  }
  for (const auto& key : config.unknown_keys) unknown_key("", std::nullopt, key);
  for (const auto& [name, hint] : config.schema) {
    const Column* column = table.Find(name);
    if (column == nullptr) {
      add(ViolationKind::kUnknownColumn, name, std::nullopt,
          absl::StrCat("schema names column '", name,
                       "' which is not in the table"));
    } else if (!EffectiveKind(*column, config)) {
      add(ViolationKind::kTypeChain, name, std::nullopt,
          absl::StrCat("schema declares '", name, "' as ",
                       std::string(ColumnKindName(*hint.kind)),
                       " but it holds ",
                       std::string(ColumnKindName(column->schema.kind)),
                       " data"));
    }
  }

  std::vector<CompiledPlan> plans;
  std::set<std::string> seen_columns;
  std::map<std::string, ColumnKind> final_kind;
  PrivacyLedger scratch(config.budget);
  for (const ColumnPlan& plan : config.columns) {
    if (!seen_columns.insert(plan.column).second) {
      add(ViolationKind::kDuplicateColumn, plan.column, std::nullopt,
          absl::StrCat("column '", plan.column, "' has more than one plan; "
                       "put all its steps in one list"));
      continue;
    }
    const Column* column = table.Find(plan.column);
    if (column == nullptr) {
      add(ViolationKind::kUnknownColumn, plan.column, std::nullopt,
          absl::StrCat("column '", plan.column, "' is not in the table"));
      continue;
    }
    // The chain's current kind; unknown once a step fails to compile.
    const std::optional<ColumnKind> start = EffectiveKind(*column, config);
    bool kind_known = start.has_value();
    ColumnKind kind = start.value_or(column->schema.kind);
    CompiledPlan compiled{plan.column, {}};
    for (size_t i = 0; i < plan.steps.size(); ++i) {
      const StepSpec& spec = plan.steps[i];
      const auto technique = FindTechnique(spec.technique);
      if (!technique) {
        add(ViolationKind::kUnknownTechnique, plan.column, i,
            absl::StrCat("unknown technique '", spec.technique, "'"));
        kind_known = false;
        continue;
      }
      auto params = internal::ParseJson(spec.params_json, "step parameters");
      if (!params.ok()) {
        add(ViolationKind::kInvalidParams, plan.column, i,
            std::string(params.status().message()));
        kind_known = false;
        continue;
      }
      const std::string path = absl::StrCat("columns[", plan.column, "].steps[", i, "]");
      auto object = JsonObject::From(*params, path);
      if (!object.ok()) {
        add(ViolationKind::kInvalidParams, plan.column, i,
            std::string(object.status().message()));
        kind_known = false;
        continue;
      }
      CompiledStep step;
      step.technique = *technique;
      step.name = spec.technique;
      step.params_json = params->dump();
      std::vector<std::string> unknown;
      if (auto error = ParseStepParams(*technique, *object, config.strict, step,
                                       unknown)) {
        add(error->kind, plan.column, i, std::move(error->message));
        kind_known = false;
        continue;
      }
      for (auto& k : object->UnknownKeys()) unknown.push_back(std::move(k));
      for (const auto& k : unknown) unknown_key(plan.column, i, k);
      if (kind_known) {
        auto next = OutputKind(*technique, kind, step);
        if (!next.ok()) {
          add(ViolationKind::kTypeChain, plan.column, i,
              std::string(next.status().message()));
          kind_known = false;
        } else {
          kind = *next;
        }
      }
      if (step.charges) {
        if (absl::Status st = scratch.Charge(
                LedgerLabel(plan.column, i, step.name), step.epsilon, step.delta);
            !st.ok()) {
          add(ViolationKind::kBudgetInfeasible, plan.column, i,
              absl::StrCat("declared charges exceed the budget: ", st.message()));
        }
      }
      compiled.steps.push_back(std::move(step));
    }
    if (kind_known) final_kind[plan.column] = kind;
    plans.push_back(std::move(compiled));
  }

  for (const auto& [name, values] : config.thresholds) {
    const Column* column = table.Find(name);
    if (column == nullptr) {
      add(ViolationKind::kUnknownColumn, name, std::nullopt,
          absl::StrCat("threshold names column '", name,
                       "' which is not in the table"));
      continue;
    }
    const auto it = final_kind.find(name);
    const ColumnKind kind =
        it != final_kind.end() ? it->second : column->schema.kind;
    if (kind != ColumnKind::kNumeric) {
      add(ViolationKind::kTypeChain, name, std::nullopt,
          absl::StrCat("thresholds need column '", name,
                       "' to stay numeric through its chain"));
    }
    for (double v : values) {
      if (!std::isfinite(v)) {
        add(ViolationKind::kInvalidParams, name, std::nullopt,
            "thresholds must be finite");
        break;
      }
    }
  }
  return plans;
}

// Mutable state of one column chain.
struct ChainOutput {
  Column column;
  std::vector<StepRecord> records;
  std::optional<ThresholdRecord> threshold;
  std::optional<BinningScheme> binning;
  bool text_rewritten = false;
  absl::Status status;
};

absl::Status RunStep(const CompiledStep& step, const ExecuteOptions& options,
                     RandomSource& src, Column& column, StepRecord& record,
                     ChainOutput& out) {
  Json report = Json::object();
  auto take_numeric = [&](NumericResult r) {
    column.numeric() = std::move(r.cells);
    column.source_text.clear();
    record.cells_affected = r.cells_affected;
    record.issues = std::move(r.issues);
  };
  switch (step.technique) {
    case Technique::kAdditiveNoise: {
      TP_ASSIGN_OR_RETURN(NumericResult r,
                          AddNoise(column.numeric(), step.noise, src));
      take_numeric(std::move(r));
      break;
    }
    case Technique::kLaplaceMechanism:
    case Technique::kGaussianMechanism: {
      NoiseSpec noise;
      if (step.technique == Technique::kLaplaceMechanism) {
        noise.family = NoiseFamily::kLaplace;
        noise.scale = LaplaceScale(step.dp);
        report["laplace_scale"] = noise.scale;
      } else {
        noise.family = NoiseFamily::kGaussian;
        noise.scale = GaussianSigma(step.dp);
        report["gaussian_sigma"] = noise.scale;
      }
      TP_ASSIGN_OR_RETURN(NumericResult r,
                          AddNoise(column.numeric(), noise, src));
      take_numeric(std::move(r));
      break;
    }
    case Technique::kGeometricMechanism: {
      NumericResult r{column.numeric(), 0, {}};
      for (size_t i = 0; i < r.cells.size(); ++i) {
        if (!r.cells[i]) continue;
        const double v = *r.cells[i];
        if (!std::isfinite(v) || v != std::floor(v) || std::fabs(v) > 0x1p53) {
          r.issues.push_back(
              {i, absl::StrCat("row ", i,
                               ": geometric mechanism needs an integer count")});
          continue;
        }
        TP_ASSIGN_OR_RETURN(
            int64_t noisy,
            GeometricMechanism(static_cast<int64_t>(v), step.dp.epsilon, src));
        r.cells[i] = static_cast<double>(noisy);
        ++r.cells_affected;
      }
      take_numeric(std::move(r));
      break;
    }
    case Technique::kMultiplicative: {
      TP_ASSIGN_OR_RETURN(
          NumericResult r,
          MultiplicativePerturbation(column.numeric(), step.lo, step.hi, src));
      take_numeric(std::move(r));
      break;
    }
    case Technique::kHybrid: {
      TP_ASSIGN_OR_RETURN(
          NumericResult r,
          HybridPerturbation(column.numeric(), step.lo, step.hi,
                             step.dp.sensitivity, step.dp.epsilon, src));
      report["laplace_scale"] = LaplaceScale(step.dp);
      take_numeric(std::move(r));
      break;
    }
    case Technique::kBin: {
      BinResult r = Bin(column.numeric(), *step.bins);
      size_t present = 0;
      for (const auto& c : r.labels) present += c.has_value();
      record.cells_affected = present;
      report["out_of_range"] = r.out_of_range;
      report["scheme"] = internal::BinningToJson(*step.bins);
      Column binned = Column::Text(column.schema.name, std::move(r.labels),
                                   ColumnKind::kCategorical);
      binned.schema.sensitivity = column.schema.sensitivity;
      column = std::move(binned);
      out.binning = *step.bins;
      break;
    }
    case Technique::kClip: {
      ClipBounds bounds{step.lo, step.hi, ClipDerivation::kExplicit};
      if (step.clip != ClipDerivation::kExplicit) {
        TP_ASSIGN_OR_RETURN(bounds, DeriveClipBounds(column.numeric(), step.clip,
                                                     column.schema.name,
                                                     step.p_lo, step.p_hi));
      }
      TP_ASSIGN_OR_RETURN(ClipResult r, Clip(column.numeric(), bounds));
      report["lo"] = bounds.lo;
      report["hi"] = bounds.hi;
      report["clipped_low"] = r.report.low;
      report["clipped_high"] = r.report.high;
      column.numeric() = std::move(r.cells);
      column.source_text.clear();
      record.cells_affected = r.report.low + r.report.high;
      break;
    }
    case Technique::kMask: {
      TP_ASSIGN_OR_RETURN(MaskResult r, Mask(column.text(), *step.mask));
      column.text() = std::move(r.cells);
      record.cells_affected = r.matched_cells;
      report["rule"] = step.mask->name();
      report["matched_cells"] = r.matched_cells;
      report["unmatched_cells"] = r.unmatched_cells;
      out.text_rewritten = true;
      break;
    }
    case Technique::kPii: {
      const DetectorSet detectors =
          step.pii_kinds.empty() ? DetectorSet::Default()
                                 : DetectorSet::Default().OnlyKinds(step.pii_kinds);
      FauxMapping mapping;
      mapping.key = *options.pii_key;
      mapping.mode = step.pii_mode;
      mapping.names = detectors.names();
      std::map<std::string, size_t> by_kind;
      for (auto& cell : column.text()) {
        if (!cell) continue;
        TP_ASSIGN_OR_RETURN(CellTransform t,
                            TransformCell(*cell, detectors, mapping, src));
        if (t.audit.empty()) continue;
        for (const auto& a : t.audit) ++by_kind[std::string(PiiKindName(a.kind))];
        if (t.cell != *cell) ++record.cells_affected;
        *cell = std::move(t.cell);
      }
      column.schema.kind = ColumnKind::kText;
      report["mode"] = step.pii_mode == FauxMode::kConsistent ? "consistent"
                                                               : "independent";
      report["entities"] = by_kind;
      out.text_rewritten = true;
      break;
    }
    case Technique::kRandomizedResponse: {
      const bool numeric = column.is_numeric();
      std::vector<size_t> rows;
      std::vector<bool> answers;
      for (size_t i = 0; i < column.size(); ++i) {
        std::optional<bool> answer;
        if (numeric) {
          const auto& c = column.numeric()[i];
          if (!c) continue;
          if (*c == 1.0) answer = true;
          if (*c == 0.0) answer = false;
        } else {
          const auto& c = column.text()[i];
          if (!c) continue;
          if (*c == step.positive) answer = true;
          if (*c == step.negative) answer = false;
        }
        if (!answer) {
          record.issues.push_back(
              {i, absl::StrCat("row ", i, ": randomized_response needs ",
                               numeric ? std::string("0 or 1")
                                       : absl::StrCat("'", step.positive,
                                                      "' or '", step.negative,
                                                      "'"))});
          continue;
        }
        rows.push_back(i);
        answers.push_back(*answer);
      }
      report["p_truth"] = step.p_truth;
      report["local_epsilon"] = step.epsilon;
      if (answers.empty()) break;
      TP_ASSIGN_OR_RETURN(RandomizedResponseResult r,
                          RandomizedResponse(answers, step.p_truth, src));
      for (size_t k = 0; k < rows.size(); ++k) {
        if (numeric) {
          column.numeric()[rows[k]] = r.responses[k] ? 1.0 : 0.0;
        } else {
          column.text()[rows[k]] = r.responses[k] ? step.positive : step.negative;
        }
      }
      if (numeric) column.source_text.clear();
      record.cells_affected = rows.size();
      report["yes_fraction"] = r.yes_fraction;
      report["estimated_prevalence"] = r.estimate;
      report["raw_estimate"] = r.raw_estimate;
      break;
    }
  }
  record.report_json = report.dump();
  return absl::OkStatus();
}

ChainOutput RunChain(const CompiledPlan& plan, const Column& input,
                     const std::vector<double>* thresholds, uint64_t seed,
                     const ExecuteOptions& options) {
  ChainOutput out{input, {}, std::nullopt, std::nullopt, false, {}};
  Column& column = out.column;
  for (size_t i = 0; i < plan.steps.size(); ++i) {
    const CompiledStep& step = plan.steps[i];
    StepRecord record;
    record.column = plan.column;
    record.step_index = i;
    record.technique = step.name;
    record.parameters_json = step.params_json;
    record.stream_id = StableHash(plan.column, i);
    record.differentially_private = step.charges;
    record.epsilon = step.epsilon;
    record.delta = step.delta;
    RandomSource src(seed, record.stream_id);
    out.status = RunStep(step, options, src, column, record, out);
    if (!out.status.ok()) {
      out.status = absl::Status(
          out.status.code(),
          absl::StrCat("column '", plan.column, "' step ", i, " (", step.name,
                       "): ", out.status.message()));
      return out;
    }
    out.records.push_back(std::move(record));
  }
  if (thresholds != nullptr && column.is_numeric() && input.is_numeric()) {
    out.threshold = ThresholdRecord{plan.column, *thresholds, 0};
    if (!plan.steps.empty()) {
      out.threshold->reflected_cells =
          ApplyThresholds(input.numeric(), column.numeric(), *thresholds);
    }
  }
  return out;
}

Json StepToJson(const StepRecord& s) {
  Json issues = Json::array();
  for (const auto& issue : s.issues) {
    issues.push_back({{"row", issue.row}, {"message", issue.message}});
  }
  return Json{{"column", s.column},
              {"step", s.step_index},
              {"technique", s.technique},
              {"parameters", Json::parse(s.parameters_json)},
              {"stream_id", s.stream_id},
              {"cells_affected", s.cells_affected},
              {"differentially_private", s.differentially_private},
              {"epsilon", s.epsilon},
              {"delta", s.delta},
              {"report", Json::parse(s.report_json)},
              {"issues", std::move(issues)}};
}

std::string Hex64(uint64_t v) {
  char buf[19];
  std::snprintf(buf, sizeof(buf), "0x%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string_view ViolationKindName(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::kUnsupportedVersion: return "unsupported_version";
    case ViolationKind::kUnknownColumn: return "unknown_column";
    case ViolationKind::kDuplicateColumn: return "duplicate_column";
    case ViolationKind::kUnknownTechnique: return "unknown_technique";
    case ViolationKind::kTypeChain: return "type_chain";
    case ViolationKind::kMissingDpParams: return "missing_dp_params";
    case ViolationKind::kInvalidParams: return "invalid_params";
    case ViolationKind::kBudgetInfeasible: return "budget_infeasible";
    case ViolationKind::kUnknownKey: return "unknown_key";
  }
  return "unknown";
}

std::string Violation::ToString() const {
  std::string where;
  if (!column.empty()) where = absl::StrCat(" column '", column, "'");
  if (step) absl::StrAppend(&where, " step ", *step);
  return absl::StrCat(std::string(ViolationKindName(kind)), where, ": ", message);
}

bool ValidationResult::only_budget() const {
  return !violations.empty() &&
         std::all_of(violations.begin(), violations.end(), [](const Violation& v) {
           return v.kind == ViolationKind::kBudgetInfeasible;
         });
}

absl::StatusOr<PipelineConfig> PipelineConfig::Parse(std::string_view text) {
  TP_ASSIGN_OR_RETURN(Json root, internal::ParseJson(text, "pipeline config"));
  TP_ASSIGN_OR_RETURN(JsonObject o, JsonObject::From(root, ""));
  PipelineConfig config;
  std::vector<std::string>& unknown = config.unknown_keys;

  TP_ASSIGN_OR_RETURN(uint64_t version, o.Unsigned("version"));
  config.version = static_cast<int>(std::min<uint64_t>(version, 1u << 30));
  if (const Json* dataset = o.Child("dataset")) {
    TP_ASSIGN_OR_RETURN(JsonObject d, JsonObject::From(*dataset, "dataset"));
    TP_ASSIGN_OR_RETURN(auto name, d.OptionalString("name"));
    TP_ASSIGN_OR_RETURN(auto description, d.OptionalString("description"));
    config.dataset_name = name.value_or("");
    config.dataset_description = description.value_or("");
    for (auto& k : d.UnknownKeys()) unknown.push_back(std::move(k));
  }
  if (o.Has("master_seed")) {
    TP_ASSIGN_OR_RETURN(config.master_seed, o.Unsigned("master_seed"));
  } else {
    o.Child("master_seed");
  }
  {
    const Json* budget = o.Child("budget");
    if (budget == nullptr) {
      return absl::InvalidArgumentError("missing required key 'budget'");
    }
    TP_ASSIGN_OR_RETURN(JsonObject b, JsonObject::From(*budget, "budget"));
    TP_ASSIGN_OR_RETURN(config.budget.epsilon, b.Number("epsilon"));
    TP_ASSIGN_OR_RETURN(config.budget.delta, b.NumberOr("delta", 0.0));
    if (!(config.budget.epsilon >= 0.0) || !(config.budget.delta >= 0.0) ||
        !(config.budget.delta < 1.0)) {
      return absl::InvalidArgumentError(
          "budget needs epsilon >= 0 and 0 <= delta < 1");
    }
    for (auto& k : b.UnknownKeys()) unknown.push_back(std::move(k));
  }
  TP_ASSIGN_OR_RETURN(config.strict, o.BoolOr("strict", true));
  if (const Json* schema = o.Child("schema")) {
    TP_ASSIGN_OR_RETURN(JsonObject s, JsonObject::From(*schema, "schema"));
    for (const auto& [name, value] : schema->items()) {
      TP_ASSIGN_OR_RETURN(JsonObject h, JsonObject::From(*s.Child(name),
                                                         s.KeyPath(name)));
      SchemaHint hint;
      TP_ASSIGN_OR_RETURN(auto kind, h.OptionalString("kind"));
      TP_ASSIGN_OR_RETURN(auto sensitivity, h.OptionalString("sensitivity"));
      if (kind) {
        TP_ASSIGN_OR_RETURN(hint.kind, ParseColumnKind(*kind));
      }
      if (sensitivity) {
        TP_ASSIGN_OR_RETURN(hint.sensitivity, ParseSensitivity(*sensitivity));
      }
      for (auto& k : h.UnknownKeys()) unknown.push_back(std::move(k));
      config.schema[name] = hint;
    }
  }
  if (const Json* columns = o.Child("columns")) {
    if (!columns->is_array()) {
      return absl::InvalidArgumentError("'columns' must be an array");
    }
    for (size_t c = 0; c < columns->size(); ++c) {
      TP_ASSIGN_OR_RETURN(JsonObject p, JsonObject::From((*columns)[c],
                                                         absl::StrCat("columns[", c, "]")));
      ColumnPlan plan;
      TP_ASSIGN_OR_RETURN(plan.column, p.String("column"));
      const Json* steps = p.Child("steps");
      if (steps != nullptr && !steps->is_array()) {
        return absl::InvalidArgumentError(
            absl::StrCat("'", p.KeyPath("steps"), "' must be an array"));
      }
      if (steps != nullptr) {
        for (size_t i = 0; i < steps->size(); ++i) {
          const Json& step = (*steps)[i];
          const std::string path = absl::StrCat(p.KeyPath("steps"), "[", i, "]");
          if (!step.is_object() || !step.contains("technique") ||
              !step["technique"].is_string()) {
            return absl::InvalidArgumentError(absl::StrCat(
                "'", path, "' must be an object with a string 'technique'"));
          }
          Json params = step;
          params.erase("technique");
          plan.steps.push_back(
              {step["technique"].get<std::string>(), params.dump()});
        }
      }
      for (auto& k : p.UnknownKeys()) unknown.push_back(std::move(k));
      config.columns.push_back(std::move(plan));
    }
  }
  if (const Json* thresholds = o.Child("thresholds")) {
    TP_ASSIGN_OR_RETURN(JsonObject t, JsonObject::From(*thresholds, "thresholds"));
    for (const auto& [name, value] : thresholds->items()) {
      TP_ASSIGN_OR_RETURN(config.thresholds[name], t.NumberArray(name));
    }
  }
  for (auto& k : o.UnknownKeys()) unknown.push_back(std::move(k));
  return config;
}

std::string PipelineConfig::ToJson() const {
  Json j;
  j["version"] = version;
  Json dataset = Json::object();
  if (!dataset_name.empty()) dataset["name"] = dataset_name;
  if (!dataset_description.empty()) dataset["description"] = dataset_description;
  j["dataset"] = std::move(dataset);
  j["master_seed"] = master_seed;
  j["budget"] = {{"epsilon", budget.epsilon}, {"delta", budget.delta}};
  j["strict"] = strict;
  Json schema_json = Json::object();
  for (const auto& [name, hint] : schema) {
    Json h = Json::object();
    if (hint.kind) h["kind"] = std::string(ColumnKindName(*hint.kind));
    if (hint.sensitivity) {
      h["sensitivity"] = std::string(SensitivityName(*hint.sensitivity));
    }
    schema_json[name] = std::move(h);
  }
  j["schema"] = std::move(schema_json);
  Json columns_json = Json::array();
  for (const auto& plan : columns) {
    Json steps = Json::array();
    for (const auto& step : plan.steps) {
      Json s = {{"technique", step.technique}};
      Json params = Json::parse(step.params_json, nullptr, false);
      if (params.is_object()) s.update(params);
      steps.push_back(std::move(s));
    }
    columns_json.push_back({{"column", plan.column}, {"steps", std::move(steps)}});
  }
  j["columns"] = std::move(columns_json);
  Json thresholds_json = Json::object();
  for (const auto& [name, values] : thresholds) thresholds_json[name] = values;
  j["thresholds"] = std::move(thresholds_json);
  return j.dump(2) + "\n";
}

absl::StatusOr<BinningScheme> ParseBinningJson(std::string_view text) {
  TP_ASSIGN_OR_RETURN(Json value, internal::ParseJson(text, "binning scheme"));
  std::vector<std::string> unknown;
  TP_ASSIGN_OR_RETURN(BinningScheme scheme,
                      internal::ParseBinning(value, "bins", unknown));
  if (!unknown.empty()) {
    return absl::InvalidArgumentError(
        absl::StrCat("unknown key '", unknown.front(), "'"));
  }
  return scheme;
}

ValidationResult Validate(const PipelineConfig& config, const Table& table) {
  ValidationResult result;
  Compile(config, table, result);
  return result;
}

absl::StatusOr<ExecutionResult> Execute(const PipelineConfig& config,
                                        const Table& table,
                                        const ExecuteOptions& options) {
  ValidationResult validation;
  const std::vector<CompiledPlan> plans = Compile(config, table, validation);
  if (!validation.ok()) {
    std::string message = "pipeline config is invalid:";
    for (const auto& v : validation.violations) {
      absl::StrAppend(&message, "\n  ", v.ToString());
    }
    return validation.only_budget() ? absl::ResourceExhaustedError(message)
                                    : absl::InvalidArgumentError(message);
  }
  for (const auto& plan : plans) {
    for (const auto& step : plan.steps) {
      if (step.technique == Technique::kPii && !options.pii_key) {
        return absl::InvalidArgumentError(absl::StrCat(
            "column '", plan.column, "' has a pii step but no key was supplied"));
      }
    }
  }
  const uint64_t seed = options.seed_override.value_or(config.master_seed);

  // Planning pass: all charges happen here, in declaration order.
  PrivacyLedger ledger(config.budget);
  for (const auto& plan : plans) {
    for (size_t i = 0; i < plan.steps.size(); ++i) {
      const CompiledStep& step = plan.steps[i];
      if (!step.charges) continue;
      TP_RETURN_IF_ERROR(ledger.Charge(LedgerLabel(plan.column, i, step.name),
                                       step.epsilon, step.delta));
    }
  }

  // Hint relabels (categorical <-> text) apply to the working table.
  Table working = table;
  for (size_t c = 0; c < working.column_count(); ++c) {
    const Column& column = working.column(c);
    const auto it = config.schema.find(column.schema.name);
    if (it == config.schema.end()) continue;
    Column relabeled = column;
    if (it->second.kind) relabeled.schema.kind = *EffectiveKind(column, config);
    if (it->second.sensitivity) relabeled.schema.sensitivity = *it->second.sensitivity;
    if (relabeled.schema != column.schema) {
      TP_RETURN_IF_ERROR(working.ReplaceColumn(c, std::move(relabeled)));
    }
  }

  std::vector<const CompiledPlan*> tasks;
  for (const auto& plan : plans) {
    if (!plan.steps.empty()) tasks.push_back(&plan);
  }
  std::vector<ChainOutput> outputs(tasks.size());
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (size_t t = next.fetch_add(1); t < tasks.size(); t = next.fetch_add(1)) {
      const CompiledPlan& plan = *tasks[t];
      const auto th = config.thresholds.find(plan.column);
      outputs[t] = RunChain(plan, *working.Find(plan.column),
                            th == config.thresholds.end() ? nullptr : &th->second,
                            seed, options);
    }
  };
  size_t workers = options.workers != 0
                       ? options.workers
                       : std::max<size_t>(1, std::thread::hardware_concurrency());
  workers = std::min(workers, std::max<size_t>(tasks.size(), 1));
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }

  ExecutionManifest manifest;
  manifest.dataset_name = config.dataset_name;
  manifest.master_seed = seed;
  manifest.seed_source = options.seed_override ? "override" : "config";
  manifest.strict = config.strict;
  manifest.rows = table.row_count();
  manifest.budget = config.budget;
  manifest.warnings = validation.warnings;
  manifest.input_digest = ContentDigest(SerializeCsv(table));
  for (size_t t = 0; t < tasks.size(); ++t) {
    ChainOutput& out = outputs[t];
    TP_RETURN_IF_ERROR(out.status);
    const std::string& name = tasks[t]->column;
    TP_RETURN_IF_ERROR(working.ReplaceColumn(*working.IndexOf(name),
                                             std::move(out.column)));
    for (auto& r : out.records) manifest.steps.push_back(std::move(r));
    if (out.threshold) manifest.thresholds.push_back(std::move(*out.threshold));
    if (out.binning) manifest.binning.emplace(name, *out.binning);
    if (out.text_rewritten) manifest.text_columns.insert(name);
  }
  manifest.ledger_entries = ledger.entries();
  manifest.output_digest = ContentDigest(SerializeCsv(working));
  PipelineConfig effective = config;
  effective.master_seed = seed;
  manifest.config_json = effective.ToJson();
  return ExecutionResult{std::move(working), std::move(manifest), std::move(ledger)};
}

std::string ExecutionManifest::ToJson() const {
  Json j;
  j["manifest_version"] = version;
  j["dataset"] = dataset_name;
  j["master_seed"] = master_seed;
  j["seed_source"] = seed_source;
  j["strict"] = strict;
  j["rows"] = rows;
  j["input_digest"] = input_digest;
  j["output_digest"] = output_digest;
  Json steps_json = Json::array();
  for (const auto& s : steps) steps_json.push_back(StepToJson(s));
  j["steps"] = std::move(steps_json);
  Json thresholds_json = Json::array();
  for (const auto& t : thresholds) {
    thresholds_json.push_back({{"column", t.column},
                               {"thresholds", t.thresholds},
                               {"reflected_cells", t.reflected_cells},
                               {"post_processing", "reflection"},
                               {"differentially_private", false}});
  }
  j["thresholds"] = std::move(thresholds_json);
  Json entries = Json::array();
  double spent_epsilon = 0.0, spent_delta = 0.0;
  for (const auto& e : ledger_entries) {
    entries.push_back({{"label", e.label}, {"epsilon", e.epsilon}, {"delta", e.delta}});
    spent_epsilon += e.epsilon;
    spent_delta += e.delta;
  }
  j["ledger"] = {{"budget", {{"epsilon", budget.epsilon}, {"delta", budget.delta}}},
                 {"entries", std::move(entries)},
                 {"spent_epsilon", spent_epsilon},
                 {"spent_delta", spent_delta}};
  Json binning_json = Json::object();
  for (const auto& [name, scheme] : binning) {
    binning_json[name] = internal::BinningToJson(scheme);
  }
  j["binning"] = std::move(binning_json);
  j["text_columns"] = text_columns;
  j["warnings"] = warnings;
  j["config"] = config_json.empty() ? Json(nullptr)
                                    : Json::parse(config_json, nullptr, false);
  return j.dump(2) + "\n";
}

std::string ExecutionManifest::ToText() const {
  std::string out = absl::StrCat("# tabperturb execution manifest v", version, "\n");
  absl::StrAppend(&out, "dataset\t", dataset_name.empty() ? "-" : dataset_name, "\n");
  absl::StrAppend(&out, "master_seed\t", master_seed, "\t", seed_source, "\n");
  absl::StrAppend(&out, "strict\t", strict ? "true" : "false", "\n");
  absl::StrAppend(&out, "rows\t", rows, "\n");
  absl::StrAppend(&out, "input\t", input_digest, "\n");
  absl::StrAppend(&out, "output\t", output_digest, "\n");
  for (const auto& s : steps) {
    absl::StrAppend(&out, "step\t", s.column, "\t", s.step_index, "\t",
                    s.technique, "\tstream=", Hex64(s.stream_id),
                    "\tcells=", s.cells_affected, "\tissues=", s.issues.size(),
                    "\t",
                    s.differentially_private
                        ? absl::StrCat("eps=", FormatDouble(s.epsilon),
                                       " delta=", FormatDouble(s.delta))
                        : std::string("unbudgeted"),
                    "\t", s.parameters_json, "\n");
  }
  for (const auto& t : thresholds) {
    std::string values;
    for (double v : t.thresholds) {
      absl::StrAppend(&values, values.empty() ? "" : ",", FormatDouble(v));
    }
    absl::StrAppend(&out, "threshold\t", t.column, "\t", values,
                    "\treflected=", t.reflected_cells,
                    "\tnon-DP post-processing\n");
  }
  absl::StrAppend(&out, "budget\t", FormatDouble(budget.epsilon), "\t",
                  FormatDouble(budget.delta), "\n");
  double cum_e = 0.0, cum_d = 0.0;
  for (const auto& e : ledger_entries) {
    cum_e += e.epsilon;
    cum_d += e.delta;
    absl::StrAppend(&out, "charge\t", e.label, "\t", FormatDouble(e.epsilon),
                    "\t", FormatDouble(e.delta), "\t", FormatDouble(cum_e), "\t",
                    FormatDouble(cum_d), "\n");
  }
  for (const auto& w : warnings) absl::StrAppend(&out, "warning\t", w, "\n");
  return out;
}

std::string ExecutionManifest::Digest() const { return ContentDigest(ToJson()); }

ReportContext ExecutionManifest::ToReportContext() const {
  ReportContext context;
  context.binning = binning;
  context.text_columns = text_columns;
  context.manifest_digest = Digest();
  return context;
}

absl::StatusOr<ExecutionManifest> ExecutionManifest::FromJson(
    std::string_view text) {
  TP_ASSIGN_OR_RETURN(Json j, internal::ParseJson(text, "manifest"));
  ExecutionManifest m;
  try {
    m.version = j.at("manifest_version").get<int>();
    m.dataset_name = j.at("dataset").get<std::string>();
    m.master_seed = j.at("master_seed").get<uint64_t>();
    m.seed_source = j.at("seed_source").get<std::string>();
    m.strict = j.at("strict").get<bool>();
    m.rows = j.at("rows").get<size_t>();
    m.input_digest = j.at("input_digest").get<std::string>();
    m.output_digest = j.at("output_digest").get<std::string>();
    for (const Json& s : j.at("steps")) {
      StepRecord r;
      r.column = s.at("column").get<std::string>();
      r.step_index = s.at("step").get<size_t>();
      r.technique = s.at("technique").get<std::string>();
      r.parameters_json = s.at("parameters").dump();
      r.stream_id = s.at("stream_id").get<uint64_t>();
      r.cells_affected = s.at("cells_affected").get<size_t>();
      r.differentially_private = s.at("differentially_private").get<bool>();
      r.epsilon = s.at("epsilon").get<double>();
      r.delta = s.at("delta").get<double>();
      r.report_json = s.at("report").dump();
      for (const Json& issue : s.at("issues")) {
        r.issues.push_back({issue.at("row").get<size_t>(),
                            issue.at("message").get<std::string>()});
      }
      m.steps.push_back(std::move(r));
    }
    for (const Json& t : j.at("thresholds")) {
      m.thresholds.push_back({t.at("column").get<std::string>(),
                              t.at("thresholds").get<std::vector<double>>(),
                              t.at("reflected_cells").get<size_t>()});
    }
    const Json& ledger = j.at("ledger");
    m.budget.epsilon = ledger.at("budget").at("epsilon").get<double>();
    m.budget.delta = ledger.at("budget").at("delta").get<double>();
    for (const Json& e : ledger.at("entries")) {
      m.ledger_entries.push_back({e.at("label").get<std::string>(),
                                  e.at("epsilon").get<double>(),
                                  e.at("delta").get<double>()});
    }
    for (const auto& [name, value] : j.at("binning").items()) {
      TP_ASSIGN_OR_RETURN(BinningScheme scheme, internal::BinningFromJson(value));
      m.binning.emplace(name, std::move(scheme));
    }
    for (const Json& c : j.at("text_columns")) {
      m.text_columns.insert(c.get<std::string>());
    }
    m.warnings = j.at("warnings").get<std::vector<std::string>>();
    if (!j.at("config").is_null()) m.config_json = j.at("config").dump(2) + "\n";
  } catch (const Json::exception& e) {
    return absl::InvalidArgumentError(
        absl::StrCat("manifest is malformed: ", e.what()));
  }
  return m;
}

}  // namespace tabperturb
