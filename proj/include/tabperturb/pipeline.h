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

#ifndef TABPERTURB_PIPELINE_H_
#define TABPERTURB_PIPELINE_H_

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tabperturb/csv.h"
#include "tabperturb/fidelity.h"
#include "tabperturb/ledger.h"
#include "tabperturb/pii.h"
#include "tabperturb/table.h"
#include "tabperturb/transforms.h"

namespace tabperturb {

inline constexpr int kConfigVersion = 1;

// One configured technique. `params_json` is the step object minus its
// "technique" key, kept verbatim so validation can report every problem.
struct StepSpec {
  std::string technique;
  std::string params_json;
};

struct ColumnPlan {
  std::string column;
  std::vector<StepSpec> steps;
};

// Versioned JSON pipeline configuration:
//
//   {
//     "version": 1,
//     "dataset": {"name": "loans"},
//     "master_seed": 42,
//     "budget": {"epsilon": 2.0, "delta": 1e-5},
//     "strict": true,
//     "schema": {"notes": {"kind": "text_pii"}},
//     "columns": [
//       {"column": "income",
//        "steps": [{"technique": "multiplicative", "lo": 0.8, "hi": 1.2}]}
//     ],
//     "thresholds": {"credit_score": [720]}
//   }
//
// Column plans run in the declared order; steps within a plan run in order.
struct PipelineConfig {
  int version = kConfigVersion;
  std::string dataset_name;
  std::string dataset_description;
  uint64_t master_seed = 0;
  PrivacyBudget budget;
  bool strict = true;
  SchemaHints schema;
  std::vector<ColumnPlan> columns;
  std::map<std::string, std::vector<double>> thresholds;
  // Keys the parser did not recognise, as dotted paths.
  std::vector<std::string> unknown_keys;

  // Fails only when the text is not a JSON object or a recognised key has
  // the wrong type; semantic problems are left to Validate().
  static absl::StatusOr<PipelineConfig> Parse(std::string_view json);
  std::string ToJson() const;
};

enum class ViolationKind {
  kUnsupportedVersion,
  kUnknownColumn,
  kDuplicateColumn,
  kUnknownTechnique,
  kTypeChain,
  kMissingDpParams,
  kInvalidParams,
  kBudgetInfeasible,
  kUnknownKey,
};

std::string_view ViolationKindName(ViolationKind kind);

struct Violation {
  ViolationKind kind = ViolationKind::kInvalidParams;
  std::string column;
  std::optional<size_t> step;
  std::string message;

  std::string ToString() const;
};

struct ValidationResult {
  std::vector<Violation> violations;
  // Findings that do not block execution (unknown keys outside strict mode).
  std::vector<std::string> warnings;

  bool ok() const { return violations.empty(); }
  // True when every violation is budget infeasibility.
  bool only_budget() const;
};

// Checks column references, technique parameters, type compatibility of
// each chain, DP parameters and the declared budget, before any work runs.
ValidationResult Validate(const PipelineConfig& config, const Table& table);

struct ExecuteOptions {
  // Replaces config.master_seed when set.
  std::optional<uint64_t> seed_override;
  // Worker threads for column chains; 0 picks the hardware concurrency.
  size_t workers = 0;
  // Secret for pii steps. Required only when the config has one.
  std::optional<PiiKey> pii_key;
};

struct StepRecord {
  std::string column;
  size_t step_index = 0;
  std::string technique;
  std::string parameters_json;
  uint64_t stream_id = 0;
  size_t cells_affected = 0;
  // Rows passed through because the transform could not process them.
  std::vector<CellIssue> issues;
  bool differentially_private = false;
  double epsilon = 0.0;
  double delta = 0.0;
  // Step-specific report (clip counts, mask matches, bin scheme, PII audit
  // counts) as a JSON object.
  std::string report_json = "{}";
};

struct ThresholdRecord {
  std::string column;
  std::vector<double> thresholds;
  size_t reflected_cells = 0;
};

struct ExecutionManifest {
  int version = 1;
  std::string dataset_name;
  uint64_t master_seed = 0;
  // "config" or "override".
  std::string seed_source = "config";
  bool strict = true;
  size_t rows = 0;
  std::string input_digest;
  std::string output_digest;
  std::vector<StepRecord> steps;
  std::vector<ThresholdRecord> thresholds;
  PrivacyBudget budget;
  std::vector<LedgerEntry> ledger_entries;
  std::vector<std::string> warnings;
  // Effective configuration (master_seed resolved) for replay.
  std::string config_json;
  // Final binning scheme of columns that end categorical after a bin step.
  std::map<std::string, BinningScheme> binning;
  // Columns rewritten by mask or pii steps.
  std::set<std::string> text_columns;

  std::string ToJson() const;
  // Line-oriented audit form.
  std::string ToText() const;
  // Content digest of ToJson().
  std::string Digest() const;
  ReportContext ToReportContext() const;
  static absl::StatusOr<ExecutionManifest> FromJson(std::string_view json);
};

struct ExecutionResult {
  Table table;
  ExecutionManifest manifest;
  PrivacyLedger ledger;
};

// Parses a binning object in the config format: {"edges": [...],
// "labels": [...]}, {"preset": "credit_score"} or {"integer_ranges":
// {"start": 20, "width": 10, "count": 5}}.
absl::StatusOr<BinningScheme> ParseBinningJson(std::string_view json);

// Validates, charges the ledger for every DP step in declaration order,
// then runs the column chains in parallel. Each step draws from
// RandomSource(seed, StableHash(column, step_index)), so the output does not
// depend on the worker count. Errors: InvalidArgument for validation
// failures, ResourceExhausted when the budget cannot cover the plan.
absl::StatusOr<ExecutionResult> Execute(const PipelineConfig& config,
                                        const Table& table,
                                        const ExecuteOptions& options = {});

}  // namespace tabperturb

#endif  // TABPERTURB_PIPELINE_H_
