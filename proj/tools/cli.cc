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

#include "cli.h"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <random>
#include <utility>

#include "CLI11.hpp"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "json.hpp"
#include "tabperturb/csv.h"
#include "tabperturb/fidelity.h"
#include "tabperturb/ledger.h"
#include "tabperturb/pii.h"
#include "tabperturb/pipeline.h"
#include "tabperturb/query.h"
#include "tabperturb/random.h"
#include "tabperturb/status_macros.h"
#include "tabperturb/text_util.h"

namespace tabperturb::cli {
namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

bool SamePath(const fs::path& a, const fs::path& b) {
  std::error_code ec;
  if (fs::exists(a, ec) && fs::exists(b, ec)) return fs::equivalent(a, b, ec);
  return fs::weakly_canonical(a, ec) == fs::weakly_canonical(b, ec);
}

// Writes every file or none: contents go to temporaries beside their
// targets and are renamed into place only after all writes succeeded.
absl::Status WriteAllOrNothing(
    const std::vector<std::pair<fs::path, std::string>>& files) {
  std::vector<fs::path> temps;
  auto cleanup = [&] {
    std::error_code ec;
    for (const auto& t : temps) fs::remove(t, ec);
  };
  for (const auto& [path, content] : files) {
    fs::path temp = path;
    temp += absl::StrCat(".tmp-", ::getpid());
    temps.push_back(temp);
    if (absl::Status st = WriteFile(temp, content); !st.ok()) {
      cleanup();
      return st;
    }
  }
  for (size_t i = 0; i < files.size(); ++i) {
    std::error_code ec;
    fs::rename(temps[i], files[i].first, ec);
    if (ec) {
      cleanup();
      return absl::UnavailableError(absl::StrCat(
          "cannot move output into place at ", files[i].first.string(), ": ",
          ec.message()));
    }
  }
  return absl::OkStatus();
}

// Key from --key-file, else from the environment.
absl::StatusOr<std::optional<PiiKey>> LoadKey(const std::string& key_file) {
  if (!key_file.empty()) {
    TP_ASSIGN_OR_RETURN(std::string text, ReadFile(key_file));
    auto key = ParsePiiKey(text);
    if (!key.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat("key file ", key_file, ": ", key.status().message()));
    }
    return std::optional<PiiKey>(*key);
  }
  if (const char* env = std::getenv(kKeyEnvVar); env != nullptr && *env != 0) {
    auto key = ParsePiiKey(env);
    if (!key.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(kKeyEnvVar, ": ", key.status().message()));
    }
    return std::optional<PiiKey>(*key);
  }
  return std::optional<PiiKey>();
}

// Exclusive advisory lock on `<path>.lock`, held for the object's lifetime.
class FileLock {
 public:
  static absl::StatusOr<std::unique_ptr<FileLock>> Acquire(const fs::path& path) {
    const std::string lock_path = path.string() + ".lock";
    const int fd = ::open(lock_path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0600);
    if (fd < 0) {
      return absl::UnavailableError(
          absl::StrCat("cannot open lock file ", lock_path));
    }
    if (::flock(fd, LOCK_EX | LOCK_NB) != 0) {
      ::close(fd);
      return absl::UnavailableError(absl::StrCat(
          "ledger ", path.string(), " is in use by another invocation"));
    }
    return std::unique_ptr<FileLock>(new FileLock(fd));
  }
  ~FileLock() {
    ::flock(fd_, LOCK_UN);
    ::close(fd_);
  }
  FileLock(const FileLock&) = delete;
  FileLock& operator=(const FileLock&) = delete;

 private:
  explicit FileLock(int fd) : fd_(fd) {}
  int fd_;
};

fs::path WithSuffix(const fs::path& base, std::string_view suffix) {
  fs::path p = base;
  p += std::string(suffix);
  return p;
}

// ---------------------------------------------------------------- perturb

struct PerturbArgs {
  std::string input, config, output, manifest, manifest_text, report,
      report_text, key_file;
  std::optional<uint64_t> seed;
  size_t workers = 0;
  bool strict = false;
};

absl::Status Perturb(const PerturbArgs& a, std::ostream& out) {
  TP_ASSIGN_OR_RETURN(std::string config_text, ReadFile(a.config));
  auto parsed = PipelineConfig::Parse(config_text);
  if (!parsed.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(a.config, ": ", parsed.status().message()));
  }
  PipelineConfig config = *std::move(parsed);
  if (a.strict) config.strict = true;

  const fs::path output = a.output;
  const std::vector<fs::path> targets = {
      output,
      a.manifest.empty() ? WithSuffix(output, ".manifest.json") : fs::path(a.manifest),
      a.manifest_text.empty() ? WithSuffix(output, ".manifest.txt")
                              : fs::path(a.manifest_text),
      a.report.empty() ? WithSuffix(output, ".report.json") : fs::path(a.report),
      a.report_text.empty() ? WithSuffix(output, ".report.txt")
                            : fs::path(a.report_text)};
  for (size_t i = 0; i < targets.size(); ++i) {
    if (SamePath(targets[i], a.input) || SamePath(targets[i], a.config)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "output path ", targets[i].string(), " must differ from the inputs"));
    }
    for (size_t j = 0; j < i; ++j) {
      if (SamePath(targets[i], targets[j])) {
        return absl::InvalidArgumentError(absl::StrCat(
            "output path ", targets[i].string(), " is used twice"));
      }
    }
  }

  TP_ASSIGN_OR_RETURN(Table table, LoadCsv(a.input, config.schema));
  ExecuteOptions options;
  options.seed_override = a.seed;
  options.workers = a.workers;
  TP_ASSIGN_OR_RETURN(options.pii_key, LoadKey(a.key_file));
  TP_ASSIGN_OR_RETURN(ExecutionResult result, Execute(config, table, options));

  const std::string csv = SerializeCsv(result.table);
  TP_ASSIGN_OR_RETURN(
      FidelityReport report,
      BuildReport(table, result.table, result.manifest.ToReportContext()));
  TP_RETURN_IF_ERROR(WriteAllOrNothing({
      {targets[0], csv},
      {targets[1], result.manifest.ToJson()},
      {targets[2], result.manifest.ToText()},
      {targets[3], report.ToJson()},
      {targets[4], report.ToText()},
  }));

  out << "wrote " << targets[0].string() << " (" << result.table.row_count()
      << " rows, " << result.manifest.output_digest << ")\n";
  out << "manifest " << targets[1].string() << "\n";
  out << "report " << targets[3].string() << "\n";
  out << "privacy budget: spent epsilon " << FormatDouble(result.ledger.spent_epsilon())
      << " of " << FormatDouble(result.ledger.budget().epsilon) << ", delta "
      << FormatDouble(result.ledger.spent_delta()) << " of "
      << FormatDouble(result.ledger.budget().delta) << "\n";
  for (const auto& entry : result.ledger.entries()) {
    out << "  " << entry.label << "\tepsilon " << FormatDouble(entry.epsilon)
        << "\tdelta " << FormatDouble(entry.delta) << "\n";
  }
  return absl::OkStatus();
}

// --------------------------------------------------------------- validate

int ValidateCommand(const std::string& input, const std::string& config_path,
                    bool strict, std::ostream& out, std::ostream& err) {
  auto text = ReadFile(config_path);
  if (!text.ok()) {
    err << "error: " << text.status().message() << "\n";
    return ExitCodeFor(text.status());
  }
  auto config = PipelineConfig::Parse(*text);
  if (!config.ok()) {
    err << "error: " << config_path << ": " << config.status().message() << "\n";
    return kExitValidation;
  }
  if (strict) config->strict = true;
  auto table = LoadCsv(input, config->schema);
  if (!table.ok()) {
    err << "error: " << table.status().message() << "\n";
    return ExitCodeFor(table.status());
  }
  const ValidationResult result = Validate(*config, *table);
  for (const auto& w : result.warnings) err << "warning: " << w << "\n";
  if (result.ok()) {
    out << "config is valid\n";
    return kExitOk;
  }
  for (const auto& v : result.violations) out << v.ToString() << "\n";
  return result.only_budget() ? kExitBudget : kExitValidation;
}

// ------------------------------------------------------------------ query

struct QueryArgs {
  std::string input, query_file, kind, column, where, mechanism = "laplace",
      ledger, bins_preset;
  std::vector<double> bounds;
  std::optional<double> epsilon;
  double delta = 0.0;
  std::optional<double> budget_epsilon;
  double budget_delta = 0.0;
  std::optional<uint64_t> seed;
  bool non_negative = false;
  bool permissive = false;
};

absl::StatusOr<Predicate> ParseWhere(const std::string& text) {
  // Longest operators first so "<=" is not read as "<".
  for (std::string_view op : {"<=", ">=", "!=", "==", "<", ">", "="}) {
    const size_t at = text.find(op);
    if (at == std::string::npos || at == 0) continue;
    Predicate p;
    p.column = std::string(StripWhitespace(std::string_view(text).substr(0, at)));
    TP_ASSIGN_OR_RETURN(p.op, ParseComparator(op));
    p.literal =
        std::string(StripWhitespace(std::string_view(text).substr(at + op.size())));
    return p;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "--where must look like COLUMN<OP>VALUE, e.g. age>=30; got '", text, "'"));
}

absl::StatusOr<QuerySpec> QueryFromFlags(const QueryArgs& a) {
  QuerySpec spec;
  if (a.kind.empty()) {
    return absl::InvalidArgumentError("--kind or --query-file is required");
  }
  TP_ASSIGN_OR_RETURN(spec.kind, ParseQueryKind(a.kind));
  spec.column = a.column;
  if (!a.where.empty()) {
    TP_ASSIGN_OR_RETURN(spec.predicate, ParseWhere(a.where));
  }
  if (!a.bounds.empty()) {
    if (a.bounds.size() != 2) {
      return absl::InvalidArgumentError("--bounds takes LO,HI");
    }
    spec.value_bounds = std::make_pair(a.bounds[0], a.bounds[1]);
  }
  if (!a.bins_preset.empty()) {
    if (a.bins_preset != "credit_score") {
      return absl::InvalidArgumentError(absl::StrCat(
          "unknown --bins-preset '", a.bins_preset, "' (credit_score)"));
    }
    spec.bins = BinningScheme::CreditScoreBands();
  }
  TP_ASSIGN_OR_RETURN(spec.mechanism, ParseQueryMechanism(a.mechanism));
  if (!a.epsilon) return absl::InvalidArgumentError("--epsilon is required");
  spec.params.epsilon = *a.epsilon;
  spec.params.delta = a.delta;
  spec.non_negative = a.non_negative;
  spec.calibration =
      a.permissive ? CalibrationMode::kPermissive : CalibrationMode::kStrict;
  TP_RETURN_IF_ERROR(spec.Validate());
  return spec;
}

absl::Status Query(const QueryArgs& a, std::ostream& out) {
  QuerySpec spec;
  if (!a.query_file.empty()) {
    TP_ASSIGN_OR_RETURN(std::string text, ReadFile(a.query_file));
    auto parsed = ParseQuerySpec(text);
    if (!parsed.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(a.query_file, ": ", parsed.status().message()));
    }
    spec = *std::move(parsed);
  } else {
    TP_ASSIGN_OR_RETURN(spec, QueryFromFlags(a));
  }
  TP_ASSIGN_OR_RETURN(Table table, LoadCsv(a.input));

  std::unique_ptr<FileLock> lock;
  std::optional<PrivacyLedger> ledger;
  const double charge_delta =
      spec.mechanism == QueryMechanism::kGaussian ? spec.params.delta : 0.0;
  if (!a.ledger.empty()) {
    TP_ASSIGN_OR_RETURN(lock, FileLock::Acquire(a.ledger));
    std::error_code ec;
    if (fs::exists(a.ledger, ec)) {
      TP_ASSIGN_OR_RETURN(std::string text, ReadFile(a.ledger));
      auto restored = PrivacyLedger::Deserialize(text);
      if (!restored.ok()) {
        return absl::InvalidArgumentError(
            absl::StrCat(a.ledger, ": ", restored.status().message()));
      }
      ledger = *std::move(restored);
    } else {
      if (!a.budget_epsilon) {
        return absl::InvalidArgumentError(
            "a new ledger file needs --budget-epsilon");
      }
      ledger.emplace(PrivacyBudget{*a.budget_epsilon, a.budget_delta});
    }
  } else {
    ledger.emplace(PrivacyBudget{a.budget_epsilon.value_or(spec.params.epsilon),
                                 a.budget_epsilon ? a.budget_delta : charge_delta});
  }

  uint64_t seed = 0;
  if (a.seed) {
    seed = *a.seed;
  } else {
    std::random_device rd;
    seed = (static_cast<uint64_t>(rd()) << 32) ^ rd();
  }
  // Each release in a persisted ledger gets its own stream.
  RandomSource src(seed, StableHash(absl::StrCat("query:", std::string(QueryKindName(spec.kind)), ":",
                                                 spec.column),
                                    ledger->entries().size()));
  TP_ASSIGN_OR_RETURN(QueryResult result, RunQuery(table, spec, *ledger, src));
  if (!a.ledger.empty()) {
    TP_RETURN_IF_ERROR(WriteAllOrNothing({{a.ledger, ledger->Serialize()}}));
  }
  Json j = Json::parse(result.ToJson());
  j["ledger"] = {{"spent_epsilon", ledger->spent_epsilon()},
                 {"spent_delta", ledger->spent_delta()},
                 {"budget_epsilon", ledger->budget().epsilon},
                 {"budget_delta", ledger->budget().delta}};
  out << j.dump(2) << "\n";
  return absl::OkStatus();
}

// ----------------------------------------------------------------- report

struct ReportArgs {
  std::string original, processed, manifest, schemes, json_out, text_out;
  std::vector<std::string> text_columns;
  std::string format = "json";
};

absl::Status Report(const ReportArgs& a, std::ostream& out) {
  ReportContext context;
  if (!a.manifest.empty()) {
    TP_ASSIGN_OR_RETURN(std::string text, ReadFile(a.manifest));
    auto manifest = ExecutionManifest::FromJson(text);
    if (!manifest.ok()) {
      return absl::InvalidArgumentError(
          absl::StrCat(a.manifest, ": ", manifest.status().message()));
    }
    context = manifest->ToReportContext();
  }
  if (!a.schemes.empty()) {
    TP_ASSIGN_OR_RETURN(std::string text, ReadFile(a.schemes));
    Json j = Json::parse(text, nullptr, false);
    if (!j.is_object()) {
      return absl::InvalidArgumentError(
          absl::StrCat(a.schemes, ": expected an object of column schemes"));
    }
    for (const auto& [column, value] : j.items()) {
      auto scheme = ParseBinningJson(value.dump());
      if (!scheme.ok()) {
        return absl::InvalidArgumentError(absl::StrCat(
            a.schemes, ": column '", column, "': ", scheme.status().message()));
      }
      context.binning.insert_or_assign(column, *std::move(scheme));
    }
  }
  for (const auto& c : a.text_columns) context.text_columns.insert(c);

  TP_ASSIGN_OR_RETURN(Table original, LoadCsv(a.original));
  TP_ASSIGN_OR_RETURN(Table processed, LoadCsv(a.processed));
  TP_ASSIGN_OR_RETURN(FidelityReport report,
                      BuildReport(original, processed, context));
  std::vector<std::pair<fs::path, std::string>> files;
  if (!a.json_out.empty()) files.emplace_back(a.json_out, report.ToJson());
  if (!a.text_out.empty()) files.emplace_back(a.text_out, report.ToText());
  for (const auto& [path, unused] : files) {
    if (SamePath(path, a.original) || SamePath(path, a.processed)) {
      return absl::InvalidArgumentError(
          absl::StrCat("output path ", path.string(), " must differ from the inputs"));
    }
  }
  TP_RETURN_IF_ERROR(WriteAllOrNothing(files));
  out << (a.format == "text" ? report.ToText() : report.ToJson());
  return absl::OkStatus();
}

// --------------------------------------------------------------- pii-scan

struct PiiScanArgs {
  std::string input, corpus;
  std::vector<std::string> columns, kinds;
};

absl::StatusOr<DetectorSet> SelectDetectors(const std::vector<std::string>& kinds) {
  if (kinds.empty()) return DetectorSet::Default();
  std::vector<PiiKind> parsed;
  for (const auto& k : kinds) {
    TP_ASSIGN_OR_RETURN(PiiKind kind, ParsePiiKind(k));
    parsed.push_back(kind);
  }
  return DetectorSet::Default().OnlyKinds(parsed);
}

// Corpus lines: text<TAB>kind=surface<TAB>kind=surface ... Scores exact
// (kind, surface) matches.
absl::Status ScanCorpus(const PiiScanArgs& a, const DetectorSet& detectors,
                        std::ostream& out) {
  TP_ASSIGN_OR_RETURN(std::string text, ReadFile(a.corpus));
  struct Score {
    size_t tp = 0, fp = 0, fn = 0;
  };
  std::map<std::string, Score> scores;
  size_t line_no = 0;
  for (std::string_view line : SplitString(text, '\n', /*skip_empty=*/false)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const std::vector<std::string_view> fields = SplitString(line, '\t', false);
    std::multiset<std::pair<std::string, std::string>> expected;
    for (size_t f = 1; f < fields.size(); ++f) {
      const size_t eq = fields[f].find('=');
      if (eq == std::string_view::npos) {
        return absl::InvalidArgumentError(absl::StrCat(
            a.corpus, " line ", line_no, ": label must be kind=surface"));
      }
      const std::string kind(fields[f].substr(0, eq));
      TP_RETURN_IF_ERROR(ParsePiiKind(kind).status());
      expected.emplace(kind, std::string(fields[f].substr(eq + 1)));
    }
    for (const PiiEntity& e : detectors.Detect(fields[0])) {
      const std::string kind(PiiKindName(e.kind));
      auto it = expected.find({kind, e.surface});
      if (it != expected.end()) {
        ++scores[kind].tp;
        expected.erase(it);
      } else {
        ++scores[kind].fp;
      }
    }
    for (const auto& [kind, surface] : expected) ++scores[kind].fn;
  }
  Json j = Json::object();
  for (const auto& [kind, s] : scores) {
    const double precision =
        s.tp + s.fp == 0 ? 1.0 : static_cast<double>(s.tp) / (s.tp + s.fp);
    const double recall =
        s.tp + s.fn == 0 ? 1.0 : static_cast<double>(s.tp) / (s.tp + s.fn);
    j[kind] = {{"true_positives", s.tp},
               {"false_positives", s.fp},
               {"false_negatives", s.fn},
               {"precision", precision},
               {"recall", recall}};
  }
  out << Json{{"corpus", a.corpus}, {"kinds", std::move(j)}}.dump(2) << "\n";
  return absl::OkStatus();
}

absl::Status PiiScan(const PiiScanArgs& a, std::ostream& out) {
  TP_ASSIGN_OR_RETURN(DetectorSet detectors, SelectDetectors(a.kinds));
  if (!a.corpus.empty()) return ScanCorpus(a, detectors, out);
  if (a.input.empty()) {
    return absl::InvalidArgumentError("pii-scan needs --input or --corpus");
  }
  TP_ASSIGN_OR_RETURN(Table table, LoadCsv(a.input));
  Json columns = Json::object();
  for (const Column& column : table.columns()) {
    if (column.is_numeric()) continue;
    if (!a.columns.empty() &&
        std::find(a.columns.begin(), a.columns.end(), column.schema.name) ==
            a.columns.end()) {
      continue;
    }
    std::map<std::string, size_t> counts;
    size_t cells_with_pii = 0;
    for (const auto& cell : column.text()) {
      if (!cell) continue;
      const auto entities = detectors.Detect(*cell);
      if (!entities.empty()) ++cells_with_pii;
      for (const auto& e : entities) ++counts[std::string(PiiKindName(e.kind))];
    }
    columns[column.schema.name] = {{"cells_with_pii", cells_with_pii},
                                   {"entities", counts}};
  }
  for (const auto& c : a.columns) {
    if (!columns.contains(c)) {
      return absl::InvalidArgumentError(
          absl::StrCat("column '", c, "' is not a text column of the input"));
    }
  }
  // Counts only; detected surfaces are never printed.
  out << Json{{"rows", table.row_count()}, {"columns", std::move(columns)}}.dump(2)
      << "\n";
  return absl::OkStatus();
}

int Finish(std::ostream& err, const absl::Status& status) {
  if (status.ok()) return kExitOk;
  err << "error: " << status.message() << "\n";
  return ExitCodeFor(status);
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kResourceExhausted:
      return kExitBudget;
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kDataLoss:
      return kExitIo;
    default:
      return kExitValidation;
  }
}

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Deterministic privacy-preserving perturbation of tabular data",
               "tabperturb"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "tabperturb 0.1.0");

  PerturbArgs perturb;
  CLI::App* perturb_cmd =
      app.add_subcommand("perturb", "Run a pipeline config over a CSV file");
  perturb_cmd->add_option("--input,-i", perturb.input, "Input CSV")->required();
  perturb_cmd->add_option("--config,-c", perturb.config, "Pipeline config (JSON)")
      ->required();
  perturb_cmd->add_option("--output,-o", perturb.output, "Output CSV")->required();
  perturb_cmd->add_option("--manifest", perturb.manifest,
                          "Manifest JSON path (default OUTPUT.manifest.json)");
  perturb_cmd->add_option("--manifest-text", perturb.manifest_text,
                          "Manifest text path (default OUTPUT.manifest.txt)");
  perturb_cmd->add_option("--report", perturb.report,
                          "Report JSON path (default OUTPUT.report.json)");
  perturb_cmd->add_option("--report-text", perturb.report_text,
                          "Report text path (default OUTPUT.report.txt)");
  perturb_cmd->add_option("--seed", perturb.seed, "Override the config master_seed");
  perturb_cmd->add_option("--workers", perturb.workers,
                          "Worker threads (0 = hardware concurrency)");
  perturb_cmd->add_flag("--strict", perturb.strict,
                        "Force strict mode regardless of the config");
  perturb_cmd->add_option("--key-file", perturb.key_file,
                          std::string("File holding the 32-hex-digit PII key "
                                      "(else $") + kKeyEnvVar + ")");

  std::string validate_input, validate_config;
  bool validate_strict = false;
  CLI::App* validate_cmd =
      app.add_subcommand("validate", "Check a pipeline config against a CSV");
  validate_cmd->add_option("--input,-i", validate_input, "Input CSV")->required();
  validate_cmd->add_option("--config,-c", validate_config, "Pipeline config")
      ->required();
  validate_cmd->add_flag("--strict", validate_strict, "Force strict mode");

  QueryArgs query;
  CLI::App* query_cmd =
      app.add_subcommand("query", "Answer one differentially private query");
  query_cmd->add_option("--input,-i", query.input, "Input CSV")->required();
  query_cmd->add_option("--query-file", query.query_file, "Query spec (JSON)");
  query_cmd->add_option("--kind", query.kind, "count, sum, mean or histogram");
  query_cmd->add_option("--column", query.column, "Query column");
  query_cmd->add_option("--where", query.where, "Predicate COLUMN<OP>VALUE");
  query_cmd->add_option("--bounds", query.bounds, "Clamping range LO,HI")
      ->delimiter(',')
      ->expected(2);
  query_cmd->add_option("--bins-preset", query.bins_preset,
                        "Histogram bins preset (credit_score)");
  query_cmd->add_option("--mechanism", query.mechanism,
                        "laplace, gaussian or geometric");
  query_cmd->add_option("--epsilon", query.epsilon, "Epsilon for this query");
  query_cmd->add_option("--delta", query.delta, "Delta (gaussian only)");
  query_cmd->add_flag("--non-negative", query.non_negative,
                      "Clamp noisy histogram counts at zero");
  query_cmd->add_flag("--permissive", query.permissive,
                      "Allow gaussian calibration with epsilon > 1");
  query_cmd->add_option("--ledger", query.ledger,
                        "Ledger file persisted between invocations");
  query_cmd->add_option("--budget-epsilon", query.budget_epsilon,
                        "Budget for a new ledger");
  query_cmd->add_option("--budget-delta", query.budget_delta,
                        "Delta budget for a new ledger");
  query_cmd->add_option("--seed", query.seed, "Noise seed (default: random)");

  ReportArgs report;
  CLI::App* report_cmd =
      app.add_subcommand("report", "Compare an original and a processed CSV");
  report_cmd->add_option("--original", report.original, "Original CSV")->required();
  report_cmd->add_option("--processed", report.processed, "Processed CSV")
      ->required();
  report_cmd->add_option("--manifest", report.manifest,
                         "Execution manifest JSON (binning, digest)");
  report_cmd->add_option("--schemes", report.schemes,
                         "JSON object of per-column binning schemes");
  report_cmd->add_option("--text-column", report.text_columns,
                         "Column compared by information loss");
  report_cmd->add_option("--json-out", report.json_out, "Write the JSON report");
  report_cmd->add_option("--text-out", report.text_out, "Write the text summary");
  report_cmd->add_option("--format", report.format, "stdout format")
      ->check(CLI::IsMember({"json", "text"}));

  PiiScanArgs scan;
  CLI::App* scan_cmd =
      app.add_subcommand("pii-scan", "Count detected PII without printing it");
  scan_cmd->add_option("--input,-i", scan.input, "Input CSV");
  scan_cmd->add_option("--column", scan.columns, "Restrict to columns");
  scan_cmd->add_option("--kinds", scan.kinds, "Restrict to PII kinds")
      ->delimiter(',');
  scan_cmd->add_option("--corpus", scan.corpus,
                       "Labeled corpus; prints precision and recall");

  std::vector<std::string> argv_rev(args.rbegin(), args.rend());
  try {
    app.parse(argv_rev);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitValidation;
  }

  if (perturb_cmd->parsed()) return Finish(err, Perturb(perturb, out));
  if (validate_cmd->parsed()) {
    return ValidateCommand(validate_input, validate_config, validate_strict, out,
                           err);
  }
  if (query_cmd->parsed()) return Finish(err, Query(query, out));
  if (report_cmd->parsed()) return Finish(err, Report(report, out));
  if (scan_cmd->parsed()) return Finish(err, PiiScan(scan, out));
  return kExitValidation;
}

}  // namespace tabperturb::cli
