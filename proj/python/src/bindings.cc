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

// Python bindings for the core operations. Tables cross the boundary as CSV
// text and structured results as JSON text, which the package layer decodes.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tabperturb/csv.h"
#include "tabperturb/distributions.h"
#include "tabperturb/fidelity.h"
#include "tabperturb/ledger.h"
#include "tabperturb/mask.h"
#include "tabperturb/mechanisms.h"
#include "tabperturb/pii.h"
#include "tabperturb/pipeline.h"
#include "tabperturb/query.h"
#include "tabperturb/random.h"
#include "tabperturb/transforms.h"

namespace py = pybind11;

namespace tabperturb {
namespace {

// Python-side exception per status family, so callers can tell a refused
// query from a malformed one.
py::object& BudgetError() {
  static py::object e;
  return e;
}
py::object& IoError() {
  static py::object e;
  return e;
}

[[noreturn]] void Raise(const absl::Status& status) {
  const std::string message(status.message());
  switch (status.code()) {
    case absl::StatusCode::kResourceExhausted:
      PyErr_SetString(BudgetError().ptr(), message.c_str());
      break;
    case absl::StatusCode::kUnavailable:
    case absl::StatusCode::kPermissionDenied:
    case absl::StatusCode::kDataLoss:
      PyErr_SetString(IoError().ptr(), message.c_str());
      break;
    default:
      PyErr_SetString(PyExc_ValueError, message.c_str());
  }
  throw py::error_already_set();
}

void Check(const absl::Status& status) {
  if (!status.ok()) Raise(status);
}

template <typename T>
T Unwrap(absl::StatusOr<T> value) {
  if (!value.ok()) Raise(value.status());
  return *std::move(value);
}

py::array_t<double> ToArray(const std::vector<double>& v) {
  py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

std::vector<double> FromArray(const py::array_t<double, py::array::c_style |
                                                            py::array::forcecast>& a) {
  if (a.ndim() != 1) throw py::value_error("expected a one-dimensional array");
  return std::vector<double>(a.data(), a.data() + a.size());
}

py::dict Perturb(const std::string& csv, const std::string& config_json,
                 std::optional<std::string> key_hex,
                 std::optional<uint64_t> seed, size_t workers) {
  const PipelineConfig config = Unwrap(PipelineConfig::Parse(config_json));
  const Table input = Unwrap(ParseCsv(csv, config.schema));
  ExecuteOptions options;
  options.seed_override = seed;
  options.workers = workers;
  if (key_hex) options.pii_key = Unwrap(ParsePiiKey(*key_hex));
  absl::StatusOr<ExecutionResult> executed = [&] {
    py::gil_scoped_release release;
    return Execute(config, input, options);
  }();
  const ExecutionResult result = Unwrap(std::move(executed));
  const FidelityReport report = Unwrap(
      BuildReport(input, result.table, result.manifest.ToReportContext()));
  py::dict out;
  out["csv"] = SerializeCsv(result.table);
  out["manifest"] = result.manifest.ToJson();
  out["manifest_text"] = result.manifest.ToText();
  out["report"] = report.ToJson();
  out["report_text"] = report.ToText();
  return out;
}

std::vector<std::string> ValidateConfig(const std::string& csv,
                                        const std::string& config_json) {
  const PipelineConfig config = Unwrap(PipelineConfig::Parse(config_json));
  const Table input = Unwrap(ParseCsv(csv, config.schema));
  std::vector<std::string> out;
  for (const Violation& v : Validate(config, input).violations) {
    out.push_back(v.ToString());
  }
  return out;
}

std::string Report(const std::string& original_csv,
                   const std::string& processed_csv,
                   std::optional<std::string> manifest_json) {
  ReportContext context;
  if (manifest_json) {
    context = Unwrap(ExecutionManifest::FromJson(*manifest_json)).ToReportContext();
  }
  const Table original = Unwrap(ParseCsv(original_csv));
  const Table processed = Unwrap(ParseCsv(processed_csv));
  return Unwrap(BuildReport(original, processed, context)).ToJson();
}

std::string Query(const std::string& csv, const std::string& query_json,
                  PrivacyLedger& ledger, uint64_t seed, uint64_t stream) {
  const QuerySpec spec = Unwrap(ParseQuerySpec(query_json));
  const Table table = Unwrap(ParseCsv(csv));
  RandomSource src(seed, stream);
  return Unwrap(RunQuery(table, spec, ledger, src)).ToJson();
}

std::string MaskText(const std::string& text, const std::string& rule_name) {
  const MaskRule rule = Unwrap(FindMaskRule(DefaultMaskRules(), rule_name));
  return Unwrap(rule.Apply(text)).value_or(text);
}

py::dict TransformPii(const std::string& text, const std::string& key_hex,
                      const std::string& mode, uint64_t seed,
                      uint64_t stream) {
  FauxMapping mapping;
  mapping.key = Unwrap(ParsePiiKey(key_hex));
  if (mode == "consistent") {
    mapping.mode = FauxMode::kConsistent;
  } else if (mode == "independent") {
    mapping.mode = FauxMode::kIndependent;
  } else {
    throw py::value_error("mode must be 'consistent' or 'independent'");
  }
  RandomSource src(seed, stream);
  const CellTransform t =
      Unwrap(TransformCell(text, DetectorSet::Default(), mapping, src));
  py::list audit;
  for (const PiiAuditEntry& e : t.audit) {
    audit.append(py::make_tuple(std::string(PiiKindName(e.kind)), e.begin, e.end));
  }
  py::dict out;
  out["text"] = t.cell;
  out["audit"] = audit;
  return out;
}

py::list DetectPii(const std::string& text) {
  py::list out;
  for (const PiiEntity& e : DetectorSet::Default().Detect(text)) {
    out.append(py::make_tuple(std::string(PiiKindName(e.kind)), e.begin, e.end));
  }
  return out;
}

}  // namespace
}  // namespace tabperturb

PYBIND11_MODULE(_core, m) {
  using namespace tabperturb;
  m.doc() = "Deterministic privacy-preserving perturbation of tabular data.";

  BudgetError() = py::exception<std::exception>(m, "BudgetExhaustedError",
                                                PyExc_RuntimeError);
  IoError() = py::exception<std::exception>(m, "TabPerturbIOError", PyExc_OSError);

  // Samplers.
  m.def("sample_laplace", [](uint64_t seed, uint64_t stream, double loc,
                             double scale, size_t n) {
    RandomSource src(seed, stream);
    return ToArray(Unwrap(SampleLaplace(src, loc, scale, n)));
  }, py::arg("seed"), py::arg("stream"), py::arg("loc"), py::arg("scale"),
        py::arg("n"));
  m.def("sample_gaussian", [](uint64_t seed, uint64_t stream, double mean,
                              double sigma, size_t n) {
    RandomSource src(seed, stream);
    return ToArray(Unwrap(SampleGaussian(src, mean, sigma, n)));
  }, py::arg("seed"), py::arg("stream"), py::arg("mean"), py::arg("sigma"),
        py::arg("n"));
  m.def("sample_uniform", [](uint64_t seed, uint64_t stream, double lo,
                             double hi, size_t n) {
    RandomSource src(seed, stream);
    return ToArray(Unwrap(SampleUniform(src, lo, hi, n)));
  }, py::arg("seed"), py::arg("stream"), py::arg("lo"), py::arg("hi"),
        py::arg("n"));
  m.def("sample_cauchy", [](uint64_t seed, uint64_t stream, double loc,
                            double scale, size_t n) {
    RandomSource src(seed, stream);
    return ToArray(Unwrap(SampleCauchy(src, loc, scale, n)));
  }, py::arg("seed"), py::arg("stream"), py::arg("loc"), py::arg("scale"),
        py::arg("n"));
  m.def("sample_two_sided_geometric", [](uint64_t seed, uint64_t stream,
                                         double epsilon, size_t n) {
    RandomSource src(seed, stream);
    const auto draws = Unwrap(SampleTwoSidedGeometric(src, epsilon, n));
    py::array_t<int64_t> out(static_cast<py::ssize_t>(draws.size()));
    std::copy(draws.begin(), draws.end(), out.mutable_data());
    return out;
  }, py::arg("seed"), py::arg("stream"), py::arg("epsilon"), py::arg("n"));
  m.def("two_sided_geometric_pmf", &TwoSidedGeometricPmf, py::arg("k"),
        py::arg("epsilon"));

  // Mechanisms.
  m.def("laplace_scale", [](double epsilon, double sensitivity) {
    return LaplaceScale({epsilon, 0.0, sensitivity});
  }, py::arg("epsilon"), py::arg("sensitivity") = 1.0);
  m.def("gaussian_sigma", [](double epsilon, double delta, double sensitivity) {
    const PrivacyParams p{epsilon, delta, sensitivity};
    Check(p.Validate());
    return GaussianSigma(p);
  }, py::arg("epsilon"), py::arg("delta"), py::arg("sensitivity") = 1.0);
  m.def("laplace_mechanism", [](double value, double epsilon, double sensitivity,
                                uint64_t seed, uint64_t stream) {
    RandomSource src(seed, stream);
    return Unwrap(LaplaceMechanism(value, {epsilon, 0.0, sensitivity}, src));
  }, py::arg("value"), py::arg("epsilon"), py::arg("sensitivity") = 1.0,
        py::arg("seed") = 0, py::arg("stream") = 0);
  m.def("gaussian_mechanism", [](double value, double epsilon, double delta,
                                 double sensitivity, bool permissive,
                                 uint64_t seed, uint64_t stream) {
    RandomSource src(seed, stream);
    return Unwrap(GaussianMechanism(
        value, {epsilon, delta, sensitivity}, src,
        permissive ? CalibrationMode::kPermissive : CalibrationMode::kStrict));
  }, py::arg("value"), py::arg("epsilon"), py::arg("delta"),
        py::arg("sensitivity") = 1.0, py::arg("permissive") = false,
        py::arg("seed") = 0, py::arg("stream") = 0);
  m.def("geometric_mechanism", [](int64_t count, double epsilon, uint64_t seed,
                                  uint64_t stream) {
    RandomSource src(seed, stream);
    return Unwrap(GeometricMechanism(count, epsilon, src));
  }, py::arg("count"), py::arg("epsilon"), py::arg("seed") = 0,
        py::arg("stream") = 0);
  m.def("geometric_mechanism_pmf", &GeometricMechanismPmf,
        py::arg("true_count"), py::arg("output"), py::arg("epsilon"));
  m.def("exponential_probabilities", [](const std::vector<double>& scores,
                                        double epsilon, double sensitivity) {
    std::vector<ScoredCandidate> c;
    for (size_t i = 0; i < scores.size(); ++i) c.push_back({std::to_string(i), scores[i]});
    return Unwrap(ExponentialSelectionProbabilities(c, {epsilon, 0.0, sensitivity}));
  }, py::arg("scores"), py::arg("epsilon"), py::arg("sensitivity") = 1.0);
  m.def("exponential_mechanism", [](const std::vector<std::string>& values,
                                    const std::vector<double>& scores,
                                    double epsilon, double sensitivity,
                                    uint64_t seed, uint64_t stream) {
    if (values.size() != scores.size()) {
      throw py::value_error("values and scores differ in length");
    }
    std::vector<ScoredCandidate> c;
    for (size_t i = 0; i < scores.size(); ++i) c.push_back({values[i], scores[i]});
    RandomSource src(seed, stream);
    return Unwrap(ExponentialMechanism(c, {epsilon, 0.0, sensitivity}, src)).value;
  }, py::arg("values"), py::arg("scores"), py::arg("epsilon"),
        py::arg("sensitivity") = 1.0, py::arg("seed") = 0, py::arg("stream") = 0);
  m.def("randomized_response", [](const std::vector<bool>& answers,
                                  double p_truth, uint64_t seed, uint64_t stream) {
    RandomSource src(seed, stream);
    const auto r = Unwrap(RandomizedResponse(answers, p_truth, src));
    py::dict out;
    out["responses"] = r.responses;
    out["yes_fraction"] = r.yes_fraction;
    out["raw_estimate"] = r.raw_estimate;
    out["estimate"] = r.estimate;
    return out;
  }, py::arg("answers"), py::arg("p_truth"), py::arg("seed") = 0,
        py::arg("stream") = 0);

  // Ledger.
  py::class_<PrivacyLedger>(m, "PrivacyLedger")
      .def(py::init([](double epsilon, double delta) {
             return PrivacyLedger({epsilon, delta});
           }),
           py::arg("epsilon"), py::arg("delta") = 0.0)
      .def("charge", [](PrivacyLedger& l, const std::string& label,
                        double epsilon, double delta) {
        Check(l.Charge(label, epsilon, delta));
      }, py::arg("label"), py::arg("epsilon"), py::arg("delta") = 0.0)
      .def("can_afford", &PrivacyLedger::CanAfford, py::arg("epsilon"),
           py::arg("delta") = 0.0)
      .def_property_readonly("spent_epsilon", &PrivacyLedger::spent_epsilon)
      .def_property_readonly("spent_delta", &PrivacyLedger::spent_delta)
      .def_property_readonly("budget", [](const PrivacyLedger& l) {
        return py::make_tuple(l.budget().epsilon, l.budget().delta);
      })
      .def_property_readonly("entries", [](const PrivacyLedger& l) {
        py::list out;
        for (const auto& e : l.entries()) {
          out.append(py::make_tuple(e.label, e.epsilon, e.delta));
        }
        return out;
      })
      .def("serialize", &PrivacyLedger::Serialize)
      .def_static("deserialize", [](const std::string& text) {
        return Unwrap(PrivacyLedger::Deserialize(text));
      });

  // Transforms and fidelity statistics.
  m.def("bin_values", [](const NumericCells& cells,
                         const std::string& scheme_json) {
    const BinningScheme scheme = Unwrap(ParseBinningJson(scheme_json));
    return Bin(cells, scheme).labels;
  }, py::arg("values"), py::arg("scheme_json"));
  m.def("mask", &MaskText, py::arg("text"), py::arg("rule"));
  m.def("ks_two_sample", [](py::array_t<double, py::array::c_style | py::array::forcecast> a,
                            py::array_t<double, py::array::c_style | py::array::forcecast> b) {
    const auto va = FromArray(a), vb = FromArray(b);
    return Unwrap(KsTwoSample(va, vb));
  }, py::arg("a"), py::arg("b"));
  m.def("chi_square", [](const std::vector<std::string>& a,
                         const std::vector<std::string>& b) {
    const auto r = Unwrap(ChiSquareCategorical(a, b));
    return py::make_tuple(r.statistic, r.dof);
  }, py::arg("a"), py::arg("b"));

  // PII.
  m.def("detect_pii", &DetectPii, py::arg("text"));
  m.def("transform_pii", &TransformPii, py::arg("text"), py::arg("key_hex"),
        py::arg("mode") = "consistent", py::arg("seed") = 0,
        py::arg("stream") = 0);
  m.def("luhn_valid", [](const std::string& s) { return LuhnValid(s); },
        py::arg("number"));

  // Pipeline, reports and queries.
  m.def("perturb", &Perturb, py::arg("csv"), py::arg("config_json"),
        py::arg("key_hex") = py::none(), py::arg("seed") = py::none(),
        py::arg("workers") = 0);
  m.def("validate", &ValidateConfig, py::arg("csv"), py::arg("config_json"));
  m.def("report", &Report, py::arg("original_csv"), py::arg("processed_csv"),
        py::arg("manifest_json") = py::none());
  m.def("query", &Query, py::arg("csv"), py::arg("query_json"),
        py::arg("ledger"), py::arg("seed"), py::arg("stream") = 0);
}
