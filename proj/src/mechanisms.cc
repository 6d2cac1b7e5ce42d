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

#include "tabperturb/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

#include "absl/strings/str_cat.h"
#include "tabperturb/distributions.h"
#include "tabperturb/status_macros.h"

namespace tabperturb {

absl::Status PrivacyParams::Validate() const {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive and finite, got ", epsilon));
  }
  if (!(delta >= 0.0 && delta < 1.0)) {
    return absl::InvalidArgumentError(
        absl::StrCat("delta must lie in [0, 1), got ", delta));
  }
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "sensitivity must be positive and finite, got ", sensitivity));
  }
  return absl::OkStatus();
}

double LaplaceScale(const PrivacyParams& params) {
  return params.sensitivity / params.epsilon;
}

double GaussianSigma(const PrivacyParams& params) {
  return params.sensitivity * std::sqrt(2.0 * std::log(1.25 / params.delta)) /
         params.epsilon;
}

absl::Status CheckGaussianParams(const PrivacyParams& params,
                                 CalibrationMode mode) {
  TP_RETURN_IF_ERROR(params.Validate());
  if (params.delta == 0.0) {
    return absl::FailedPreconditionError(
        "mechanism mismatch: the Gaussian mechanism requires delta > 0");
  }
  if (params.epsilon > 1.0) {
    if (mode == CalibrationMode::kStrict) {
      return absl::InvalidArgumentError(absl::StrCat(
          "Gaussian calibration is only valid for epsilon <= 1, got ",
          params.epsilon));
    }
    std::clog << "warning: Gaussian calibration used with epsilon "
              << params.epsilon << " > 1\n";
  }
  return absl::OkStatus();
}

absl::StatusOr<double> LaplaceMechanism(double true_value,
                                        const PrivacyParams& params,
                                        RandomSource& src) {
  TP_RETURN_IF_ERROR(params.Validate());
  if (params.delta != 0.0) {
    return absl::FailedPreconditionError(
        "mechanism mismatch: the Laplace mechanism is pure DP and needs "
        "delta == 0");
  }
  return true_value + DrawLaplace(src, LaplaceScale(params));
}

absl::StatusOr<double> GaussianMechanism(double true_value,
                                         const PrivacyParams& params,
                                         RandomSource& src,
                                         CalibrationMode mode) {
  TP_RETURN_IF_ERROR(CheckGaussianParams(params, mode));
  return true_value + GaussianSigma(params) * DrawStandardNormal(src);
}

absl::StatusOr<int64_t> GeometricMechanism(int64_t true_count, double epsilon,
                                           RandomSource& src) {
  if (!(epsilon > 0.0) || std::isnan(epsilon)) {
    return absl::InvalidArgumentError(
        absl::StrCat("epsilon must be positive, got ", epsilon));
  }
  return true_count + DrawTwoSidedGeometric(src, epsilon);
}

double GeometricMechanismPmf(int64_t true_count, int64_t output,
                             double epsilon) {
  return TwoSidedGeometricPmf(output - true_count, epsilon);
}

absl::StatusOr<std::vector<double>> ExponentialSelectionProbabilities(
    std::span<const ScoredCandidate> candidates, const PrivacyParams& params) {
  if (candidates.empty()) {
    return absl::InvalidArgumentError("candidate list is empty");
  }
  if (!(params.epsilon > 0.0) || !std::isfinite(params.epsilon)) {
    return absl::InvalidArgumentError("epsilon must be positive and finite");
  }
  if (!(params.sensitivity > 0.0) || !std::isfinite(params.sensitivity)) {
    return absl::InvalidArgumentError(
        "score sensitivity must be positive and finite");
  }
  double max_score = -std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (!std::isfinite(candidates[i].score)) {
      return absl::InvalidArgumentError(
          absl::StrCat("candidate ", i, " has a non-finite score"));
    }
    max_score = std::max(max_score, candidates[i].score);
  }
  const double factor = params.epsilon / (2.0 * params.sensitivity);
  std::vector<double> weights(candidates.size());
  double total = 0.0;
  for (size_t i = 0; i < candidates.size(); ++i) {
    weights[i] = std::exp(factor * (candidates[i].score - max_score));
    total += weights[i];
  }
  for (double& w : weights) w /= total;
  return weights;
}

absl::StatusOr<ScoredCandidate> ExponentialMechanism(
    std::span<const ScoredCandidate> candidates, const PrivacyParams& params,
    RandomSource& src) {
  TP_ASSIGN_OR_RETURN(const std::vector<double> probabilities,
                      ExponentialSelectionProbabilities(candidates, params));
  const double u = src.NextUniform();
  double cumulative = 0.0;
  for (size_t i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u < cumulative) return candidates[i];
  }
  // u landed in the rounding gap above the final cumulative sum.
  for (size_t i = probabilities.size(); i-- > 0;) {
    if (probabilities[i] > 0.0) return candidates[i];
  }
  return candidates.back();
}

double RandomizedResponseEstimate(double yes_fraction, double p_truth) {
  return (yes_fraction - (1.0 - p_truth) / 2.0) / p_truth;
}

double RandomizedResponseLocalEpsilon(double p_truth) {
  return std::log((1.0 + p_truth) / (1.0 - p_truth));
}

absl::StatusOr<RandomizedResponseResult> RandomizedResponse(
    const std::vector<bool>& true_answers, double p_truth, RandomSource& src) {
  if (!(p_truth > 0.5 && p_truth <= 1.0)) {
    return absl::InvalidArgumentError(absl::StrCat(
        "p_truth must lie in (0.5, 1], got ", p_truth));
  }
  if (true_answers.empty()) {
    return absl::InvalidArgumentError("randomized response needs answers");
  }
  RandomizedResponseResult result;
  result.responses.resize(true_answers.size());
  size_t yes = 0;
  for (size_t i = 0; i < true_answers.size(); ++i) {
    bool answer = true_answers[i];
    if (p_truth < 1.0 && src.NextUniform() >= p_truth) {
      answer = (src.NextU64() >> 63) != 0;
    }
    result.responses[i] = answer;
    yes += answer ? 1 : 0;
  }
  result.yes_fraction =
      static_cast<double>(yes) / static_cast<double>(true_answers.size());
  result.raw_estimate = RandomizedResponseEstimate(result.yes_fraction, p_truth);
  result.estimate = std::clamp(result.raw_estimate, 0.0, 1.0);
  return result;
}

}  // namespace tabperturb
