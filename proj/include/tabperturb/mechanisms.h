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

#ifndef TABPERTURB_MECHANISMS_H_
#define TABPERTURB_MECHANISMS_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tabperturb/random.h"

namespace tabperturb {

// Formal privacy parameters. `sensitivity` is the global sensitivity of the
// released quantity (the score sensitivity for the exponential mechanism).
struct PrivacyParams {
  double epsilon = 1.0;
  double delta = 0.0;
  double sensitivity = 1.0;

  absl::Status Validate() const;
};

// Whether the Gaussian calibration may be used outside epsilon <= 1, where
// its classical proof holds. Permissive mode logs a warning instead.
enum class CalibrationMode { kStrict, kPermissive };

// Laplace scale b = sensitivity / epsilon.
double LaplaceScale(const PrivacyParams& params);

// sigma = sensitivity * sqrt(2 ln(1.25 / delta)) / epsilon.
double GaussianSigma(const PrivacyParams& params);

// Validates that `params` suits the Gaussian mechanism under `mode`.
absl::Status CheckGaussianParams(const PrivacyParams& params,
                                 CalibrationMode mode);

// true_value + Lap(0, sensitivity / epsilon). Requires delta == 0.
absl::StatusOr<double> LaplaceMechanism(double true_value,
                                        const PrivacyParams& params,
                                        RandomSource& src);

// true_value + N(0, sigma^2) with sigma exactly at the calibration bound.
absl::StatusOr<double> GaussianMechanism(
    double true_value, const PrivacyParams& params, RandomSource& src,
    CalibrationMode mode = CalibrationMode::kStrict);

// Count release with two-sided geometric noise at sensitivity 1. Negative
// outputs are returned as-is.
absl::StatusOr<int64_t> GeometricMechanism(int64_t true_count, double epsilon,
                                           RandomSource& src);

// Probability that GeometricMechanism(true_count, epsilon) returns `output`.
double GeometricMechanismPmf(int64_t true_count, int64_t output,
                             double epsilon);

struct ScoredCandidate {
  std::string value;
  double score = 0.0;
};

// Selection probabilities exp(eps * q / (2 dq)) normalized, computed with
// the maximum score subtracted first.
absl::StatusOr<std::vector<double>> ExponentialSelectionProbabilities(
    std::span<const ScoredCandidate> candidates, const PrivacyParams& params);

absl::StatusOr<ScoredCandidate> ExponentialMechanism(
    std::span<const ScoredCandidate> candidates, const PrivacyParams& params,
    RandomSource& src);

struct RandomizedResponseResult {
  std::vector<bool> responses;
  // Observed fraction of "yes" responses.
  double yes_fraction = 0.0;
  // Unbiased estimate (lambda - (1 - p) / 2) / p; may leave [0, 1].
  double raw_estimate = 0.0;
  // raw_estimate clamped to [0, 1] for reporting.
  double estimate = 0.0;
};

// Forced-response scheme: each respondent reports the truth with probability
// p_truth and otherwise a fair coin.
absl::StatusOr<RandomizedResponseResult> RandomizedResponse(
    const std::vector<bool>& true_answers, double p_truth, RandomSource& src);

// Prevalence estimate from an observed yes fraction.
double RandomizedResponseEstimate(double yes_fraction, double p_truth);

// Local privacy level of one forced response: ln((1 + p) / (1 - p)).
double RandomizedResponseLocalEpsilon(double p_truth);

}  // namespace tabperturb

#endif  // TABPERTURB_MECHANISMS_H_
