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

#include <cmath>
#include <numeric>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace tabperturb {
namespace {

constexpr int kMillion = 1000000;

// Trapezoid-rule integral of |x| * Lap(x; 0, b) over [-60b, 60b].
double LaplaceMeanAbsoluteOracle(double b) {
  constexpr int kSteps = 200000;
  const double lo = -60 * b, hi = 60 * b, h = (hi - lo) / kSteps;
  double sum = 0;
  for (int i = 0; i <= kSteps; ++i) {
    const double x = lo + i * h;
    const double f = std::fabs(x) * std::exp(-std::fabs(x) / b) / (2 * b);
    sum += (i == 0 || i == kSteps) ? f / 2 : f;
  }
  return sum * h;
}

TEST(LaplaceMechanismTest, ScaleIsSensitivityOverEpsilon) {
  EXPECT_DOUBLE_EQ(LaplaceScale({0.5, 0.0, 1.0}), 2.0);
  EXPECT_DOUBLE_EQ(LaplaceScale({1.0, 0.0, 3.0}), 3.0);
}

TEST(LaplaceMechanismTest, UnbiasedWithMeanAbsoluteErrorB) {
  RandomSource src(21, 1);
  const PrivacyParams params{1.0, 0.0, 1.0};
  double sum = 0, abs_sum = 0;
  for (int i = 0; i < kMillion; ++i) {
    auto v = LaplaceMechanism(100.0, params, src);
    ASSERT_TRUE(v.ok());
    sum += *v;
    abs_sum += std::fabs(*v - 100.0);
  }
  EXPECT_NEAR(sum / kMillion, 100.0, 0.01);
  const double oracle = LaplaceMeanAbsoluteOracle(1.0);
  EXPECT_NEAR(oracle, 1.0, 1e-6);
  EXPECT_LT(std::fabs(abs_sum / kMillion / oracle - 1.0), 0.02);
}

TEST(LaplaceMechanismTest, RejectsDeltaAndBadParameters) {
  RandomSource src(1, 1);
  auto mismatch = LaplaceMechanism(0, {1.0, 1e-5, 1.0}, src);
  EXPECT_EQ(mismatch.status().code(), absl::StatusCode::kFailedPrecondition);
  EXPECT_FALSE(LaplaceMechanism(0, {0.0, 0.0, 1.0}, src).ok());
  EXPECT_FALSE(LaplaceMechanism(0, {1.0, 0.0, 0.0}, src).ok());
  EXPECT_FALSE(LaplaceMechanism(0, {1.0, 1.0, 1.0}, src).ok());
}

double GaussianSigmaOracle(double sens, double eps, double delta) {
  return sens * std::sqrt(2.0 * std::log(1.25 / delta)) / eps;
}

TEST(GaussianMechanismTest, SigmaMatchesCalibrationFormula) {
  const double sigma = GaussianSigma({1.0, 1e-5, 1.0});
  EXPECT_NEAR(sigma, GaussianSigmaOracle(1.0, 1.0, 1e-5), 1e-12);
  EXPECT_NEAR(sigma, 4.8448, 1e-3);
  EXPECT_DOUBLE_EQ(GaussianSigma({1.0, 1e-5, 2.0}), 2 * sigma);
}

TEST(GaussianMechanismTest, UnbiasedAtTheBound) {
  RandomSource src(22, 1);
  const PrivacyParams params{0.5, 1e-6, 1.0};
  const double sigma = GaussianSigmaOracle(1.0, 0.5, 1e-6);
  double sum = 0;
  for (int i = 0; i < kMillion; ++i) sum += *GaussianMechanism(50.0, params, src);
  EXPECT_NEAR(sum / kMillion, 50.0, 3 * sigma / std::sqrt(kMillion));
}

TEST(GaussianMechanismTest, StrictAndPermissiveModes) {
  RandomSource src(1, 1);
  const PrivacyParams big{2.0, 1e-5, 1.0};
  EXPECT_FALSE(CheckGaussianParams(big, CalibrationMode::kStrict).ok());
  EXPECT_TRUE(CheckGaussianParams(big, CalibrationMode::kPermissive).ok());
  EXPECT_FALSE(GaussianMechanism(0, big, src).ok());
  EXPECT_TRUE(GaussianMechanism(0, big, src, CalibrationMode::kPermissive).ok());
  auto pure = GaussianMechanism(0, {1.0, 0.0, 1.0}, src);
  EXPECT_EQ(pure.status().code(), absl::StatusCode::kFailedPrecondition);
}

TEST(GeometricMechanismTest, PmfAtTrueCount) {
  EXPECT_NEAR(GeometricMechanismPmf(10, 10, 1.0), 0.46212, 5e-6);
}

TEST(GeometricMechanismTest, NeighbouringCountRatioBoundedByExpEpsilon) {
  for (double eps : {0.1, 0.5, 1.0, 2.0}) {
    const double bound = std::exp(eps) + 1e-9;
    for (int64_t r = -40; r <= 60; ++r) {
      const double p10 = GeometricMechanismPmf(10, r, eps);
      const double p11 = GeometricMechanismPmf(11, r, eps);
      ASSERT_GT(p10, 0.0);
      ASSERT_GT(p11, 0.0);
      EXPECT_LE(p10 / p11, bound) << "eps " << eps << " r " << r;
      EXPECT_LE(p11 / p10, bound) << "eps " << eps << " r " << r;
    }
  }
}

TEST(GeometricMechanismTest, NegativeOutputsAreNotClamped) {
  RandomSource src(23, 1);
  int negatives = 0;
  for (int i = 0; i < 10000; ++i) {
    auto v = GeometricMechanism(0, 2.0, src);
    ASSERT_TRUE(v.ok());
    negatives += *v < 0;
  }
  EXPECT_GT(negatives, 0);
  EXPECT_FALSE(GeometricMechanism(0, 0.0, src).ok());
}

std::vector<double> SoftmaxOracle(const std::vector<double>& scores,
                                  double eps, double dq) {
  std::vector<double> w;
  for (double q : scores) w.push_back(std::exp(eps * q / (2 * dq)));
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& x : w) x /= total;
  return w;
}

std::vector<ScoredCandidate> Candidates(const std::vector<double>& scores) {
  std::vector<ScoredCandidate> out;
  for (size_t i = 0; i < scores.size(); ++i) {
    out.push_back({"r" + std::to_string(i), scores[i]});
  }
  return out;
}

TEST(ExponentialMechanismTest, ProbabilitiesMatchSoftmax) {
  auto p = ExponentialSelectionProbabilities(Candidates({0, 1}), {2.0, 0, 1.0});
  ASSERT_TRUE(p.ok());
  EXPECT_NEAR((*p)[0], 0.2689, 1e-4);
  EXPECT_NEAR((*p)[1], 0.7311, 1e-4);
  const auto oracle = SoftmaxOracle({0, 1}, 2.0, 1.0);
  EXPECT_NEAR((*p)[0], oracle[0], 1e-15);
}

TEST(ExponentialMechanismTest, EmpiricalFrequencies) {
  const std::vector<std::vector<double>> cases = {
      {0, 1}, {3, 3, 3, 3}, {0, 1, 2, 3, 4, 5, 6, 7, 8, 9}, {-2, 0.5, 7}};
  RandomSource src(24, 1);
  for (const auto& scores : cases) {
    const auto cands = Candidates(scores);
    const auto oracle = SoftmaxOracle(scores, 2.0, 1.5);
    std::vector<int> hits(scores.size(), 0);
    for (int i = 0; i < kMillion; ++i) {
      auto c = ExponentialMechanism(cands, {2.0, 0, 1.5}, src);
      ASSERT_TRUE(c.ok());
      ++hits[std::stoul(c->value.substr(1))];
    }
    for (size_t k = 0; k < scores.size(); ++k) {
      EXPECT_NEAR(static_cast<double>(hits[k]) / kMillion, oracle[k], 0.01);
    }
  }
}

TEST(ExponentialMechanismTest, ShiftInvariance) {
  // Dyadic scores and shifts, so that every shifted score is exact.
  const std::vector<double> scores = {0.25, -1.0, 2.5, 4.0};
  auto base = ExponentialSelectionProbabilities(Candidates(scores), {1.0, 0, 1.0});
  ASSERT_TRUE(base.ok());
  for (double c : {-1024.0, 0.125, 64.0, 1048576.0}) {
    std::vector<double> shifted = scores;
    for (double& s : shifted) s += c;
    auto p = ExponentialSelectionProbabilities(Candidates(shifted), {1.0, 0, 1.0});
    ASSERT_TRUE(p.ok());
    for (size_t i = 0; i < scores.size(); ++i) {
      EXPECT_NEAR((*p)[i], (*base)[i], 1e-12) << "shift " << c;
    }
  }
}

TEST(ExponentialMechanismTest, HugeScoresStayFinite) {
  auto p = ExponentialSelectionProbabilities(Candidates({1e6, 1e6 - 1}),
                                             {100.0, 0, 1.0});
  ASSERT_TRUE(p.ok());
  EXPECT_TRUE(std::isfinite((*p)[0]));
  EXPECT_NEAR((*p)[0] + (*p)[1], 1.0, 1e-12);
}

TEST(ExponentialMechanismTest, DegenerateAndInvalidInputs) {
  RandomSource src(1, 1);
  auto single = ExponentialMechanism(Candidates({5}), {1, 0, 1}, src);
  ASSERT_TRUE(single.ok());
  EXPECT_EQ(single->value, "r0");
  EXPECT_FALSE(ExponentialMechanism({}, {1, 0, 1}, src).ok());
  EXPECT_FALSE(ExponentialMechanism(Candidates({0, NAN}), {1, 0, 1}, src).ok());
  EXPECT_FALSE(ExponentialMechanism(Candidates({0, 1}), {1, 0, 0}, src).ok());
}

std::vector<bool> Population(size_t n, double prevalence) {
  std::vector<bool> out(n);
  const size_t yes = static_cast<size_t>(std::llround(n * prevalence));
  for (size_t i = 0; i < n; ++i) out[i] = i < yes;
  return out;
}

TEST(RandomizedResponseTest, EstimatesPrevalence) {
  RandomSource src(25, 1);
  auto r = RandomizedResponse(Population(kMillion, 0.3), 0.75, src);
  ASSERT_TRUE(r.ok());
  EXPECT_NEAR(r->estimate, 0.30, 0.01);
  EXPECT_EQ(r->responses.size(), static_cast<size_t>(kMillion));
}

TEST(RandomizedResponseTest, ZeroPrevalenceYesFraction) {
  RandomSource src(26, 1);
  auto r = RandomizedResponse(Population(kMillion, 0.0), 0.75, src);
  ASSERT_TRUE(r.ok());
  // Only the fair-coin branch answers yes: (1 - p) / 2.
  EXPECT_NEAR(r->yes_fraction, 0.125, 0.002);
  EXPECT_NEAR(r->estimate, 0.0, 0.005);
  EXPECT_GE(r->estimate, 0.0);
}

TEST(RandomizedResponseTest, TruthfulWhenProbabilityOne) {
  RandomSource src(27, 1);
  const auto truth = Population(1000, 0.4);
  auto r = RandomizedResponse(truth, 1.0, src);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->responses, truth);
  EXPECT_DOUBLE_EQ(r->estimate, r->yes_fraction);
}

TEST(RandomizedResponseTest, EstimatorIsUnbiasedAcrossTrials) {
  constexpr int kTrials = 200;
  constexpr size_t kN = 10000;
  std::vector<double> estimates;
  for (int t = 0; t < kTrials; ++t) {
    RandomSource src(28, t);
    auto r = RandomizedResponse(Population(kN, 0.3), 0.75, src);
    ASSERT_TRUE(r.ok());
    estimates.push_back(r->raw_estimate);
  }
  const double mean = testing::SampleMean(estimates);
  const double se = std::sqrt(testing::SampleVariance(estimates) / kTrials);
  EXPECT_LT(std::fabs(mean - 0.3), 3 * se);
}

TEST(RandomizedResponseTest, EstimatorAndLocalEpsilon) {
  EXPECT_DOUBLE_EQ(RandomizedResponseEstimate(0.125, 0.75), 0.0);
  EXPECT_DOUBLE_EQ(RandomizedResponseEstimate(0.35, 0.75), 0.3);
  EXPECT_NEAR(RandomizedResponseLocalEpsilon(0.75), std::log(7.0), 1e-15);
  RandomSource src(1, 1);
  EXPECT_FALSE(RandomizedResponse({true}, 0.5, src).ok());
  EXPECT_FALSE(RandomizedResponse({true}, 1.01, src).ok());
  EXPECT_FALSE(RandomizedResponse({}, 0.75, src).ok());
}

}  // namespace
}  // namespace tabperturb
