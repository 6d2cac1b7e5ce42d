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

#ifndef TABPERTURB_DISTRIBUTIONS_H_
#define TABPERTURB_DISTRIBUTIONS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "tabperturb/random.h"

namespace tabperturb {

// Dense row-major matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(size_t rows, size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}
  static Matrix Identity(size_t n);
  static Matrix FromRows(const std::vector<std::vector<double>>& rows);

  size_t rows() const { return rows_; }
  size_t cols() const { return cols_; }
  double& operator()(size_t r, size_t c) { return data_[r * cols_ + c]; }
  double operator()(size_t r, size_t c) const { return data_[r * cols_ + c]; }

 private:
  size_t rows_ = 0;
  size_t cols_ = 0;
  std::vector<double> data_;
};

enum class NoiseFamily {
  kLaplace,
  kGaussian,
  kUniform,
  kCauchy,
  kTwoSidedGeometric,
  kCholeskyCorrelated,
};

std::string_view NoiseFamilyName(NoiseFamily family);
absl::StatusOr<NoiseFamily> ParseNoiseFamily(std::string_view name);

// One configured noise distribution. `scale` is b for Laplace, sigma for
// Gaussian and the Cauchy scale; uniform uses `bounds`, the geometric family
// uses `epsilon` and the correlated family uses `covariance`.
struct NoiseSpec {
  NoiseFamily family = NoiseFamily::kLaplace;
  double location = 0.0;
  double scale = 0.0;
  std::optional<std::pair<double, double>> bounds;
  std::optional<double> epsilon;
  std::optional<Matrix> covariance;

  absl::Status Validate() const;
  bool IsContinuousScalar() const;
};

// Single draws. Parameters are not validated.
double DrawLaplace(RandomSource& src, double scale);
double DrawStandardNormal(RandomSource& src);
double DrawUniform(RandomSource& src, double lo, double hi);
double DrawCauchy(RandomSource& src, double scale);
int64_t DrawTwoSidedGeometric(RandomSource& src, double epsilon);

// Zero-centred draw from a continuous scalar spec (location is added).
absl::StatusOr<double> DrawNoise(const NoiseSpec& spec, RandomSource& src);

absl::StatusOr<std::vector<double>> SampleLaplace(RandomSource& src,
                                                  double location,
                                                  double scale, size_t n);
absl::StatusOr<std::vector<double>> SampleGaussian(RandomSource& src,
                                                   double mean, double sigma,
                                                   size_t n);
absl::StatusOr<std::vector<double>> SampleUniform(RandomSource& src, double lo,
                                                  double hi, size_t n);
absl::StatusOr<std::vector<double>> SampleCauchy(RandomSource& src,
                                                 double location, double scale,
                                                 size_t n);
absl::StatusOr<std::vector<int64_t>> SampleTwoSidedGeometric(RandomSource& src,
                                                             double epsilon,
                                                             size_t n);

// P(k) = (1 - a) / (1 + a) * a^|k| with a = exp(-epsilon).
double TwoSidedGeometricPmf(int64_t k, double epsilon);

// Lower-triangular L with L * L^T = covariance. Fails with the order of the
// first non-positive leading minor when the matrix is not positive definite.
absl::StatusOr<Matrix> CholeskyFactor(const Matrix& covariance);

// n x d matrix whose rows are independent N(0, covariance) vectors L * z.
absl::StatusOr<Matrix> SampleCorrelatedNormal(RandomSource& src,
                                              const Matrix& covariance,
                                              size_t n);

}  // namespace tabperturb

#endif  // TABPERTURB_DISTRIBUTIONS_H_
