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

#include "tabperturb/distributions.h"

#include <cmath>
#include <numbers>
#include <string>

#include "absl/strings/str_cat.h"
#include "tabperturb/status_macros.h"

namespace tabperturb {
namespace {

absl::Status CheckPositive(double value, const char* name) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat(name, " must be positive and finite, got ", value));
  }
  return absl::OkStatus();
}

absl::Status CheckCount(size_t n) {
  if (n == 0) return absl::InvalidArgumentError("sample count must be >= 1");
  return absl::OkStatus();
}

}  // namespace

Matrix Matrix::Identity(size_t n) {
  Matrix m(n, n);
  for (size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::FromRows(const std::vector<std::vector<double>>& rows) {
  const size_t cols = rows.empty() ? 0 : rows.front().size();
  Matrix m(rows.size(), cols);
  for (size_t r = 0; r < rows.size(); ++r) {
    for (size_t c = 0; c < cols && c < rows[r].size(); ++c) m(r, c) = rows[r][c];
  }
  return m;
}

std::string_view NoiseFamilyName(NoiseFamily family) {
  switch (family) {
    case NoiseFamily::kLaplace:
      return "laplace";
    case NoiseFamily::kGaussian:
      return "gaussian";
    case NoiseFamily::kUniform:
      return "uniform";
    case NoiseFamily::kCauchy:
      return "cauchy";
    case NoiseFamily::kTwoSidedGeometric:
      return "geometric_two_sided";
    case NoiseFamily::kCholeskyCorrelated:
      return "cholesky_correlated";
  }
  return "unknown";
}

absl::StatusOr<NoiseFamily> ParseNoiseFamily(std::string_view name) {
  for (NoiseFamily f :
       {NoiseFamily::kLaplace, NoiseFamily::kGaussian, NoiseFamily::kUniform,
        NoiseFamily::kCauchy, NoiseFamily::kTwoSidedGeometric,
        NoiseFamily::kCholeskyCorrelated}) {
    if (NoiseFamilyName(f) == name) return f;
  }
  return absl::InvalidArgumentError(
      absl::StrCat("unknown noise family '", std::string(name), "'"));
}

absl::Status NoiseSpec::Validate() const {
  if (!std::isfinite(location)) {
    return absl::InvalidArgumentError("noise location must be finite");
  }
  switch (family) {
    case NoiseFamily::kLaplace:
    case NoiseFamily::kGaussian:
    case NoiseFamily::kCauchy:
      return CheckPositive(scale, "noise scale");
    case NoiseFamily::kUniform:
      if (!bounds.has_value()) {
        return absl::InvalidArgumentError("uniform noise requires bounds");
      }
      if (!(bounds->first < bounds->second) || !std::isfinite(bounds->first) ||
          !std::isfinite(bounds->second)) {
        return absl::InvalidArgumentError(
            absl::StrCat("uniform bounds require lo < hi, got [", bounds->first,
                         ", ", bounds->second, ")"));
      }
      return absl::OkStatus();
    case NoiseFamily::kTwoSidedGeometric:
      if (!epsilon.has_value()) {
        return absl::InvalidArgumentError("geometric noise requires epsilon");
      }
      return CheckPositive(*epsilon, "epsilon");
    case NoiseFamily::kCholeskyCorrelated:
      if (!covariance.has_value()) {
        return absl::InvalidArgumentError(
            "correlated noise requires a covariance matrix");
      }
      return CholeskyFactor(*covariance).status();
  }
  return absl::InternalError("unhandled noise family");
}

bool NoiseSpec::IsContinuousScalar() const {
  switch (family) {
    case NoiseFamily::kLaplace:
    case NoiseFamily::kGaussian:
    case NoiseFamily::kUniform:
    case NoiseFamily::kCauchy:
      return true;
    case NoiseFamily::kCholeskyCorrelated:
      return covariance.has_value() && covariance->rows() == 1;
    case NoiseFamily::kTwoSidedGeometric:
      return false;
  }
  return false;
}

double DrawLaplace(RandomSource& src, double scale) {
  // Inverse CDF with u uniform on (-1/2, 1/2); u = -1/2 is excluded.
  double u;
  do {
    u = src.NextUniform() - 0.5;
  } while (u == -0.5);
  const double magnitude = -scale * std::log1p(-2.0 * std::fabs(u));
  return u < 0.0 ? -magnitude : magnitude;
}

double DrawStandardNormal(RandomSource& src) {
  const double u1 = src.NextOpenUniform();
  const double u2 = src.NextUniform();
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * std::numbers::pi * u2);
}

double DrawUniform(RandomSource& src, double lo, double hi) {
  const double x = lo + (hi - lo) * src.NextUniform();
  // Rounding can land on hi; keep the support half-open.
  return x < hi ? x : std::nextafter(hi, lo);
}

double DrawCauchy(RandomSource& src, double scale) {
  return scale * std::tan(std::numbers::pi * (src.NextOpenUniform() - 0.5));
}

int64_t DrawTwoSidedGeometric(RandomSource& src, double epsilon) {
  // Inverse of the closed-form CDF, with a = exp(-epsilon) and ln a = -epsilon:
  //   F(k) = a^|k| / (1 + a)           for k < 0
  //   F(k) = 1 - a^(k+1) / (1 + a)     for k >= 0
  const double a = std::exp(-epsilon);
  const double u = src.NextOpenUniform();
  if (u <= a / (1.0 + a)) {
    const double magnitude = std::floor(std::log(u * (1.0 + a)) / -epsilon);
    return -static_cast<int64_t>(std::max(1.0, magnitude));
  }
  const double k =
      std::ceil(std::log((1.0 - u) * (1.0 + a)) / -epsilon) - 1.0;
  return static_cast<int64_t>(std::max(0.0, k));
}

absl::StatusOr<double> DrawNoise(const NoiseSpec& spec, RandomSource& src) {
  TP_RETURN_IF_ERROR(spec.Validate());
  switch (spec.family) {
    case NoiseFamily::kLaplace:
      return spec.location + DrawLaplace(src, spec.scale);
    case NoiseFamily::kGaussian:
      return spec.location + spec.scale * DrawStandardNormal(src);
    case NoiseFamily::kUniform:
      return spec.location +
             DrawUniform(src, spec.bounds->first, spec.bounds->second);
    case NoiseFamily::kCauchy:
      return spec.location + DrawCauchy(src, spec.scale);
    case NoiseFamily::kCholeskyCorrelated:
      if (spec.covariance->rows() == 1) {
        return spec.location +
               std::sqrt((*spec.covariance)(0, 0)) * DrawStandardNormal(src);
      }
      break;
    case NoiseFamily::kTwoSidedGeometric:
      break;
  }
  return absl::InvalidArgumentError(absl::StrCat(
      "noise family ", std::string(NoiseFamilyName(spec.family)),
      " is not a continuous scalar distribution"));
}

absl::StatusOr<std::vector<double>> SampleLaplace(RandomSource& src,
                                                  double location,
                                                  double scale, size_t n) {
  TP_RETURN_IF_ERROR(CheckPositive(scale, "laplace scale"));
  TP_RETURN_IF_ERROR(CheckCount(n));
  std::vector<double> out(n);
  for (double& x : out) x = location + DrawLaplace(src, scale);
  return out;
}

absl::StatusOr<std::vector<double>> SampleGaussian(RandomSource& src,
                                                   double mean, double sigma,
                                                   size_t n) {
  TP_RETURN_IF_ERROR(CheckPositive(sigma, "gaussian sigma"));
  TP_RETURN_IF_ERROR(CheckCount(n));
  std::vector<double> out(n);
  for (double& x : out) x = mean + sigma * DrawStandardNormal(src);
  return out;
}

absl::StatusOr<std::vector<double>> SampleUniform(RandomSource& src, double lo,
                                                  double hi, size_t n) {
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    return absl::InvalidArgumentError(
        absl::StrCat("uniform bounds require lo < hi, got [", lo, ", ", hi, ")"));
  }
  TP_RETURN_IF_ERROR(CheckCount(n));
  std::vector<double> out(n);
  for (double& x : out) x = DrawUniform(src, lo, hi);
  return out;
}

absl::StatusOr<std::vector<double>> SampleCauchy(RandomSource& src,
                                                 double location, double scale,
                                                 size_t n) {
  TP_RETURN_IF_ERROR(CheckPositive(scale, "cauchy scale"));
  TP_RETURN_IF_ERROR(CheckCount(n));
  std::vector<double> out(n);
  for (double& x : out) x = location + DrawCauchy(src, scale);
  return out;
}

absl::StatusOr<std::vector<int64_t>> SampleTwoSidedGeometric(RandomSource& src,
                                                             double epsilon,
                                                             size_t n) {
  TP_RETURN_IF_ERROR(CheckPositive(epsilon, "epsilon"));
  TP_RETURN_IF_ERROR(CheckCount(n));
  std::vector<int64_t> out(n);
  for (int64_t& k : out) k = DrawTwoSidedGeometric(src, epsilon);
  return out;
}

double TwoSidedGeometricPmf(int64_t k, double epsilon) {
  const double a = std::exp(-epsilon);
  return -std::expm1(-epsilon) / (1.0 + a) *
         std::exp(-epsilon * static_cast<double>(k < 0 ? -k : k));
}

absl::StatusOr<Matrix> CholeskyFactor(const Matrix& covariance) {
  const size_t d = covariance.rows();
  if (d == 0 || covariance.cols() != d) {
    return absl::InvalidArgumentError(
        absl::StrCat("covariance must be a non-empty square matrix, got ",
                     covariance.rows(), "x", covariance.cols()));
  }
  for (size_t i = 0; i < d; ++i) {
    for (size_t j = 0; j < i; ++j) {
      const double a = covariance(i, j);
      const double b = covariance(j, i);
      if (!std::isfinite(a) || std::fabs(a - b) > 1e-12 * std::max(1.0, std::fabs(a))) {
        return absl::InvalidArgumentError(absl::StrCat(
            "covariance is not symmetric at (", i, ", ", j, ")"));
      }
    }
  }
  Matrix lower(d, d);
  for (size_t j = 0; j < d; ++j) {
    double diag = covariance(j, j);
    for (size_t k = 0; k < j; ++k) diag -= lower(j, k) * lower(j, k);
    if (!(diag > 0.0)) {
      return absl::InvalidArgumentError(absl::StrCat(
          "covariance is not positive definite: leading minor of order ",
          j + 1, " is not positive"));
    }
    lower(j, j) = std::sqrt(diag);
    for (size_t i = j + 1; i < d; ++i) {
      double v = covariance(i, j);
      for (size_t k = 0; k < j; ++k) v -= lower(i, k) * lower(j, k);
      lower(i, j) = v / lower(j, j);
    }
  }
  return lower;
}

absl::StatusOr<Matrix> SampleCorrelatedNormal(RandomSource& src,
                                              const Matrix& covariance,
                                              size_t n) {
  TP_RETURN_IF_ERROR(CheckCount(n));
  TP_ASSIGN_OR_RETURN(const Matrix lower, CholeskyFactor(covariance));
  const size_t d = lower.rows();
  Matrix out(n, d);
  std::vector<double> z(d);
  for (size_t r = 0; r < n; ++r) {
    for (double& zi : z) zi = DrawStandardNormal(src);
    for (size_t i = 0; i < d; ++i) {
      double v = 0.0;
      for (size_t k = 0; k <= i; ++k) v += lower(i, k) * z[k];
      out(r, i) = v;
    }
  }
  return out;
}

}  // namespace tabperturb
