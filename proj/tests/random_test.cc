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

#include "tabperturb/random.h"

#include <cmath>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "test_util.h"

namespace tabperturb {
namespace {

TEST(RandomSourceTest, IdenticalSeedAndStreamGiveIdenticalSequences) {
  RandomSource a(42, 7), b(42, 7);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a.NextU64(), b.NextU64());
}

TEST(RandomSourceTest, CopyForksTheCursor) {
  RandomSource a(1, 2);
  a.NextU64();
  RandomSource b = a;
  EXPECT_EQ(a.NextU64(), b.NextU64());
  EXPECT_EQ(a.position(), b.position());
}

TEST(RandomSourceTest, DistinctStreamsAndSeedsDiffer) {
  RandomSource a(42, 7), b(42, 8), c(43, 7);
  int same_ab = 0, same_ac = 0;
  for (int i = 0; i < 1000; ++i) {
    const uint64_t x = a.NextU64();
    same_ab += x == b.NextU64();
    same_ac += x == c.NextU64();
  }
  EXPECT_EQ(same_ab, 0);
  EXPECT_EQ(same_ac, 0);
}

TEST(RandomSourceTest, NeighbouringStreamsAreUncorrelated) {
  // Adjacent stream ids are the worst case for a counter-based design.
  constexpr int kN = 200000;
  RandomSource a(5, 100), b(5, 101);
  std::vector<double> x(kN), y(kN);
  for (int i = 0; i < kN; ++i) {
    x[i] = a.NextUniform();
    y[i] = b.NextUniform();
  }
  const double mx = testing::SampleMean(x), my = testing::SampleMean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (int i = 0; i < kN; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  // 5 standard errors of a null correlation.
  EXPECT_LT(std::fabs(sxy / std::sqrt(sxx * syy)), 5.0 / std::sqrt(kN));
}

TEST(RandomSourceTest, UniformRanges) {
  RandomSource src(9, 9);
  double sum = 0;
  constexpr int kN = 100000;
  for (int i = 0; i < kN; ++i) {
    const double u = src.NextUniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = src.NextOpenUniform();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / kN, 0.5, 0.005);
}

TEST(RandomSourceTest, NextBelowCoversRangeUniformly) {
  RandomSource src(3, 4);
  std::vector<int> counts(7, 0);
  constexpr int kN = 70000;
  for (int i = 0; i < kN; ++i) {
    const uint64_t k = src.NextBelow(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  for (int c : counts) EXPECT_NEAR(c, kN / 7.0, 5 * std::sqrt(kN / 7.0));
  EXPECT_EQ(src.NextBelow(1), 0u);
}

TEST(StableHashTest, DependsOnlyOnArguments) {
  EXPECT_EQ(StableHash("income", 0), StableHash("income", 0));
  EXPECT_NE(StableHash("income", 0), StableHash("income", 1));
  EXPECT_NE(StableHash("income", 0), StableHash("age", 0));
  std::set<uint64_t> seen;
  for (int c = 0; c < 50; ++c) {
    for (uint64_t s = 0; s < 20; ++s) {
      seen.insert(StableHash("col" + std::to_string(c), s));
    }
  }
  EXPECT_EQ(seen.size(), 1000u);
}

}  // namespace
}  // namespace tabperturb
