/*
 * Copyright 2026 The xtree Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <gtest/gtest.h>

#include <numeric>

#include "test_util.h"
#include "xtree/error.h"
#include "xtree/oracle.h"

namespace xtree {
namespace {

using testing::MaxAbsDiff;

TEST(Oracle, TableIndexesByMask) {
  const auto table = oracle::BuildTable(testing::ReferenceModel(), testing::ReferenceInstance());
  ASSERT_EQ(table.values.size(), 8u);
  EXPECT_NEAR(table.at(0), 0.636, 1e-15);
  EXPECT_NEAR(table.at(0b001), 0.7090909090909091, 1e-15);
  EXPECT_DOUBLE_EQ(table.full(), 0.8);
}

TEST(Oracle, ShapleyMatchesRationalArithmetic) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 9, 6);
    const auto table = oracle::BuildTable(s.model, s.x);
    const auto rational = oracle::ExactShapleyRational(s.model, s.x);
    EXPECT_LT(MaxAbsDiff(oracle::ExactSemivalue(table, BetaParams{1, 1}), rational), 1e-13);
  }
}

TEST(Oracle, ShapleyOmegaSumsOverSizes) {
  // sum_k C(n-1, k-1) omega_k = 1 for every semi-value.
  for (int n : {1, 2, 5, 10}) {
    for (const auto& w : {ShapleyOmega(n), BanzhafOmega(n), oracle::SemivalueOmega(BetaParams{4, 1}, n),
                          oracle::SemivalueOmega(DiracMeasure{0.3}, n)}) {
      double s = 0.0;
      for (int k = 1; k <= n; ++k) s += BinomialCoefficient(n - 1, k - 1) * w[k - 1];
      EXPECT_NEAR(s, 1.0, 1e-13);
    }
  }
}

TEST(Oracle, GradientAtVerticesIsMarginalContribution) {
  const auto table = oracle::BuildTable(testing::ReferenceModel(), testing::ReferenceInstance());
  const std::vector<double> z{0.0, 0.0, 0.0};
  const auto g = oracle::ExactGradient(table, z);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(g[i], table.at(1u << i) - table.at(0), 1e-15);
}

TEST(Oracle, ProbabilisticValueWithShapleyWeights) {
  const auto table = oracle::BuildTable(testing::ReferenceModel(), testing::ReferenceInstance());
  const auto phi = oracle::ExactProbabilisticValue(table, ShapleyOmega(3));
  EXPECT_NEAR(std::accumulate(phi.begin(), phi.end(), 0.0), 0.8 - 0.636, 1e-15);
}

TEST(Oracle, RejectsTooManyFeatures) {
  const Ensemble m(oracle::kMaxFeatures + 1, 0.0, testing::ReferenceModel().trees());
  const std::vector<double> x(oracle::kMaxFeatures + 1, 0.5);
  EXPECT_THROW(oracle::BuildTable(m, x), InputError);
}

TEST(Values, BetaFunctionAndBinomials) {
  EXPECT_DOUBLE_EQ(BetaFunction(1, 1), 1.0);
  EXPECT_NEAR(BetaFunction(2, 3), 1.0 / 12.0, 1e-16);
  EXPECT_DOUBLE_EQ(BinomialCoefficient(10, 3), 120.0);
  EXPECT_DOUBLE_EQ(BinomialCoefficient(5, 0), 1.0);
  EXPECT_DOUBLE_EQ(BinomialCoefficient(5, 6), 0.0);
}

TEST(Values, Validation) {
  EXPECT_THROW(Validate(BetaParams{0, 2}), InputError);
  EXPECT_THROW(Validate(DiracMeasure{-0.1}), InputError);
  EXPECT_THROW(ValidateOmega(std::vector<double>{0.5, NAN}), InputError);
  EXPECT_NO_THROW(Validate(BetaParams{16, 1}));
}

}  // namespace
}  // namespace xtree
