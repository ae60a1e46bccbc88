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

#include <random>

#include "test_util.h"
#include "xtree/error.h"
#include "xtree/oracle.h"
#include "xtree/treegrad.h"

namespace xtree {
namespace {

using testing::MaxAbsDiff;

std::vector<double> RandomPoint(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> z(n);
  for (double& v : z) v = u(rng);
  return z;
}

TEST(TreeGradient, StumpIsHalfOfTheGap) {
  const Ensemble m = testing::StumpModel(1.0, 0.0);
  const std::vector<double> x{0.3};
  for (double z : {0.0, 0.25, 1.0}) {
    const std::vector<double> zv{z};
    EXPECT_DOUBLE_EQ(TreeGradient(m, x, zv).g[0], 0.5);
  }
}

TEST(TreeGradient, ReferenceBanzhafValues) {
  const std::vector<double> phi = Banzhaf(testing::ReferenceModel(), testing::ReferenceInstance());
  const auto table = oracle::BuildTable(testing::ReferenceModel(), testing::ReferenceInstance());
  const auto exact = oracle::ExactSemivalue(table, DiracMeasure{0.5});
  EXPECT_LT(MaxAbsDiff(phi, exact), 1e-15);
  EXPECT_NEAR(phi[2], 0.0448636, 1e-6);
}

TEST(TreeGradient, MatchesOracleOnRandomTrees) {
  std::mt19937_64 rng(11);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 10, 8, 1 + seed % 3);
    const auto table = oracle::BuildTable(s.model, s.x);
    const std::vector<double> z = RandomPoint(rng, s.model.n_features());
    worst = std::max(worst, MaxAbsDiff(TreeGradient(s.model, s.x, z).g, oracle::ExactGradient(table, z)));
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(TreeGradient, VertexAndZeroCoordinates) {
  // Coordinates at 0 and 1 take the traverse-zero branch on gamma = 0 edges.
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 8, 7);
    const int n = s.model.n_features();
    const auto table = oracle::BuildTable(s.model, s.x);
    for (std::uint64_t mask = 0; mask < std::min<std::uint64_t>(64, std::uint64_t{1} << n); ++mask) {
      std::vector<double> z(n);
      for (int i = 0; i < n; ++i) z[i] = (mask >> (i % 6)) & 1U;
      worst = std::max(worst, MaxAbsDiff(TreeGradient(s.model, s.x, z).g, oracle::ExactGradient(table, z)));
    }
  }
  EXPECT_LT(worst, 1e-12);
}

TEST(TreeGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(3);
  const double h = 1e-5;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 8, 6);
    const int n = s.model.n_features();
    std::vector<double> z = RandomPoint(rng, n);
    for (double& v : z) v = 0.1 + 0.8 * v;
    const std::vector<double> g = TreeGradient(s.model, s.x, z).g;
    for (int i = 0; i < n; ++i) {
      std::vector<double> lo = z, hi = z;
      lo[i] -= h;
      hi[i] += h;
      const double fd = (EvalMultilinear(s.model, s.x, hi) - EvalMultilinear(s.model, s.x, lo)) / (2 * h);
      EXPECT_NEAR(g[i], fd, 1e-7);
    }
  }
}

TEST(TreeGradient, IsConstantAlongOwnCoordinate) {
  // The extension is multilinear, so dF/dz_i does not depend on z_i.
  std::mt19937_64 rng(5);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 8, 6);
    const int n = s.model.n_features();
    std::vector<double> z = RandomPoint(rng, n);
    const std::vector<double> g = TreeGradient(s.model, s.x, z).g;
    for (int i = 0; i < n; ++i) {
      std::vector<double> moved = z;
      moved[i] = 1.0 - z[i];
      EXPECT_NEAR(TreeGradient(s.model, s.x, moved).g[i], g[i], 1e-13);
    }
  }
}

TEST(TreeGradient, UnusedFeatureHasZeroGradient) {
  const Ensemble m(5, 0.0, testing::ReferenceModel().trees());
  const std::vector<double> x{0.2, 0.9, 0.1, 0.5, 0.5};
  const std::vector<double> z{0.3, 0.6, 0.1, 0.9, 0.2};
  const std::vector<double> g = TreeGradient(m, x, z).g;
  EXPECT_EQ(g[3], 0.0);
  EXPECT_EQ(g[4], 0.0);
}

TEST(TreeGradient, SingleLeafHasZeroGradient) {
  const Ensemble m = testing::LeafModel(3, 4.0);
  const std::vector<double> x{0.0, 1.0, 2.0}, z{0.5, 0.5, 0.5};
  for (double g : TreeGradient(m, x, z).g) EXPECT_EQ(g, 0.0);
}

TEST(TreeGradient, RejectsBadInput) {
  const Ensemble m = testing::ReferenceModel();
  const auto x = testing::ReferenceInstance();
  EXPECT_THROW(TreeGradient(m, x, std::vector<double>{0.5, 0.5}), InputError);
  EXPECT_THROW(TreeGradient(m, x, std::vector<double>{0.5, -0.1, 0.5}), InputError);
  EXPECT_THROW(WeightedBanzhaf(m, x, 1.5), InputError);
}

TEST(WeightedBanzhaf, MatchesOracle) {
  for (double nu : {0.0, 0.2, 0.5, 0.8, 1.0}) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const SynthSample s = testing::RandomSample(seed, 9, 7, 2);
      const auto table = oracle::BuildTable(s.model, s.x);
      EXPECT_LT(MaxAbsDiff(WeightedBanzhaf(s.model, s.x, nu), oracle::ExactSemivalue(table, DiracMeasure{nu})),
                1e-12);
    }
  }
}

}  // namespace
}  // namespace xtree
