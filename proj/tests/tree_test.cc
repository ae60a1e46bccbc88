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
#include <string>

#include "test_util.h"
#include "xtree/error.h"
#include "xtree/oracle.h"
#include "xtree/tree.h"

namespace xtree {
namespace {

using testing::MaxAbsDiff;
using testing::ReferenceInstance;
using testing::ReferenceModel;

std::string OneTreeDoc(const std::string& left, const std::string& right, const std::string& feature,
                       const std::string& cover, int n_features = 2, int version = 1) {
  const std::string zeros = "[0, 0, 0]";
  return "{\"format_version\": " + std::to_string(version) + ", \"n_features\": " +
         std::to_string(n_features) + ", \"base_value\": 0, \"trees\": [{\"left\": " + left +
         ", \"right\": " + right + ", \"feature\": " + feature + ", \"threshold\": " + zeros +
         ", \"cover\": " + cover + ", \"value\": [0, 1, 2]}]}";
}

void ExpectModelError(const std::string& doc, const std::string& fragment) {
  try {
    ParseModel(doc);
    FAIL() << "expected a model error containing '" << fragment << "'";
  } catch (const ModelError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(LoadModel, ReferenceTree) {
  const Ensemble m = ReferenceModel();
  ASSERT_EQ(m.trees().size(), 1u);
  const TreeModel& t = m.trees()[0];
  EXPECT_EQ(t.num_leaves(), 4);
  EXPECT_EQ(t.depth(), 3);
  EXPECT_EQ(t.size(), 2u * t.num_leaves() - 1);
  EXPECT_EQ(m.n_features(), 3);
  EXPECT_EQ(m.base_value(), 0.0);
}

TEST(LoadModel, SingleLeafIsDegenerateConstant) {
  const Ensemble m = ParseModel(
      R"({"format_version": 1, "n_features": 2, "base_value": 0, "trees": [{"left": [-1],
          "right": [-1], "feature": [-1], "threshold": [0], "cover": [10], "value": [0.7]}]})");
  EXPECT_EQ(m.trees()[0].depth(), 0);
  EXPECT_EQ(m.trees()[0].num_leaves(), 1);
  const std::vector<double> x{0.1, 0.2};
  for (std::uint64_t mask = 0; mask < 4; ++mask) {
    EXPECT_DOUBLE_EQ(EvalConditional(m, x, FeatureSet::FromMask(2, mask)), 0.7);
  }
}

TEST(LoadModel, RejectsEqualChildCover) {
  ExpectModelError(OneTreeDoc("[1, -1, -1]", "[2, -1, -1]", "[0, -1, -1]", "[10, 10, 5]"),
                   "cover monotonicity violation (node 1)");
}

TEST(LoadModel, RejectsStructuralDefects) {
  ExpectModelError(OneTreeDoc("[1, -1, -1]", "[-1, -1, -1]", "[0, -1, -1]", "[10, 5, 5]"),
                   "exactly one child");
  ExpectModelError(OneTreeDoc("[1, 1, -1]", "[2, 2, -1]", "[0, 0, -1]", "[10, 5, 4]"),
                   "node 1");
  ExpectModelError(OneTreeDoc("[-1, -1, -1]", "[-1, -1, -1]", "[-1, -1, -1]", "[10, 5, 5]"),
                   "orphan node");
  ExpectModelError(OneTreeDoc("[1, -1, -1]", "[2, -1, -1]", "[5, -1, -1]", "[10, 5, 5]"),
                   "feature index out of range (node 0)");
  ExpectModelError(OneTreeDoc("[1, -1, -1]", "[2, -1, -1]", "[0, -1, -1]", "[10, 5, 5]", 2, 2),
                   "format_version");
  ExpectModelError(OneTreeDoc("[1, -1, -1]", "[2, -1, -1]", "[0, -1, -1]", "[10, 0, 5]"),
                   "cover must be finite and positive (node 1)");
  ExpectModelError(OneTreeDoc("[1, -1, -1]", "[7, -1, -1]", "[0, -1, -1]", "[10, 5, 5]"),
                   "child index out of range");
  ExpectModelError("{\"format_version\": 1}", "schema violation");
  ExpectModelError("not json", "schema violation");
}

TEST(LoadModel, MissingFileIsInputError) {
  EXPECT_THROW(LoadModel("/nonexistent/model.json"), InputError);
}

TEST(SerializeModel, RoundTripIsByteStable) {
  const Ensemble m = ReferenceModel();
  const std::string once = SerializeModel(m);
  const Ensemble back = ParseModel(once);
  EXPECT_EQ(SerializeModel(back), once);
  EXPECT_EQ(Predict(back, ReferenceInstance()), Predict(m, ReferenceInstance()));
}

TEST(Predict, ReferenceTreeRoutesToV5) {
  EXPECT_DOUBLE_EQ(Predict(ReferenceModel(), ReferenceInstance()), 0.8);
}

TEST(Predict, SingleLeafIgnoresInstance) {
  const Ensemble m = testing::LeafModel(3, -1.5);
  EXPECT_EQ(Predict(m, std::vector<double>{1e9, -4, 0}), -1.5);
}

TEST(Predict, EnsembleIsBasePlusSum) {
  const Ensemble one = ReferenceModel();
  const Ensemble two(3, 1.0, {one.trees()[0], one.trees()[0]});
  EXPECT_DOUBLE_EQ(Predict(two, ReferenceInstance()), 1.0 + 2 * 0.8);
}

TEST(EvalConditional, ReferenceTreeValues) {
  const Ensemble m = ReferenceModel();
  const auto x = ReferenceInstance();
  // Cover-weighted leaf average.
  EXPECT_NEAR(EvalConditional(m, x, FeatureSet(3)), (3 * 0.1 + 2 * 0.3 + 10 * 0.8 + 10 * 0.7) / 25.0,
              1e-15);
  EXPECT_NEAR(EvalConditional(m, x, FeatureSet::FromMask(3, 0b001)), (2 * 0.3 + 20 * 0.75) / 22.0, 1e-15);
  EXPECT_NEAR(EvalConditional(m, x, FeatureSet::FromMask(3, 0b001)), 0.7090909090909091, 1e-12);
  EXPECT_EQ(EvalConditional(m, x, FeatureSet::All(3)), Predict(m, x));
}

TEST(EvalConditional, FullSetEqualsPredictOnRandomTrees) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 12, 8, 1 + seed % 2);
    const int n = s.model.n_features();
    EXPECT_EQ(EvalConditional(s.model, s.x, FeatureSet::All(n)), Predict(s.model, s.x));
  }
}

TEST(EvalConditional, RejectsWrongUniverse) {
  EXPECT_THROW(EvalConditional(ReferenceModel(), ReferenceInstance(), FeatureSet(4)), InputError);
  const std::vector<int> bad{3};
  EXPECT_THROW(FeatureSet::FromIndices(3, bad), InputError);
}

TEST(EvalConditional, EmptySetIsCoverWeightedLeafMean) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 8, 6);
    const TreeModel& t = s.model.trees()[0];
    double mean = 0.0;
    for (const Node& n : t.nodes()) {
      if (n.is_leaf()) mean += n.value * n.cover / t.node(0).cover;
    }
    EXPECT_NEAR(EvalConditional(s.model, s.x, FeatureSet(s.model.n_features())), mean, 1e-13);
  }
}

TEST(EvalMultilinear, VerticesMatchConditional) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 10, 7);
    const int n = s.model.n_features();
    const AnnotatedInstance inst(s.model, s.x);
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
      std::vector<double> z(n);
      for (int i = 0; i < n; ++i) z[i] = (mask >> i) & 1U;
      ASSERT_NEAR(EvalMultilinear(inst, z), EvalConditional(s.model, s.x, FeatureSet::FromMask(n, mask)),
                  1e-12)
          << "seed " << seed << " mask " << mask;
    }
  }
}

TEST(EvalMultilinear, ReferenceCenterIsMeanOfAllSubsets) {
  const Ensemble m = ReferenceModel();
  const auto x = ReferenceInstance();
  double mean = 0.0;
  for (std::uint64_t mask = 0; mask < 8; ++mask) mean += EvalConditional(m, x, FeatureSet::FromMask(3, mask)) / 8;
  EXPECT_NEAR(EvalMultilinear(m, x, std::vector<double>(3, 0.5)), mean, 1e-15);
  EXPECT_NEAR(EvalMultilinear(m, x, std::vector<double>(3, 0.0)), 0.636, 1e-15);
}

TEST(EvalMultilinear, ConvexCombinationOfSetValues) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 10, 7);
    const oracle::SetValueTable table = oracle::BuildTable(s.model, s.x);
    const auto [lo, hi] = std::minmax_element(table.values.begin(), table.values.end());
    for (int rep = 0; rep < 20; ++rep) {
      std::vector<double> z(s.model.n_features());
      for (double& zi : z) zi = u(rng);
      const double v = EvalMultilinear(s.model, s.x, z);
      EXPECT_GE(v, *lo - 1e-12);
      EXPECT_LE(v, *hi + 1e-12);
    }
  }
}

TEST(EvalMultilinear, RejectsPointOutsideCube) {
  EXPECT_THROW(EvalMultilinear(ReferenceModel(), ReferenceInstance(), std::vector<double>{0.5, 1.5, 0}),
               InputError);
  EXPECT_THROW(EvalMultilinear(ReferenceModel(), ReferenceInstance(), std::vector<double>{0.5, 0.5}),
               InputError);
}

TEST(EnsembleEvaluation, IsBasePlusMemberSum) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 8, 6, 3);
    const Ensemble shifted(s.model.n_features(), 0.25, s.model.trees());
    const int n = s.model.n_features();
    const std::vector<double> z(n, 0.3);
    const FeatureSet half = FeatureSet::FromMask(n, 0x55);
    double cond = 0.25, multi = 0.25;
    for (const TreeModel& t : s.model.trees()) {
      cond += EvalConditional(t, s.x, half);
      multi += EvalMultilinear(t, AnnotateEdges(t, s.x), z);
    }
    EXPECT_NEAR(EvalConditional(shifted, s.x, half), cond, 1e-14);
    EXPECT_NEAR(EvalMultilinear(shifted, s.x, z), multi, 1e-14);
  }
}

TEST(AnnotateEdges, ReferenceTreeGammas) {
  const EdgeAnnotation a = AnnotateEdges(ReferenceModel().trees()[0], ReferenceInstance());
  EXPECT_NEAR(a.gamma[1], 25.0 / 22.0, 1e-15);
  EXPECT_EQ(a.gamma[2], 0.0);
  EXPECT_EQ(a.gamma[3], 0.0);
  EXPECT_NEAR(a.gamma[4], 22.0 / 20.0, 1e-15);
  EXPECT_NEAR(a.gamma[5], 2.0, 1e-15);
  EXPECT_EQ(a.gamma[6], 0.0);
  EXPECT_EQ(a.label[1], 0);
  EXPECT_EQ(a.label[4], 1);
  EXPECT_EQ(a.label[5], 2);
  for (NodeId v = 1; v < 7; ++v) EXPECT_EQ(a.up[v], kNone);
  EXPECT_EQ(a.depth[5], 3);
}

TEST(AnnotateEdges, RepeatedFeatureLinksToPreviousEdge) {
  // Root and its left child both split on feature 0: x = 0.2 satisfies both.
  const TreeModel t({Node{1, 2, 0, 0.5, 100, 0}, Node{3, 4, 0, 0.3, 60, 0}, Node{kNone, kNone, kNone, 0, 40, 1},
                     Node{kNone, kNone, kNone, 0, 30, 2}, Node{kNone, kNone, kNone, 0, 30, 3}});
  const EdgeAnnotation a = AnnotateEdges(t, std::vector<double>{0.2});
  EXPECT_EQ(a.up[1], kNone);
  EXPECT_EQ(a.up[3], 1);
  EXPECT_EQ(a.up[4], 1);
  // Same-label product along the path: 1/w(0->1) * 1/w(1->3).
  EXPECT_NEAR(a.gamma[3], (100.0 / 60.0) * (60.0 / 30.0), 1e-14);
  EXPECT_EQ(a.gamma[4], 0.0);
  EXPECT_EQ(a.gamma[2], 0.0);
}

TEST(AnnotateEdges, GammaIsZeroOrAboveOne) {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const SynthSample s = testing::RandomSample(seed, 12, 8);
    const EdgeAnnotation a = AnnotateEdges(s.model.trees()[0], s.x);
    for (std::size_t v = 1; v < a.gamma.size(); ++v) {
      EXPECT_TRUE(a.gamma[v] == 0.0 || a.gamma[v] > 1.0) << a.gamma[v];
    }
  }
}

TEST(ValidateInstance, RejectsLengthAndNonFinite) {
  const Ensemble m = ReferenceModel();
  EXPECT_THROW(ValidateInstance(m, std::vector<double>{0.1, 0.2}), InputError);
  EXPECT_THROW(ValidateInstance(m, std::vector<double>{0.1, NAN, 0.2}), InputError);
  EXPECT_NO_THROW(ValidateInstance(m, ReferenceInstance()));
}

TEST(Ensemble, UsedFeatures) {
  const Ensemble m(5, 0.0, ReferenceModel().trees());
  const std::vector<bool> used = m.used_features();
  EXPECT_EQ(used, (std::vector<bool>{true, true, true, false, false}));
}

}  // namespace
}  // namespace xtree
