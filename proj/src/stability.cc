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

#include "xtree/stability.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "xtree/baselines.h"
#include "xtree/error.h"
#include "xtree/oracle.h"

namespace xtree {

namespace {

double SafeCondition(ConditionOperator op, int d, double gamma) {
  try {
    return ConditionEstimate(op, d, gamma);
  } catch (const NumericalError&) {
    return std::numeric_limits<double>::infinity();
  }
}

}  // namespace

std::uint64_t StabilitySeed(std::uint64_t seed, int depth, int r) {
  // splitmix64 finalizer over the combined key.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (static_cast<std::uint64_t>(depth) * 1000003ull + r + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

ConditionRow ConditionAt(int d) {
  ConditionRow c;
  c.d = d;
  c.chebyshev_v = SafeCondition(ConditionOperator::kChebyshevV, d, 1.0);
  c.unity_v = SafeCondition(ConditionOperator::kUnityV, d, 1.0);
  c.oplus_solve = SafeCondition(ConditionOperator::kOPlusSolve, d, 1.0);
  c.boxplus_solve = SafeCondition(ConditionOperator::kBoxPlusSolve, d, 2.0);
  return c;
}

std::vector<StabilityRow> RunStabilitySweep(const StabilitySpec& spec) {
  if (spec.instances < 1) throw InputError("stability sweep needs at least one instance per depth");
  if (spec.n_features > oracle::kMaxFeatures) throw InputError("N over oracle cap for the stability sweep");
  std::vector<StabilityRow> rows;
  AttributeOptions options;
  options.degree = spec.degree;
  const ProbabilisticSpec shapley = BetaParams{1, 1};
  for (int depth : spec.depths) {
    if (depth < 1) throw InputError("stability depths must be positive");
    std::vector<double> worst(spec.algorithms.size(), 0.0);
    for (int r = 0; r < spec.instances; ++r) {
      SynthSpec synth;
      synth.n_features = spec.n_features;
      synth.depth = depth;
      synth.shape = spec.shape;
      synth.seed = StabilitySeed(spec.seed, depth, r);
      const SynthSample sample = Generate(synth);
      const std::vector<double> truth =
          oracle::ExactSemivalue(oracle::BuildTable(sample.model, sample.x), BetaParams{1, 1});
      const AnnotatedInstance inst(sample.model, sample.x);
      for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
        double err;
        try {
          const AttributionResult res = Attribute(inst, spec.algorithms[a], shapley, options);
          err = 0.0;
          for (std::size_t i = 0; i < truth.size(); ++i) err = std::max(err, std::abs(res.phi[i] - truth[i]));
        } catch (const NumericalError&) {
          err = std::numeric_limits<double>::infinity();
        }
        worst[a] = std::max(worst[a], err);
      }
    }
    const ConditionRow cond = ConditionAt(depth);
    for (std::size_t a = 0; a < spec.algorithms.size(); ++a) {
      rows.push_back({depth, spec.algorithms[a], worst[a], cond});
    }
  }
  return rows;
}

}  // namespace xtree
