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

#ifndef XTREE_STABILITY_H_
#define XTREE_STABILITY_H_

#include <cstdint>
#include <vector>

#include "xtree/attribute.h"
#include "xtree/synthgen.h"
#include "xtree/treeprob.h"

namespace xtree {

// Depth sweep of Shapley-value error against the brute-force oracle on
// synthetic trees.
struct StabilitySpec {
  std::vector<int> depths;
  int n_features = 11;
  TreeShape shape = TreeShape::kChain;
  std::uint64_t seed = 2025;
  // Trees per depth; errors are maxima over them.
  int instances = 8;
  std::vector<Algorithm> algorithms;
  // Node count for the polynomial algorithms. The tree depth reproduces how
  // their conditioning degrades along deep paths.
  DegreePolicy degree = DegreePolicy::kTreeDepth;
};

struct ConditionRow {
  int d = 0;
  double chebyshev_v = 0.0;
  double unity_v = 0.0;
  double oplus_solve = 0.0;   // gamma = 1
  double boxplus_solve = 0.0; // gamma = 2
};

struct StabilityRow {
  int depth = 0;
  Algorithm algorithm = Algorithm::kGrad;
  double max_abs_error = 0.0;
  ConditionRow condition;
};

// Seed of the r-th tree at a given depth.
std::uint64_t StabilitySeed(std::uint64_t seed, int depth, int r);

// Condition estimates at size d; an estimate that overflows is +inf.
ConditionRow ConditionAt(int d);

// One row per (depth, algorithm), in depth-major order.
std::vector<StabilityRow> RunStabilitySweep(const StabilitySpec& spec);

}  // namespace xtree

#endif  // XTREE_STABILITY_H_
