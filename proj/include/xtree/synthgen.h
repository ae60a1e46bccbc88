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

#ifndef XTREE_SYNTHGEN_H_
#define XTREE_SYNTHGEN_H_

#include <cstdint>
#include <string_view>
#include <vector>

#include "xtree/tree.h"

namespace xtree {

enum class TreeShape {
  // One root-to-leaf spine of depth D; every spine node has one leaf child.
  // Spine features cycle through a random permutation of [0, N).
  kChain,
  // A forced path of depth D; every other node below depth D splits with
  // split_probability. Features are drawn uniformly.
  kRandomBalanced,
};

TreeShape ParseTreeShape(std::string_view name);

struct SynthSpec {
  int n_features = 4;
  int depth = 3;
  TreeShape shape = TreeShape::kChain;
  // Root cover. Child covers are integer splits, so every subtree must hold
  // at least one unit per leaf.
  std::uint64_t cover_root = std::uint64_t{1} << 62;
  std::uint64_t seed = 2025;
  int n_trees = 1;
  double split_probability = 0.8;
};

struct SynthSample {
  Ensemble model;
  std::vector<double> x;
};

// Deterministic in the SynthSpec fields: thresholds, leaf values and x are uniform on
// [0, 1], so a random subset of each path's splits is satisfied by x.
SynthSample Generate(const SynthSpec& spec);

}  // namespace xtree

#endif  // XTREE_SYNTHGEN_H_
