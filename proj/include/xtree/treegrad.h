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

#ifndef XTREE_TREEGRAD_H_
#define XTREE_TREEGRAD_H_

#include <span>
#include <vector>

#include "xtree/tree.h"

namespace xtree {

// Gradient of the multilinear extension of f_x, evaluated at z.
struct GradientVector {
  std::vector<double> g;
  std::vector<double> z;
};

// Adds the gradient contribution of one tree at z into g. O(L) time and
// O(depth) scratch. Handles z_l = 1 on edges with gamma 0, where the usual
// division by (1 - z_l + z_l * gamma) is undefined.
void AccumulateTreeGradient(const TreeModel& tree, const EdgeAnnotation& edges,
                            std::span<const double> z, std::span<double> g);

GradientVector TreeGradient(const AnnotatedInstance& inst, std::span<const double> z);
GradientVector TreeGradient(const Ensemble& model, std::span<const double> x,
                            std::span<const double> z);

// Weighted Banzhaf value with parameter nu: the gradient at nu * 1.
std::vector<double> WeightedBanzhaf(const Ensemble& model, std::span<const double> x, double nu);
// Banzhaf value: the gradient at 0.5 * 1.
std::vector<double> Banzhaf(const Ensemble& model, std::span<const double> x);

}  // namespace xtree

#endif  // XTREE_TREEGRAD_H_
