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

#ifndef XTREE_TREEGRAD_SHAP_H_
#define XTREE_TREEGRAD_SHAP_H_

#include <span>
#include <vector>

#include "xtree/tree.h"
#include "xtree/values.h"

namespace xtree {

// n-point Gauss-Legendre rule on [0, 1]: nodes strictly increasing inside
// (0, 1), positive weights summing to 1. Exact for polynomials of degree
// <= 2n - 1.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

QuadratureRule GaussLegendre(int n);
// Memoized GaussLegendre; safe to call concurrently.
const QuadratureRule& CachedGaussLegendre(int n);

// Number of quadrature nodes that makes the Beta(alpha, beta) integral of the
// gradient exact: ceil((min(D, N) + alpha + beta - 2) / 2).
int BetaShapleyNodeCount(const Ensemble& model, const BetaParams& params);

// Beta Shapley value with integral parameters as a quadrature-weighted sum of
// multilinear-extension gradients along the diagonal t * 1.
//
// The scalar variant calls the O(L) gradient once per node; the vectorized
// variant carries all nodes through a single traversal.
AttributionResult BetaShapley(const AnnotatedInstance& inst, const BetaParams& params,
                              bool vectorized = true);
AttributionResult BetaShapley(const Ensemble& model, std::span<const double> x,
                              const BetaParams& params, bool vectorized = true);

AttributionResult Shapley(const Ensemble& model, std::span<const double> x);

}  // namespace xtree

#endif  // XTREE_TREEGRAD_SHAP_H_
