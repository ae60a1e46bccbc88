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

#ifndef XTREE_BASELINES_H_
#define XTREE_BASELINES_H_

#include <span>
#include <vector>

#include "xtree/tree.h"
#include "xtree/treeprob.h"
#include "xtree/values.h"

// Earlier polynomial-traversal Shapley algorithms, kept for numerical-error
// comparison. They are deliberately unstabilized.

namespace xtree {

enum class LinearTreeShapMode {
  // Chebyshev nodes of the second kind, every polynomial lifted to degree M.
  kFixedDegree,
  // Chebyshev nodes, degrees tracked and decoded with a per-degree inverse.
  kVariableDegree,
  // Roots of unity, every polynomial lifted to degree M.
  kWellConditioned,
};

struct BaselineOptions {
  DegreePolicy degree = DegreePolicy::kMinDepthFeatures;
};

AttributionResult LinearTreeShap(const AnnotatedInstance& inst, LinearTreeShapMode mode,
                                 const BaselineOptions& options = {});
AttributionResult LinearTreeShap(const Ensemble& model, std::span<const double> x,
                                 LinearTreeShapMode mode, const BaselineOptions& options = {});

AttributionResult TreeShapK(const AnnotatedInstance& inst, const BaselineOptions& options = {});
AttributionResult TreeShapK(const Ensemble& model, std::span<const double> x,
                            const BaselineOptions& options = {});

AttributionResult LinearTreeShapV1(const AnnotatedInstance& inst,
                                   const BaselineOptions& options = {});
AttributionResult LinearTreeShapV1(const Ensemble& model, std::span<const double> x,
                                   const BaselineOptions& options = {});

// Chebyshev points of the second kind on [-1, 1] in ascending order,
// -cos(pi k / (d - 1)); the single point 0 when d = 1.
std::vector<double> ChebyshevNodes(int d);

// Coefficient k of B_d(y): k! (d - k)! / (d + 1)!.
std::vector<double> ShapleyKernel(int d);

// Vector calculus on length M + 1 arrays (M = xi.size() - 1).
//   OPlus:   phi_j = (M - j)/(M + 1) xi_j + gamma j/(M + 1) xi_{j-1}
//   OMinus:  inverse of OPlus by back-substitution with the last entry set
//            to 0; forward substitution when gamma = 0
//   BoxPlus: c_k = a d_{k-1} + d_k
//   BoxMinus: inverse of BoxPlus by forward substitution
std::vector<double> OPlus(std::span<const double> xi, double gamma);
std::vector<double> OMinus(std::span<const double> phi, double gamma);
std::vector<double> BoxPlus(std::span<const double> d, double a);
std::vector<double> BoxMinus(std::span<const double> c, double a);

enum class ConditionOperator { kChebyshevV, kUnityV, kOPlusSolve, kBoxPlusSolve };

// 2-norm condition number of the d x d matrix behind an operator, from power
// iteration on A^H A and inverse iteration through an LU solve. gamma is used
// by the two solve operators only.
double ConditionEstimate(ConditionOperator op, int d, double gamma = 1.0);

}  // namespace xtree

#endif  // XTREE_BASELINES_H_
