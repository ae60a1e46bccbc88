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

#ifndef XTREE_TREEPROB_H_
#define XTREE_TREEPROB_H_

#include <complex>
#include <span>
#include <vector>

#include "xtree/tree.h"
#include "xtree/values.h"

namespace xtree {

// Real polynomial; coeffs[k] multiplies y^k.
struct PolynomialCoeffs {
  std::vector<double> coeffs;

  // Index of the last nonzero coefficient, or -1 for the zero polynomial.
  int degree() const;
};

// Coefficient-space inner product sum_k p_k q_k over the common length.
double InnerProduct(const PolynomialCoeffs& p, const PolynomialCoeffs& q);
PolynomialCoeffs Multiply(const PolynomialCoeffs& p, const PolynomialCoeffs& q);

// A polynomial represented by its values at the M-th roots of unity.
struct UnityEncoding {
  std::vector<std::complex<double>> evals;
};

// Vandermonde system at the M-th roots of unity chi_k = exp(2 pi i k / M),
// k = 0..M-1. The matrix is symmetric and its inverse is conj(V) / M, so
// encoding and decoding are both perfectly conditioned.
class UnityBasis {
 public:
  explicit UnityBasis(int m);

  int size() const { return static_cast<int>(nodes_.size()); }
  const std::vector<std::complex<double>>& nodes() const { return nodes_; }

  // Requires p.coeffs.size() <= M.
  UnityEncoding Encode(const PolynomialCoeffs& p) const;
  // Recovers the M coefficients; max_imag receives the largest imaginary
  // residue when non-null.
  PolynomialCoeffs Decode(const UnityEncoding& e, double* max_imag = nullptr) const;
  // w = conj(V) q / M, so that <p, q> = sum_k p(chi_k) w_k.
  std::vector<std::complex<double>> DecodeWeights(const PolynomialCoeffs& q) const;

 private:
  std::vector<std::complex<double>> nodes_;
};

// Reduces an explicit weight vector over N players to the degree d - 1
// polynomial q used on trees whose paths carry at most d distinct features:
// q_k = sum_j C(N - d, j) omega_{k + j + 1}, k = 0..d-1. d is clamped to N.
PolynomialCoeffs QFromOmega(std::span<const double> omega, int n, int d);

// Degree-l polynomial with q_k = integral of t^k (1 - t)^(l - k) d mu(t).
PolynomialCoeffs QFromSemivalue(const SemiValueMeasure& measure, int degree);

// Size of the node set used by the polynomial traversals. kMinDepthFeatures
// uses min(D, N). kTreeDepth uses the tree depth D itself, which is exact for
// semi-values and exposes how conditioning degrades with depth.
enum class DegreePolicy { kMinDepthFeatures, kTreeDepth };

int PolynomialSize(const TreeModel& tree, int n_features, DegreePolicy policy);

struct TreeProbOptions {
  DegreePolicy degree = DegreePolicy::kMinDepthFeatures;
};

// Any probabilistic value in O(L M) per tree by carrying path polynomials as
// values at roots of unity. Explicit omega requires kMinDepthFeatures.
AttributionResult TreeProbAttribute(const AnnotatedInstance& inst, const ProbabilisticSpec& spec,
                                    const TreeProbOptions& options = {});
AttributionResult TreeProbAttribute(const Ensemble& model, std::span<const double> x,
                                    const ProbabilisticSpec& spec,
                                    const TreeProbOptions& options = {});

}  // namespace xtree

#endif  // XTREE_TREEPROB_H_
