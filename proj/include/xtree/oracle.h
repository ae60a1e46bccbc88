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

#ifndef XTREE_ORACLE_H_
#define XTREE_ORACLE_H_

#include <cstdint>
#include <span>
#include <vector>

#include "xtree/tree.h"
#include "xtree/values.h"

// Brute-force ground truth by subset enumeration. Exponential in N; meant for
// tests, the stability harness and `explain --algo oracle`.
namespace xtree::oracle {

inline constexpr int kMaxFeatures = 24;

// f_x(S) for every S, indexed by bitmask (bit i set <=> feature i in S).
struct SetValueTable {
  int n = 0;
  std::vector<double> values;

  double at(std::uint64_t mask) const { return values[mask]; }
  double full() const { return values.back(); }
};

SetValueTable BuildTable(const Ensemble& model, std::span<const double> x);

// sum over S not containing i of omega_{|S|+1} (f(S+i) - f(S)).
std::vector<double> ExactProbabilisticValue(const SetValueTable& table,
                                            std::span<const double> omega);

// Gradient of the multilinear extension by direct expansion.
std::vector<double> ExactGradient(const SetValueTable& table, std::span<const double> z);

// Coalition weights omega_k = int t^(k-1) (1-t)^(n-k) dmu(t), computed in
// exact rational arithmetic for Beta measures.
std::vector<double> SemivalueOmega(const SemiValueMeasure& measure, int n);

std::vector<double> ExactSemivalue(const SetValueTable& table, const SemiValueMeasure& measure);

// Shapley value computed entirely in exact rational arithmetic (every double
// converts exactly), rounded once at the end. N <= 10.
std::vector<double> ExactShapleyRational(const Ensemble& model, std::span<const double> x);

}  // namespace xtree::oracle

#endif  // XTREE_ORACLE_H_
