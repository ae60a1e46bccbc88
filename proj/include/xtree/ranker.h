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

#ifndef XTREE_RANKER_H_
#define XTREE_RANKER_H_

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "xtree/tree.h"
#include "xtree/treegrad.h"

namespace xtree {

enum class Optimizer { kGradientAscent, kAdam };

Optimizer ParseOptimizer(std::string_view name);

struct RankerConfig {
  Optimizer optimizer = Optimizer::kGradientAscent;
  int iterations = 100;
  double learning_rate = 5.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

void Validate(const RankerConfig& cfg);

struct RankerState {
  std::vector<double> z;
  // Running mean of the symmetric gradients seen so far.
  std::vector<double> zeta;
  int t = 0;
  std::vector<double> m;
  std::vector<double> v;
};

// Gradient of (f(z) - f(1 - z)) / 2 for the multilinear extension f:
// (grad f(z) + grad f(1 - z)) / 2.
GradientVector SymmetricGradient(const AnnotatedInstance& inst, std::span<const double> z);
GradientVector SymmetricGradient(const Ensemble& model, std::span<const double> x,
                                 std::span<const double> z);

// (f(z) - f(1 - z)) / 2, the quantity the ranker ascends.
double SymmetricObjective(const AnnotatedInstance& inst, std::span<const double> z);

// Projected gradient ascent (or ADAM) on the symmetric objective starting at
// z = 0.5. The scores are the running mean of the gradients, so a single
// step returns the Banzhaf value.
class Ranker {
 public:
  Ranker(const AnnotatedInstance& inst, const RankerConfig& cfg);

  void Step();
  const RankerState& state() const { return state_; }
  double Objective() const { return SymmetricObjective(*inst_, state_.z); }

 private:
  const AnnotatedInstance* inst_;
  RankerConfig cfg_;
  RankerState state_;
};

struct RankResult {
  std::vector<double> zeta;
  std::vector<double> final_z;
  // Objective at z0 followed by its value after each step; empty unless a
  // trace was requested.
  std::vector<double> trace;
};

RankResult Rank(const AnnotatedInstance& inst, const RankerConfig& cfg, bool trace = false);
RankResult Rank(const Ensemble& model, std::span<const double> x, const RankerConfig& cfg,
                bool trace = false);

// Feature indices ordered by descending score; ties keep ascending index.
std::vector<int> InduceRanking(std::span<const double> scores);

inline constexpr double kDefaultLearningRates[] = {0.1, 0.5, 1.0, 5.0, 10.0};

// Largest candidate rate whose traced objective never decreases by more than
// tol; the smallest candidate when none qualifies.
double SelectLearningRate(const AnnotatedInstance& inst, RankerConfig cfg,
                          std::span<const double> candidates = kDefaultLearningRates,
                          double tol = 1e-9);

}  // namespace xtree

#endif  // XTREE_RANKER_H_
