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

#ifndef XTREE_METRICS_H_
#define XTREE_METRICS_H_

#include <span>
#include <string_view>
#include <vector>

#include "xtree/tree.h"
#include "xtree/values.h"

namespace xtree {

// Insertion curve: f(S_k^+) with S_k^+ the top-k features of the ranking.
// Deletion curve: f(S_k^-) with S_k^- the bottom-k features. Index k - 1
// holds the value for a set of size k.
struct RankingCurves {
  std::vector<double> insertion;
  std::vector<double> deletion;
  double ins_metric = 0.0;
  double del_metric = 0.0;
  // Set sizes (1-based) attaining the best insertion and deletion values;
  // the smallest size wins ties.
  int argmax_insertion_k = 0;
  int argmin_deletion_k = 0;
};

// Throws InputError unless pi is a permutation of [0, n).
void ValidatePermutation(std::span<const int> pi, int n);

RankingCurves Curves(const Ensemble& model, std::span<const double> x, std::span<const int> pi);

double JointMetric(const RankingCurves& c);

enum class SelectionCriterion { kInsertion, kDeletion, kJoint };

SelectionCriterion ParseCriterion(std::string_view name);
double CriterionScore(const RankingCurves& c, SelectionCriterion criterion);
// Index of the best score (max for insertion and joint, min for deletion);
// the earliest index wins ties.
std::size_t PickWinner(std::span<const double> scores, SelectionCriterion criterion);

// Beta(16,1), Beta(8,1), ..., Beta(1,16), then Banzhaf.
std::vector<SemiValueMeasure> DefaultBetaCandidates();

// Attribution for a semi-value through the gradient routines: Beta measures
// use quadrature, Dirac(nu) is the gradient at nu * 1.
std::vector<double> SemivalueScores(const AnnotatedInstance& inst, const SemiValueMeasure& m);

struct CandidateEvaluation {
  SemiValueMeasure candidate;
  std::vector<double> scores;
  std::vector<int> ranking;
  RankingCurves curves;
  double criterion_score = 0.0;
};

struct Selection {
  std::size_t winner = 0;
  std::vector<CandidateEvaluation> candidates;
};

Selection SelectBetaCandidate(const Ensemble& model, std::span<const double> x,
                              std::span<const SemiValueMeasure> candidates,
                              SelectionCriterion criterion);

}  // namespace xtree

#endif  // XTREE_METRICS_H_
