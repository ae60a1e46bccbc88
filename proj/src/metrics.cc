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

#include "xtree/metrics.h"

#include <string>

#include "xtree/error.h"
#include "xtree/ranker.h"
#include "xtree/treegrad.h"
#include "xtree/treegrad_shap.h"

namespace xtree {

void ValidatePermutation(std::span<const int> pi, int n) {
  if (static_cast<int>(pi.size()) != n) throw InputError("ranking must list every feature once");
  std::vector<bool> seen(n, false);
  for (int i : pi) {
    if (i < 0 || i >= n || seen[i]) throw InputError("ranking is not a permutation");
    seen[i] = true;
  }
}

RankingCurves Curves(const Ensemble& model, std::span<const double> x, std::span<const int> pi) {
  const int n = model.n_features();
  ValidatePermutation(pi, n);
  ValidateInstance(model, x);
  RankingCurves c;
  c.insertion.resize(n);
  c.deletion.resize(n);
  FeatureSet top(n), bottom(n);
  for (int k = 1; k <= n; ++k) {
    top.insert(pi[k - 1]);
    bottom.insert(pi[n - k]);
    c.insertion[k - 1] = EvalConditional(model, x, top);
    c.deletion[k - 1] = EvalConditional(model, x, bottom);
  }
  double ins = 0.0, del = 0.0;
  c.argmax_insertion_k = c.argmin_deletion_k = 1;
  for (int k = 1; k <= n; ++k) {
    ins += c.insertion[k - 1];
    del += c.deletion[k - 1];
    if (c.insertion[k - 1] > c.insertion[c.argmax_insertion_k - 1]) c.argmax_insertion_k = k;
    if (c.deletion[k - 1] < c.deletion[c.argmin_deletion_k - 1]) c.argmin_deletion_k = k;
  }
  c.ins_metric = ins / n;
  c.del_metric = del / n;
  return c;
}

double JointMetric(const RankingCurves& c) { return c.ins_metric - c.del_metric; }

SelectionCriterion ParseCriterion(std::string_view name) {
  if (name == "insertion") return SelectionCriterion::kInsertion;
  if (name == "deletion") return SelectionCriterion::kDeletion;
  if (name == "joint") return SelectionCriterion::kJoint;
  throw InputError("unknown selection criterion: " + std::string(name));
}

double CriterionScore(const RankingCurves& c, SelectionCriterion criterion) {
  switch (criterion) {
    case SelectionCriterion::kInsertion:
      return c.ins_metric;
    case SelectionCriterion::kDeletion:
      return c.del_metric;
    case SelectionCriterion::kJoint:
      return JointMetric(c);
  }
  return 0.0;
}

std::size_t PickWinner(std::span<const double> scores, SelectionCriterion criterion) {
  if (scores.empty()) throw InputError("empty candidate list");
  std::size_t best = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    const bool better = criterion == SelectionCriterion::kDeletion ? scores[i] < scores[best]
                                                                   : scores[i] > scores[best];
    if (better) best = i;
  }
  return best;
}

std::vector<SemiValueMeasure> DefaultBetaCandidates() {
  return {BetaParams{16, 1}, BetaParams{8, 1}, BetaParams{4, 1}, BetaParams{2, 1},
          BetaParams{1, 1},  BetaParams{1, 2}, BetaParams{1, 4}, BetaParams{1, 8},
          BetaParams{1, 16}, DiracMeasure{0.5}};
}

std::vector<double> SemivalueScores(const AnnotatedInstance& inst, const SemiValueMeasure& m) {
  if (const auto* beta = std::get_if<BetaParams>(&m)) return BetaShapley(inst, *beta).phi;
  const auto& dirac = std::get<DiracMeasure>(m);
  Validate(dirac);
  const std::vector<double> z(inst.n_features(), dirac.nu);
  return TreeGradient(inst, z).g;
}

Selection SelectBetaCandidate(const Ensemble& model, std::span<const double> x,
                              std::span<const SemiValueMeasure> candidates,
                              SelectionCriterion criterion) {
  if (candidates.empty()) throw InputError("empty candidate list");
  const AnnotatedInstance inst(model, x);
  Selection sel;
  std::vector<double> scores;
  for (const SemiValueMeasure& m : candidates) {
    CandidateEvaluation ev;
    ev.candidate = m;
    ev.scores = SemivalueScores(inst, m);
    ev.ranking = InduceRanking(ev.scores);
    ev.curves = Curves(model, x, ev.ranking);
    ev.criterion_score = CriterionScore(ev.curves, criterion);
    scores.push_back(ev.criterion_score);
    sel.candidates.push_back(std::move(ev));
  }
  sel.winner = PickWinner(scores, criterion);
  return sel;
}

}  // namespace xtree
