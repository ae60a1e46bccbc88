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

#include "xtree/ranker.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "xtree/error.h"

namespace xtree {

Optimizer ParseOptimizer(std::string_view name) {
  if (name == "ga") return Optimizer::kGradientAscent;
  if (name == "adam") return Optimizer::kAdam;
  throw InputError("unknown optimizer: " + std::string(name));
}

void Validate(const RankerConfig& cfg) {
  if (cfg.iterations < 1) throw InputError("ranker needs at least one iteration");
  if (!(cfg.learning_rate > 0.0) || !std::isfinite(cfg.learning_rate)) {
    throw InputError("learning rate must be positive");
  }
  if (!(cfg.beta1 >= 0.0 && cfg.beta1 < 1.0) || !(cfg.beta2 >= 0.0 && cfg.beta2 < 1.0)) {
    throw InputError("ADAM betas must lie in [0, 1)");
  }
  if (!(cfg.epsilon > 0.0)) throw InputError("ADAM epsilon must be positive");
}

GradientVector SymmetricGradient(const AnnotatedInstance& inst, std::span<const double> z) {
  std::vector<double> mirror(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) mirror[i] = 1.0 - z[i];
  GradientVector out = TreeGradient(inst, z);
  const GradientVector other = TreeGradient(inst, mirror);
  for (std::size_t i = 0; i < out.g.size(); ++i) out.g[i] = 0.5 * (out.g[i] + other.g[i]);
  return out;
}

GradientVector SymmetricGradient(const Ensemble& model, std::span<const double> x,
                                 std::span<const double> z) {
  return SymmetricGradient(AnnotatedInstance(model, x), z);
}

double SymmetricObjective(const AnnotatedInstance& inst, std::span<const double> z) {
  std::vector<double> mirror(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) mirror[i] = 1.0 - z[i];
  return 0.5 * (EvalMultilinear(inst, z) - EvalMultilinear(inst, mirror));
}

Ranker::Ranker(const AnnotatedInstance& inst, const RankerConfig& cfg) : inst_(&inst), cfg_(cfg) {
  Validate(cfg_);
  const std::size_t n = inst.n_features();
  state_.z.assign(n, 0.5);
  state_.zeta.assign(n, 0.0);
  if (cfg_.optimizer == Optimizer::kAdam) {
    state_.m.assign(n, 0.0);
    state_.v.assign(n, 0.0);
  }
}

void Ranker::Step() {
  const std::vector<double> g = SymmetricGradient(*inst_, state_.z).g;
  const int t = ++state_.t;
  const double keep = (t - 1.0) / t;
  for (std::size_t i = 0; i < g.size(); ++i) state_.zeta[i] = keep * state_.zeta[i] + g[i] / t;

  if (cfg_.optimizer == Optimizer::kGradientAscent) {
    for (std::size_t i = 0; i < g.size(); ++i) state_.z[i] += cfg_.learning_rate * g[i];
  } else {
    const double c1 = 1.0 - std::pow(cfg_.beta1, t);
    const double c2 = 1.0 - std::pow(cfg_.beta2, t);
    for (std::size_t i = 0; i < g.size(); ++i) {
      state_.m[i] = cfg_.beta1 * state_.m[i] + (1.0 - cfg_.beta1) * g[i];
      state_.v[i] = cfg_.beta2 * state_.v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
      const double m_hat = state_.m[i] / c1;
      const double v_hat = state_.v[i] / c2;
      state_.z[i] += cfg_.learning_rate * m_hat / std::sqrt(v_hat + cfg_.epsilon);
    }
  }
  for (double& zi : state_.z) zi = std::clamp(zi, 0.0, 1.0);
}

RankResult Rank(const AnnotatedInstance& inst, const RankerConfig& cfg, bool trace) {
  Ranker ranker(inst, cfg);
  RankResult out;
  if (trace) out.trace.push_back(ranker.Objective());
  for (int t = 0; t < cfg.iterations; ++t) {
    ranker.Step();
    if (trace) out.trace.push_back(ranker.Objective());
  }
  out.zeta = ranker.state().zeta;
  out.final_z = ranker.state().z;
  for (double s : out.zeta) {
    if (!std::isfinite(s)) throw NumericalError("non-finite ranker score");
  }
  return out;
}

RankResult Rank(const Ensemble& model, std::span<const double> x, const RankerConfig& cfg,
                bool trace) {
  return Rank(AnnotatedInstance(model, x), cfg, trace);
}

std::vector<int> InduceRanking(std::span<const double> scores) {
  for (double s : scores) {
    if (std::isnan(s)) throw InputError("cannot rank a NaN score");
  }
  std::vector<int> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::ranges::stable_sort(order, [&](int a, int b) { return scores[a] > scores[b]; });
  return order;
}

double SelectLearningRate(const AnnotatedInstance& inst, RankerConfig cfg,
                          std::span<const double> candidates, double tol) {
  if (candidates.empty()) throw InputError("no candidate learning rates");
  std::vector<double> sorted(candidates.begin(), candidates.end());
  std::ranges::sort(sorted, std::greater<>());
  for (double lr : sorted) {
    cfg.learning_rate = lr;
    const RankResult r = Rank(inst, cfg, /*trace=*/true);
    bool monotone = true;
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
      if (r.trace[k] < r.trace[k - 1] - tol) {
        monotone = false;
        break;
      }
    }
    if (monotone) return lr;
  }
  return sorted.back();
}

}  // namespace xtree
