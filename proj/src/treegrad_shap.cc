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

#include "xtree/treegrad_shap.h"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

#include "walk.h"
#include "xtree/error.h"
#include "xtree/treegrad.h"

namespace xtree {

QuadratureRule GaussLegendre(int n) {
  if (n < 1) throw InputError("quadrature needs at least one node");
  // Roots of P_n on [-1, 1] by Newton's method, mirrored for symmetry.
  std::vector<double> x(n), w(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double r = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    bool converged = false;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = r;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * r * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (r * p1 - p0) / (r * r - 1.0);
      const double step = p1 / dp;
      r -= step;
      if (std::abs(step) <= 1e-15) {
        converged = true;
        break;
      }
    }
    if (!converged) throw NumericalError("Gauss-Legendre Newton iteration did not converge");
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = r;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * r * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    if (n == 1) p0 = 1.0;
    dp = n * (r * p1 - p0) / (r * r - 1.0);
    const double weight = 2.0 / ((1.0 - r * r) * dp * dp);
    x[i] = -r;
    x[n - 1 - i] = r;
    w[i] = w[n - 1 - i] = weight;
  }
  if (n % 2 == 1) x[n / 2] = 0.0;

  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    rule.nodes[i] = 0.5 * (1.0 + x[i]);
    rule.weights[i] = 0.5 * w[i];
  }
  return rule;
}

const QuadratureRule& CachedGaussLegendre(int n) {
  static std::mutex mu;
  static std::map<int, std::unique_ptr<QuadratureRule>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<QuadratureRule>(GaussLegendre(n));
  return *slot;
}

int BetaShapleyNodeCount(const Ensemble& model, const BetaParams& params) {
  Validate(params);
  const int m = std::min(model.max_depth(), model.n_features()) + params.alpha + params.beta - 2;
  return std::max(1, (m + 1) / 2);
}

namespace {

// Beta density at the quadrature nodes, folded into the weights.
std::vector<double> DensityWeights(const QuadratureRule& rule, const BetaParams& params) {
  const double norm = BetaFunction(params.alpha, params.beta);
  std::vector<double> kb(rule.nodes.size());
  for (std::size_t l = 0; l < kb.size(); ++l) {
    const double t = rule.nodes[l];
    kb[l] = rule.weights[l] * std::pow(t, params.beta - 1) * std::pow(1.0 - t, params.alpha - 1) /
            norm;
  }
  return kb;
}

// One traversal carrying the vector of per-node states (s, H) at every depth.
void AccumulateVectorized(const TreeModel& tree, const EdgeAnnotation& edges,
                          std::span<const double> t, std::span<const double> kb,
                          std::span<double> phi) {
  if (tree.is_leaf(0)) return;
  const std::size_t m = t.size();
  const std::size_t levels = tree.depth() + 1;
  std::vector<double> s(levels * m), acc(levels * m), h(levels * m);
  std::fill_n(s.begin(), m, 1.0);
  auto row = [m](std::vector<double>& buf, int d) { return buf.data() + d * m; };

  internal::WalkEdges(
      tree,
      [&](NodeId v, NodeId) {
        const int d = edges.depth[v];
        const double g = edges.gamma[v];
        const NodeId up = edges.up[v];
        const double* prev = row(s, d - 1);
        double* cur = row(s, d);
        if (up != kNone) {
          const double gu = edges.gamma[up];
          for (std::size_t l = 0; l < m; ++l) {
            cur[l] = prev[l] * (1.0 - t[l] + g * t[l]) / (1.0 - t[l] + gu * t[l]);
          }
        } else {
          for (std::size_t l = 0; l < m; ++l) cur[l] = prev[l] * (1.0 - t[l] + g * t[l]);
        }
        std::fill_n(row(acc, d), m, 0.0);
        std::fill_n(row(h, d), m, 0.0);
        return true;
      },
      [&](NodeId v, NodeId) {
        const int d = edges.depth[v];
        double* ret = row(acc, d);
        if (tree.is_leaf(v)) {
          const double lw = internal::LeafWeight(tree, v);
          const double* cur = row(s, d);
          for (std::size_t l = 0; l < m; ++l) ret[l] = lw * cur[l];
        }
        const NodeId up = edges.up[v];
        if (up != kNone) {
          double* hu = row(h, edges.depth[up]);
          for (std::size_t l = 0; l < m; ++l) hu[l] -= ret[l];
        }
        double* hv = row(h, d);
        double* parent = row(acc, d - 1);
        const double g = edges.gamma[v];
        double dot = 0.0;
        for (std::size_t l = 0; l < m; ++l) {
          hv[l] += ret[l];
          dot += hv[l] / (1.0 - t[l] + g * t[l]) * kb[l];
          parent[l] += ret[l];
        }
        phi[edges.label[v]] += (g - 1.0) * dot;
      });
}

}  // namespace

AttributionResult BetaShapley(const AnnotatedInstance& inst, const BetaParams& params,
                              bool vectorized) {
  const Ensemble& model = inst.model();
  const QuadratureRule& rule = CachedGaussLegendre(BetaShapleyNodeCount(model, params));
  const std::vector<double> kb = DensityWeights(rule, params);
  AttributionResult out;
  out.phi.assign(model.n_features(), 0.0);

  if (vectorized) {
    for (std::size_t tr = 0; tr < model.trees().size(); ++tr) {
      AccumulateVectorized(model.trees()[tr], inst.edges()[tr], rule.nodes, kb, out.phi);
    }
  } else {
    std::vector<double> z(model.n_features());
    for (std::size_t l = 0; l < rule.nodes.size(); ++l) {
      std::fill(z.begin(), z.end(), rule.nodes[l]);
      const GradientVector g = TreeGradient(inst, z);
      for (std::size_t i = 0; i < out.phi.size(); ++i) out.phi[i] += kb[l] * g.g[i];
    }
  }
  for (double p : out.phi) {
    if (!std::isfinite(p)) throw NumericalError("non-finite Beta Shapley value");
  }
  return out;
}

AttributionResult BetaShapley(const Ensemble& model, std::span<const double> x,
                              const BetaParams& params, bool vectorized) {
  return BetaShapley(AnnotatedInstance(model, x), params, vectorized);
}

AttributionResult Shapley(const Ensemble& model, std::span<const double> x) {
  return BetaShapley(model, x, BetaParams{1, 1}, true);
}

}  // namespace xtree
