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

#include "xtree/treegrad.h"

#include <cmath>

#include "walk.h"
#include "xtree/error.h"

namespace xtree {

namespace {

// Per-depth traversal state. `zero_label` is kNone on the regular pass; inside
// a subtree entered through a zero factor it holds that edge's label.
struct GradFrame {
  double s = 0.0;
  double acc = 0.0;
  double h = 0.0;
  std::int32_t zero_label = kNone;
  bool zero_root = false;
  bool skipped = false;
};

}  // namespace

void AccumulateTreeGradient(const TreeModel& tree, const EdgeAnnotation& edges,
                            std::span<const double> z, std::span<double> g) {
  if (tree.is_leaf(0)) return;
  std::vector<GradFrame> f(tree.depth() + 1);
  f[0].s = 1.0;

  auto factor = [&](NodeId v) {
    const double zl = z[edges.label[v]];
    return 1.0 - zl + zl * edges.gamma[v];
  };

  auto enter = [&](NodeId v, NodeId) {
    const int d = edges.depth[v];
    const GradFrame& parent = f[d - 1];
    GradFrame& cur = f[d];
    const std::int32_t l = edges.label[v];
    const NodeId up = edges.up[v];
    cur.acc = 0.0;
    cur.h = 0.0;
    cur.skipped = false;
    cur.zero_root = false;
    cur.zero_label = parent.zero_label;

    if (parent.zero_label == kNone) {
      const double fv = factor(v);
      if (fv == 0.0) {
        cur.zero_label = l;
        cur.zero_root = true;
        cur.s = up != kNone ? parent.s / factor(up) : parent.s;
      } else {
        cur.s = up != kNone ? parent.s / factor(up) * fv : parent.s * fv;
      }
      return true;
    }
    if (l == parent.zero_label) {
      cur.s = parent.s;
      return true;
    }
    const double fv = factor(v);
    if (fv == 0.0) {
      cur.skipped = true;
      return false;
    }
    cur.s = up != kNone ? parent.s / factor(up) * fv : parent.s * fv;
    return true;
  };

  auto leave = [&](NodeId v, NodeId) {
    const int d = edges.depth[v];
    GradFrame& cur = f[d];
    if (cur.skipped) return;
    const double ret = tree.is_leaf(v) ? internal::LeafWeight(tree, v) * cur.s : cur.acc;
    const std::int32_t l = edges.label[v];
    if (cur.zero_root) {
      g[l] -= ret;
      return;
    }
    if (cur.zero_label != kNone) {
      f[d - 1].acc += ret;
      return;
    }
    const NodeId up = edges.up[v];
    if (up != kNone) f[edges.depth[up]].h -= ret;
    cur.h += ret;
    g[l] += (edges.gamma[v] - 1.0) * cur.h / factor(v);
    f[d - 1].acc += ret;
  };

  internal::WalkEdges(tree, enter, leave);
}

GradientVector TreeGradient(const AnnotatedInstance& inst, std::span<const double> z) {
  ValidatePoint(inst.n_features(), z);
  GradientVector out{std::vector<double>(inst.n_features(), 0.0),
                     std::vector<double>(z.begin(), z.end())};
  const auto& trees = inst.model().trees();
  for (std::size_t t = 0; t < trees.size(); ++t) {
    AccumulateTreeGradient(trees[t], inst.edges()[t], z, out.g);
  }
  for (double gi : out.g) {
    if (!std::isfinite(gi)) throw NumericalError("non-finite gradient entry");
  }
  return out;
}

GradientVector TreeGradient(const Ensemble& model, std::span<const double> x,
                            std::span<const double> z) {
  return TreeGradient(AnnotatedInstance(model, x), z);
}

std::vector<double> WeightedBanzhaf(const Ensemble& model, std::span<const double> x, double nu) {
  if (!(nu >= 0.0 && nu <= 1.0)) throw InputError("weighted Banzhaf parameter outside [0, 1]");
  const std::vector<double> z(model.n_features(), nu);
  return TreeGradient(model, x, z).g;
}

std::vector<double> Banzhaf(const Ensemble& model, std::span<const double> x) {
  return WeightedBanzhaf(model, x, 0.5);
}

}  // namespace xtree
