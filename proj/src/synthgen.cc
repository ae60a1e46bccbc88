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

#include "xtree/synthgen.h"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "xtree/error.h"

namespace xtree {

namespace {

// Fixed conversions on top of the engine's raw output keep results identical
// across standard libraries, unlike std::uniform_*_distribution.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double Uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  std::uint64_t Below(std::uint64_t n) { return static_cast<std::uint64_t>(Uniform() * n); }

 private:
  std::mt19937_64 engine_;
};

struct Shape {
  std::vector<NodeId> left, right;
  std::vector<std::int32_t> feature;
};

Shape ChainShape(int n_features, int depth, Rng& rng) {
  std::vector<int> perm(n_features);
  std::iota(perm.begin(), perm.end(), 0);
  for (int i = n_features - 1; i > 0; --i) std::swap(perm[i], perm[rng.Below(i + 1)]);

  Shape s;
  NodeId spine = 0;
  s.left.push_back(kNone);
  s.right.push_back(kNone);
  s.feature.push_back(kNone);
  for (int k = 0; k < depth; ++k) {
    const NodeId a = static_cast<NodeId>(s.left.size());
    const NodeId b = a + 1;
    for (int c = 0; c < 2; ++c) {
      s.left.push_back(kNone);
      s.right.push_back(kNone);
      s.feature.push_back(kNone);
    }
    s.left[spine] = a;
    s.right[spine] = b;
    s.feature[spine] = perm[k % n_features];
    spine = rng.Uniform() < 0.5 ? a : b;
  }
  return s;
}

Shape BalancedShape(int n_features, int depth, double split_probability, Rng& rng) {
  Shape s;
  struct Pending {
    NodeId id;
    int depth;
    bool forced;
  };
  std::vector<Pending> stack{{0, 0, true}};
  s.left.push_back(kNone);
  s.right.push_back(kNone);
  s.feature.push_back(kNone);
  while (!stack.empty()) {
    const Pending p = stack.back();
    stack.pop_back();
    if (p.depth == depth) continue;
    if (!p.forced && rng.Uniform() >= split_probability) continue;
    const NodeId a = static_cast<NodeId>(s.left.size());
    const NodeId b = a + 1;
    for (int c = 0; c < 2; ++c) {
      s.left.push_back(kNone);
      s.right.push_back(kNone);
      s.feature.push_back(kNone);
    }
    s.left[p.id] = a;
    s.right[p.id] = b;
    s.feature[p.id] = static_cast<std::int32_t>(rng.Below(n_features));
    const bool forced_left = p.forced && rng.Uniform() < 0.5;
    stack.push_back({b, p.depth + 1, p.forced && !forced_left});
    stack.push_back({a, p.depth + 1, forced_left});
  }
  return s;
}

TreeModel GenerateTree(const SynthSpec& spec, Rng& rng) {
  Shape shape = spec.shape == TreeShape::kChain
                    ? ChainShape(spec.n_features, spec.depth, rng)
                    : BalancedShape(spec.n_features, spec.depth, spec.split_probability, rng);
  const std::size_t n = shape.left.size();

  // Children always have larger ids than their parent.
  std::vector<std::uint64_t> leaves(n, 1);
  for (std::size_t v = n; v-- > 0;) {
    if (shape.left[v] != kNone) leaves[v] = leaves[shape.left[v]] + leaves[shape.right[v]];
  }
  if (spec.cover_root < leaves[0]) {
    throw InputError("unrealizable cover constraint: cover_root " + std::to_string(spec.cover_root) +
                     " is below the leaf count " + std::to_string(leaves[0]));
  }
  std::vector<std::uint64_t> cover(n);
  cover[0] = spec.cover_root;
  std::vector<Node> nodes(n);
  for (std::size_t v = 0; v < n; ++v) {
    Node& node = nodes[v];
    node.cover = static_cast<double>(cover[v]);
    if (shape.left[v] == kNone) {
      node.value = rng.Uniform();
      continue;
    }
    const NodeId a = shape.left[v];
    const NodeId b = shape.right[v];
    const std::uint64_t spare = cover[v] - leaves[a] - leaves[b];
    const double u = 0.25 + 0.5 * rng.Uniform();
    cover[a] = leaves[a] + static_cast<std::uint64_t>(static_cast<double>(spare) * u);
    cover[a] = std::min(cover[a], cover[v] - leaves[b]);
    cover[b] = cover[v] - cover[a];
    node.left = a;
    node.right = b;
    node.feature = shape.feature[v];
    node.threshold = rng.Uniform();
  }
  return TreeModel(std::move(nodes));
}

}  // namespace

TreeShape ParseTreeShape(std::string_view name) {
  if (name == "chain") return TreeShape::kChain;
  if (name == "random-balanced" || name == "balanced") return TreeShape::kRandomBalanced;
  throw InputError("unknown tree shape: " + std::string(name));
}

SynthSample Generate(const SynthSpec& spec) {
  if (spec.n_features < 1) throw InputError("synthetic spec needs n_features >= 1");
  if (spec.depth < 0) throw InputError("synthetic spec needs depth >= 0");
  if (spec.n_trees < 1) throw InputError("synthetic spec needs n_trees >= 1");
  Rng rng(spec.seed);
  std::vector<TreeModel> trees;
  trees.reserve(spec.n_trees);
  for (int t = 0; t < spec.n_trees; ++t) trees.push_back(GenerateTree(spec, rng));
  std::vector<double> x(spec.n_features);
  for (double& xi : x) xi = rng.Uniform();
  return {Ensemble(spec.n_features, 0.0, std::move(trees)), std::move(x)};
}

}  // namespace xtree
