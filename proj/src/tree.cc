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

#include "xtree/tree.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "walk.h"
#include "xtree/error.h"

namespace xtree {

using internal::WalkEdges;

TreeModel::TreeModel(std::vector<Node> nodes) : nodes_(std::move(nodes)) {
  const auto n = static_cast<NodeId>(nodes_.size());
  if (n == 0) throw ModelError("tree has no nodes");
  for (NodeId v = 0; v < n; ++v) {
    const Node& node = nodes_[v];
    if (!std::isfinite(node.cover) || node.cover <= 0.0) {
      throw ModelError("cover must be finite and positive", v);
    }
    if ((node.left == kNone) != (node.right == kNone)) {
      throw ModelError("node has exactly one child", v);
    }
    if (node.is_leaf()) {
      if (node.feature != kNone) throw ModelError("leaf carries a feature", v);
      if (!std::isfinite(node.value)) throw ModelError("leaf value is not finite", v);
      continue;
    }
    if (node.feature < 0) throw ModelError("split has a negative feature", v);
    if (!std::isfinite(node.threshold)) throw ModelError("threshold is not finite", v);
    for (NodeId c : {node.left, node.right}) {
      if (c <= 0 || c >= n) throw ModelError("child index out of range", v);
    }
    if (node.left == node.right) throw ModelError("both children are the same node", v);
  }

  // Full traversal from the root: every node must be reached exactly once.
  std::vector<int> seen(n, 0);
  std::vector<std::pair<NodeId, int>> stack = {{0, 0}};
  seen[0] = 1;
  while (!stack.empty()) {
    auto [v, d] = stack.back();
    stack.pop_back();
    depth_ = std::max(depth_, d);
    const Node& node = nodes_[v];
    if (node.is_leaf()) {
      ++num_leaves_;
      continue;
    }
    max_feature_ = std::max(max_feature_, node.feature);
    for (NodeId c : {node.left, node.right}) {
      if (seen[c]++ > 0) throw ModelError("node has several parents or lies on a cycle", c);
      if (!(nodes_[c].cover < node.cover)) throw ModelError("cover monotonicity violation", c);
      stack.push_back({c, d + 1});
    }
  }
  for (NodeId v = 0; v < n; ++v) {
    if (seen[v] == 0) throw ModelError("orphan node unreachable from the root", v);
  }
}

Ensemble::Ensemble(int n_features, double base_value, std::vector<TreeModel> trees)
    : n_features_(n_features), base_value_(base_value), trees_(std::move(trees)) {
  if (n_features_ < 1) throw ModelError("n_features must be positive");
  if (!std::isfinite(base_value_)) throw ModelError("base_value is not finite");
  for (const TreeModel& tree : trees_) {
    if (tree.max_feature() < n_features_) continue;
    for (NodeId v = 0; v < static_cast<NodeId>(tree.size()); ++v) {
      if (tree.node(v).feature >= n_features_) {
        throw ModelError("feature index out of range", v);
      }
    }
  }
}

int Ensemble::max_depth() const {
  int d = 0;
  for (const TreeModel& t : trees_) d = std::max(d, t.depth());
  return d;
}

std::size_t Ensemble::total_leaves() const {
  std::size_t l = 0;
  for (const TreeModel& t : trees_) l += t.num_leaves();
  return l;
}

std::vector<bool> Ensemble::used_features() const {
  std::vector<bool> used(n_features_, false);
  for (const TreeModel& t : trees_) {
    for (const Node& node : t.nodes()) {
      if (!node.is_leaf()) used[node.feature] = true;
    }
  }
  return used;
}

FeatureSet FeatureSet::All(int n) {
  FeatureSet s(n);
  for (int i = 0; i < n; ++i) s.insert(i);
  return s;
}

FeatureSet FeatureSet::FromMask(int n, std::uint64_t mask) {
  FeatureSet s(n);
  for (int i = 0; i < n && i < 64; ++i) {
    if ((mask >> i) & 1U) s.insert(i);
  }
  return s;
}

FeatureSet FeatureSet::FromIndices(int n, std::span<const int> indices) {
  FeatureSet s(n);
  for (int i : indices) {
    if (i < 0 || i >= n) throw InputError("feature index " + std::to_string(i) + " out of range");
    s.insert(i);
  }
  return s;
}

// --- JSON -------------------------------------------------------------------

namespace {

using nlohmann::json;

template <class T>
std::vector<T> ReadArray(const json& tree, const char* key, std::size_t tree_index) {
  auto it = tree.find(key);
  if (it == tree.end() || !it->is_array()) {
    throw ModelError("schema violation: tree " + std::to_string(tree_index) +
                     " lacks array \"" + key + "\"");
  }
  try {
    return it->get<std::vector<T>>();
  } catch (const json::exception& e) {
    throw ModelError("schema violation: tree " + std::to_string(tree_index) + " field \"" +
                     key + "\": " + e.what());
  }
}

}  // namespace

Ensemble ParseModel(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ModelError(std::string("schema violation: ") + e.what());
  }
  if (!doc.is_object()) throw ModelError("schema violation: document is not an object");
  try {
    if (doc.at("format_version").get<int>() != 1) {
      throw ModelError("schema violation: unsupported format_version");
    }
    const int n_features = doc.at("n_features").get<int>();
    const double base_value = doc.at("base_value").get<double>();
    const json& trees = doc.at("trees");
    if (!trees.is_array()) throw ModelError("schema violation: \"trees\" is not an array");

    std::vector<TreeModel> models;
    models.reserve(trees.size());
    for (std::size_t t = 0; t < trees.size(); ++t) {
      const json& tree = trees[t];
      auto left = ReadArray<NodeId>(tree, "left", t);
      auto right = ReadArray<NodeId>(tree, "right", t);
      auto feature = ReadArray<std::int32_t>(tree, "feature", t);
      auto threshold = ReadArray<double>(tree, "threshold", t);
      auto cover = ReadArray<double>(tree, "cover", t);
      auto value = ReadArray<double>(tree, "value", t);
      const std::size_t n = left.size();
      if (right.size() != n || feature.size() != n || threshold.size() != n ||
          cover.size() != n || value.size() != n) {
        throw ModelError("schema violation: tree " + std::to_string(t) +
                         " has arrays of different lengths");
      }
      std::vector<Node> nodes(n);
      for (std::size_t v = 0; v < n; ++v) {
        nodes[v] = Node{left[v], right[v], feature[v], threshold[v], cover[v],
                        left[v] == kNone ? value[v] : 0.0};
      }
      models.emplace_back(std::move(nodes));
    }
    return Ensemble(n_features, base_value, std::move(models));
  } catch (const json::exception& e) {
    throw ModelError(std::string("schema violation: ") + e.what());
  }
}

Ensemble LoadModel(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open model file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return ParseModel(buf.str());
}

std::string SerializeModel(const Ensemble& model) {
  json doc;
  doc["format_version"] = 1;
  doc["n_features"] = model.n_features();
  doc["base_value"] = model.base_value();
  json trees = json::array();
  for (const TreeModel& tree : model.trees()) {
    json t;
    std::vector<NodeId> left, right;
    std::vector<std::int32_t> feature;
    std::vector<double> threshold, cover, value;
    for (const Node& n : tree.nodes()) {
      left.push_back(n.left);
      right.push_back(n.right);
      feature.push_back(n.feature);
      threshold.push_back(n.threshold);
      cover.push_back(n.cover);
      value.push_back(n.value);
    }
    t["left"] = left;
    t["right"] = right;
    t["feature"] = feature;
    t["threshold"] = threshold;
    t["cover"] = cover;
    t["value"] = value;
    trees.push_back(std::move(t));
  }
  doc["trees"] = std::move(trees);
  return doc.dump(1);
}

void ValidateInstance(const Ensemble& model, std::span<const double> x) {
  if (static_cast<int>(x.size()) != model.n_features()) {
    throw InputError("instance has " + std::to_string(x.size()) + " entries, model expects " +
                     std::to_string(model.n_features()));
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) throw InputError("instance entry " + std::to_string(i) + " is not finite");
  }
}

void ValidatePoint(int n_features, std::span<const double> z) {
  if (static_cast<int>(z.size()) != n_features) {
    throw InputError("point has " + std::to_string(z.size()) + " entries, expected " +
                     std::to_string(n_features));
  }
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (!(z[i] >= 0.0 && z[i] <= 1.0)) {
      throw InputError("point entry " + std::to_string(i) + " outside [0, 1]");
    }
  }
}

// --- Evaluation -------------------------------------------------------------

namespace {

bool GoesLeft(const Node& split, std::span<const double> x) {
  return x[split.feature] <= split.threshold;
}

}  // namespace

double Predict(const Ensemble& model, std::span<const double> x) {
  ValidateInstance(model, x);
  double sum = model.base_value();
  for (const TreeModel& tree : model.trees()) {
    NodeId v = 0;
    while (!tree.is_leaf(v)) {
      const Node& n = tree.node(v);
      v = GoesLeft(n, x) ? n.left : n.right;
    }
    sum += tree.node(v).value;
  }
  return sum;
}

double EvalConditional(const TreeModel& tree, std::span<const double> x, const FeatureSet& s) {
  if (tree.is_leaf(0)) return tree.node(0).value;
  // acc[d] collects the children's contributions of the node at depth d - 1.
  std::vector<double> acc(tree.depth() + 2, 0.0);
  std::vector<char> skipped(tree.depth() + 2, 0);
  int depth = 0;
  WalkEdges(
      tree,
      [&](NodeId v, NodeId parent) {
        ++depth;
        const Node& p = tree.node(parent);
        const bool follow = s.contains(p.feature);
        skipped[depth] = follow && (GoesLeft(p, x) ? p.left : p.right) != v;
        acc[depth + 1] = 0.0;
        return !skipped[depth];
      },
      [&](NodeId v, NodeId parent) {
        if (!skipped[depth]) {
          const Node& node = tree.node(v);
          const Node& p = tree.node(parent);
          const double val = node.is_leaf() ? node.value : acc[depth + 1];
          acc[depth] += s.contains(p.feature) ? val : node.cover / p.cover * val;
        }
        --depth;
      });
  return acc[1];
}

double EvalConditional(const Ensemble& model, std::span<const double> x, const FeatureSet& s) {
  ValidateInstance(model, x);
  if (s.universe() != model.n_features()) throw InputError("feature set has the wrong universe");
  double sum = model.base_value();
  for (const TreeModel& tree : model.trees()) sum += EvalConditional(tree, x, s);
  return sum;
}

// --- Annotation -------------------------------------------------------------

EdgeAnnotation AnnotateEdges(const TreeModel& tree, std::span<const double> x) {
  const std::size_t n = tree.size();
  EdgeAnnotation out;
  out.gamma.assign(n, 1.0);
  out.label.assign(n, kNone);
  out.up.assign(n, kNone);
  out.depth.assign(n, 0);

  // Running per-feature state along the current root path.
  struct LabelState {
    NodeId last = kNone;
    bool ok = true;
    double inv_weight = 1.0;
  };
  std::vector<LabelState> state(std::max(tree.max_feature() + 1, 0));
  std::vector<LabelState> saved(n);

  WalkEdges(
      tree,
      [&](NodeId v, NodeId parent) {
        const Node& p = tree.node(parent);
        const std::int32_t l = p.feature;
        LabelState& st = state[l];
        saved[v] = st;
        const bool went_left = v == p.left;
        st.ok = st.ok && (GoesLeft(p, x) == went_left);
        st.inv_weight *= p.cover / tree.node(v).cover;
        out.gamma[v] = st.ok ? st.inv_weight : 0.0;
        out.label[v] = l;
        out.up[v] = st.last;
        out.depth[v] = out.depth[parent] + 1;
        st.last = v;
        return true;
      },
      [&](NodeId v, NodeId parent) { state[tree.node(parent).feature] = saved[v]; });
  return out;
}

AnnotatedInstance::AnnotatedInstance(const Ensemble& model, std::span<const double> x)
    : model_(&model), x_(x.begin(), x.end()) {
  ValidateInstance(model, x);
  edges_.reserve(model.trees().size());
  for (const TreeModel& tree : model.trees()) edges_.push_back(AnnotateEdges(tree, x_));
}

double EvalMultilinear(const TreeModel& tree, const EdgeAnnotation& edges,
                       std::span<const double> z) {
  if (tree.is_leaf(0)) return tree.node(0).value;
  const int depth = tree.depth();
  std::vector<double> s(depth + 1, 1.0);
  std::vector<double> acc(depth + 2, 0.0);
  std::vector<char> zeroed(depth + 1, 0);
  auto factor = [&](NodeId v) {
    const double zl = z[edges.label[v]];
    return 1.0 - zl + zl * edges.gamma[v];
  };
  WalkEdges(
      tree,
      [&](NodeId v, NodeId) {
        const int d = edges.depth[v];
        const double f = factor(v);
        // Every leaf below a zero factor has zero weight: the same-label
        // edges further down carry gamma 0 as well.
        zeroed[d] = f == 0.0;
        if (zeroed[d]) return false;
        const NodeId up = edges.up[v];
        s[d] = up != kNone ? s[d - 1] / factor(up) * f : s[d - 1] * f;
        acc[d + 1] = 0.0;
        return true;
      },
      [&](NodeId v, NodeId) {
        const int d = edges.depth[v];
        if (zeroed[d]) return;
        acc[d] += tree.is_leaf(v) ? internal::LeafWeight(tree, v) * s[d] : acc[d + 1];
      });
  return acc[1];
}

double EvalMultilinear(const AnnotatedInstance& inst, std::span<const double> z) {
  ValidatePoint(inst.n_features(), z);
  const Ensemble& model = inst.model();
  double sum = model.base_value();
  for (std::size_t t = 0; t < model.trees().size(); ++t) {
    sum += EvalMultilinear(model.trees()[t], inst.edges()[t], z);
  }
  return sum;
}

double EvalMultilinear(const Ensemble& model, std::span<const double> x,
                       std::span<const double> z) {
  return EvalMultilinear(AnnotatedInstance(model, x), z);
}

}  // namespace xtree
