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

#ifndef XTREE_TREE_H_
#define XTREE_TREE_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace xtree {

using NodeId = std::int32_t;
inline constexpr NodeId kNone = -1;

struct Node {
  NodeId left = kNone;
  NodeId right = kNone;
  std::int32_t feature = kNone;
  double threshold = 0.0;
  double cover = 0.0;
  double value = 0.0;  // Only meaningful at leaves.

  bool is_leaf() const { return left == kNone; }
};

// A binary decision tree stored as a flat node array rooted at node 0.
// Samples with x[feature] <= threshold are routed to the left child.
//
// Construction validates the structure: single root, every other node reached
// exactly once, both-or-no children, and 0 < cover(child) < cover(parent).
class TreeModel {
 public:
  explicit TreeModel(std::vector<Node> nodes);

  const std::vector<Node>& nodes() const { return nodes_; }
  const Node& node(NodeId id) const { return nodes_[id]; }
  std::size_t size() const { return nodes_.size(); }
  bool is_leaf(NodeId id) const { return nodes_[id].is_leaf(); }

  // Number of edges on the longest root-to-leaf path (0 for a lone leaf).
  int depth() const { return depth_; }
  int num_leaves() const { return num_leaves_; }
  // Largest feature index referenced by a split, or -1 if there is none.
  int max_feature() const { return max_feature_; }

 private:
  std::vector<Node> nodes_;
  int depth_ = 0;
  int num_leaves_ = 0;
  int max_feature_ = -1;
};

// Sum of trees plus a constant. A single decision tree is an ensemble with
// one member and base_value 0.
class Ensemble {
 public:
  Ensemble(int n_features, double base_value, std::vector<TreeModel> trees);

  int n_features() const { return n_features_; }
  double base_value() const { return base_value_; }
  const std::vector<TreeModel>& trees() const { return trees_; }

  // Maximum depth over member trees.
  int max_depth() const;
  std::size_t total_leaves() const;
  // used()[i] is true iff some split of some tree tests feature i.
  std::vector<bool> used_features() const;

 private:
  int n_features_;
  double base_value_;
  std::vector<TreeModel> trees_;
};

// Subset of [0, N) used as the conditioning set of f_x(S).
class FeatureSet {
 public:
  explicit FeatureSet(int n) : bits_(n, false) {}
  static FeatureSet All(int n);
  static FeatureSet FromMask(int n, std::uint64_t mask);
  static FeatureSet FromIndices(int n, std::span<const int> indices);

  int universe() const { return static_cast<int>(bits_.size()); }
  bool contains(int i) const { return bits_[i]; }
  void insert(int i) { bits_[i] = true; }
  void erase(int i) { bits_[i] = false; }

 private:
  std::vector<bool> bits_;
};

// --- Model document I/O -----------------------------------------------------

Ensemble ParseModel(std::string_view json_text);
Ensemble LoadModel(const std::filesystem::path& path);
std::string SerializeModel(const Ensemble& model);

// Throws InputError unless x has n_features finite entries.
void ValidateInstance(const Ensemble& model, std::span<const double> x);

// --- Evaluation -------------------------------------------------------------

// Full-feature routing: base_value plus the reached leaf of each tree.
double Predict(const Ensemble& model, std::span<const double> x);

// Path-dependent conditional expectation f_x(S): features in S follow x,
// the rest are averaged by cover.
double EvalConditional(const TreeModel& tree, std::span<const double> x,
                       const FeatureSet& s);
double EvalConditional(const Ensemble& model, std::span<const double> x,
                       const FeatureSet& s);

// --- Edge annotation --------------------------------------------------------

// Per-(tree, instance) data attached to the edge entering each non-root node
// v. The entries at the root are placeholders (gamma 1, label kNone).
struct EdgeAnnotation {
  // gamma[v] is 0 when x fails some split on the path to v that tests the
  // edge's feature, and otherwise the product of 1/w over those edges.
  std::vector<double> gamma;
  // Feature tested by v's parent.
  std::vector<std::int32_t> label;
  // Head of the nearest strict ancestor edge with the same label, or kNone.
  std::vector<NodeId> up;
  // Number of edges between the root and v.
  std::vector<std::int32_t> depth;
};

EdgeAnnotation AnnotateEdges(const TreeModel& tree, std::span<const double> x);

// An ensemble paired with one instance and the edge annotation of every
// member tree. Gradient-based routines that revisit the same instance many
// times take this to avoid re-annotating.
class AnnotatedInstance {
 public:
  AnnotatedInstance(const Ensemble& model, std::span<const double> x);

  const Ensemble& model() const { return *model_; }
  std::span<const double> x() const { return x_; }
  const std::vector<EdgeAnnotation>& edges() const { return edges_; }
  int n_features() const { return model_->n_features(); }

 private:
  const Ensemble* model_;
  std::vector<double> x_;
  std::vector<EdgeAnnotation> edges_;
};

// Multilinear extension of f_x evaluated at z in [0,1]^N.
double EvalMultilinear(const TreeModel& tree, const EdgeAnnotation& edges,
                       std::span<const double> z);
double EvalMultilinear(const AnnotatedInstance& inst, std::span<const double> z);
double EvalMultilinear(const Ensemble& model, std::span<const double> x,
                       std::span<const double> z);

// Throws InputError unless z has N entries, each in [0, 1].
void ValidatePoint(int n_features, std::span<const double> z);

}  // namespace xtree

#endif  // XTREE_TREE_H_
