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

#ifndef XTREE_SRC_WALK_H_
#define XTREE_SRC_WALK_H_

#include <cstdint>
#include <vector>

#include "xtree/tree.h"

namespace xtree::internal {

// Depth-first walk over the non-root nodes of `tree` with an explicit stack,
// so arbitrarily deep trees do not exhaust the call stack.
//
//   enter(v, parent) -> bool   called on the way down; returning false skips
//                              v's subtree (leave is still called for v).
//   leave(v, parent)           called once all of v's children are left.
//
// Children are visited left before right.
template <class Enter, class Leave>
void WalkEdges(const TreeModel& tree, Enter&& enter, Leave&& leave) {
  if (tree.is_leaf(0)) return;
  struct Frame {
    NodeId node;
    std::uint8_t next;
  };
  std::vector<Frame> stack;
  stack.reserve(static_cast<std::size_t>(tree.depth()) + 1);
  stack.push_back({0, 0});
  while (!stack.empty()) {
    Frame& top = stack.back();
    if (top.next < 2) {
      const NodeId parent = top.node;
      const Node& p = tree.node(parent);
      const NodeId child = top.next++ == 0 ? p.left : p.right;
      if (enter(child, parent) && !tree.is_leaf(child)) {
        stack.push_back({child, 0});
      } else {
        leave(child, parent);
      }
    } else {
      const NodeId done = top.node;
      stack.pop_back();
      if (!stack.empty()) leave(done, stack.back().node);
    }
  }
}

// Leaf weight rho_v * c_v / c_root.
inline double LeafWeight(const TreeModel& tree, NodeId v) {
  const Node& n = tree.node(v);
  return n.value * n.cover / tree.node(0).cover;
}

}  // namespace xtree::internal

#endif  // XTREE_SRC_WALK_H_
