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

#ifndef XTREE_SRC_POLY_WALK_H_
#define XTREE_SRC_POLY_WALK_H_

#include <algorithm>
#include <complex>
#include <span>
#include <vector>

#include "walk.h"
#include "xtree/tree.h"

namespace xtree::internal {

inline double RealPart(double v) { return v; }
inline double RealPart(const std::complex<double>& v) { return v.real(); }
inline double ImagPart(double) { return 0.0; }
inline double ImagPart(const std::complex<double>& v) { return v.imag(); }

// Polynomials in y are carried as their values at a fixed set of M nodes.
// Multiplying or dividing by (1 + gamma*y) is then pointwise, and the
// decoder turns values plus a degree into the scalar inner product that the
// attribution needs.
//
// With pad_to_full set, every leaf polynomial is lifted to degree M by
// (1 + y)^(M - deg). Otherwise degrees are tracked per accumulator and the
// lower-degree operand is lifted when two are added.
template <typename Scalar>
class PolyWalker {
 public:
  PolyWalker(std::vector<Scalar> nodes, bool pad_to_full)
      : nodes_(std::move(nodes)), m_(static_cast<int>(nodes_.size())), pad_(pad_to_full) {
    lift_.assign(static_cast<std::size_t>(m_ + 1) * m_, Scalar(1));
    for (int k = 1; k <= m_; ++k) {
      for (int j = 0; j < m_; ++j) lift_[k * m_ + j] = lift_[(k - 1) * m_ + j] * (Scalar(1) + nodes_[j]);
    }
  }

  int size() const { return m_; }

  // Adds (gamma - 1) * decode(G[v] / (1 + gamma*y), degree) into phi[label]
  // for every edge, where decode returns <p, q_degree> from the node values
  // of p. Returns the largest discarded imaginary part.
  template <typename DecodeFn>
  double Accumulate(const TreeModel& tree, const EdgeAnnotation& edges, DecodeFn&& decode,
                    std::span<double> phi) {
    if (tree.is_leaf(0) || m_ == 0) return 0.0;
    const std::size_t levels = tree.depth() + 1;
    p_.assign(levels * m_, Scalar(0));
    acc_.assign(levels * m_, Scalar(0));
    g_.assign(levels * m_, Scalar(0));
    labels_.assign(levels, 0);
    acc_deg_.assign(levels, -1);
    g_deg_.assign(levels, -1);
    quot_.resize(m_);
    ret_.resize(m_);
    std::fill_n(p_.begin(), m_, Scalar(1));
    double max_imag = 0.0;

    WalkEdges(
        tree,
        [&](NodeId v, NodeId) {
          const int d = edges.depth[v];
          const double g = edges.gamma[v];
          const NodeId up = edges.up[v];
          const Scalar* prev = Row(p_, d - 1);
          Scalar* cur = Row(p_, d);
          if (up != kNone) {
            const double gu = edges.gamma[up];
            for (int j = 0; j < m_; ++j) {
              cur[j] = prev[j] / (Scalar(1) + gu * nodes_[j]) * (Scalar(1) + g * nodes_[j]);
            }
            labels_[d] = labels_[d - 1];
          } else {
            for (int j = 0; j < m_; ++j) cur[j] = prev[j] * (Scalar(1) + g * nodes_[j]);
            labels_[d] = labels_[d - 1] + 1;
          }
          std::fill_n(Row(acc_, d), m_, Scalar(0));
          std::fill_n(Row(g_, d), m_, Scalar(0));
          acc_deg_[d] = -1;
          g_deg_[d] = -1;
          return true;
        },
        [&](NodeId v, NodeId) {
          const int d = edges.depth[v];
          int ret_deg;
          if (tree.is_leaf(v)) {
            const double lw = LeafWeight(tree, v);
            const Scalar* cur = Row(p_, d);
            ret_deg = labels_[d];
            const Scalar* lift = pad_ ? Row(lift_, m_ - ret_deg) : Row(lift_, 0);
            for (int j = 0; j < m_; ++j) ret_[j] = lw * cur[j] * lift[j];
            if (pad_) ret_deg = m_;
          } else {
            std::copy_n(Row(acc_, d), m_, ret_.begin());
            ret_deg = acc_deg_[d];
          }
          const NodeId up = edges.up[v];
          if (up != kNone) {
            const int du = edges.depth[up];
            AddInto(Row(g_, du), g_deg_[du], ret_.data(), ret_deg, -1.0);
          }
          AddInto(Row(g_, d), g_deg_[d], ret_.data(), ret_deg, 1.0);
          AddInto(Row(acc_, d - 1), acc_deg_[d - 1], ret_.data(), ret_deg, 1.0);

          const double g = edges.gamma[v];
          const Scalar* gv = Row(g_, d);
          for (int j = 0; j < m_; ++j) quot_[j] = gv[j] / (Scalar(1) + g * nodes_[j]);
          const Scalar value = decode(std::span<const Scalar>(quot_), g_deg_[d] - 1);
          max_imag = std::max(max_imag, std::abs((g - 1.0) * ImagPart(value)));
          phi[edges.label[v]] += (g - 1.0) * RealPart(value);
        });
    return max_imag;
  }

 private:
  Scalar* Row(std::vector<Scalar>& buf, int r) { return buf.data() + static_cast<std::size_t>(r) * m_; }

  // dst (degree dst_deg, -1 when empty) += sign * src (degree src_deg),
  // lifting the lower-degree side by powers of (1 + y).
  void AddInto(Scalar* dst, int& dst_deg, const Scalar* src, int src_deg, double sign) {
    if (dst_deg < 0) {
      for (int j = 0; j < m_; ++j) dst[j] = sign * src[j];
      dst_deg = src_deg;
      return;
    }
    if (src_deg > dst_deg) {
      const Scalar* lift = Row(lift_, src_deg - dst_deg);
      for (int j = 0; j < m_; ++j) dst[j] = dst[j] * lift[j] + sign * src[j];
      dst_deg = src_deg;
    } else {
      const Scalar* lift = Row(lift_, dst_deg - src_deg);
      for (int j = 0; j < m_; ++j) dst[j] += sign * src[j] * lift[j];
    }
  }

  std::vector<Scalar> nodes_;
  int m_;
  bool pad_;
  std::vector<Scalar> lift_;  // Row k holds (1 + node)^k.
  std::vector<Scalar> p_, acc_, g_, quot_, ret_;
  std::vector<int> labels_, acc_deg_, g_deg_;
};

}  // namespace xtree::internal

#endif  // XTREE_SRC_POLY_WALK_H_
