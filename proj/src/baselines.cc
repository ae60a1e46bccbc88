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

#include "xtree/baselines.h"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "poly_walk.h"
#include "walk.h"
#include "xtree/error.h"

namespace xtree {

namespace {

using Complex = std::complex<double>;

Eigen::MatrixXd RealVandermonde(std::span<const double> nodes) {
  const int d = static_cast<int>(nodes.size());
  Eigen::MatrixXd v(d, d);
  for (int i = 0; i < d; ++i) {
    double p = 1.0;
    for (int k = 0; k < d; ++k) {
      v(i, k) = p;
      p *= nodes[i];
    }
  }
  return v;
}

// w = (V^-1)^T b so that <p, b> = sum_j p(x_j) w_j for deg(p) < d.
std::vector<double> ChebyshevWeights(std::span<const double> nodes, const std::vector<double>& b) {
  const Eigen::MatrixXd inv = RealVandermonde(nodes).partialPivLu().inverse();
  const Eigen::VectorXd w =
      inv.transpose() * Eigen::Map<const Eigen::VectorXd>(b.data(), static_cast<Eigen::Index>(b.size()));
  return {w.data(), w.data() + w.size()};
}

void CheckFinite(const AttributionResult& r, const char* what) {
  for (double p : r.phi) {
    if (!std::isfinite(p)) throw NumericalError(std::string("non-finite ") + what + " value");
  }
}

// Depth-indexed coefficient-vector traversal shared by TreeShap-K and V1.
// descend(parent_vec, child_vec, gamma, gamma_up or -1) fills the child's
// path vector; contrib(G, gamma) returns the scalar multiplied by gamma - 1.
template <typename Descend, typename Contrib>
void VectorWalk(const TreeModel& tree, const EdgeAnnotation& edges, int m, Descend&& descend,
                Contrib&& contrib, std::span<const double> root, std::span<double> phi) {
  if (tree.is_leaf(0) || m == 0) return;
  const std::size_t width = m + 1;
  const std::size_t levels = tree.depth() + 1;
  std::vector<double> path(levels * width), acc(levels * width), g(levels * width);
  std::copy(root.begin(), root.end(), path.begin());
  auto row = [width](std::vector<double>& buf, int d) { return std::span<double>(buf.data() + d * width, width); };

  internal::WalkEdges(
      tree,
      [&](NodeId v, NodeId) {
        const int d = edges.depth[v];
        const NodeId up = edges.up[v];
        descend(row(path, d - 1), row(path, d), edges.gamma[v], up == kNone ? -1.0 : edges.gamma[up]);
        std::ranges::fill(row(acc, d), 0.0);
        std::ranges::fill(row(g, d), 0.0);
        return true;
      },
      [&](NodeId v, NodeId) {
        const int d = edges.depth[v];
        auto ret = row(acc, d);
        if (tree.is_leaf(v)) {
          const double lw = internal::LeafWeight(tree, v);
          auto cur = row(path, d);
          for (std::size_t k = 0; k < width; ++k) ret[k] = lw * cur[k];
        }
        const NodeId up = edges.up[v];
        if (up != kNone) {
          auto gu = row(g, edges.depth[up]);
          for (std::size_t k = 0; k < width; ++k) gu[k] -= ret[k];
        }
        auto gv = row(g, d);
        auto parent = row(acc, d - 1);
        for (std::size_t k = 0; k < width; ++k) {
          gv[k] += ret[k];
          parent[k] += ret[k];
        }
        const double gamma = edges.gamma[v];
        phi[edges.label[v]] += (gamma - 1.0) * contrib(std::span<const double>(gv), gamma);
      });
}

}  // namespace

std::vector<double> ChebyshevNodes(int d) {
  if (d < 1) throw InputError("Chebyshev basis needs at least one node");
  if (d == 1) return {0.0};
  std::vector<double> x(d);
  for (int k = 0; k < d; ++k) x[k] = -std::cos(std::numbers::pi * k / (d - 1));
  return x;
}

std::vector<double> ShapleyKernel(int d) {
  // k! (d-k)! / (d+1)! = 1 / ((d + 1) C(d, k)).
  std::vector<double> b(d + 1);
  for (int k = 0; k <= d; ++k) b[k] = 1.0 / ((d + 1) * BinomialCoefficient(d, k));
  return b;
}

std::vector<double> OPlus(std::span<const double> xi, double gamma) {
  const int m = static_cast<int>(xi.size()) - 1;
  std::vector<double> phi(xi.size());
  for (int j = 0; j <= m; ++j) {
    phi[j] = (m - j) / (m + 1.0) * xi[j];
    if (j > 0) phi[j] += gamma * j / (m + 1.0) * xi[j - 1];
  }
  return phi;
}

std::vector<double> OMinus(std::span<const double> phi, double gamma) {
  const int m = static_cast<int>(phi.size()) - 1;
  std::vector<double> xi(phi.size(), 0.0);
  if (gamma == 0.0) {
    // The sub-diagonal vanishes, so only the diagonal rows carry xi.
    for (int j = 0; j < m; ++j) xi[j] = phi[j] * (m + 1.0) / (m - j);
    return xi;
  }
  // Back-substitution from the last row, with xi_M = 0.
  for (int j = m; j >= 1; --j) {
    const double r = (m + 1.0) * phi[j] - (m - j) * xi[j];
    xi[j - 1] = r / (gamma * j);
  }
  return xi;
}

std::vector<double> BoxPlus(std::span<const double> d, double a) {
  std::vector<double> c(d.size());
  for (std::size_t k = 0; k < d.size(); ++k) c[k] = d[k] + (k > 0 ? a * d[k - 1] : 0.0);
  return c;
}

std::vector<double> BoxMinus(std::span<const double> c, double a) {
  std::vector<double> d(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) d[k] = c[k] - (k > 0 ? a * d[k - 1] : 0.0);
  return d;
}

AttributionResult LinearTreeShap(const AnnotatedInstance& inst, LinearTreeShapMode mode,
                                 const BaselineOptions& options) {
  const Ensemble& model = inst.model();
  AttributionResult out;
  out.phi.assign(model.n_features(), 0.0);
  for (std::size_t t = 0; t < model.trees().size(); ++t) {
    const TreeModel& tree = model.trees()[t];
    const int m = PolynomialSize(tree, model.n_features(), options.degree);
    if (m == 0) continue;
    const EdgeAnnotation& edges = inst.edges()[t];
    if (mode == LinearTreeShapMode::kWellConditioned) {
      const UnityBasis basis(m);
      const std::vector<Complex> w = basis.DecodeWeights(PolynomialCoeffs{ShapleyKernel(m - 1)});
      internal::PolyWalker<Complex> walker(basis.nodes(), true);
      const double imag = walker.Accumulate(
          tree, edges,
          [&](std::span<const Complex> values, int) {
            Complex s = 0.0;
            for (int j = 0; j < m; ++j) s += values[j] * w[j];
            return s;
          },
          out.phi);
      out.max_imag = std::max(out.max_imag, imag);
      continue;
    }
    const std::vector<double> nodes = ChebyshevNodes(m);
    if (mode == LinearTreeShapMode::kFixedDegree) {
      const std::vector<double> w = ChebyshevWeights(nodes, ShapleyKernel(m - 1));
      internal::PolyWalker<double> walker(nodes, true);
      walker.Accumulate(
          tree, edges,
          [&](std::span<const double> values, int) {
            double s = 0.0;
            for (int j = 0; j < m; ++j) s += values[j] * w[j];
            return s;
          },
          out.phi);
    } else {
      // weights[n] decodes a polynomial with n coefficients from the values
      // at the first n nodes.
      std::vector<std::vector<double>> weights(m + 1);
      for (int n = 1; n <= m; ++n) {
        weights[n] = ChebyshevWeights(std::span<const double>(nodes).first(n), ShapleyKernel(n - 1));
      }
      internal::PolyWalker<double> walker(nodes, false);
      walker.Accumulate(
          tree, edges,
          [&](std::span<const double> values, int degree) {
            const auto& w = weights[degree + 1];
            double s = 0.0;
            for (int j = 0; j <= degree; ++j) s += values[j] * w[j];
            return s;
          },
          out.phi);
    }
  }
  CheckFinite(out, "Linear TreeShap");
  return out;
}

AttributionResult LinearTreeShap(const Ensemble& model, std::span<const double> x,
                                 LinearTreeShapMode mode, const BaselineOptions& options) {
  return LinearTreeShap(AnnotatedInstance(model, x), mode, options);
}

AttributionResult TreeShapK(const AnnotatedInstance& inst, const BaselineOptions& options) {
  const Ensemble& model = inst.model();
  AttributionResult out;
  out.phi.assign(model.n_features(), 0.0);
  for (std::size_t t = 0; t < model.trees().size(); ++t) {
    const TreeModel& tree = model.trees()[t];
    const int m = PolynomialSize(tree, model.n_features(), options.degree);
    const std::vector<double> root(m + 1, 1.0 / (m + 1));
    VectorWalk(
        tree, inst.edges()[t], m,
        [](std::span<const double> parent, std::span<double> child, double gamma, double gamma_up) {
          const std::vector<double> removed = OMinus(parent, gamma_up < 0.0 ? 1.0 : gamma_up);
          const std::vector<double> added = OPlus(removed, gamma);
          std::ranges::copy(added, child.begin());
        },
        [](std::span<const double> g, double gamma) {
          double s = 0.0;
          for (double v : OMinus(g, gamma)) s += v;
          return s;
        },
        root, out.phi);
  }
  CheckFinite(out, "TreeShap-K");
  return out;
}

AttributionResult TreeShapK(const Ensemble& model, std::span<const double> x,
                            const BaselineOptions& options) {
  return TreeShapK(AnnotatedInstance(model, x), options);
}

AttributionResult LinearTreeShapV1(const AnnotatedInstance& inst, const BaselineOptions& options) {
  const Ensemble& model = inst.model();
  AttributionResult out;
  out.phi.assign(model.n_features(), 0.0);
  for (std::size_t t = 0; t < model.trees().size(); ++t) {
    const TreeModel& tree = model.trees()[t];
    const int m = PolynomialSize(tree, model.n_features(), options.degree);
    std::vector<double> root(m + 1, 0.0);
    root[0] = 1.0;
    VectorWalk(
        tree, inst.edges()[t], m,
        [](std::span<const double> parent, std::span<double> child, double gamma, double gamma_up) {
          std::vector<double> c = gamma_up < 0.0 ? std::vector<double>(parent.begin(), parent.end())
                                                 : BoxMinus(parent, gamma_up - 1.0);
          std::ranges::copy(BoxPlus(c, gamma - 1.0), child.begin());
        },
        [](std::span<const double> g, double gamma) {
          const std::vector<double> d = BoxMinus(g, gamma - 1.0);
          double s = 0.0;
          for (std::size_t k = 0; k < d.size(); ++k) s += d[k] / (k + 1.0);
          return s;
        },
        root, out.phi);
  }
  CheckFinite(out, "Linear TreeShap V1");
  return out;
}

AttributionResult LinearTreeShapV1(const Ensemble& model, std::span<const double> x,
                                   const BaselineOptions& options) {
  return LinearTreeShapV1(AnnotatedInstance(model, x), options);
}

double ConditionEstimate(ConditionOperator op, int d, double gamma) {
  if (d < 1) throw InputError("condition estimate needs d >= 1");
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(d, d);
  switch (op) {
    case ConditionOperator::kChebyshevV:
      a = RealVandermonde(ChebyshevNodes(d)).cast<Complex>();
      break;
    case ConditionOperator::kUnityV:
      for (int i = 0; i < d; ++i) {
        for (int k = 0; k < d; ++k) {
          a(i, k) = std::polar(1.0, 2.0 * std::numbers::pi * ((static_cast<long>(i) * k) % d) / d);
        }
      }
      break;
    case ConditionOperator::kOPlusSolve:
      for (int j = 0; j < d; ++j) {
        a(j, j) = (d - j) / (d + 1.0);
        if (j > 0) a(j, j - 1) = gamma * j / (d + 1.0);
      }
      break;
    case ConditionOperator::kBoxPlusSolve:
      for (int j = 0; j < d; ++j) {
        a(j, j) = 1.0;
        if (j > 0) a(j, j - 1) = gamma - 1.0;
      }
      break;
  }

  constexpr int kMaxIterations = 10000;
  // Stop once successive estimates agree to 1e-6, well inside the 1e-3
  // accuracy the estimate is used at.
  constexpr double kTolerance = 1e-6;
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const Eigen::MatrixXcd ah = a.adjoint();
  const Eigen::PartialPivLU<Eigen::MatrixXcd> lu_h(ah);

  // Largest eigenvalue of the Hermitian operator x -> apply(x), by power
  // iteration from a fixed, generic start.
  auto dominant = [&](auto&& apply) {
    Eigen::VectorXcd x(d);
    for (int i = 0; i < d; ++i) x(i) = Complex(1.0 + 0.1 * i, 0.05 * (i % 3));
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
      Eigen::VectorXcd y = apply(x);
      const double next = y.norm();
      if (!std::isfinite(next)) throw NumericalError("condition estimate overflowed");
      if (next == 0.0) return 0.0;
      x = y / next;
      if (it > 0 && std::abs(next - lambda) <= kTolerance * next) return next;
      lambda = next;
    }
    throw NumericalError("condition estimate did not converge");
  };
  const double sigma_max2 = dominant([&](const Eigen::VectorXcd& x) { return Eigen::VectorXcd(ah * (a * x)); });
  const double inv_sigma_min2 =
      dominant([&](const Eigen::VectorXcd& x) { return Eigen::VectorXcd(lu.solve(lu_h.solve(x))); });
  return std::sqrt(sigma_max2 * inv_sigma_min2);
}

}  // namespace xtree
