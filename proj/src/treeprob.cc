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

#include "xtree/treeprob.h"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "poly_walk.h"
#include "xtree/error.h"

namespace xtree {

namespace {

using Complex = std::complex<double>;

constexpr int kMaxOmegaFeatures = 1024;

// Pairwise summation keeps the rounding error of long binomial sums at
// O(log n) ulps.
double PairwiseSum(std::span<const double> v) {
  if (v.size() <= 8) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return PairwiseSum(v.first(half)) + PairwiseSum(v.subspan(half));
}

}  // namespace

int PolynomialCoeffs::degree() const {
  for (int k = static_cast<int>(coeffs.size()) - 1; k >= 0; --k) {
    if (coeffs[k] != 0.0) return k;
  }
  return -1;
}

double InnerProduct(const PolynomialCoeffs& p, const PolynomialCoeffs& q) {
  const std::size_t n = std::min(p.coeffs.size(), q.coeffs.size());
  double s = 0.0;
  for (std::size_t k = 0; k < n; ++k) s += p.coeffs[k] * q.coeffs[k];
  return s;
}

PolynomialCoeffs Multiply(const PolynomialCoeffs& p, const PolynomialCoeffs& q) {
  if (p.coeffs.empty() || q.coeffs.empty()) return {};
  PolynomialCoeffs r;
  r.coeffs.assign(p.coeffs.size() + q.coeffs.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.coeffs.size(); ++i) {
    for (std::size_t j = 0; j < q.coeffs.size(); ++j) r.coeffs[i + j] += p.coeffs[i] * q.coeffs[j];
  }
  return r;
}

UnityBasis::UnityBasis(int m) {
  if (m < 1) throw InputError("unity basis needs at least one node");
  nodes_.resize(m);
  for (int k = 0; k < m; ++k) nodes_[k] = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
}

UnityEncoding UnityBasis::Encode(const PolynomialCoeffs& p) const {
  const int m = size();
  if (static_cast<int>(p.coeffs.size()) > m) {
    throw InputError("polynomial has more coefficients than the basis has nodes");
  }
  UnityEncoding e;
  e.evals.resize(m);
  for (int j = 0; j < m; ++j) {
    // Horner at chi_j.
    Complex acc = 0.0;
    for (int k = static_cast<int>(p.coeffs.size()) - 1; k >= 0; --k) {
      acc = acc * nodes_[j] + p.coeffs[k];
    }
    e.evals[j] = acc;
  }
  return e;
}

PolynomialCoeffs UnityBasis::Decode(const UnityEncoding& e, double* max_imag) const {
  const int m = size();
  PolynomialCoeffs p;
  p.coeffs.resize(m);
  double imag = 0.0;
  for (int k = 0; k < m; ++k) {
    Complex acc = 0.0;
    // conj(V)_{kj} = conj(chi_j)^k = chi_{-jk mod m}.
    for (int j = 0; j < m; ++j) acc += nodes_[(m - (static_cast<long>(j) * k) % m) % m] * e.evals[j];
    acc /= static_cast<double>(m);
    p.coeffs[k] = acc.real();
    imag = std::max(imag, std::abs(acc.imag()));
  }
  if (max_imag) *max_imag = imag;
  return p;
}

std::vector<Complex> UnityBasis::DecodeWeights(const PolynomialCoeffs& q) const {
  const int m = size();
  if (static_cast<int>(q.coeffs.size()) > m) {
    throw InputError("weight polynomial has more coefficients than the basis has nodes");
  }
  std::vector<Complex> w(m);
  for (int j = 0; j < m; ++j) {
    Complex acc = 0.0;
    for (std::size_t k = 0; k < q.coeffs.size(); ++k) {
      acc += std::conj(nodes_[(static_cast<long>(j) * k) % m]) * q.coeffs[k];
    }
    w[j] = acc / static_cast<double>(m);
  }
  return w;
}

PolynomialCoeffs QFromOmega(std::span<const double> omega, int n, int d) {
  if (static_cast<int>(omega.size()) != n) throw InputError("omega must have N entries");
  if (n > kMaxOmegaFeatures) throw InputError("explicit omega supports at most 1024 features");
  ValidateOmega(omega);
  d = std::min(d, n);
  if (d < 1) return {};
  const int extra = n - d;
  std::vector<double> binom(extra + 1);
  for (int j = 0; j <= extra; ++j) binom[j] = BinomialCoefficient(extra, j);
  PolynomialCoeffs q;
  q.coeffs.resize(d);
  std::vector<double> terms(extra + 1);
  for (int k = 0; k < d; ++k) {
    for (int j = 0; j <= extra; ++j) terms[j] = binom[j] * omega[k + j];
    q.coeffs[k] = PairwiseSum(terms);
  }
  return q;
}

PolynomialCoeffs QFromSemivalue(const SemiValueMeasure& measure, int degree) {
  if (degree < 0) return {};
  PolynomialCoeffs q;
  q.coeffs.resize(degree + 1);
  if (const auto* dirac = std::get_if<DiracMeasure>(&measure)) {
    Validate(*dirac);
    for (int k = 0; k <= degree; ++k) {
      q.coeffs[k] = std::pow(dirac->nu, k) * std::pow(1.0 - dirac->nu, degree - k);
    }
  } else {
    const auto& beta = std::get<BetaParams>(measure);
    Validate(beta);
    // B(k + beta, l - k + alpha) / B(alpha, beta) via log-Gamma.
    const double log_norm = std::lgamma(beta.alpha) + std::lgamma(beta.beta) -
                            std::lgamma(beta.alpha + beta.beta);
    for (int k = 0; k <= degree; ++k) {
      const double a = k + beta.beta;
      const double b = degree - k + beta.alpha;
      q.coeffs[k] = std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b) - log_norm);
    }
  }
  return q;
}

int PolynomialSize(const TreeModel& tree, int n_features, DegreePolicy policy) {
  return policy == DegreePolicy::kTreeDepth ? tree.depth() : std::min(tree.depth(), n_features);
}

AttributionResult TreeProbAttribute(const AnnotatedInstance& inst, const ProbabilisticSpec& spec,
                                    const TreeProbOptions& options) {
  const Ensemble& model = inst.model();
  const int n = model.n_features();
  if (const auto* w = std::get_if<OmegaWeights>(&spec)) {
    if (static_cast<int>(w->omega.size()) != n) throw InputError("omega must have N entries");
    ValidateOmega(w->omega);
    if (options.degree != DegreePolicy::kMinDepthFeatures) {
      throw InputError("explicit omega weights require the min(D, N) degree policy");
    }
  }
  AttributionResult out;
  out.phi.assign(n, 0.0);
  for (std::size_t t = 0; t < model.trees().size(); ++t) {
    const TreeModel& tree = model.trees()[t];
    const int m = PolynomialSize(tree, n, options.degree);
    if (m == 0) continue;
    PolynomialCoeffs q;
    if (const auto* w = std::get_if<OmegaWeights>(&spec)) {
      q = QFromOmega(w->omega, n, m);
    } else if (const auto* d = std::get_if<DiracMeasure>(&spec)) {
      q = QFromSemivalue(*d, m - 1);
    } else {
      q = QFromSemivalue(std::get<BetaParams>(spec), m - 1);
    }
    const UnityBasis basis(m);
    const std::vector<Complex> weights = basis.DecodeWeights(q);
    internal::PolyWalker<Complex> walker(basis.nodes(), /*pad_to_full=*/true);
    const double imag = walker.Accumulate(
        tree, inst.edges()[t],
        [&](std::span<const Complex> values, int) {
          Complex s = 0.0;
          for (int j = 0; j < m; ++j) s += values[j] * weights[j];
          return s;
        },
        out.phi);
    out.max_imag = std::max(out.max_imag, imag);
  }
  for (double p : out.phi) {
    if (!std::isfinite(p)) throw NumericalError("non-finite TreeProb value");
  }
  return out;
}

AttributionResult TreeProbAttribute(const Ensemble& model, std::span<const double> x,
                                    const ProbabilisticSpec& spec, const TreeProbOptions& options) {
  return TreeProbAttribute(AnnotatedInstance(model, x), spec, options);
}

}  // namespace xtree
