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

#include "xtree/oracle.h"

#include <bit>
#include <cmath>
#include <functional>
#include <string>

#include <boost/multiprecision/cpp_int.hpp>

#include "xtree/error.h"

namespace xtree::oracle {

namespace {

using Rational = boost::multiprecision::cpp_rational;

void CheckCap(int n, int cap) {
  if (n > cap) {
    throw InputError("N over oracle cap: " + std::to_string(n) + " > " + std::to_string(cap));
  }
}

Rational Factorial(int n) {
  Rational f = 1;
  for (int j = 2; j <= n; ++j) f *= j;
  return f;
}

// f_x(S) by the recursive definition, exactly.
Rational ConditionalExact(const TreeModel& tree, std::span<const double> x, std::uint64_t mask) {
  std::function<Rational(NodeId)> rec = [&](NodeId v) -> Rational {
    const Node& n = tree.node(v);
    if (n.is_leaf()) return Rational(n.value);
    if ((mask >> n.feature) & 1U) return rec(x[n.feature] <= n.threshold ? n.left : n.right);
    const Rational c(n.cover);
    return Rational(tree.node(n.left).cover) / c * rec(n.left) +
           Rational(tree.node(n.right).cover) / c * rec(n.right);
  };
  return rec(0);
}

}  // namespace

SetValueTable BuildTable(const Ensemble& model, std::span<const double> x) {
  const int n = model.n_features();
  CheckCap(n, kMaxFeatures);
  ValidateInstance(model, x);
  SetValueTable table{n, std::vector<double>(std::size_t{1} << n)};
  for (std::uint64_t mask = 0; mask < table.values.size(); ++mask) {
    table.values[mask] = EvalConditional(model, x, FeatureSet::FromMask(n, mask));
  }
  return table;
}

std::vector<double> ExactProbabilisticValue(const SetValueTable& table,
                                            std::span<const double> omega) {
  const int n = table.n;
  if (static_cast<int>(omega.size()) != n) throw InputError("omega length differs from N");
  ValidateOmega(omega);
  std::vector<double> phi(n);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    long double sum = 0.0L;
    for (std::uint64_t mask = 0; mask < table.values.size(); ++mask) {
      if (mask & bit) continue;
      const int s = std::popcount(mask);
      sum += static_cast<long double>(omega[s]) *
             (static_cast<long double>(table.at(mask | bit)) - table.at(mask));
    }
    phi[i] = static_cast<double>(sum);
  }
  return phi;
}

std::vector<double> ExactGradient(const SetValueTable& table, std::span<const double> z) {
  const int n = table.n;
  ValidatePoint(n, z);
  std::vector<double> g(n);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    long double sum = 0.0L;
    for (std::uint64_t mask = 0; mask < table.values.size(); ++mask) {
      if (mask & bit) continue;
      long double w = 1.0L;
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        w *= ((mask >> j) & 1U) ? static_cast<long double>(z[j]) : 1.0L - z[j];
      }
      sum += w * (static_cast<long double>(table.at(mask | bit)) - table.at(mask));
    }
    g[i] = static_cast<double>(sum);
  }
  return g;
}

std::vector<double> SemivalueOmega(const SemiValueMeasure& measure, int n) {
  std::vector<double> omega(n);
  if (const auto* d = std::get_if<DiracMeasure>(&measure)) {
    Validate(*d);
    for (int k = 1; k <= n; ++k) {
      omega[k - 1] = static_cast<double>(std::pow(static_cast<long double>(d->nu), k - 1) *
                                         std::pow(1.0L - d->nu, n - k));
    }
    return omega;
  }
  const auto& b = std::get<BetaParams>(measure);
  Validate(b);
  // int t^(k-1) (1-t)^(n-k) t^(beta-1) (1-t)^(alpha-1) dt / B(alpha, beta)
  //   = B(k + beta - 1, n - k + alpha) / B(alpha, beta).
  auto beta_fn = [](int p, int q) { return Factorial(p - 1) * Factorial(q - 1) / Factorial(p + q - 1); };
  const Rational norm = beta_fn(b.alpha, b.beta);
  for (int k = 1; k <= n; ++k) {
    omega[k - 1] = static_cast<double>(beta_fn(k + b.beta - 1, n - k + b.alpha) / norm);
  }
  return omega;
}

std::vector<double> ExactSemivalue(const SetValueTable& table, const SemiValueMeasure& measure) {
  return ExactProbabilisticValue(table, SemivalueOmega(measure, table.n));
}

std::vector<double> ExactShapleyRational(const Ensemble& model, std::span<const double> x) {
  const int n = model.n_features();
  CheckCap(n, 10);
  ValidateInstance(model, x);
  const std::uint64_t count = std::uint64_t{1} << n;
  std::vector<Rational> f(count);
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    Rational v(model.base_value());
    for (const TreeModel& tree : model.trees()) v += ConditionalExact(tree, x, mask);
    f[mask] = v;
  }
  std::vector<Rational> weight(n);
  for (int s = 0; s < n; ++s) weight[s] = Factorial(s) * Factorial(n - 1 - s) / Factorial(n);
  std::vector<double> phi(n);
  for (int i = 0; i < n; ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    Rational sum = 0;
    for (std::uint64_t mask = 0; mask < count; ++mask) {
      if (mask & bit) continue;
      sum += weight[std::popcount(mask)] * (f[mask | bit] - f[mask]);
    }
    phi[i] = static_cast<double>(sum);
  }
  return phi;
}

}  // namespace xtree::oracle
