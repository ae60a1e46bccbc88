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

#include "xtree/values.h"

#include <cmath>
#include <sstream>

#include "xtree/error.h"

namespace xtree {

void Validate(const BetaParams& p) {
  if (p.alpha < 1 || p.beta < 1) {
    throw InputError("Beta parameters must be positive integers");
  }
}

void Validate(const DiracMeasure& d) {
  if (!(d.nu >= 0.0 && d.nu <= 1.0)) throw InputError("Dirac parameter outside [0, 1]");
}

double BinomialCoefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double c = 1.0;
  for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
  return c;
}

void ValidateOmega(std::span<const double> omega) {
  const int n = static_cast<int>(omega.size());
  if (n == 0) throw InputError("omega is empty");
  double total = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double w = omega[k - 1];
    if (!std::isfinite(w) || w < 0.0) throw InputError("omega entries must be finite and non-negative");
    total += BinomialCoefficient(n - 1, k - 1) * w;
  }
  if (std::abs(total - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "omega normalization violated: sum C(N-1,k-1) omega_k = " << total;
    throw InputError(msg.str());
  }
}

double BetaFunction(int a, int b) {
  if (a < 1 || b < 1) throw InputError("Beta function needs positive integers");
  if (a + b - 1 <= 20) {
    auto fact = [](int n) {
      double f = 1.0;
      for (int j = 2; j <= n; ++j) f *= j;
      return f;
    };
    return fact(a - 1) * fact(b - 1) / fact(a + b - 1);
  }
  return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

std::vector<double> ShapleyOmega(int n) {
  // omega_k = (k-1)! (n-k)! / n! = 1 / (n * C(n-1, k-1)).
  std::vector<double> w(n);
  for (int k = 1; k <= n; ++k) w[k - 1] = 1.0 / (n * BinomialCoefficient(n - 1, k - 1));
  return w;
}

std::vector<double> BanzhafOmega(int n) { return std::vector<double>(n, std::ldexp(1.0, 1 - n)); }

std::string ToString(const SemiValueMeasure& m) {
  if (const auto* d = std::get_if<DiracMeasure>(&m)) {
    if (d->nu == 0.5) return "banzhaf";
    std::ostringstream out;
    out << "wbanzhaf:" << d->nu;
    return out.str();
  }
  const auto& b = std::get<BetaParams>(m);
  if (b.alpha == 1 && b.beta == 1) return "shapley";
  return "beta:" + std::to_string(b.alpha) + ":" + std::to_string(b.beta);
}

}  // namespace xtree
