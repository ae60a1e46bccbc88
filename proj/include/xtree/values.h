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

#ifndef XTREE_VALUES_H_
#define XTREE_VALUES_H_

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace xtree {

// Beta(alpha, beta) semi-value with integral parameters. The measure has
// density proportional to t^(beta-1) (1-t)^(alpha-1); (1, 1) is Shapley.
struct BetaParams {
  int alpha = 1;
  int beta = 1;
};

// Point mass at nu: the weighted Banzhaf value. nu = 0.5 is Banzhaf.
struct DiracMeasure {
  double nu = 0.5;
};

using SemiValueMeasure = std::variant<DiracMeasure, BetaParams>;

// Explicit coalition-size weights omega_1..omega_N of a probabilistic value.
struct OmegaWeights {
  std::vector<double> omega;
};

using ProbabilisticSpec = std::variant<OmegaWeights, DiracMeasure, BetaParams>;

// Per-feature scores plus diagnostics.
struct AttributionResult {
  std::vector<double> phi;
  // Largest |imaginary part| discarded when decoding complex encodings.
  double max_imag = 0.0;
};

void Validate(const BetaParams& p);
void Validate(const DiracMeasure& d);
// Checks omega >= 0 and sum_k C(N-1, k-1) omega_k = 1 within 1e-10.
void ValidateOmega(std::span<const double> omega);

// B(a, b) for positive integers: exact factorials while a + b - 1 <= 20,
// log-Gamma beyond.
double BetaFunction(int a, int b);
double BinomialCoefficient(int n, int k);

std::vector<double> ShapleyOmega(int n);
std::vector<double> BanzhafOmega(int n);

std::string ToString(const SemiValueMeasure& m);

}  // namespace xtree

#endif  // XTREE_VALUES_H_
