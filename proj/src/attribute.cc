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

#include "xtree/attribute.h"

#include <charconv>

#include "xtree/baselines.h"
#include "xtree/error.h"
#include "xtree/oracle.h"
#include "xtree/treegrad.h"
#include "xtree/treegrad_shap.h"

namespace xtree {

namespace {

template <typename T>
T ParseNumber(std::string_view text, std::string_view what) {
  T value{};
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw InputError("cannot parse " + std::string(what) + " from '" + std::string(text) + "'");
  }
  return value;
}

bool IsShapley(const ProbabilisticSpec& spec) {
  const auto* b = std::get_if<BetaParams>(&spec);
  return b && b->alpha == 1 && b->beta == 1;
}

}  // namespace

Algorithm ParseAlgorithm(std::string_view name) {
  if (name == "grad") return Algorithm::kGrad;
  if (name == "prob") return Algorithm::kProb;
  if (name == "oracle") return Algorithm::kOracle;
  if (name == "linear-treeshap" || name == "linear-treeshap:fixed") return Algorithm::kLinearTreeShapFixed;
  if (name == "linear-treeshap:mitigated") return Algorithm::kLinearTreeShapMitigated;
  if (name == "linear-treeshap:wellcond") return Algorithm::kLinearTreeShapWellConditioned;
  if (name == "treeshap-k") return Algorithm::kTreeShapK;
  if (name == "v1") return Algorithm::kLinearTreeShapV1;
  throw InputError("unknown algorithm: " + std::string(name));
}

std::string ToString(Algorithm a) {
  switch (a) {
    case Algorithm::kGrad: return "grad";
    case Algorithm::kProb: return "prob";
    case Algorithm::kOracle: return "oracle";
    case Algorithm::kLinearTreeShapFixed: return "linear-treeshap:fixed";
    case Algorithm::kLinearTreeShapMitigated: return "linear-treeshap:mitigated";
    case Algorithm::kLinearTreeShapWellConditioned: return "linear-treeshap:wellcond";
    case Algorithm::kTreeShapK: return "treeshap-k";
    case Algorithm::kLinearTreeShapV1: return "v1";
  }
  return "unknown";
}

ProbabilisticSpec ParseMethod(std::string_view name) {
  if (name == "shapley") return BetaParams{1, 1};
  if (name == "banzhaf") return DiracMeasure{0.5};
  if (name.starts_with("wbanzhaf:")) {
    DiracMeasure d{ParseNumber<double>(name.substr(9), "nu")};
    Validate(d);
    return d;
  }
  if (name.starts_with("beta:")) {
    const std::string_view rest = name.substr(5);
    const auto colon = rest.find(':');
    if (colon == std::string_view::npos) throw InputError("beta method needs beta:ALPHA:BETA");
    BetaParams b{ParseNumber<int>(rest.substr(0, colon), "alpha"),
                 ParseNumber<int>(rest.substr(colon + 1), "beta")};
    Validate(b);
    return b;
  }
  throw InputError("unknown method: " + std::string(name));
}

std::string ToString(const ProbabilisticSpec& spec) {
  if (std::holds_alternative<OmegaWeights>(spec)) return "omega";
  if (const auto* d = std::get_if<DiracMeasure>(&spec)) return xtree::ToString(SemiValueMeasure{*d});
  return xtree::ToString(SemiValueMeasure{std::get<BetaParams>(spec)});
}

AttributionResult Attribute(const AnnotatedInstance& inst, Algorithm algo,
                            const ProbabilisticSpec& spec, const AttributeOptions& options) {
  const BaselineOptions baseline{options.degree};
  switch (algo) {
    case Algorithm::kGrad: {
      if (const auto* b = std::get_if<BetaParams>(&spec)) return BetaShapley(inst, *b, options.vectorized);
      if (const auto* d = std::get_if<DiracMeasure>(&spec)) {
        Validate(*d);
        const std::vector<double> z(inst.n_features(), d->nu);
        return {TreeGradient(inst, z).g, 0.0};
      }
      throw InputError("the grad algorithm supports semi-values only; use prob for omega weights");
    }
    case Algorithm::kProb:
      return TreeProbAttribute(inst, spec, TreeProbOptions{options.degree});
    case Algorithm::kOracle: {
      const oracle::SetValueTable table = oracle::BuildTable(inst.model(), inst.x());
      if (const auto* w = std::get_if<OmegaWeights>(&spec)) {
        return {oracle::ExactProbabilisticValue(table, w->omega), 0.0};
      }
      if (const auto* d = std::get_if<DiracMeasure>(&spec)) return {oracle::ExactSemivalue(table, *d), 0.0};
      return {oracle::ExactSemivalue(table, std::get<BetaParams>(spec)), 0.0};
    }
    default:
      break;
  }
  if (!IsShapley(spec)) {
    throw InputError("the " + ToString(algo) + " baseline computes the Shapley value only");
  }
  switch (algo) {
    case Algorithm::kLinearTreeShapFixed:
      return LinearTreeShap(inst, LinearTreeShapMode::kFixedDegree, baseline);
    case Algorithm::kLinearTreeShapMitigated:
      return LinearTreeShap(inst, LinearTreeShapMode::kVariableDegree, baseline);
    case Algorithm::kLinearTreeShapWellConditioned:
      return LinearTreeShap(inst, LinearTreeShapMode::kWellConditioned, baseline);
    case Algorithm::kTreeShapK:
      return TreeShapK(inst, baseline);
    default:
      return LinearTreeShapV1(inst, baseline);
  }
}

}  // namespace xtree
