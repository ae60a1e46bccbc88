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

#ifndef XTREE_ATTRIBUTE_H_
#define XTREE_ATTRIBUTE_H_

#include <string>
#include <string_view>

#include "xtree/tree.h"
#include "xtree/treeprob.h"
#include "xtree/values.h"

namespace xtree {

enum class Algorithm {
  kGrad,
  kProb,
  kOracle,
  kLinearTreeShapFixed,
  kLinearTreeShapMitigated,
  kLinearTreeShapWellConditioned,
  kTreeShapK,
  kLinearTreeShapV1,
};

// Accepts grad, prob, oracle, linear-treeshap[:fixed|mitigated|wellcond],
// treeshap-k and v1.
Algorithm ParseAlgorithm(std::string_view name);
std::string ToString(Algorithm a);

// Accepts shapley, banzhaf, wbanzhaf:NU and beta:ALPHA:BETA. Explicit weight
// vectors are loaded by the caller.
ProbabilisticSpec ParseMethod(std::string_view name);
std::string ToString(const ProbabilisticSpec& spec);

struct AttributeOptions {
  bool vectorized = true;
  DegreePolicy degree = DegreePolicy::kMinDepthFeatures;
};

// Routes a (method, algorithm) pair to its implementation. grad handles
// semi-values, the baselines handle the Shapley value only, prob and oracle
// handle everything. Unsupported pairs throw InputError.
AttributionResult Attribute(const AnnotatedInstance& inst, Algorithm algo,
                            const ProbabilisticSpec& spec, const AttributeOptions& options = {});

}  // namespace xtree

#endif  // XTREE_ATTRIBUTE_H_
