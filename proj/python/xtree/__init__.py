# Copyright 2026 The xtree Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Attribution and ranking for decision-tree ensembles."""

from ._xtree import (
    Error,
    InputError,
    Model,
    ModelError,
    NumericalError,
    attribute,
    banzhaf,
    beta_shapley,
    curves,
    generate,
    load_model,
    oracle_semivalue,
    parse_model,
    rank,
    shapley,
    tree_gradient,
    treeprob,
    weighted_banzhaf,
)

__all__ = [
    "Error",
    "InputError",
    "Model",
    "ModelError",
    "NumericalError",
    "attribute",
    "banzhaf",
    "beta_shapley",
    "curves",
    "generate",
    "load_model",
    "oracle_semivalue",
    "parse_model",
    "rank",
    "shapley",
    "tree_gradient",
    "treeprob",
    "weighted_banzhaf",
]
