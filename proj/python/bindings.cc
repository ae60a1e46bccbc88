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

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "xtree/attribute.h"
#include "xtree/error.h"
#include "xtree/metrics.h"
#include "xtree/oracle.h"
#include "xtree/ranker.h"
#include "xtree/synthgen.h"
#include "xtree/tree.h"
#include "xtree/treegrad.h"
#include "xtree/treegrad_shap.h"
#include "xtree/treeprob.h"

namespace py = pybind11;

namespace xtree {
namespace {

using Vector = std::vector<double>;

py::array_t<double> ToArray(const Vector& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

DegreePolicy ParseDegree(const std::string& name) {
  if (name == "min") return DegreePolicy::kMinDepthFeatures;
  if (name == "depth") return DegreePolicy::kTreeDepth;
  throw InputError("degree must be min or depth");
}

py::dict AttributionDict(const AttributionResult& r) {
  py::dict d;
  d["phi"] = ToArray(r.phi);
  d["max_imag"] = r.max_imag;
  return d;
}

py::array_t<double> AttributePhi(const Ensemble& model, const Vector& x, const std::string& algo,
                              const std::string& method, const std::string& degree) {
  AttributeOptions options;
  options.degree = ParseDegree(degree);
  const AnnotatedInstance inst(model, x);
  return ToArray(xtree::Attribute(inst, ParseAlgorithm(algo), ParseMethod(method), options).phi);
}

py::dict TreeProb(const Ensemble& model, const Vector& x, const std::string& method,
                  const std::optional<Vector>& omega, const std::string& degree) {
  const ProbabilisticSpec spec = omega ? ProbabilisticSpec{OmegaWeights{*omega}} : ParseMethod(method);
  return AttributionDict(TreeProbAttribute(model, x, spec, {ParseDegree(degree)}));
}

py::dict RankDict(const Ensemble& model, const Vector& x, const std::string& optimizer, int iterations,
                  double learning_rate, bool trace) {
  RankerConfig cfg;
  cfg.optimizer = ParseOptimizer(optimizer);
  cfg.iterations = iterations;
  cfg.learning_rate = learning_rate;
  const RankResult r = Rank(model, x, cfg, trace);
  py::dict d;
  d["zeta"] = ToArray(r.zeta);
  d["final_z"] = ToArray(r.final_z);
  d["ranking"] = InduceRanking(r.zeta);
  d["trace"] = ToArray(r.trace);
  return d;
}

py::dict CurvesDict(const Ensemble& model, const Vector& x, const std::vector<int>& pi) {
  const RankingCurves c = Curves(model, x, pi);
  py::dict d;
  d["insertion"] = ToArray(c.insertion);
  d["deletion"] = ToArray(c.deletion);
  d["ins_metric"] = c.ins_metric;
  d["del_metric"] = c.del_metric;
  d["joint_metric"] = JointMetric(c);
  return d;
}

py::tuple GenerateSample(int n_features, int depth, const std::string& shape, std::uint64_t seed, int n_trees) {
  SynthSpec spec;
  spec.n_features = n_features;
  spec.depth = depth;
  spec.shape = ParseTreeShape(shape);
  spec.seed = seed;
  spec.n_trees = n_trees;
  SynthSample s = Generate(spec);
  return py::make_tuple(std::move(s.model), ToArray(s.x));
}

}  // namespace
}  // namespace xtree

PYBIND11_MODULE(_xtree, m) {
  using namespace xtree;
  m.doc() = "Gradient-based attribution for decision-tree ensembles";

  auto error = py::register_exception<Error>(m, "Error", PyExc_ValueError);
  py::register_exception<ModelError>(m, "ModelError", error.ptr());
  py::register_exception<InputError>(m, "InputError", error.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", error.ptr());

  py::class_<Ensemble>(m, "Model")
      .def_property_readonly("n_features", &Ensemble::n_features)
      .def_property_readonly("base_value", &Ensemble::base_value)
      .def_property_readonly("n_trees", [](const Ensemble& e) { return e.trees().size(); })
      .def_property_readonly("max_depth", &Ensemble::max_depth)
      .def("predict", [](const Ensemble& e, const Vector& x) { return Predict(e, x); }, py::arg("x"))
      .def(
          "conditional",
          [](const Ensemble& e, const Vector& x, const std::vector<int>& subset) {
            return EvalConditional(e, x, FeatureSet::FromIndices(e.n_features(), subset));
          },
          py::arg("x"), py::arg("subset"), "Cover-weighted expectation with the given features fixed to x.")
      .def(
          "multilinear",
          [](const Ensemble& e, const Vector& x, const Vector& z) { return EvalMultilinear(e, x, z); },
          py::arg("x"), py::arg("z"))
      .def("to_json", [](const Ensemble& e) { return SerializeModel(e); });

  m.def("load_model", [](const std::string& path) { return LoadModel(path); }, py::arg("path"));
  m.def("parse_model", [](const std::string& text) { return ParseModel(text); }, py::arg("text"));

  m.def(
      "tree_gradient",
      [](const Ensemble& model, const Vector& x, const Vector& z) { return ToArray(TreeGradient(model, x, z).g); },
      py::arg("model"), py::arg("x"), py::arg("z"), "Gradient of the multilinear extension at z.");
  m.def(
      "banzhaf", [](const Ensemble& model, const Vector& x) { return ToArray(Banzhaf(model, x)); },
      py::arg("model"), py::arg("x"));
  m.def(
      "weighted_banzhaf",
      [](const Ensemble& model, const Vector& x, double nu) { return ToArray(WeightedBanzhaf(model, x, nu)); },
      py::arg("model"), py::arg("x"), py::arg("nu"));
  m.def(
      "beta_shapley",
      [](const Ensemble& model, const Vector& x, int alpha, int beta, bool vectorized) {
        return ToArray(BetaShapley(model, x, BetaParams{alpha, beta}, vectorized).phi);
      },
      py::arg("model"), py::arg("x"), py::arg("alpha") = 1, py::arg("beta") = 1, py::arg("vectorized") = true);
  m.def(
      "shapley", [](const Ensemble& model, const Vector& x) { return ToArray(Shapley(model, x).phi); },
      py::arg("model"), py::arg("x"));
  m.def("treeprob", &TreeProb, py::arg("model"), py::arg("x"), py::arg("method") = "shapley",
        py::arg("omega") = py::none(), py::arg("degree") = "min");
  m.def("attribute", &AttributePhi, py::arg("model"), py::arg("x"), py::arg("algo") = "grad",
        py::arg("method") = "shapley", py::arg("degree") = "min");
  m.def(
      "oracle_semivalue",
      [](const Ensemble& model, const Vector& x, const std::string& method) {
        const ProbabilisticSpec spec = ParseMethod(method);
        const auto table = oracle::BuildTable(model, x);
        if (const auto* b = std::get_if<BetaParams>(&spec)) return ToArray(oracle::ExactSemivalue(table, *b));
        if (const auto* d = std::get_if<DiracMeasure>(&spec)) return ToArray(oracle::ExactSemivalue(table, *d));
        throw InputError("oracle_semivalue takes a semi-value method");
      },
      py::arg("model"), py::arg("x"), py::arg("method") = "shapley");
  m.def("rank", &RankDict, py::arg("model"), py::arg("x"), py::arg("optimizer") = "ga", py::arg("iterations") = 100,
        py::arg("learning_rate") = 5.0, py::arg("trace") = false);
  m.def("curves", &CurvesDict, py::arg("model"), py::arg("x"), py::arg("ranking"));
  m.def("generate", &GenerateSample, py::arg("n_features") = 4, py::arg("depth") = 3, py::arg("shape") = "chain",
        py::arg("seed") = 2025, py::arg("n_trees") = 1);
}
