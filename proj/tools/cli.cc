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

#include "cli.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <sstream>
#include <thread>

#include "xtree/attribute.h"
#include "xtree/error.h"
#include "xtree/metrics.h"
#include "xtree/ranker.h"
#include "xtree/stability.h"
#include "xtree/synthgen.h"
#include "xtree/tree.h"
#include "xtree/treegrad.h"
#include "xtree/treegrad_shap.h"
#include "xtree/treeprob.h"

#ifndef XTREE_VERSION
#define XTREE_VERSION "0.0.0"
#endif

namespace xtree::cli {

namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

// A flag whose value is syntactically fine for CLI11 but meaningless to us.
class BadFlag : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class PhaseTimer {
 public:
  void Start(std::string phase) {
    phase_ = std::move(phase);
    start_ = Clock::now();
  }
  void Stop() { timings_[phase_] = std::chrono::duration<double>(Clock::now() - start_).count(); }
  json ToJson() const { return json(timings_); }

 private:
  std::string phase_;
  Clock::time_point start_;
  std::map<std::string, double> timings_;
};

json Manifest(const CLI::App& sub, const PhaseTimer& timer) {
  json flags = json::object();
  std::optional<std::string> seed;
  for (const CLI::Option* opt : sub.get_options()) {
    const std::string key = opt->get_single_name();
    if (key.empty() || key == "help") continue;
    std::string value;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      for (std::size_t i = 0; i < results.size(); ++i) value += (i ? " " : "") + results[i];
      if (opt->get_expected_min() == 0) value = "true";
    } else {
      value = opt->get_default_str();
    }
    if (key == "seed") seed = value;
    flags[key] = value;
  }
  json m = {{"command", sub.get_name()}, {"flags", flags}, {"timings", timer.ToJson()},
            {"version", XTREE_VERSION}};
  m["seed"] = seed ? json(std::stoull(*seed)) : json(nullptr);
  return m;
}

std::string CsvManifestLine(const json& manifest) { return "# manifest: " + manifest.dump() + "\n"; }

void WriteOutput(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InputError("cannot open output file " + path);
  f << text;
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<double> ReadJsonVector(const std::string& path) {
  json doc;
  try {
    doc = json::parse(ReadFile(path));
  } catch (const json::exception& e) {
    throw InputError("malformed JSON in " + path + ": " + e.what());
  }
  if (!doc.is_array()) throw InputError(path + " must hold a JSON array of numbers");
  std::vector<double> v;
  for (const auto& e : doc) {
    if (!e.is_number()) throw InputError(path + " must hold a JSON array of numbers");
    v.push_back(e.get<double>());
  }
  return v;
}

std::vector<std::vector<double>> ReadCsvRows(const std::string& path, bool skip_header) {
  std::istringstream in(ReadFile(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line_no == 1 && skip_header) continue;
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) {
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      while (end && (*end == ' ' || *end == '\t')) ++end;
      if (end == cell.c_str() || (end && *end != '\0')) {
        throw InputError("malformed CSV value '" + cell + "' on line " + std::to_string(line_no) +
                         " of " + path);
      }
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

struct InstanceFlags {
  std::string instance;
  std::string instances;
  bool skip_header = false;
};

void AddInstanceFlags(CLI::App* sub, InstanceFlags& f) {
  auto* one = sub->add_option("--instance", f.instance, "JSON array with one instance");
  auto* many = sub->add_option("--instances", f.instances, "CSV file with one instance per row");
  one->excludes(many);
  sub->add_flag("--skip-header", f.skip_header, "Ignore the first CSV line");
}

std::vector<std::vector<double>> LoadInstances(const InstanceFlags& f, const Ensemble& model) {
  std::vector<std::vector<double>> rows;
  if (!f.instance.empty()) {
    rows.push_back(ReadJsonVector(f.instance));
  } else if (!f.instances.empty()) {
    rows = ReadCsvRows(f.instances, f.skip_header);
  } else {
    throw BadFlag("one of --instance or --instances is required");
  }
  if (rows.empty()) throw InputError("no instances supplied");
  for (const auto& r : rows) ValidateInstance(model, r);
  return rows;
}

json UnusedFeatures(const Ensemble& model) {
  json out = json::array();
  const std::vector<bool> used = model.used_features();
  for (std::size_t i = 0; i < used.size(); ++i) {
    if (!used[i]) out.push_back(i);
  }
  return out;
}

void RequireFinite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalError(std::string("non-finite value in ") + what);
  }
}

std::vector<int> ParseIntList(const std::string& text, const char* what) {
  std::vector<int> out;
  auto to_int = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const int v = std::stoi(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw BadFlag(std::string("cannot parse ") + what + " from '" + text + "'");
    }
  };
  if (text.find(':') != std::string::npos) {
    std::vector<int> parts;
    std::stringstream ss(text);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(to_int(p));
    if (parts.size() != 3 || parts[2] <= 0 || parts[1] < parts[0]) {
      throw BadFlag(std::string(what) + " range must be START:STOP:STEP");
    }
    for (int v = parts[0]; v <= parts[1]; v += parts[2]) out.push_back(v);
    return out;
  }
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) out.push_back(to_int(p));
  if (out.empty()) throw BadFlag(std::string("empty ") + what + " list");
  return out;
}

std::vector<std::string> SplitList(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream ss(text);
  std::string p;
  while (std::getline(ss, p, ',')) {
    if (!p.empty()) out.push_back(p);
  }
  return out;
}

DegreePolicy ParseDegree(const std::string& s) {
  if (s == "min") return DegreePolicy::kMinDepthFeatures;
  if (s == "depth") return DegreePolicy::kTreeDepth;
  throw BadFlag("--degree must be min or depth");
}

// --- explain ----------------------------------------------------------------

struct ExplainFlags {
  std::string model;
  InstanceFlags inst;
  std::string algo = "grad";
  std::string method = "shapley";
  bool vectorized = false;
  std::string degree = "min";
  int threads = 0;
  std::string out;
};

int RunExplain(const CLI::App& sub, const ExplainFlags& f, std::ostream& out) {
  Algorithm algo;
  ProbabilisticSpec spec;
  DegreePolicy degree;
  try {
    algo = ParseAlgorithm(f.algo);
    degree = ParseDegree(f.degree);
    if (!f.method.starts_with("omega:")) spec = ParseMethod(f.method);
  } catch (const InputError& e) {
    throw BadFlag(e.what());
  }
  PhaseTimer timer;
  timer.Start("load");
  const Ensemble model = LoadModel(f.model);
  const auto rows = LoadInstances(f.inst, model);
  if (f.method.starts_with("omega:")) spec = OmegaWeights{ReadJsonVector(f.method.substr(6))};
  timer.Stop();

  timer.Start("compute");
  std::vector<AttributionResult> results(rows.size());
  AttributeOptions options;
  options.vectorized = f.vectorized;
  options.degree = degree;
  ParallelFor(rows.size(), ResolveThreads(f.threads), [&](std::size_t i) {
    const AnnotatedInstance ai(model, rows[i]);
    results[i] = Attribute(ai, algo, spec, options);
  });
  for (const auto& r : results) RequireFinite(r.phi, "attribution");
  timer.Stop();

  json doc;
  doc["manifest"] = Manifest(sub, timer);
  doc["algo"] = ToString(algo);
  doc["method"] = f.method.starts_with("omega:") ? std::string("omega") : ToString(spec);
  doc["n_features"] = model.n_features();
  doc["unused_features"] = UnusedFeatures(model);
  json arr = json::array();
  for (std::size_t i = 0; i < rows.size(); ++i) {
    arr.push_back({{"phi", results[i].phi},
                   {"max_imag", results[i].max_imag},
                   {"prediction", Predict(model, rows[i])},
                   {"empty_set_value", EvalConditional(model, rows[i], FeatureSet(model.n_features()))}});
  }
  doc["results"] = arr;
  WriteOutput(f.out, doc.dump(2) + "\n", out);
  return kExitOk;
}

// --- rank -------------------------------------------------------------------

struct RankFlags {
  std::string model;
  std::string instance;
  std::string optimizer = "ga";
  int iters = 100;
  std::string lr = "5";
  std::string trace;
  std::string out;
};

int RunRank(const CLI::App& sub, const RankFlags& f, std::ostream& out) {
  RankerConfig cfg;
  bool auto_lr = false;
  try {
    cfg.optimizer = ParseOptimizer(f.optimizer);
    cfg.iterations = f.iters;
    if (f.lr == "auto") {
      auto_lr = true;
    } else {
      std::size_t pos = 0;
      cfg.learning_rate = std::stod(f.lr, &pos);
      if (pos != f.lr.size()) throw InputError("bad --lr");
    }
    Validate(cfg);
  } catch (const std::exception& e) {
    throw BadFlag(std::string("invalid ranker flags: ") + e.what());
  }
  PhaseTimer timer;
  timer.Start("load");
  const Ensemble model = LoadModel(f.model);
  const std::vector<double> x = ReadJsonVector(f.instance);
  ValidateInstance(model, x);
  timer.Stop();

  timer.Start("compute");
  const AnnotatedInstance inst(model, x);
  if (auto_lr) cfg.learning_rate = SelectLearningRate(inst, cfg);
  const RankResult r = Rank(inst, cfg, !f.trace.empty());
  RequireFinite(r.zeta, "ranker scores");
  timer.Stop();

  const json manifest = Manifest(sub, timer);
  json doc = {{"zeta", r.zeta},
              {"ranking", InduceRanking(r.zeta)},
              {"final_z", r.final_z},
              {"learning_rate", cfg.learning_rate},
              {"unused_features", UnusedFeatures(model)},
              {"manifest", manifest}};
  if (!f.trace.empty()) {
    std::ostringstream csv;
    csv << CsvManifestLine(manifest) << "t,objective\n";
    csv.precision(17);
    for (std::size_t t = 0; t < r.trace.size(); ++t) csv << t << "," << r.trace[t] << "\n";
    WriteOutput(f.trace, csv.str(), out);
  }
  WriteOutput(f.out, doc.dump(2) + "\n", out);
  return kExitOk;
}

// --- metrics ----------------------------------------------------------------

struct MetricsFlags {
  std::string model;
  InstanceFlags inst;
  std::string methods = "shapley,banzhaf,ranker:ga:100:5";
  std::string out;
  std::string summary;
  std::uint64_t seed = 2025;
  int sample = 0;
  int threads = 0;
};

// A named way of turning an instance into feature scores.
struct ScoreMethod {
  std::string name;
  std::function<std::vector<double>(const AnnotatedInstance&)> scores;
};

ScoreMethod ParseScoreMethod(const std::string& name) {
  if (name.starts_with("ranker:")) {
    std::vector<std::string> parts;
    std::stringstream ss(name);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    RankerConfig cfg;
    try {
      if (parts.size() != 4) throw InputError("expected ranker:OPT:T:LR");
      cfg.optimizer = ParseOptimizer(parts[1]);
      cfg.iterations = std::stoi(parts[2]);
      cfg.learning_rate = std::stod(parts[3]);
      Validate(cfg);
    } catch (const std::exception& e) {
      throw BadFlag("invalid method '" + name + "': " + e.what());
    }
    return {name, [cfg](const AnnotatedInstance& inst) { return Rank(inst, cfg).zeta; }};
  }
  ProbabilisticSpec spec;
  try {
    spec = ParseMethod(name);
  } catch (const InputError& e) {
    throw BadFlag(e.what());
  }
  SemiValueMeasure m = std::holds_alternative<BetaParams>(spec)
                           ? SemiValueMeasure{std::get<BetaParams>(spec)}
                           : SemiValueMeasure{std::get<DiracMeasure>(spec)};
  return {name, [m](const AnnotatedInstance& inst) { return SemivalueScores(inst, m); }};
}

int RunMetrics(const CLI::App& sub, const MetricsFlags& f, std::ostream& out) {
  std::vector<ScoreMethod> methods;
  for (const auto& name : SplitList(f.methods)) methods.push_back(ParseScoreMethod(name));
  if (methods.empty()) throw BadFlag("--methods is empty");
  if (f.sample < 0) throw BadFlag("--sample must be non-negative");
  const std::vector<SemiValueMeasure> candidates = DefaultBetaCandidates();

  PhaseTimer timer;
  timer.Start("load");
  const Ensemble model = LoadModel(f.model);
  auto rows = LoadInstances(f.inst, model);
  if (f.sample > 0 && static_cast<std::size_t>(f.sample) < rows.size()) {
    // Seeded partial Fisher-Yates on row indices, kept in file order.
    std::mt19937_64 rng(f.seed);
    std::vector<std::size_t> idx(rows.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = 0; i < static_cast<std::size_t>(f.sample); ++i) {
      const std::size_t j = i + static_cast<std::size_t>((rng() >> 11) * 0x1.0p-53 * (idx.size() - i));
      std::swap(idx[i], idx[j]);
    }
    idx.resize(f.sample);
    std::sort(idx.begin(), idx.end());
    std::vector<std::vector<double>> picked;
    for (std::size_t i : idx) picked.push_back(std::move(rows[i]));
    rows = std::move(picked);
  }
  timer.Stop();

  timer.Start("compute");
  const std::size_t n_rows = rows.size();
  const std::size_t n_series = methods.size() + candidates.size();
  // curves[i][s] for instance i and series s (methods, then candidates).
  std::vector<std::vector<RankingCurves>> curves(n_rows, std::vector<RankingCurves>(n_series));
  ParallelFor(n_rows, ResolveThreads(f.threads), [&](std::size_t i) {
    const AnnotatedInstance inst(model, rows[i]);
    for (std::size_t s = 0; s < n_series; ++s) {
      const std::vector<double> scores = s < methods.size()
                                             ? methods[s].scores(inst)
                                             : SemivalueScores(inst, candidates[s - methods.size()]);
      RequireFinite(scores, "feature scores");
      curves[i][s] = Curves(model, rows[i], InduceRanking(scores));
    }
  });

  const int n = model.n_features();
  struct Mean {
    std::vector<double> insertion, deletion;
    double ins = 0.0, del = 0.0;
  };
  std::vector<Mean> mean(n_series, Mean{std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)});
  for (std::size_t s = 0; s < n_series; ++s) {
    for (std::size_t i = 0; i < n_rows; ++i) {
      for (int k = 0; k < n; ++k) {
        mean[s].insertion[k] += curves[i][s].insertion[k] / n_rows;
        mean[s].deletion[k] += curves[i][s].deletion[k] / n_rows;
      }
      mean[s].ins += curves[i][s].ins_metric / n_rows;
      mean[s].del += curves[i][s].del_metric / n_rows;
    }
  }
  std::vector<double> ins_scores, del_scores, joint_scores;
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    const Mean& m = mean[methods.size() + c];
    ins_scores.push_back(m.ins);
    del_scores.push_back(m.del);
    joint_scores.push_back(m.ins - m.del);
  }
  const std::pair<std::string, std::size_t> winners[] = {
      {"Beta-Insertion", PickWinner(ins_scores, SelectionCriterion::kInsertion)},
      {"Beta-Deletion", PickWinner(del_scores, SelectionCriterion::kDeletion)},
      {"Beta-Joint", PickWinner(joint_scores, SelectionCriterion::kJoint)},
  };
  timer.Stop();

  const json manifest = Manifest(sub, timer);
  std::ostringstream csv;
  csv.precision(17);
  csv << CsvManifestLine(manifest) << "method,k,insertion,deletion\n";
  auto emit = [&](const std::string& name, const Mean& m) {
    for (int k = 0; k < n; ++k) csv << name << "," << k + 1 << "," << m.insertion[k] << "," << m.deletion[k] << "\n";
  };
  for (std::size_t s = 0; s < methods.size(); ++s) emit(methods[s].name, mean[s]);
  for (const auto& [label, idx] : winners) emit(label, mean[methods.size() + idx]);
  WriteOutput(f.out, csv.str(), out);

  if (!f.summary.empty()) {
    json summary;
    summary["manifest"] = manifest;
    summary["n_instances"] = n_rows;
    json per_method = json::object();
    for (std::size_t s = 0; s < methods.size(); ++s) {
      per_method[methods[s].name] = {{"ins", mean[s].ins}, {"del", mean[s].del}, {"joint", mean[s].ins - mean[s].del}};
    }
    summary["methods"] = per_method;
    json per_candidate = json::object();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      per_candidate[ToString(candidates[c])] = {{"ins", ins_scores[c]}, {"del", del_scores[c]}, {"joint", joint_scores[c]}};
    }
    summary["beta_candidates"] = per_candidate;
    json w = json::object();
    for (const auto& [label, idx] : winners) w[label] = ToString(candidates[idx]);
    summary["winners"] = w;
    WriteOutput(f.summary, summary.dump(2) + "\n", out);
  }
  return kExitOk;
}

// --- stability --------------------------------------------------------------

struct StabilityFlags {
  std::string depths = "10:60:10";
  int features = 11;
  std::string shape = "chain";
  std::uint64_t seed = 2025;
  int instances = 8;
  std::string algos = "grad,prob,linear-treeshap:fixed,treeshap-k,v1";
  std::string degree = "depth";
  int threads = 0;
  std::string out;
};

int RunStability(const CLI::App& sub, const StabilityFlags& f, std::ostream& out) {
  StabilitySpec spec;
  try {
    spec.depths = ParseIntList(f.depths, "depths");
    spec.shape = ParseTreeShape(f.shape);
    for (const auto& a : SplitList(f.algos)) spec.algorithms.push_back(ParseAlgorithm(a));
    spec.degree = ParseDegree(f.degree);
  } catch (const InputError& e) {
    throw BadFlag(e.what());
  }
  if (spec.algorithms.empty()) throw BadFlag("--algos is empty");
  spec.n_features = f.features;
  spec.seed = f.seed;
  spec.instances = f.instances;
  if (spec.n_features < 1) throw BadFlag("--features must be positive");

  PhaseTimer timer;
  timer.Start("compute");
  std::vector<std::vector<StabilityRow>> per_depth(spec.depths.size());
  ParallelFor(spec.depths.size(), ResolveThreads(f.threads), [&](std::size_t i) {
    StabilitySpec one = spec;
    one.depths = {spec.depths[i]};
    per_depth[i] = RunStabilitySweep(one);
  });
  timer.Stop();

  std::ostringstream csv;
  csv.precision(6);
  csv << std::scientific;
  csv << CsvManifestLine(Manifest(sub, timer))
      << "depth,algo,max_abs_error,cond_chebyshev_v,cond_unity_v,cond_oplus,cond_boxplus\n";
  for (const auto& rows : per_depth) {
    for (const StabilityRow& r : rows) {
      csv << r.depth << "," << ToString(r.algorithm) << "," << r.max_abs_error << ","
          << r.condition.chebyshev_v << "," << r.condition.unity_v << "," << r.condition.oplus_solve
          << "," << r.condition.boxplus_solve << "\n";
    }
  }
  WriteOutput(f.out, csv.str(), out);
  return kExitOk;
}

// --- bench ------------------------------------------------------------------

struct BenchFlags {
  std::string leaves = "1000,10000,100000";
  int depth = 20;
  int features = 11;
  int repeats = 5;
  std::uint64_t seed = 2025;
  std::string out;
};

int RunBench(const CLI::App& sub, const BenchFlags& f, std::ostream& out) {
  const std::vector<int> sizes = ParseIntList(f.leaves, "leaves");
  if (f.depth < 1 || f.features < 1 || f.repeats < 1) {
    throw BadFlag("--depth, --features and --repeats must be positive");
  }
  struct Row {
    std::string op;
    int leaves;
    int trees;
    double seconds;
  };
  std::vector<Row> rows;
  PhaseTimer timer;
  timer.Start("compute");
  for (int leaves : sizes) {
    SynthSpec spec;
    spec.n_features = f.features;
    spec.depth = f.depth;
    spec.seed = f.seed;
    spec.n_trees = std::max(1, leaves / (f.depth + 1));
    const SynthSample s = Generate(spec);
    const std::vector<double> z(f.features, 0.3);
    const int actual = static_cast<int>(s.model.total_leaves());
    auto time = [&](const std::string& op, const std::function<void()>& fn) {
      std::vector<double> t;
      for (int r = 0; r < f.repeats; ++r) {
        const auto start = Clock::now();
        fn();
        t.push_back(std::chrono::duration<double>(Clock::now() - start).count());
      }
      std::sort(t.begin(), t.end());
      rows.push_back({op, actual, spec.n_trees, t[t.size() / 2]});
    };
    time("tree_gradient", [&] { TreeGradient(s.model, s.x, z); });
    time("beta_shapley", [&] { BetaShapley(s.model, s.x, BetaParams{1, 1}, true); });
    time("treeprob_attribute", [&] { TreeProbAttribute(s.model, s.x, BetaParams{1, 1}); });
  }
  timer.Stop();
  std::ostringstream csv;
  csv << CsvManifestLine(Manifest(sub, timer)) << "op,leaves,depth,trees,seconds_per_call\n";
  csv.precision(6);
  for (const Row& r : rows) {
    csv << r.op << "," << r.leaves << "," << f.depth << "," << r.trees << "," << r.seconds << "\n";
  }
  WriteOutput(f.out, csv.str(), out);
  return kExitOk;
}

void ReportError(std::ostream& err, int code, const std::string& kind, const std::string& message) {
  err << json{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}}.dump() << "\n";
}

}  // namespace

int ResolveThreads(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("XTREE_THREADS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

void ParallelFor(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min<std::size_t>(std::max(threads, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

int Run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Feature attribution and ranking for decision trees", "xtree"};
  app.require_subcommand(1);
  app.set_version_flag("--version", XTREE_VERSION);

  ExplainFlags ef;
  auto* explain = app.add_subcommand("explain", "Per-feature attribution scores");
  explain->add_option("--model", ef.model, "Model JSON")->required();
  AddInstanceFlags(explain, ef.inst);
  explain->add_option("--algo", ef.algo, "grad|prob|oracle|linear-treeshap[:fixed|mitigated|wellcond]|treeshap-k|v1")
      ->capture_default_str();
  explain->add_option("--method", ef.method, "shapley|banzhaf|wbanzhaf:NU|beta:A:B|omega:FILE")
      ->capture_default_str();
  explain->add_flag("--vectorized", ef.vectorized, "Carry all quadrature nodes in one traversal");
  explain->add_option("--degree", ef.degree, "Polynomial size: min (min(D,N)) or depth (D)")->capture_default_str();
  explain->add_option("--threads", ef.threads, "Worker threads (default XTREE_THREADS or 1)");
  explain->add_option("--out", ef.out, "Output path (default stdout)");

  RankFlags rf;
  auto* rank = app.add_subcommand("rank", "Feature scores from gradient ascent on the joint objective");
  rank->add_option("--model", rf.model, "Model JSON")->required();
  rank->add_option("--instance", rf.instance, "JSON array with one instance")->required();
  rank->add_option("--optimizer", rf.optimizer, "ga|adam")->capture_default_str();
  rank->add_option("--iters", rf.iters, "Iterations T")->capture_default_str();
  rank->add_option("--lr", rf.lr, "Learning rate, or auto to pick from {0.1,0.5,1,5,10}")->capture_default_str();
  rank->add_option("--trace", rf.trace, "CSV path for the per-iteration objective");
  rank->add_option("--out", rf.out, "Output path (default stdout)");

  MetricsFlags mf;
  auto* metrics = app.add_subcommand("metrics", "Insertion and deletion curves per ranking method");
  metrics->add_option("--model", mf.model, "Model JSON")->required();
  AddInstanceFlags(metrics, mf.inst);
  metrics->add_option("--methods", mf.methods, "Comma list: shapley,banzhaf,wbanzhaf:NU,beta:A:B,ranker:OPT:T:LR")
      ->capture_default_str();
  metrics->add_option("--out", mf.out, "Curves CSV path (default stdout)");
  metrics->add_option("--summary", mf.summary, "Summary JSON path");
  metrics->add_option("--seed", mf.seed, "Seed for --sample")->capture_default_str();
  metrics->add_option("--sample", mf.sample, "Evaluate a seeded subsample of this many rows")->capture_default_str();
  metrics->add_option("--threads", mf.threads, "Worker threads (default XTREE_THREADS or 1)");

  StabilityFlags sf;
  auto* stability = app.add_subcommand("stability", "Error against the oracle on synthetic trees of growing depth");
  stability->add_option("--depths", sf.depths, "START:STOP:STEP or comma list")->capture_default_str();
  stability->add_option("--features", sf.features, "Number of features N")->capture_default_str();
  stability->add_option("--shape", sf.shape, "chain|random-balanced")->capture_default_str();
  stability->add_option("--seed", sf.seed, "Base seed")->capture_default_str();
  stability->add_option("--instances", sf.instances, "Trees per depth")->capture_default_str();
  stability->add_option("--algos", sf.algos, "Comma list of algorithms")->capture_default_str();
  stability->add_option("--degree", sf.degree, "Polynomial size: depth (D) or min (min(D,N))")->capture_default_str();
  stability->add_option("--threads", sf.threads, "Worker threads (default XTREE_THREADS or 1)");
  stability->add_option("--out", sf.out, "Output CSV path (default stdout)");

  BenchFlags bf;
  auto* bench = app.add_subcommand("bench", "Wall time per call against the number of leaves");
  bench->add_option("--leaves", bf.leaves, "Comma list of leaf counts")->capture_default_str();
  bench->add_option("--depth", bf.depth, "Depth of each chain tree")->capture_default_str();
  bench->add_option("--features", bf.features, "Number of features N")->capture_default_str();
  bench->add_option("--repeats", bf.repeats, "Timed repetitions; the median is reported")->capture_default_str();
  bench->add_option("--seed", bf.seed, "Generator seed")->capture_default_str();
  bench->add_option("--out", bf.out, "Output CSV path (default stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << XTREE_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    ReportError(err, kExitBadFlags, "usage", e.what());
    return kExitBadFlags;
  }

  try {
    if (explain->parsed()) return RunExplain(*explain, ef, out);
    if (rank->parsed()) return RunRank(*rank, rf, out);
    if (metrics->parsed()) return RunMetrics(*metrics, mf, out);
    if (stability->parsed()) return RunStability(*stability, sf, out);
    if (bench->parsed()) return RunBench(*bench, bf, out);
  } catch (const BadFlag& e) {
    ReportError(err, kExitBadFlags, "usage", e.what());
    return kExitBadFlags;
  } catch (const NumericalError& e) {
    ReportError(err, kExitNumerical, "numerical", e.what());
    return kExitNumerical;
  } catch (const ModelError& e) {
    ReportError(err, kExitInput, "model", e.what());
    return kExitInput;
  } catch (const InputError& e) {
    ReportError(err, kExitInput, "input", e.what());
    return kExitInput;
  } catch (const std::exception& e) {
    ReportError(err, kExitFailure, "internal", e.what());
    return kExitFailure;
  }
  return kExitBadFlags;
}

}  // namespace xtree::cli
