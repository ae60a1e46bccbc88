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

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "json.hpp"
#include "test_util.h"

namespace xtree {
namespace {

using nlohmann::json;

struct RunResult {
  int code;
  std::string out;
  std::string err;
};

RunResult RunCli(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string TempPath(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("xtree_cli_test_" + name)).string();
}

std::string WriteFile(const std::string& name, const std::string& body) {
  const std::string path = TempPath(name);
  std::ofstream(path) << body;
  return path;
}

const std::string kModel = testing::FixturePath("reference_tree.json");
const std::string kInstance = testing::FixturePath("reference_instance.json");

TEST(Cli, ExplainShapley) {
  const RunResult r = RunCli({"explain", "--model", kModel, "--instance", kInstance});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["n_features"], 3);
  const auto& res = doc["results"][0];
  EXPECT_NEAR(res["phi"][2].get<double>(), 0.0449091, 1e-6);
  EXPECT_DOUBLE_EQ(res["prediction"].get<double>(), 0.8);
  EXPECT_NEAR(res["empty_set_value"].get<double>(), 0.636, 1e-12);
  EXPECT_EQ(doc["manifest"]["command"], "explain");
}

TEST(Cli, ExplainAlgorithmsAgree) {
  std::vector<double> ref;
  for (const std::string algo : {"grad", "prob", "oracle", "linear-treeshap:wellcond", "treeshap-k", "v1"}) {
    const RunResult r = RunCli({"explain", "--model", kModel, "--instance", kInstance, "--algo", algo});
    ASSERT_EQ(r.code, cli::kExitOk) << algo << ": " << r.err;
    const auto phi = json::parse(r.out)["results"][0]["phi"].get<std::vector<double>>();
    if (ref.empty()) ref = phi;
    EXPECT_LT(testing::MaxAbsDiff(phi, ref), 1e-12) << algo;
  }
}

TEST(Cli, ExplainBatchCsv) {
  const std::string csv = WriteFile("batch.csv", "a,b,c\n0.2,0.9,0.1\n0.7,0.1,0.9\n");
  const RunResult r =
      RunCli({"explain", "--model", kModel, "--instances", csv, "--skip-header", "--method", "banzhaf"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(json::parse(r.out)["results"].size(), 2u);
}

TEST(Cli, UnknownFlagIsUsageError) {
  EXPECT_EQ(RunCli({"explain", "--model", kModel, "--bogus"}).code, cli::kExitBadFlags);
  EXPECT_EQ(RunCli({}).code, cli::kExitBadFlags);
  EXPECT_EQ(RunCli({"explain", "--model", kModel, "--instance", kInstance, "--algo", "magic"}).code,
            cli::kExitBadFlags);
}

TEST(Cli, MissingModelIsInputError) {
  const RunResult r = RunCli({"explain", "--model", "/nonexistent.json", "--instance", kInstance});
  EXPECT_EQ(r.code, cli::kExitInput);
  const json err = json::parse(r.err);
  EXPECT_EQ(err["error"]["code"], cli::kExitInput);
}

TEST(Cli, InvalidModelReportsNode) {
  const std::string bad = WriteFile(
      "bad.json",
      R"({"format_version": 1, "n_features": 1, "base_value": 0, "trees": [{"left": [1, -1, -1],
          "right": [2, -1, -1], "feature": [0, -1, -1], "threshold": [0, 0, 0], "cover": [10, 10, 5],
          "value": [0, 1, 2]}]})");
  const std::string x = WriteFile("x1.json", "[0.5]");
  const RunResult r = RunCli({"explain", "--model", bad, "--instance", x});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("cover monotonicity violation (node 1)"), std::string::npos) << r.err;
}

TEST(Cli, OracleRefusesLargeUniverse) {
  std::ifstream in(kModel);
  std::stringstream body;
  body << in.rdbuf();
  json doc = json::parse(body.str());
  doc["n_features"] = 30;
  const std::string wide = WriteFile("wide.json", doc.dump());
  const std::string x = WriteFile("x30.json", json(std::vector<double>(30, 0.5)).dump());
  const RunResult r = RunCli({"explain", "--model", wide, "--instance", x, "--algo", "oracle"});
  EXPECT_EQ(r.code, cli::kExitInput);
  EXPECT_NE(r.err.find("N over oracle cap"), std::string::npos) << r.err;
  // The polynomial-time algorithms handle the same input.
  EXPECT_EQ(RunCli({"explain", "--model", wide, "--instance", x}).code, cli::kExitOk);
}

TEST(Cli, RankWritesScoresAndTrace) {
  const std::string trace = TempPath("trace.csv");
  const RunResult r = RunCli({"rank", "--model", kModel, "--instance", kInstance, "--iters", "20", "--trace", trace});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  const json doc = json::parse(r.out);
  EXPECT_EQ(doc["zeta"].size(), 3u);
  EXPECT_EQ(doc["ranking"].size(), 3u);
  std::ifstream in(trace);
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) rows += !line.empty() && line[0] != '#';
  EXPECT_EQ(rows, 1 + 21);  // header, then t = 0..20
}

TEST(Cli, RankAutoLearningRate) {
  const RunResult r = RunCli({"rank", "--model", kModel, "--instance", kInstance, "--lr", "auto"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_GT(json::parse(r.out)["learning_rate"].get<double>(), 0.0);
}

TEST(Cli, MetricsCurvesAndSummary) {
  const std::string csv = WriteFile("metrics.csv", "0.2,0.9,0.1\n0.7,0.1,0.9\n0.4,0.6,0.5\n");
  const std::string summary = TempPath("summary.json");
  const RunResult r = RunCli({"metrics", "--model", kModel, "--instances", csv, "--summary", summary});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  EXPECT_EQ(r.out.rfind("# manifest: ", 0), 0u);
  EXPECT_NE(r.out.find("method,k,insertion,deletion"), std::string::npos);
  EXPECT_NE(r.out.find("Beta-Joint"), std::string::npos);
  std::ifstream in(summary);
  const json doc = json::parse(in);
  EXPECT_EQ(doc["beta_candidates"].size(), 10u);
  EXPECT_TRUE(doc["winners"].contains("Beta-Joint"));
}

TEST(Cli, StabilityCsvShape) {
  const RunResult r = RunCli({"stability", "--depths", "10:20:10", "--features", "5", "--instances", "2"});
  ASSERT_EQ(r.code, cli::kExitOk) << r.err;
  std::istringstream in(r.out);
  std::string line;
  std::vector<std::string> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') rows.push_back(line);
  }
  ASSERT_FALSE(rows.empty());
  EXPECT_EQ(rows[0], "depth,algo,max_abs_error,cond_chebyshev_v,cond_unity_v,cond_oplus,cond_boxplus");
  EXPECT_EQ(rows.size(), 1u + 2u * 5u);
}

TEST(Cli, ThreadCountDoesNotChangeResults) {
  const std::string csv = WriteFile("threads.csv", "0.2,0.9,0.1\n0.7,0.1,0.9\n0.4,0.6,0.5\n0.9,0.9,0.9\n");
  const auto one = RunCli({"explain", "--model", kModel, "--instances", csv, "--threads", "1"});
  const auto four = RunCli({"explain", "--model", kModel, "--instances", csv, "--threads", "4"});
  ASSERT_EQ(one.code, cli::kExitOk);
  ASSERT_EQ(four.code, cli::kExitOk);
  EXPECT_EQ(json::parse(one.out)["results"], json::parse(four.out)["results"]);
}

}  // namespace
}  // namespace xtree
