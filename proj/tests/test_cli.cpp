// Copyright 2026 The yoyosim Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// Drives the yoyosim binary end to end.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "yoyo/io.hpp"

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("yoyosim_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Runs `yoyosim <args>`; stdout and stderr land in out_ / err_.
  int run(const std::string& args) {
    const std::string cmd = std::string("\"") + YOYOSIM_BIN + "\" " + args + " > \"" +
                            (dir_ / "stdout.txt").string() + "\" 2> \"" +
                            (dir_ / "stderr.txt").string() + "\"";
    const int status = std::system(cmd.c_str());
    out_ = yoyo::read_file(dir_ / "stdout.txt");
    err_ = yoyo::read_file(dir_ / "stderr.txt");
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string out_dir(const std::string& sub) const { return "--out \"" + (dir_ / sub).string() + "\""; }
  std::string file(const std::string& rel) const { return yoyo::read_file(dir_ / rel); }
  static int lines(const std::string& text) {
    return static_cast<int>(std::count(text.begin(), text.end(), '\n'));
  }
  static std::string scenario(const char* name) {
    return std::string("\"") + YOYO_SCENARIO_DIR + "/" + name + "\"";
  }

  fs::path dir_;
  std::string out_, err_;
};

TEST_F(Cli, SimulateWritesEveryArtifact) {
  ASSERT_EQ(run(out_dir("a") + " simulate --scenario " + scenario("yoyo_k20.yaml")), 0) << err_;
  for (const char* ext : {".trace.csv", ".trace.jsonl", ".report.json", ".plot.csv", ".actions.csv"})
    EXPECT_TRUE(fs::exists(dir_ / "a" / (std::string("YoYoK8s") + ext))) << ext;
  EXPECT_EQ(lines(file("a/YoYoK8s.trace.csv")), 5400 + 1);
  EXPECT_EQ(lines(file("a/YoYoK8s.trace.jsonl")), 5400);
  const auto report = nlohmann::json::parse(file("a/YoYoK8s.report.json"));
  EXPECT_EQ(report.at("duration"), 5400);
  EXPECT_GT(report.at("report").at("potency").get<double>(), 0);
}

TEST_F(Cli, SimulateIsByteIdenticalAcrossRuns) {
  ASSERT_EQ(run("--seed 4 " + out_dir("a") + " simulate --scenario @yoyo"), 0) << err_;
  ASSERT_EQ(run("--seed 4 " + out_dir("b") + " simulate --scenario @yoyo"), 0) << err_;
  for (const char* ext : {".trace.csv", ".trace.jsonl", ".report.json", ".plot.csv", ".actions.csv"}) {
    const std::string name = std::string("YoYoK8s") + ext;
    EXPECT_EQ(file("a/" + name), file("b/" + name)) << name;
  }
}

TEST_F(Cli, AttackShorthandCost) {
  ASSERT_EQ(run(out_dir("a") + " simulate --attack \"k=20 on=10m off=20m n=6\""), 0) << err_;
  const auto report = nlohmann::json::parse(file("a/attack.report.json"));
  EXPECT_DOUBLE_EQ(report.at("report").at("cost").get<double>(), 20.0 / 3.0);
  EXPECT_EQ(report.at("duration"), 6 * 1800);
}

TEST_F(Cli, InvalidScenarioReportsFileAndLine) {
  std::ofstream(dir_ / "bad.yaml") << "schema_version: 1\nworkload:\n  kind: yoyo\n  cycles: lots\n";
  EXPECT_NE(run("simulate --scenario \"" + (dir_ / "bad.yaml").string() + "\""), 0);
  EXPECT_NE(err_.find("bad.yaml:4:"), std::string::npos) << err_;
}

TEST_F(Cli, CompareEmitsTheSummaryTable) {
  ASSERT_EQ(run(out_dir("c") + " compare " + scenario("classic_ddos_k20.yaml") + " " +
                scenario("yoyo_k20.yaml")),
            0)
      << err_;
  std::istringstream csv(file("c/compare.csv"));
  std::string header, cost, rde, rdp, pot;
  std::getline(csv, header);
  std::getline(csv, cost);
  std::getline(csv, rde);
  std::getline(csv, rdp);
  std::getline(csv, pot);
  EXPECT_EQ(header, "metric,ClassicDDoS,YoYoK8s");
  EXPECT_EQ(cost, "Cost,20,6.666666666666667");
  EXPECT_EQ(rde.rfind("RD_e,", 0), 0u);
  EXPECT_EQ(rdp.rfind("RD_p,", 0), 0u);
  const auto fields = yoyo::split_csv_line(pot);
  ASSERT_EQ(fields.size(), 3u);
  EXPECT_GT(yoyo::parse_number(fields[2]), yoyo::parse_number(fields[1]));
}

TEST_F(Cli, CompareScenarioWithItself) {
  ASSERT_EQ(run(out_dir("c") + " compare @yoyo @yoyo"), 0) << err_;
  std::istringstream csv(file("c/compare.csv"));
  std::string line;
  std::getline(csv, line);
  while (std::getline(csv, line)) {
    const auto f = yoyo::split_csv_line(line);
    ASSERT_EQ(f.size(), 3u);
    EXPECT_EQ(f[1], f[2]) << line;
  }
}

TEST_F(Cli, CompareRefusesMismatchedClusters) {
  EXPECT_NE(run(out_dir("c") + " compare @yoyo " + scenario("yoyo_vm_group.yaml")), 0);
  EXPECT_NE(err_.find("cluster"), std::string::npos) << err_;
}

TEST_F(Cli, DatasetTrainEval) {
  ASSERT_EQ(run("--seed 3 " + out_dir("d") + " dataset --runs 1"), 0) << err_;
  EXPECT_EQ(lines(file("d/dataset.csv")), 51 + 1);
  EXPECT_EQ(lines(file("d/train.csv")) + lines(file("d/test.csv")), 51 + 2);
  ASSERT_EQ(run(out_dir("d") + " train"), 0) << err_;
  ASSERT_TRUE(fs::exists(dir_ / "d/model.json"));
  ASSERT_EQ(run(out_dir("d") + " eval"), 0) << err_;
  const auto m = nlohmann::json::parse(file("d/metrics.json"));
  for (const char* key : {"accuracy", "precision", "recall", "f1", "tp", "tn", "fp", "fn"})
    EXPECT_TRUE(m.contains(key)) << key;
  EXPECT_EQ(m.at("feature_importance").size(), 20u);

  // Flip every label: accuracy must complement.
  std::istringstream in(file("d/test.csv"));
  std::ofstream flipped(dir_ / "flipped.csv");
  std::string line;
  std::getline(in, line);
  flipped << line << '\n';
  while (std::getline(in, line)) {
    line.back() = line.back() == '1' ? '0' : '1';
    flipped << line << '\n';
  }
  flipped.close();
  ASSERT_EQ(run(out_dir("e") + " eval --model \"" + (dir_ / "d/model.json").string() +
                "\" --data \"" + (dir_ / "flipped.csv").string() + "\""),
            0)
      << err_;
  const auto f = nlohmann::json::parse(file("e/metrics.json"));
  EXPECT_NEAR(f.at("accuracy").get<double>() + m.at("accuracy").get<double>(), 1.0, 1e-12);
}

TEST_F(Cli, MissingInputsFail) {
  EXPECT_NE(run(out_dir("x") + " train"), 0);
  EXPECT_NE(err_.find("not found"), std::string::npos) << err_;
  EXPECT_NE(run(out_dir("x") + " eval --data /nonexistent.csv"), 0);
  EXPECT_NE(run("simulate"), 0);
  EXPECT_NE(run("frobnicate"), 0);
}

TEST_F(Cli, OptimalTimings) {
  ASSERT_EQ(run("optimal"), 0) << err_;
  const auto j = nlohmann::json::parse(out_);
  EXPECT_EQ(j.at("optimal_t_on"), 220);
  EXPECT_EQ(j.at("optimal_t_off"), 1025);
  ASSERT_EQ(run("optimal --scenario " + scenario("yoyo_vm_group.yaml")), 0) << err_;
}

TEST_F(Cli, OnlyOneSecondTicks) {
  EXPECT_EQ(run("--tick 1s optimal"), 0);
  EXPECT_NE(run("--tick 2s optimal"), 0);
  EXPECT_NE(err_.find("1s"), std::string::npos);
}

}  // namespace
