// Drives the built mlagg binary end to end.

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>
#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("mlagg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int run(const std::string& args) const {
    const std::string cmd = std::string(MLAGG_CLI_PATH) + " " + args + " >" +
                            (dir_ / "stdout.txt").string() + " 2>" + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  static std::string slurp(const std::string& file) {
    std::ifstream in(file);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static std::size_t count_lines(const std::string& file) {
    std::ifstream in(file);
    std::size_t n = 0;
    for (std::string line; std::getline(in, line);) ++n;
    return n;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, SimulateWritesOneRecordPerAnnotation) {
  ASSERT_EQ(run("simulate --planted 593,6,6 -R 7:7:0 -T 5 -L 700 --seed 3 --out " +
                path("y.csv") + " --truth-out " + path("truth.csv")),
            0);
  EXPECT_EQ(count_lines(path("y.csv")), 3500u + 1u);
  EXPECT_EQ(count_lines(path("y.csv.profiles.csv")), 700u + 1u);
  EXPECT_EQ(count_lines(path("truth.csv")), 593u + 1u);

  ASSERT_EQ(run("simulate --planted 593,6,6 -R 7:7:0 -T 5 -L 700 --seed 3 --out " +
                path("again.csv") + " --profiles " + path("again.profiles.csv")),
            0);
  EXPECT_EQ(slurp(path("y.csv")), slurp(path("again.csv")));
  EXPECT_EQ(slurp(path("y.csv.profiles.csv")), slurp(path("again.profiles.csv")));
}

TEST_F(Cli, FitEvalPipeline) {
  ASSERT_EQ(run("simulate --planted 200,6,3 -R 1:1:1 -T 5 -L 200 --seed 1 --out " +
                path("y.csv") + " --truth-out " + path("truth.csv")),
            0);
  // 200 annotators × 5 over 200 instances: average 5 → a = 4, b = 1.
  ASSERT_EQ(run("fit --model bmmb -K 3 --annotations " + path("y.csv") + " -N 200 --out " +
                path("bmmb.json")),
            0);
  const auto result = json::parse(slurp(path("bmmb.json")));
  EXPECT_EQ(result["hyperparams"]["a"], 4.0);
  EXPECT_EQ(result["hyperparams"]["b"], 1.0);
  EXPECT_LE(result["iterations"].get<int>(), 500);
  EXPECT_EQ(result["mixture"]["pi"].size(), 3u);

  ASSERT_EQ(run("eval --dataset " + path("truth.csv") + " --result " + path("bmmb.json") +
                " --profiles " + path("y.csv.profiles.csv") + " --out " + path("report.json")),
            0);
  const auto report = json::parse(slurp(path("report.json")));
  EXPECT_TRUE(report["kl"].is_number());
  EXPECT_TRUE(report["recovery"].is_number());

  ASSERT_EQ(run("eval --dataset " + path("truth.csv") + " --result " + path("bmmb.json") +
                " --out " + path("bare.json")),
            0);
  EXPECT_TRUE(json::parse(slurp(path("bare.json")))["recovery"].is_null());

  ASSERT_EQ(run("fit --model mv --annotations " + path("y.csv") + " -N 200 --out " +
                path("mv.json")),
            0);
  const auto mv = json::parse(slurp(path("mv.json")));
  EXPECT_TRUE(mv.contains("predictions"));
  EXPECT_FALSE(mv.contains("elbo_trace"));

  ASSERT_EQ(run("report-components --result " + path("bmmb.json") + " --out " +
                path("components.csv")),
            0);
  EXPECT_EQ(count_lines(path("components.csv")), 4u);
}

TEST_F(Cli, PerfectResultScoresOne) {
  std::ofstream(path("truth.csv")) << "a,b,c\n1,0,1\n0,0,0\n1,1,0\n";
  json perfect = {{"model", "mv"},
                  {"num_instances", 3},
                  {"num_labels", 3},
                  {"num_annotators", 0},
                  {"avg_annotations_per_instance", 0.0},
                  {"predictions", {{1, 0, 1}, {0, 0, 0}, {1, 1, 0}}}};
  std::ofstream(path("perfect.json")) << perfect.dump();
  ASSERT_EQ(run("eval --dataset " + path("truth.csv") + " --result " + path("perfect.json")), 0);
  const auto report = json::parse(slurp(path("stdout.txt")));
  EXPECT_EQ(report["f1_micro"], 1.0);
  EXPECT_TRUE(report["kl"].is_null());
}

TEST_F(Cli, WideLabelSetsHaveNoKl) {
  ASSERT_EQ(run("simulate --planted 120,53,2 -R 1:0:0 -T 10 -L 60 --seed 2 --out " +
                path("y.csv") + " --truth-out " + path("truth.csv")),
            0);
  ASSERT_EQ(run("fit --model bmmb -K 2 --max-iter 30 --annotations " + path("y.csv") +
                " -N 120 --out " + path("r.json")),
            0);
  ASSERT_EQ(run("eval --dataset " + path("truth.csv") + " --result " + path("r.json") +
                " --out " + path("report.json")),
            0);
  const auto report = json::parse(slurp(path("report.json")));
  EXPECT_TRUE(report["kl"].is_null());
  EXPECT_TRUE(report["f1_micro"].is_number());
}

TEST_F(Cli, SweepCsv) {
  ASSERT_EQ(run("sweep --planted 60,4,2 --models mv,bnc --axis T --grid 4,8 -R 1:1:1 -L 30 "
                "--seeds 1,2,3 --out " + path("sweep.csv")),
            0);
  // Comment line, header, 2 grid points × 2 models × 3 seeds.
  EXPECT_EQ(count_lines(path("sweep.csv")), 2u + 12u);
}

TEST_F(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("frobnicate"), 2);
  EXPECT_EQ(run("simulate --planted 10,2,1 --out " + path("y.csv") + " -R 1:1"), 2);
  EXPECT_EQ(run("simulate --planted 10,2,1 -T 11 --out " + path("y.csv")), 2);
  EXPECT_EQ(run("simulate --out " + path("y.csv")), 2);
  std::ofstream(path("y.csv")) << "annotator,instance,labels\n0,0,10\n";
  EXPECT_EQ(run("fit --model nope --annotations " + path("y.csv")), 2);
  EXPECT_EQ(run("fit --model bmmb -K 0 --annotations " + path("y.csv")), 2);
  EXPECT_EQ(run("sweep --planted 10,2,1 --axis Q --grid 1"), 2);
}

TEST_F(Cli, DataErrorsExitThree) {
  EXPECT_EQ(run("fit --model bnc --annotations " + path("missing.csv")), 3);
  std::ofstream(path("bad.csv")) << "annotator,instance,labels\n0,0,1x\n";
  EXPECT_EQ(run("fit --model bnc --annotations " + path("bad.csv")), 3);
  EXPECT_NE(slurp(path("stderr.txt")).find("line 2"), std::string::npos);
  std::ofstream(path("truth.csv")) << "a\n1\n";
  std::ofstream(path("r.json")) << "{not json";
  EXPECT_EQ(run("eval --dataset " + path("truth.csv") + " --result " + path("r.json")), 3);
  std::ofstream(path("y.csv")) << "annotator,instance,labels\n0,0,1\n0,1,0\n";
  ASSERT_EQ(run("fit --model mv --annotations " + path("y.csv") + " --out " + path("r.json")), 0);
  EXPECT_EQ(run("eval --dataset " + path("truth.csv") + " --result " + path("r.json")), 3);
  EXPECT_EQ(run("report-components --result " + path("r.json")), 3);
}
