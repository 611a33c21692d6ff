#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <gtest/gtest.h>

#include "monojunta/experiment.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run cli(const std::string& args) {
  const std::string cmd = std::string(MONOJUNTA_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  std::array<char, 4096> buf{};
  while (std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  const int status = pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("monojunta_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
    std::ofstream(path("fixture.json")) << R"({"format_version":1,"d":5,"t":2,"m":4,"sets":[[1,2],[3,4],[1,3],[2,4]]})";
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

bool has_line(const std::string& out, const std::string& needle) { return out.find(needle) != std::string::npos; }

}  // namespace

TEST_F(CliTest, GenIsDeterministicAndLoads) {
  ASSERT_EQ(cli("gen --d 5 --t 2 --m 4 --seed 7 --out " + path("a.json")).code, 0);
  ASSERT_EQ(cli("gen --d 5 --t 2 --m 4 --seed 7 --out " + path("b.json")).code, 0);
  const auto a = monojunta::read_text_file(path("a.json"));
  EXPECT_EQ(a, monojunta::read_text_file(path("b.json")));
  const auto fam = monojunta::family_from_text(a);
  EXPECT_EQ(fam, monojunta::sample_family(7, 5, 2, 4));
  EXPECT_EQ(monojunta::family_to_text(fam), a);
}

TEST_F(CliTest, GenInfeasibleExitsTwo) {
  EXPECT_EQ(cli("gen --d 5 --t 5 --m 4").code, 2);
  EXPECT_EQ(cli("gen --d 5 --out /nonexistent-dir/x.json").code, 2);
  EXPECT_EQ(cli("frobnicate").code, 2);
}

TEST_F(CliTest, StatsExactAndSampled) {
  const auto exact = cli("stats " + path("fixture.json"));
  ASSERT_EQ(exact.code, 0);
  EXPECT_TRUE(has_line(exact.out, "experiment_id,d,t,m,seed,family_ref,quantity,k,mode,value,stderr,n_samples\n"));
  EXPECT_TRUE(has_line(exact.out, ",p1,,exact,0.25,,\n"));
  EXPECT_TRUE(has_line(exact.out, ",mean_T,,exact,1,,\n"));
  EXPECT_TRUE(has_line(exact.out, ",moment_gap,,exact,-0.25,,\n"));

  const auto mc = cli("stats " + path("fixture.json") + " --mode mc --samples 100000 --seed 3");
  ASSERT_EQ(mc.code, 0);
  EXPECT_TRUE(has_line(mc.out, ",p1,,mc,"));
  EXPECT_TRUE(has_line(mc.out, ",100000\n"));
}

TEST_F(CliTest, CertifyExitCodes) {
  const auto ok = cli("certify " + path("fixture.json"));
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(has_line(ok.out, "monotone: pass"));
  EXPECT_TRUE(has_line(ok.out, "depth: pass, depth <= 5"));
  const auto bad = cli("certify --self-test " + path("fixture.json"));
  EXPECT_EQ(bad.code, 1);
  EXPECT_TRUE(has_line(bad.out, "monotone: FAIL"));
}

TEST_F(CliTest, JuntaRows) {
  const auto k0 = cli("junta " + path("fixture.json") + " --k 0");
  ASSERT_EQ(k0.code, 0);
  EXPECT_TRUE(has_line(k0.out, ",junta_distance,0,exact,0.4375,,\n"));
  EXPECT_TRUE(has_line(k0.out, ",lemma5_bound,0,exact,0.125,,\n"));
  const auto k8 = cli("junta " + path("fixture.json") + " --k 8");
  EXPECT_TRUE(has_line(k8.out, ",junta_distance,8,exact,0,,\n"));
  EXPECT_EQ(cli("junta " + path("fixture.json") + " --k 4 --budget 100").code, 2);
  EXPECT_EQ(cli("junta " + path("fixture.json") + " --k 4 --budget 100 --mode top-influence").code, 0);
}

TEST_F(CliTest, Bound) {
  EXPECT_EQ(cli("bound --p1 0.4 --k 128 --t 10").out, "0.1375\n");
  EXPECT_EQ(cli("bound --p1 0.25 --k 0 --t 2").out, "0.125\n");
  EXPECT_EQ(cli("bound --p1 0.25 --k 9 --t 2").out, "0\n");
  EXPECT_EQ(cli("bound --p1 1.5 --k 0 --t 2").code, 2);
}

TEST_F(CliTest, ExperimentIsByteIdentical) {
  std::ofstream(path("plan.json")) << R"({"format_version":1,"experiment_id":"p","mode":"mc","samples":2000,
      "seed":4,"workers":2,"grid":[{"d":9},{"d":26}],"families":2,"quantities":["p1","moment_gap","sensitivity_mean"]})";
  ASSERT_EQ(cli("experiment " + path("plan.json") + " --out " + path("a.csv")).code, 0);
  ASSERT_EQ(cli("experiment " + path("plan.json") + " --out " + path("b.csv")).code, 0);
  const auto a = monojunta::read_text_file(path("a.csv"));
  EXPECT_EQ(a, monojunta::read_text_file(path("b.csv")));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 1 + 2 * 2 * 3);
  std::ofstream(path("bad.json")) << R"({"format_version":1,"grid":[{"d":5,"t":9}],"quantities":["p1"]})";
  EXPECT_EQ(cli("experiment " + path("bad.json")).code, 2);
}

TEST_F(CliTest, SensitivityProfile) {
  const auto r = cli("sensitivity " + path("fixture.json") + " --samples 20000 --seed 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(has_line(r.out, ",sensitivity_mean,,mc,"));
}
