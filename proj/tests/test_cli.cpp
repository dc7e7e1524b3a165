#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include "coopsim/scenario_io.hpp"

namespace fs = std::filesystem;
using namespace coopsim;

namespace {

class Cli : public testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("coopsim_cli_" + std::string(testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  int exec(const std::string& args) {
    const std::string cmd = std::string(COOPSIM_CLI) + " " + args + " > " +
                            (dir_ / "stdout.txt").string() + " 2> " + (dir_ / "stderr.txt").string();
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  }

  std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  fs::path scenario(const ScenarioConfig& c, const std::string& name = "s.json") {
    const fs::path p = dir_ / name;
    save_scenario(c, p);
    return p;
  }

  static ScenarioConfig table1(int n = 2) {
    ScenarioConfig c;
    c.channel = table1_params(n, false);
    c.strategy = Strategy::TwoRelaySimple;
    c.horizon_slots = 20000;
    c.warmup_slots = 2000;
    c.replications = 2;
    return c;
  }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, AnalyzePrintsThreshold) {
  const auto p = scenario(table1());
  ASSERT_EQ(exec("analyze " + p.string() + " --csv " + (dir_ / "a.csv").string()), 0);
  const auto out = read(dir_ / "stdout.txt");
  EXPECT_NE(out.find("0.2156862745"), std::string::npos) << out;
  EXPECT_NE(out.find("0.0208828125"), std::string::npos) << out;
  const auto csv = read(dir_ / "a.csv");
  EXPECT_EQ(csv.rfind("channel,strategy,n_users,gamma,metric", 0), 0u);
  EXPECT_NE(csv.find("q_min_r1,0.2156862745"), std::string::npos);
}

TEST_F(Cli, AnalyzeDirectDeliveryHasNoRelayTraffic) {
  auto c = table1(3);
  std::get<CollisionParams>(c.channel).p_user_dest.assign(3, 1.0);
  ASSERT_EQ(exec("analyze " + scenario(c).string() + " --csv " + (dir_ / "a.csv").string()), 0);
  std::istringstream csv(read(dir_ / "a.csv"));
  std::string line;
  int checked = 0;
  while (std::getline(csv, line)) {
    if (line.find(",lambda_") == std::string::npos) continue;
    EXPECT_NE(line.find(",0,NA,"), std::string::npos) << line;
    ++checked;
  }
  EXPECT_EQ(checked, 8);
}

TEST_F(Cli, ExitCodes) {
  {
    std::ofstream(dir_ / "bad.json") << "{\"channel\": ";
  }
  EXPECT_EQ(exec("analyze " + (dir_ / "bad.json").string()), 2);
  EXPECT_EQ(exec("analyze " + (dir_ / "missing.json").string()), 3);

  auto invalid = table1();
  std::get<CollisionParams>(invalid.channel).q_user[0] = 1.3;
  EXPECT_EQ(exec("analyze " + scenario(invalid, "inv.json").string()), 2);
  EXPECT_NE(read(dir_ / "stderr.txt").find("collision.q_user[0]"), std::string::npos);

  ScenarioConfig mpr;
  mpr.channel = table2_topology(2, false);
  EXPECT_EQ(exec("analyze " + scenario(mpr, "mpr.json").string()), 2);

  const auto ok = scenario(table1());
  EXPECT_EQ(exec("simulate " + ok.string() + " --reps 0"), 2);
  EXPECT_EQ(exec("simulate " + ok.string() + " --out " + (dir_ / "no/such/dir/x.csv").string()), 3);
  EXPECT_EQ(exec("figure fig99 --out " + dir_.string()), 4);
  EXPECT_EQ(exec("frobnicate"), 2);
}

TEST_F(Cli, SimulateIsDeterministic) {
  const auto p = scenario(table1());
  const auto a = dir_ / "a.csv", b = dir_ / "b.csv";
  ASSERT_EQ(exec("simulate " + p.string() + " --slots 30000 --seed 4 --out " + a.string()), 0);
  ASSERT_EQ(exec("simulate " + p.string() + " --slots 30000 --seed 4 --out " + b.string()), 0);
  const auto text = read(a);
  EXPECT_EQ(text, read(b));
  EXPECT_NE(text.find("collision,two_relay_simple,2,NA,aggregate_throughput,"), std::string::npos);
  EXPECT_NE(text.find(",4,30000,2\n"), std::string::npos);
}

TEST_F(Cli, FigureStabilityRegion) {
  ASSERT_EQ(exec("figure stability_region --out " + (dir_ / "figs").string()), 0);
  for (int n : {2, 4, 8}) EXPECT_TRUE(fs::exists(dir_ / "figs" / ("stability_region_n" + std::to_string(n) + ".csv")));
}
