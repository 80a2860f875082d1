#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

const std::string kCli = FLOCKSTAB_CLI_PATH;
const std::string kFixtures = FLOCKSTAB_FIXTURE_DIR;

int run(const std::string& args) {
  const int status = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("flockstab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string out() const { return "--out " + dir_.string(); }
  fs::path dir_;
};

}  // namespace

TEST_F(Cli, CheckExitCodes) {
  EXPECT_EQ(run("check --spec " + kFixtures + "/fig1.json"), 0);
  EXPECT_EQ(run("check --spec " + kFixtures + "/fig2.json"), 2);
  EXPECT_EQ(run("check --spec " + kFixtures + "/fig3.json"), 0);
  fs::create_directories(dir_);
  std::ofstream(dir_ / "bad.json") << "{ \"arrangement\": ";
  EXPECT_EQ(run("check --spec " + (dir_ / "bad.json").string()), 1);
  EXPECT_EQ(run("check --spec " + (dir_ / "missing.json").string()), 1);
  EXPECT_EQ(run("check"), 1);
  EXPECT_EQ(run("frobnicate"), 1);
}

TEST_F(Cli, CheckWritesReport) {
  EXPECT_EQ(run("check --spec " + kFixtures + "/fig2.json " + out()), 2);
  const auto j = nlohmann::json::parse(slurp(dir_ / "conditions.json"));
  EXPECT_EQ(j["overall"], "InstabilityCertified");
  EXPECT_EQ(j["clauses"].size(), 3u);
}

TEST_F(Cli, RefusesToOverwriteWithoutForce) {
  const std::string args = "spectrum --spec " + kFixtures + "/fig3.json --n 5 " + out();
  EXPECT_EQ(run(args), 0);
  const std::string first = slurp(dir_ / "spectrum.csv");
  EXPECT_EQ(run(args), 1);
  EXPECT_EQ(run(args + " --force"), 0);
  EXPECT_EQ(slurp(dir_ / "spectrum.csv"), first);  // byte-identical rerun
  const auto v = nlohmann::json::parse(slurp(dir_ / "verdict.json"));
  EXPECT_EQ(v["status"], "Stable");
}

TEST_F(Cli, SimulateScanAndRootcurves) {
  EXPECT_EQ(run("simulate --spec " + kFixtures + "/fig3.json --n 10 --bc 2 --tmax 30 " + out()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "trajectory.csv"));
  EXPECT_TRUE(fs::exists(dir_ / "deviations.svg"));
  const auto t = nlohmann::json::parse(slurp(dir_ / "transient.json"));
  EXPECT_LT(t["magnitude"].get<double>(), 0.0);
  EXPECT_EQ(run("simulate --spec " + kFixtures + "/fig3.json --bc 3"), 1);

  EXPECT_EQ(run("scan --spec " + kFixtures + "/fig2.json --N-list 30,60 " + out()), 0);
  const auto s = nlohmann::json::parse(slurp(dir_ / "scan.json"));
  EXPECT_EQ(s["points"].size(), 2u);
  EXPECT_EQ(run("scan --spec " + kFixtures + "/fig2.json --N-list 31 " + out() + " --force"), 1);

  EXPECT_EQ(run("rootcurves --spec " + kFixtures + "/fig2.json --phi-max 1e-2 " + out()), 0);
  const auto r = nlohmann::json::parse(slurp(dir_ / "rootcurves.json"));
  EXPECT_EQ(r["two_root_count_holds"], true);
  EXPECT_EQ(run("rootcurves --spec " + kFixtures + "/fig1.json " + out() + " --force"), 1);
}

TEST_F(Cli, ReproduceFigureOneA) {
  EXPECT_EQ(run("reproduce fig1a " + out()), 0);
  const auto c = nlohmann::json::parse(slurp(dir_ / "comparison.json"));
  EXPECT_EQ(c["comparison"]["within_2_percent"], true);
  EXPECT_TRUE(fs::exists(dir_ / "deviations.svg"));
  EXPECT_EQ(run("reproduce fig9 " + out() + " --force"), 1);
}
