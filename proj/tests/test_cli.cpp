#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("gaugelab_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  int run(const std::string& args) {
    const std::string cmd = std::string(GAUGELAB_CLI) + " " + args + " > " + (dir_ / "stdout.txt").string() + " 2> " +
                            (dir_ / "stderr.txt").string();
    const int st = std::system(cmd.c_str());
    return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
  }

  fs::path dir_;
};

const char* kMaxwell =
    R"({"model":{"name":"maxwell","mesh":{"builder":"interval","n":8}},"seed":7,"suite":["flow_residual","gauss_law"],)"
    R"("mesh_sequence":[{"builder":"circle","n":8},{"builder":"circle","n":16},{"builder":"circle","n":32}]})";

}  // namespace

TEST_F(Cli, RunWritesReports) {
  const std::string cfg = write("c.json", kMaxwell);
  const fs::path out = dir_ / "out";
  EXPECT_EQ(run("run --config " + cfg + " --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "flow_residual.json"));
  EXPECT_TRUE(fs::exists(out / "gauss_law.json"));
  EXPECT_TRUE(fs::exists(out / "summary.json"));
  EXPECT_NE(slurp(out / "flow_residual.json").find("\"pass\": true"), std::string::npos);
  EXPECT_NE(slurp(dir_ / "stdout.txt").find("PASS flow_residual"), std::string::npos);
  EXPECT_EQ(run("run --config " + cfg + " --format csv --out " + (dir_ / "csv").string()), 0);
  EXPECT_EQ(slurp(dir_ / "csv" / "flow_residual.csv").rfind("check,kind,name,value,bound,pass\n", 0), 0u);
}

TEST_F(Cli, SameSeedSameBytes) {
  const std::string cfg = write("c.json", kMaxwell);
  ASSERT_EQ(run("run --config " + cfg + " --seed 3 --jobs 2 --out " + (dir_ / "a").string()), 0);
  ASSERT_EQ(run("run --config " + cfg + " --seed 3 --out " + (dir_ / "b").string()), 0);
  for (const std::string f : {"flow_residual.json", "gauss_law.json", "summary.json"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  ASSERT_EQ(run("run --config " + cfg + " --seed 4 --out " + (dir_ / "c").string()), 0);
  EXPECT_NE(slurp(dir_ / "a" / "flow_residual.json"), slurp(dir_ / "c" / "flow_residual.json"));
}

TEST_F(Cli, EmptySuiteWritesNothing) {
  const std::string cfg = write("e.json", R"({"suite":[]})");
  EXPECT_EQ(run("run --config " + cfg + " --out " + (dir_ / "empty").string()), 0);
  EXPECT_FALSE(fs::exists(dir_ / "empty"));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run("run --bogus"), 2);
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("run --format xml"), 2);
  EXPECT_EQ(run("run --config " + (dir_ / "missing.json").string()), 3);
  EXPECT_EQ(run("run --config " + write("b.json", R"({"model":{"name":"zzz"}})")), 3);
  EXPECT_EQ(run("run --config " + write("j.json", "{not json")), 3);
  EXPECT_EQ(run("run --config " + write("u.json", R"({"suite":["no_such_check"]})") + " --out " + (dir_ / "u").string()), 4);
  const std::string blocker = write("blocker", "x");
  EXPECT_EQ(run("run --config " + write("c.json", kMaxwell) + " --out " + blocker + "/sub"), 5);
  EXPECT_EQ(run("convergence --config " +
                write("two.json", R"({"suite":["cs_modes"],"mesh_sequence":[{"builder":"circle","n":8},{"builder":"circle","n":16}]})")),
            3);
  EXPECT_EQ(run("census --config " + write("bf.json", R"({"model":{"name":"bf_corner"}})")), 3);
}

TEST_F(Cli, FailingCheckExitsOne) {
  // An impossible flow tolerance makes the check fail without any error.
  const std::string cfg = write(
      "t.json", R"({"model":{"name":"ym_su2","mesh":{"builder":"disk","n":1}},"suite":["flow_residual"],"tolerances":{"flow":1e-300}})");
  EXPECT_EQ(run("run --config " + cfg + " --out " + (dir_ / "t").string()), 1);
  EXPECT_NE(slurp(dir_ / "stdout.txt").find("FAIL flow_residual"), std::string::npos);
}

TEST_F(Cli, ConvergenceCensusHodge) {
  const std::string cfg = write(
      "v.json", R"({"seed":2,"suite":["cs_modes","green_identity"],"model":{"name":"maxwell","mesh":{"builder":"disk","n":1}},)"
                R"("mesh_sequence":[{"builder":"circle","n":8},{"builder":"circle","n":16},{"builder":"circle","n":32}]})");
  EXPECT_EQ(run("convergence --config " + cfg + " --out " + (dir_ / "cv").string()), 0);
  EXPECT_NE(slurp(dir_ / "cv" / "convergence_green_identity.json").find("\"order\": \"exact\""), std::string::npos);
  EXPECT_EQ(run("convergence --config " + cfg + " --format csv --out " + (dir_ / "cvc").string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "cvc" / "convergence_cs_modes.csv"));
  EXPECT_EQ(run("census --config " + cfg + " --out " + (dir_ / "ce").string()), 0);
  EXPECT_NE(slurp(dir_ / "ce" / "census.json").find("gauss_law_max_total"), std::string::npos);
  EXPECT_EQ(run("hodge-report --config " + cfg + " --out " + (dir_ / "h").string()), 0);
  EXPECT_NE(slurp(dir_ / "h" / "hodge_report.json").find("neumann_spectrum"), std::string::npos);
  EXPECT_EQ(run("hodge-report --config " + cfg + " --format csv --out " + (dir_ / "hc").string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "hc" / "hodge_spectrum.csv"));
}

TEST_F(Cli, HelpListsExitCodes) {
  EXPECT_EQ(run("--help"), 0);
  const std::string help = slurp(dir_ / "stdout.txt");
  EXPECT_NE(help.find("Exit codes"), std::string::npos);
  for (const std::string sub : {"run", "convergence", "census", "hodge-report"}) EXPECT_NE(help.find(sub), std::string::npos);
}
