#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(HARDY_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("measure info --potential gauss"), 0);
  EXPECT_EQ(run("criteria --kind nope"), 2);
  EXPECT_EQ(run("criteria --kind bp --unknown-flag"), 2);
  EXPECT_EQ(run("measure info --potential nosuchfamily"), 2);
  EXPECT_EQ(run("legendre --rprime 1.5 --t 2"), 2);
  EXPECT_EQ(run("evaluate --potential exp -i mls --f x"), 2);  // mls needs a positive f
  EXPECT_EQ(run("concentration deviation --potential exp --count 10"), 3);
  EXPECT_EQ(run("repro no-such-scenario"), 2);
}

TEST(Cli, ReportEmbedsConfigAndCsv) {
  const std::string base = ::testing::TempDir() + "hardy_cli_test";
  ASSERT_EQ(run("concentration deviation --count 2000 --seed 77 --rel-tol 1e-10 -o " + base +
                ".json --csv " + base),
            0);
  const std::string j = slurp(base + ".json");
  EXPECT_NE(j.find("\"seed\": 77"), std::string::npos);
  EXPECT_NE(j.find("\"rel-tol\": 1e-10"), std::string::npos);
  EXPECT_NE(j.find("\"subcommand\": \"concentration\""), std::string::npos);
  EXPECT_NE(j.find("\"version\""), std::string::npos);
  const std::string csv = slurp(base + ".empirical_tail.csv");
  EXPECT_EQ(csv.rfind("t,tail\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
}
