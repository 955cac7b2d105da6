#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  std::string cmd = std::string(DIVALG_BIN) + " " + args + " 2>/dev/null";
  Run r;
  FILE* f = popen(cmd.c_str(), "r");
  if (!f) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, f)) > 0) r.out.append(buf, n);
  int status = pclose(f);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string cfg(const std::string& name) { return std::string(" --config ") + DIVALG_CONFIGS + "/" + name; }

std::size_t data_rows(const std::string& csv) {
  auto lines = static_cast<std::size_t>(std::count(csv.begin(), csv.end(), '\n'));
  return lines == 0 ? 0 : lines - 1;  // header
}

}  // namespace

TEST(Cli, DefineListsDiscriminants) {
  auto r = run("define" + cfg("quaternion.cfg"));
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("standard  algebra=q13 disc=144"), std::string::npos);
  EXPECT_NE(r.out.find("disc=3600"), std::string::npos);
  EXPECT_NE(r.out.find("[maximal : standard] = 2"), std::string::npos);
}

TEST(Cli, EnumerateSplitControl) {
  auto r = run("enumerate" + cfg("matrix.cfg") + " --order m2z --m 1 --delta 0.001");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(data_rows(r.out), 4u);
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "m,c0,c1,c2,c3,norm,distance,margin");
}

TEST(Cli, EnumerateCyclicIdentityOnly) {
  auto r = run("enumerate" + cfg("cyclic3.cfg") + " --order cyclic3 --m 1 --delta 0.05");
  ASSERT_EQ(r.code, 0);
  EXPECT_EQ(data_rows(r.out), 1u);
  EXPECT_EQ(r.out.substr(r.out.find('\n') + 1, 20), "1,1,0,0,0,0,0,0,0,0,");
}

TEST(Cli, EnumerateRangeWritesFiles) {
  std::string out = ::testing::TempDir() + "/enum.csv";
  auto r = run("enumerate" + cfg("quaternion.cfg") + " --order standard --m 1..6 --delta 0.5 --jobs 3 --out " + out);
  ASSERT_EQ(r.code, 0);
  std::ifstream j(out + ".json");
  std::stringstream ss;
  ss << j.rdbuf();
  EXPECT_NE(ss.str().find("\"counts\""), std::string::npos);
  auto serial = run("enumerate" + cfg("quaternion.cfg") + " --order standard --m 1..6 --delta 0.5");
  std::ifstream c(out);
  std::stringstream cs;
  cs << c.rdbuf();
  EXPECT_EQ(cs.str(), serial.out);
}

TEST(Cli, ValidationErrors) {
  EXPECT_EQ(run("enumerate" + cfg("matrix.cfg") + " --order m2z --m 1 --delta 0").code, 1);
  EXPECT_EQ(run("enumerate" + cfg("matrix.cfg") + " --order m2z --m 0 --delta 0.1").code, 1);
  EXPECT_EQ(run("enumerate" + cfg("matrix.cfg") + " --order nope --m 1 --delta 0.1").code, 1);
  EXPECT_EQ(run("enumerate" + cfg("matrix.cfg") + " --order m2z --m 1 --delta 0.1 --z '2 0; 0 2'").code, 1);
  EXPECT_EQ(run("enumerate --order m2z --delta 0.1").code, 1);
  EXPECT_EQ(run("define --config /nonexistent.cfg").code, 1);
  EXPECT_EQ(run("bounds --theorem main --p 4").code, 1);
}

TEST(Cli, BudgetExit) {
  auto r = run("enumerate" + cfg("quaternion.cfg") + " --order standard --m 100000 --delta 1 --budget 100");
  EXPECT_EQ(r.code, 3);
}

TEST(Cli, BoundsMain) {
  auto r = run("bounds --theorem main --p 3");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("δ₁ = 1/432, δ₂ = 1/432"), std::string::npos);
  r = run("bounds --theorem main --p 5");
  EXPECT_NE(r.out.find("δ₁ = 1/2000, δ₂ = 1/4000"), std::string::npos);
  r = run("bounds --theorem quaternion");
  EXPECT_NE(r.out.find("δ₁ = 1/120, δ₂ = 1/30"), std::string::npos);
}

TEST(Cli, BoundsPretrace) {
  auto r = run("bounds --theorem quaternion" + cfg("quaternion.cfg") + " --order maximal --L 6 --delta 0.3 --rho 0.6");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("identity term:"), std::string::npos);
  EXPECT_NE(r.out.find("total:"), std::string::npos);
  EXPECT_EQ(run("bounds" + cfg("quaternion.cfg") + " --order maximal --L 4").code, 1);
}

TEST(Cli, VerifyIdealSuite) {
  auto r = run("verify" + cfg("matrix.cfg") + " --suite ideal");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("summary:"), std::string::npos);
  EXPECT_NE(r.out.find(" 0 fail"), std::string::npos);
  EXPECT_EQ(run("verify" + cfg("matrix.cfg") + " --suite nonsense").code, 1);
}
