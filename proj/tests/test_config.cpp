#include "divalg/config.hpp"

#include <gtest/gtest.h>

using namespace divalg;

namespace {

std::string cfg(const std::string& name) { return std::string(DIVALG_CONFIGS) + "/" + name; }

// Returns the line number reported by a ConfigError, or -1.
int error_line(const std::string& text) {
  try {
    load_workspace_text(text);
  } catch (const ConfigError& e) {
    return e.line();
  }
  return -1;
}

const char* kQuat = "[algebra q]\ntype = quaternion\na = -1\nb = 3\ndivision = attested\n";

}  // namespace

TEST(Parse, SectionsCommentsAndRows) {
  std::istringstream in("# c\n[algebra x]  # trailing\nk = v w\n\n[verify]\nseed = 3\n");
  auto secs = parse_config(in, "t");
  ASSERT_EQ(secs.size(), 2u);
  EXPECT_EQ(secs[0].kind, "algebra");
  EXPECT_EQ(secs[0].name, "x");
  EXPECT_EQ(secs[0].require("k").value, "v w");
  EXPECT_EQ(secs[0].require("k").line, 3);
  auto rows = parse_rat_rows("1 0; 1/2 -3/4");
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[1][0], Rat(1, 2));
  EXPECT_EQ(rows[1][1], Rat(-3, 4));
}

TEST(Parse, ErrorsCarryLineNumbers) {
  EXPECT_EQ(error_line("[algebra q]\ntype = quaternion\ntype = cyclic3\n"), 3);
  EXPECT_EQ(error_line("[algebra q]\nnot a pair\n"), 2);
  EXPECT_EQ(error_line(std::string(kQuat) + "colour = blue\n"), 6);
  EXPECT_EQ(error_line(std::string(kQuat) + "\n[widget w]\n"), 7);
  EXPECT_EQ(error_line(std::string(kQuat) + "[order o]\nalgebra = q\nbasis = standard\nexpect_disc = 145\n"), 9);
  EXPECT_EQ(error_line(std::string(kQuat) + "[order o]\nalgebra = nope\nbasis = standard\n"), 7);
}

TEST(Load, ShippedConfigs) {
  auto ws = load_workspace({cfg("quaternion.cfg"), cfg("cyclic3.cfg"), cfg("matrix.cfg")});
  EXPECT_EQ(ws.order("standard").order->discriminant(), 144);
  EXPECT_EQ(ws.order("maximal").order->discriminant(), 36);
  EXPECT_EQ(ws.order("o0_5").order->discriminant(), 3600);
  EXPECT_EQ(ws.order("o0_5").level, 5);
  EXPECT_EQ(ws.order("cyclic3").order->discriminant(), 7529536);
  EXPECT_EQ(ws.order("m2z").order->discriminant(), 1);
  EXPECT_EQ(ws.relations.size(), 1u);
  EXPECT_EQ(ws.subrings.count("zsqrt3"), 1u);
  EXPECT_THROW(ws.order("missing"), Error);
}

TEST(Load, EmptyWorkspace) {
  try {
    load_workspace_text("# nothing\n");
    FAIL();
  } catch (const Error& e) {
    EXPECT_STREQ(e.what(), "no algebra defined");
  }
}

TEST(Load, NonClosedLatticeIsReported) {
  std::string text = std::string(kQuat) + "[order half]\nalgebra = q\nbasis = 1 0 0 0; 0 1/2 0 0; 0 0 1 0; 0 0 0 1\n";
  EXPECT_EQ(error_line(text), 8);
}

TEST(Load, SplitAlgebraCannotBeAttested) {
  std::string text = "[algebra m]\ntype = quaternion\na = 1\nb = 1\ndivision = attested\n";
  EXPECT_GT(error_line(text), 0);
  EXPECT_NO_THROW(load_workspace_text("[algebra m]\ntype = quaternion\na = 1\nb = 1\ndivision = no\n"));
}

TEST(Load, VerifySettings) {
  auto ws = load_workspace_text(std::string(kQuat) + "[verify]\ndelta = 0.2\nm_max = 7\nseed = 99\n");
  EXPECT_DOUBLE_EQ(ws.verify.delta, 0.2);
  EXPECT_EQ(ws.verify.m_max, 7);
  EXPECT_EQ(ws.seed, 99u);
  EXPECT_GT(error_line(std::string(kQuat) + "[verify]\ndelta = 3\n"), 0);
}
