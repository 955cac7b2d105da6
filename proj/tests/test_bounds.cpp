#include "divalg/bounds.hpp"

#include <gtest/gtest.h>

using namespace divalg;

namespace {

// Closed forms written out independently of the library.
Rat oracle_delta1(long p) { return Rat(1, 16 * p * p * p); }
Rat oracle_delta2(long p) { return Rat(1, 8 * p * p * p * (p - 1)); }

// Balance -x = -1/(n(n-1)) + (n^2 + n(n-1)(n-2)) x by exact search over x = 1/k.
Rat oracle_spectral(long n) {
  for (long k = 1; k < 100000; ++k) {
    Rat x(1, k);
    if (-x == Rat(-1, n * (n - 1)) + Rat(n * n + n * (n - 1) * (n - 2)) * x) return x;
  }
  return Rat(0);
}

AlgebraPtr q13() { return Algebra::create({"q13", QuaternionData{Rat(-1), Rat(3)}, true, ""}); }

}  // namespace

TEST(Exponents, MainAgreesWithOracle) {
  for (long p : {3, 5, 7, 11, 13}) {
    auto r = exponents_main(p);
    EXPECT_EQ(r.delta1, oracle_delta1(p)) << p;
    EXPECT_EQ(r.delta2, oracle_delta2(p)) << p;
  }
  EXPECT_EQ(exponents_main(3).delta1, Rat(1, 432));
  EXPECT_EQ(exponents_main(3).delta2, Rat(1, 432));
  EXPECT_EQ(exponents_main(5).delta1, Rat(1, 2000));
  EXPECT_EQ(exponents_main(5).delta2, Rat(1, 4000));
  EXPECT_EQ(exponents_main(7).delta1, Rat(1, 5488));
  EXPECT_EQ(exponents_main(7).delta2, Rat(1, 16464));
}

TEST(Exponents, Validation) {
  EXPECT_THROW(exponents_main(2), Error);
  EXPECT_THROW(exponents_main(9), Error);
  EXPECT_THROW(exponents_main(1), Error);
  EXPECT_THROW(exponents_eichler(4), Error);
  EXPECT_THROW(exponents_eichler(1), Error);
}

TEST(Exponents, Quaternion) {
  auto r = exponents_quaternion();
  EXPECT_EQ(r.delta1, Rat(1, 120));
  EXPECT_EQ(r.delta2, Rat(1, 30));
  ASSERT_EQ(r.l_exponents.size(), 1u);
  Rat x = r.l_exponents[0].second;
  EXPECT_EQ(-x, Rat(-1, 2) + 14 * x);
}

TEST(Exponents, EichlerDoublesTheMainSavings) {
  for (long n : {3, 5, 7}) {
    auto e = exponents_eichler(n);
    auto m = exponents_main(n);
    EXPECT_EQ(e.delta1, 2 * m.delta1);
    EXPECT_EQ(e.delta2, 2 * m.delta2);
  }
  EXPECT_EQ(exponents_eichler(3).delta1, Rat(1, 216));
  EXPECT_EQ(exponents_eichler(3).delta2, Rat(1, 216));
}

TEST(Optimize, SpectralBalance) {
  for (long n : {3, 5, 7}) {
    auto s = optimize_L_spectral(n);
    EXPECT_EQ(s.l_exponent, oracle_spectral(n)) << n;
    EXPECT_TRUE(s.balanced);
    EXPECT_GE(s.optimal, s.weakened);
  }
  EXPECT_EQ(optimize_L_spectral(3).optimal, Rat(1, 96));
  EXPECT_EQ(optimize_L_spectral(3).weakened, Rat(1, 162));
}

TEST(Optimize, DiscAndHybrid) {
  EXPECT_EQ(optimize_L_disc(3).l_exponent, Rat(1, 216));
  EXPECT_EQ(optimize_L_disc(3).hybrid, Rat(1, 432));
  for (long p : {3, 5, 7, 11})
    for (const auto& row : hybrid_consistency(p)) EXPECT_TRUE(row.equal) << p << " " << row.name;
}

TEST(Spectral, EigenvalueProxy) {
  EXPECT_DOUBLE_EQ(eigenvalue_to_S(1, 2), 2);
  EXPECT_DOUBLE_EQ(eigenvalue_to_S(100, 2), 11);
  EXPECT_DOUBLE_EQ(eigenvalue_to_S(16, 3), 65);
  EXPECT_THROW(eigenvalue_to_S(0, 3), Error);
}

TEST(Pretrace, HandBuiltCounts) {
  PretraceParams p;
  p.n = 2;
  p.S = 16;
  p.L = 2;
  p.delta = 0.25;
  p.primes = {5, 7};
  PretraceCounts c;
  for (int nu = 1; nu <= 2; ++nu)
    for (long a : p.primes)
      for (long b : p.primes) {
        c.near[{nu, a, b}] = 1;
        c.far[{nu, a, b}] = 2;
      }
  auto t = pretrace_rhs(c, p);
  // identity 2/4; near (4 * 1/2 + 4 * 1/4) / 4; far 16^{-1/2} * 0.25^{-1/2} * 2 * 3 / 4
  EXPECT_DOUBLE_EQ(t.identity, 0.5);
  EXPECT_DOUBLE_EQ(t.near, 0.75);
  EXPECT_DOUBLE_EQ(t.far, 0.25 * 2 * 1.5);
  EXPECT_DOUBLE_EQ(t.total(), 0.5 + 0.75 + 0.75);
}

TEST(Pretrace, MonotoneInCountsAndDecreasingInS) {
  PretraceParams p;
  p.n = 3;
  p.L = 7;
  p.delta = 0.1;
  p.primes = {7, 11, 13};
  PretraceCounts c;
  for (int nu = 1; nu <= 3; ++nu)
    for (long a : p.primes)
      for (long b : p.primes) c.near[{nu, a, b}] = c.far[{nu, a, b}] = 1;
  double prev = 1e300;
  for (double S : {1.0, 10.0, 100.0, 1e4}) {
    p.S = S;
    double cur = pretrace_rhs(c, p).total();
    EXPECT_LT(cur, prev);
    prev = cur;
  }
  double base = pretrace_rhs(c, p).total();
  c.far[{2, 11, 13}] = 5;
  EXPECT_GT(pretrace_rhs(c, p).total(), base);
}

TEST(Pretrace, MissingCell) {
  PretraceParams p;
  p.primes = {5};
  PretraceCounts c;
  c.near[{1, 5, 5}] = 1;
  c.far[{1, 5, 5}] = 1;
  try {
    pretrace_rhs(c, p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("nu=2, l1=5, l2=5"), std::string::npos);
  }
}

TEST(Pretrace, CountsFromEnumeration) {
  auto o = standard_order(q13());
  Enumerator en(o, identity_base_point(2));
  PretraceParams p;
  p.n = 2;
  p.S = 4;
  p.L = 5;
  p.delta = 0.3;
  p.primes = {5, 7};
  auto c = pretrace_counts(en, p, 0.6);
  EXPECT_EQ(c.near.size(), 8u);
  for (const auto& [k, v] : c.near) {
    auto [nu, a, b] = k;
    EXPECT_EQ(v, en.enumerate(amplifier_norm(2, nu, a, b), 0.3).size());
    EXPECT_LE(v, c.far.at(k));
  }
  EXPECT_GT(pretrace_rhs(c, p).total(), 0);
}

TEST(Pretrace, AmplifierNorm) {
  EXPECT_EQ(amplifier_norm(3, 2, 5, 7), Int(25) * 7 * 7 * 7 * 7);
  EXPECT_EQ(amplifier_norm(2, 1, 11, 11), 121);
}
