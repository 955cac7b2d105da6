#include "divalg/orders.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace divalg;

namespace {

AlgebraPtr q13() { return Algebra::create({"q13", QuaternionData{Rat(-1), Rat(3)}, true, ""}); }
AlgebraPtr mat(int n) { return Algebra::create({"m", MatrixData{n}, false, ""}); }

AlgebraPtr cyclic() {
  CubicFieldSpec f{{Int(-1), Int(-2), Int(1)}, {Int(-2), Int(0), Int(1)}, 0};
  return Algebra::create({"c", CyclicData{f, Rat(2)}, true, ""});
}

OrderPtr maximal_q13(const AlgebraPtr& A) {
  MatQ B = MatQ::identity(4);
  for (std::size_t i = 0; i < 4; ++i) B(i, 3) = Rat(1, 2);
  return Order::create("maximal", A, B);
}

// Unimodular change of basis from a product of elementary moves.
MatQ random_unimodular(std::mt19937_64& rng, std::size_t n) {
  std::uniform_int_distribution<long> u(-2, 2);
  std::uniform_int_distribution<std::size_t> idx(0, n - 1);
  MatQ m = MatQ::identity(n);
  for (int s = 0; s < 6; ++s) {
    std::size_t i = idx(rng), j = idx(rng);
    if (i == j) continue;
    MatQ e = MatQ::identity(n);
    e(i, j) = Rat(u(rng));
    m = m * e;
  }
  return m;
}

}  // namespace

TEST(Order, StandardQuaternionDiscriminant) {
  // Oracle: the trace Gram on 1, i, j, ij is diag(2, 2a, 2b, -2ab).
  long a = -1, b = 3;
  Int oracle = abs_int(Int(2 * (2 * a) * (2 * b) * (-2 * a * b)));
  auto o = standard_order(q13());
  EXPECT_EQ(o->discriminant(), oracle);
  EXPECT_EQ(o->discriminant(), 144);
}

TEST(Order, MaximalQuaternionOrder) {
  auto A = q13();
  auto std_o = standard_order(A), max_o = maximal_q13(A);
  EXPECT_EQ(max_o->discriminant(), 36);
  auto rel = order_index(std_o, max_o);
  EXPECT_EQ(rel.index, 2);
  EXPECT_TRUE(rel.consistent);
}

TEST(Order, RejectsNonClosedLattice) {
  auto A = q13();
  MatQ B = MatQ::identity(4);
  B(1, 1) = Rat(1, 2);  // i/2: (i/2)^2 = -1/4 not in the lattice
  EXPECT_FALSE(verify_order(*A, B).ok);
  EXPECT_THROW(Order::create("bad", A, B), Error);
  MatQ C = MatQ::identity(4);
  C(0, 0) = 2;  // no identity
  EXPECT_FALSE(verify_order(*A, C).ok);
}

TEST(Order, DiscriminantIsBasisInvariant) {
  std::mt19937_64 rng(21);
  auto A = q13();
  auto o = maximal_q13(A);
  for (int t = 0; t < 50; ++t) {
    MatQ B = o->basis() * random_unimodular(rng, 4);
    EXPECT_EQ(Order::create("x", A, B)->discriminant(), 36);
  }
}

TEST(Order, CyclicStandardOrder) {
  auto o = standard_order(cyclic());
  // disc(Z[theta])^3 * b^6 = 49^3 * 2^6
  EXPECT_EQ(o->discriminant(), pow_int(Int(49), 3) * 64);
  std::vector<Int> x{1, 2, 0, -1, 0, 1, 0, 0, 1};
  EXPECT_EQ(Rat(o->norm(x)), reduced_norm(o->element(x)));
}

TEST(Level, Gamma0InM2) {
  auto base = standard_order(mat(2));
  for (long N = 1; N <= 12; ++N) {
    auto o = o0n_order(base, Int(N), auto_splitting(*base->algebra(), Int(N)));
    auto rel = order_index(o, base);
    EXPECT_EQ(rel.index, N);
    EXPECT_EQ(o->discriminant(), N * N);
    // lower-left entry divisible by N; everything else free
    for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(mod_floor(o->basis()(2, k).get_num(), Int(N)), 0);
  }
}

TEST(Level, QuaternionO0N) {
  auto base = standard_order(q13());
  auto o = o0n_order(base, Int(5), auto_splitting(*base->algebra(), Int(5)));
  EXPECT_EQ(o->discriminant(), 3600);
  EXPECT_THROW(o0n_order(base, Int(6), auto_splitting(*base->algebra(), Int(5))), Error);
  EXPECT_THROW(auto_splitting(*base->algebra(), Int(3)), Error);
}

TEST(Level, M3IndexIsNSquared) {
  auto base = standard_order(mat(3));
  for (long N : {2, 3, 5}) {
    auto o = o0n_order(base, Int(N), auto_splitting(*base->algebra(), Int(N)));
    EXPECT_EQ(order_index(o, base).index, N * N);
  }
}

TEST(Local, UnitCountsOfMatrixRings) {
  // |GL_2(F_p)| = (p^2 - 1)(p^2 - p)
  auto o = standard_order(mat(2));
  for (long p : {2, 3, 5}) {
    auto F = localize(*o, p, 1);
    EXPECT_EQ(unit_count_bruteforce(F), Int((p * p - 1) * (p * p - p)));
  }
}

TEST(Local, RadicalOfGamma0) {
  auto base = standard_order(mat(2));
  auto o = o0n_order(base, Int(2), auto_splitting(*base->algebra(), Int(2)));
  auto F = localize(*o, 2, 1);
  auto J = jacobson_radical(F);
  EXPECT_EQ(J.basis.size(), 2u);
  EXPECT_GE(J.nilpotency, 2u);
  auto f = filtration_identity(*o, 2);
  EXPECT_TRUE(f.holds);
  EXPECT_EQ(f.lhs, 4);  // diagonal entries 1, the two off-diagonal coordinates free
}

TEST(Local, UnitIndexOfGamma0) {
  auto base = standard_order(mat(2));
  for (long p : {2, 3}) {
    auto o = o0n_order(base, Int(p), auto_splitting(*base->algebra(), Int(p)));
    auto r = unit_index_report(o, base, p, 2);
    ASSERT_TRUE(r.direct_available);
    EXPECT_EQ(r.direct_index, Rat(p + 1));
    EXPECT_TRUE(r.filtration_sub.holds);
    EXPECT_TRUE(r.filtration_sup.holds);
  }
}

TEST(Local, RadicalOfRamifiedQuaternionOrder) {
  // At a ramified prime the maximal order mod p has a radical of dimension 2.
  auto o = maximal_q13(q13());
  auto F = localize(*o, 3, 1);
  auto J = jacobson_radical(F);
  EXPECT_EQ(J.basis.size(), 2u);
  EXPECT_TRUE(filtration_identity(*o, 3).holds);
}

TEST(Gamma0, UnitIndexMatchesProjectiveLine) {
  for (long N = 1; N <= 60; ++N) EXPECT_EQ(gamma0_unit_index(Int(N)), projective_line_count(N)) << N;
}
