#include "divalg/counting.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace divalg;

namespace {

AlgebraPtr q13() { return Algebra::create({"q13", QuaternionData{Rat(-1), Rat(3)}, true, ""}); }
AlgebraPtr mat(int n) { return Algebra::create({"m", MatrixData{n}, false, ""}); }
AlgebraPtr cyclic() {
  CubicFieldSpec f{{Int(-1), Int(-2), Int(1)}, {Int(-2), Int(0), Int(1)}, 0};
  return Algebra::create({"c", CyclicData{f, Rat(2)}, true, ""});
}

using Coords = std::vector<long long>;

std::set<Coords> coords_of(const CountResult& r) {
  std::set<Coords> s;
  for (const auto& e : r.elements) s.insert(e.coords);
  return s;
}

// Oracle for M_2(Z): every integer matrix with entries bounded by
// ceil(m^{1/2} (sqrt 2 + delta)), filtered by det = m and the proximity test.
std::set<Coords> m2_oracle(long m, double delta, const RMat& z) {
  long R = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(m)) * (std::sqrt(2.0) + delta)));
  std::set<Coords> out;
  RMat zi = z.inverse();
  for (long a = -R; a <= R; ++a)
    for (long b = -R; b <= R; ++b)
      for (long c = -R; c <= R; ++c)
        for (long d = -R; d <= R; ++d) {
          if (a * d - b * c != m) continue;
          RMat M(2, 2);
          M << a, b, c, d;
          M /= std::sqrt(static_cast<double>(m));
          if (dist_to_so(zi * M * z).distance < delta) out.insert({a, b, c, d});
        }
  return out;
}

}  // namespace

TEST(Gram, M2IsIdentity) {
  auto o = standard_order(mat(2));
  RMat G = quadratic_form_at(identity_base_point(2), *o, real_embedding(*o->algebra()));
  EXPECT_LT((G - RMat::Identity(4, 4)).norm(), 1e-14);
}

TEST(Gram, QuaternionAtIdentity) {
  // Oracle: images 1 -> I, i -> [[0,-1],[1,0]], j -> diag(r,-r), ij -> [[0,r],[r,0]], r = sqrt 3.
  double r = std::sqrt(3.0);
  std::vector<RMat> img(4, RMat(2, 2));
  img[0] << 1, 0, 0, 1;
  img[1] << 0, -1, 1, 0;
  img[2] << r, 0, 0, -r;
  img[3] << 0, r, r, 0;
  RMat oracle(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) oracle(i, j) = (img[i].array() * img[j].array()).sum();
  auto o = standard_order(q13());
  RMat G = quadratic_form_at(identity_base_point(2), *o, real_embedding(*o->algebra()));
  EXPECT_LT((G - oracle).norm(), 1e-12);
  EXPECT_NEAR(G(2, 2), 6, 1e-12);
}

TEST(Gram, RotatingBasePointLeavesFormUnchanged) {
  std::mt19937_64 rng(41);
  auto o = standard_order(cyclic());
  auto emb = real_embedding(*o->algebra());
  auto z = random_base_point(3, rng);
  auto zk = make_base_point(z.z * random_rotation(3, rng));
  EXPECT_LT((quadratic_form_at(z, *o, emb) - quadratic_form_at(zk, *o, emb)).norm(), 1e-9);
}

TEST(Enumerate, StabilizerOfIInM2) {
  auto o = standard_order(mat(2));
  Enumerator en(o, identity_base_point(2));
  auto r = en.enumerate(Int(1), 1e-3);
  std::set<Coords> expect{{1, 0, 0, 1}, {-1, 0, 0, -1}, {0, -1, 1, 0}, {0, 1, -1, 0}};
  EXPECT_EQ(coords_of(r), expect);
  EXPECT_EQ(coords_of(r), m2_oracle(1, 1e-3, RMat::Identity(2, 2)));
}

TEST(Enumerate, M2AgreesWithEntryOracle) {
  auto o = standard_order(mat(2));
  std::mt19937_64 rng(42);
  for (int t = 0; t < 6; ++t) {
    auto z = t == 0 ? identity_base_point(2) : random_base_point(2, rng, 0.4);
    Enumerator en(o, z);
    for (long m = 1; m <= 12; ++m)
      for (double d : {0.3, 0.8}) EXPECT_EQ(coords_of(en.enumerate(Int(m), d)), m2_oracle(m, d, z.z)) << m << " " << d;
  }
}

TEST(Enumerate, AgreesWithBoxScan) {
  std::mt19937_64 rng(43);
  for (const auto& o : {standard_order(q13()), standard_order(mat(3))}) {
    Enumerator en(o, random_base_point(o->degree(), rng, 0.3));
    for (long m = 1; m <= (o->degree() == 2 ? 30 : 1); ++m) {
      auto a = en.enumerate(Int(m), 0.9);
      auto b = en.scan(Int(m), 0.9, {1, 400'000'000, 1.05});
      EXPECT_EQ(coords_of(a), coords_of(b)) << m;
    }
  }
}

TEST(Enumerate, ExactNormAndProximity) {
  auto o = standard_order(q13());
  auto emb = real_embedding(*o->algebra());
  auto z = from_upper_half_plane(0.2, 1.3);
  Enumerator en(o, z);
  for (long m = 1; m <= 40; ++m)
    for (const auto& e : en.enumerate(Int(m), 0.7).elements) {
      auto g = to_element(*o, e.coords);
      EXPECT_EQ(reduced_norm(g), m);
      EXPECT_TRUE(near_so(z, g, 0.7, emb).inside);
    }
}

TEST(Enumerate, MonotoneInDelta) {
  auto o = standard_order(cyclic());
  Enumerator en(o, identity_base_point(3));
  for (long m : {1, 2, 8, 13}) {
    std::set<Coords> prev;
    for (double d : {0.05, 0.3, 0.8, 1.2}) {
      auto cur = coords_of(en.enumerate(Int(m), d));
      EXPECT_TRUE(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
      prev = cur;
    }
  }
}

TEST(Enumerate, WorkerCountDoesNotChangeOutput) {
  auto o = standard_order(q13());
  Enumerator en(o, from_upper_half_plane(0.1, 0.9));
  auto a = en.enumerate(Int(91), 0.6, {1});
  auto b = en.enumerate(Int(91), 0.6, {8});
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.elements[i].coords, b.elements[i].coords);
  EXPECT_EQ(a.nodes, b.nodes);
}

TEST(Enumerate, Validation) {
  auto o = standard_order(q13());
  Enumerator en(o, identity_base_point(2));
  EXPECT_THROW(en.enumerate(Int(1), 0.0), Error);
  EXPECT_THROW(en.enumerate(Int(0), 0.1), Error);
  EXPECT_THROW(en.enumerate(Int(1), 2.5), Error);
  EXPECT_THROW(en.enumerate(Int(100000), 1.0, {1, 1000}), BudgetExceeded);
  try {
    en.enumerate(Int(100000), 1.0, {1, 1000});
  } catch (const BudgetExceeded& e) {
    EXPECT_GE(e.partial().nodes, 1000u);
  }
}

TEST(Enumerate, IdentityAlwaysPresent) {
  std::mt19937_64 rng(44);
  for (const auto& o : {standard_order(q13()), standard_order(cyclic()), standard_order(mat(3))}) {
    Enumerator en(o, random_base_point(o->degree(), rng, 0.5));
    auto r = en.enumerate(Int(1), 0.01);
    Coords one(o->dim());
    for (std::size_t i = 0; i < o->dim(); ++i) one[i] = o->one()[i].get_si();
    EXPECT_TRUE(coords_of(r).count(one));
  }
}

TEST(GramDivisibility, BasisAndRepeats) {
  auto o = standard_order(q13());
  std::vector<Element> basis;
  for (std::size_t k = 0; k < 4; ++k) basis.push_back(o->basis_element(k));
  auto c = gram_divisibility(basis, o->discriminant());
  EXPECT_EQ(Rat(abs(c.s)), 144);
  EXPECT_EQ(c.rank, 4u);
  EXPECT_EQ(gram_determinant(basis), c.s);  // product-based route
  basis[3] = basis[2];
  auto d = gram_divisibility(basis, o->discriminant());
  EXPECT_EQ(d.s, 0);
  EXPECT_TRUE(d.divisible);
}

TEST(GramDivisibility, RandomTuplesMatchProductRoute) {
  std::mt19937_64 rng(45);
  std::uniform_int_distribution<long> u(-3, 3);
  auto o = standard_order(q13());
  for (int t = 0; t < 200; ++t) {
    std::vector<Element> xs;
    for (int k = 0; k < 4; ++k) {
      std::vector<Int> x(4);
      for (auto& v : x) v = u(rng);
      xs.push_back(o->element(x));
    }
    auto c = gram_divisibility(xs, o->discriminant());
    EXPECT_EQ(c.s, gram_determinant(xs));
    EXPECT_TRUE(c.divisible);
  }
}

TEST(Proper, QuaternionSmallL) {
  auto o = standard_order(q13());
  Enumerator en(o, identity_base_point(2));
  auto r = lemma_proper_verify(en, 1, 0.05);
  EXPECT_TRUE(r.below_threshold);
  EXPECT_LE(r.gram_rank, 2u);
  EXPECT_TRUE(r.rank_deficient);
}

TEST(Proper, SplitControlReachesFullRank) {
  auto o = standard_order(mat(2));
  Enumerator en(o, identity_base_point(2));
  auto r = lemma_proper_verify(en, 3, 0.4);
  EXPECT_FALSE(r.below_threshold);
  EXPECT_EQ(r.gram_rank, 4u);
}

TEST(Commutator, NormExamples) {
  auto A = q13();
  auto i = A->basis_element(1), j = A->basis_element(2);
  EXPECT_EQ(commutator_norm(i, i), 0);
  // [i, j] = 2k, nr(2k) = 4 * (ab) = -12
  EXPECT_EQ(commutator_norm(i, j), -12);
  EXPECT_THROW(commutator_certificate(identity_base_point(2), 0.1, i, j, real_embedding(*A)), Error);
}

TEST(Commutator, LevelDivisibilityExample) {
  auto base = standard_order(mat(2));
  auto o = o0n_order(base, Int(5), auto_splitting(*base->algebra(), Int(5)));
  auto A = base->algebra();
  auto g1 = A->element({Rat(1), Rat(1), Rat(0), Rat(1)});
  auto g2 = A->element({Rat(1), Rat(0), Rat(5), Rat(1)});
  auto r = commutator_level_divisibility(*o, Int(5), g1, g2);
  EXPECT_EQ(r.norm, -25);
  EXPECT_TRUE(r.divisible);
}

TEST(Commutator, OddDegreeCertificates) {
  auto o = standard_order(cyclic());
  auto emb = real_embedding(*o->algebra());
  std::mt19937_64 rng(46);
  std::size_t certified = 0;
  for (int t = 0; t < 5; ++t) {
    auto z = t == 0 ? identity_base_point(3) : random_base_point(3, rng, 0.5);
    Enumerator en(o, z);
    std::vector<Element> xs;
    for (long m = 1; m <= 8; ++m)
      for (const auto& e : en.enumerate(Int(m), 0.5).elements) xs.push_back(to_element(*o, e.coords));
    for (const auto& a : xs)
      for (const auto& b : xs) {
        auto c = commutator_certificate(z, 0.5, a, b, emb);
        EXPECT_EQ(c.norm, commutator_norm(a, b));
        if (c.certified_small) {
          ++certified;
          EXPECT_TRUE(c.vanishes);
          EXPECT_TRUE(c.commute);
        }
      }
  }
  EXPECT_GT(certified, 0u);
}

TEST(Convexity, CyclicOrderOnlyIdentity) {
  auto o = standard_order(cyclic());
  Enumerator en(o, identity_base_point(3));
  auto r = convexity_verify(en, 0.05);
  EXPECT_TRUE(r.applicable);
  EXPECT_TRUE(r.only_identity);
  EXPECT_NEAR(r.threshold, std::cbrt(9.0) - 2, 1e-15);
  EXPECT_THROW(convexity_verify(en, 0.1), Error);
}

TEST(Convexity, SplitControlInapplicable) {
  auto o = standard_order(mat(2));
  Enumerator en(o, identity_base_point(2));
  auto r = convexity_verify(en, 0.05);
  EXPECT_FALSE(r.applicable);
  EXPECT_EQ(r.result.size(), 4u);
}

TEST(Units, RealQuadraticAgainstDirectSearch) {
  // Z[j] with j^2 = 3: units x + y sqrt 3 with x^2 - 3 y^2 = +-1 and |2x| <= box.
  auto A = q13();
  SubfieldOrder s{A, {A->one(), A->basis_element(2)}};
  auto rep = unit_box_count(s, 0.5);
  ASSERT_EQ(rep.box.size(), 1u);
  long B = rep.box[0];
  std::set<std::vector<Int>> direct;
  for (long x = -B; x <= B; ++x)
    for (long y = -B; y <= B; ++y)
      if (std::labs(2 * x) <= B && (x * x - 3 * y * y == 1 || x * x - 3 * y * y == -1)) direct.insert({Int(x), Int(y)});
  std::set<std::vector<Int>> found(rep.units.begin(), rep.units.end());
  EXPECT_EQ(found, direct);
  EXPECT_TRUE(rep.within_bound);
}

TEST(Units, CubicSubfield) {
  auto A = cyclic();
  SubfieldOrder s{A, {A->basis_element(0), A->basis_element(1), A->basis_element(2)}};
  auto rep = unit_box_count(s, 0.1, 1.0);
  EXPECT_EQ(rep.box, (std::vector<long long>{3, 3}));
  EXPECT_EQ(rep.trace_vectors, 49u);
  EXPECT_TRUE(rep.within_bound);
  EXPECT_TRUE(std::count(rep.units.begin(), rep.units.end(), std::vector<Int>{1, 0, 0}));
  for (const auto& u : rep.units) {
    auto x = Rat(u[0]) * A->one() + Rat(u[1]) * A->basis_element(1) + Rat(u[2]) * A->basis_element(2);
    EXPECT_EQ(Rat(abs(reduced_norm(x))), 1);
  }
}

TEST(Units, DefaultBoxReachesTheta) {
  // theta has norm -f(0) = 1, tr(theta) = -1 and tr(theta^2) = 5: inside the default box.
  auto A = cyclic();
  SubfieldOrder s{A, {A->basis_element(0), A->basis_element(1), A->basis_element(2)}};
  auto rep = unit_box_count(s, 0.1);
  EXPECT_TRUE(std::count(rep.units.begin(), rep.units.end(), std::vector<Int>{0, 1, 0}));
  EXPECT_TRUE(std::count(rep.units.begin(), rep.units.end(), std::vector<Int>{-1, 0, 0}));
  EXPECT_TRUE(rep.within_bound);
}

TEST(Units, RejectsNonCommutativeSubring) {
  auto A = q13();
  SubfieldOrder s{A, {A->basis_element(1), A->basis_element(2)}};
  EXPECT_THROW(unit_box_count(s, 0.1), Error);
}

TEST(Ideals, FormulaExamples) {
  EXPECT_EQ(ideal_count_formula(3, Int(7), 0), 1);
  EXPECT_EQ(ideal_count_formula(2, Int(2), 1), 3);
  EXPECT_EQ(ideal_count_formula(3, Int(2), 1), 7);
  EXPECT_EQ(ideal_count_bruteforce(2, 2, 1), 3);
  EXPECT_EQ(ideal_count_bruteforce(3, 2, 0), 1);
}

TEST(Ideals, SubgroupOracleForSmallCells) {
  // Independent oracle: count subgroups of index q^e in Z^2 containing q^e Z^2
  // as subgroups of (Z/q^e)^2 of order q^e, by closure of generated sets.
  for (long q : {2, 3})
    for (unsigned e = 0; e <= 2; ++e) {
      long M = 1;
      for (unsigned i = 0; i < e; ++i) M *= q;
      std::set<std::set<std::pair<long, long>>> subgroups;
      for (long a = 0; a < M; ++a)
        for (long b = 0; b < M; ++b)
          for (long c = 0; c < M; ++c)
            for (long d = 0; d < M; ++d) {
              std::set<std::pair<long, long>> g;
              for (long s = 0; s < M; ++s)
                for (long t = 0; t < M; ++t) g.insert({(s * a + t * c) % M, (s * b + t * d) % M});
              if (static_cast<long>(g.size()) * M == M * M) subgroups.insert(g);
            }
      if (e == 0) EXPECT_EQ(ideal_count_bruteforce(2, q, e), 1);
      else EXPECT_EQ(ideal_count_bruteforce(2, q, e), Int(static_cast<long>(subgroups.size()))) << q << " " << e;
    }
}

TEST(Ideals, BudgetGuard) { EXPECT_THROW(ideal_count_bruteforce(3, 5, 9), Error); }

TEST(CountBound, SplitControl) {
  auto o = standard_order(mat(2));
  Enumerator en(o, identity_base_point(2));
  auto rep = count_bound_check(en, 1e-3, 1);
  ASSERT_EQ(rep.rows.size(), 1u);
  EXPECT_EQ(rep.rows[0].count, 4u);
  EXPECT_NEAR(rep.constant, 4 / 1.001, 1e-12);
}

TEST(CountBound, CyclicTable) {
  auto o = standard_order(cyclic());
  Enumerator en(o, identity_base_point(3));
  auto rep = count_bound_check(en, 0.3, 20);
  EXPECT_EQ(rep.rows.size(), 20u);
  EXPECT_GE(rep.rows[0].count, 1u);
  EXPECT_TRUE(std::isfinite(rep.constant));
  EXPECT_TRUE(rep.rows[1].ramified);   // 2 | disc
  EXPECT_FALSE(rep.rows[2].ramified);  // 3
}

TEST(Enumerate, RootAtLowerEndOfDecreasingPiece) {
  // x0 = -5 solves x0^2 = 25 at the left edge of a decreasing piece of the leaf polynomial.
  auto o = standard_order(q13());
  Enumerator en(o, identity_base_point(2));
  for (long m : {25, 49, 625, 2401}) {
    auto a = en.enumerate(Int(m), 0.6);
    EXPECT_EQ(coords_of(a), coords_of(en.scan(Int(m), 0.6, {1, 400'000'000, 1.05}))) << m;
  }
  EXPECT_TRUE(coords_of(en.enumerate(Int(25), 0.3)).count({-5, 0, 0, 0}));
}
