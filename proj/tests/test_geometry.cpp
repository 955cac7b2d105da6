#include "divalg/geometry.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace divalg;

namespace {

// Brute-force oracle for n = 2: minimise ||M - R(t)||_F over a fine angle grid
// and refine by golden-section search.
double brute_dist_so2(const RMat& M) {
  auto f = [&](double t) { return (M - plane_rotation(2, 0, 1, t)).norm(); };
  double best = 1e300, bt = 0;
  for (int k = 0; k < 20000; ++k) {
    double t = 2 * M_PI * k / 20000;
    if (f(t) < best) best = f(t), bt = t;
  }
  double lo = bt - 1e-3, hi = bt + 1e-3;
  for (int it = 0; it < 100; ++it) {
    double a = lo + (hi - lo) * 0.382, b = lo + (hi - lo) * 0.618;
    if (f(a) < f(b)) hi = b;
    else lo = a;
  }
  return f((lo + hi) / 2);
}

}  // namespace

TEST(Dist, Rotations) {
  EXPECT_NEAR(dist_to_so(RMat::Identity(3, 3)).distance, 0, 1e-14);
  std::mt19937_64 rng(31);
  for (int n = 2; n <= 4; ++n) EXPECT_NEAR(dist_to_so(random_rotation(n, rng)).distance, 0, 1e-12);
}

TEST(Dist, ReflectionNeedsSignFlip) {
  RMat R = RMat::Identity(2, 2);
  R(1, 1) = -1;
  EXPECT_NEAR(dist_to_so(R).distance, 2, 1e-12);
}

TEST(Dist, ShearAgainstBruteForce) {
  RMat M(2, 2);
  M << 1, 1, 0, 1;
  EXPECT_NEAR(dist_to_so(M).distance, brute_dist_so2(M), 1e-9);
  std::mt19937_64 rng(32);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int t = 0; t < 30; ++t) {
    RMat A(2, 2);
    A << u(rng), u(rng), u(rng), u(rng);
    EXPECT_NEAR(dist_to_so(A).distance, brute_dist_so2(A), 1e-8);
  }
}

TEST(Dist, BiInvariance) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int t = 0; t < 50; ++t) {
    RMat M = RMat::Random(3, 3);
    RMat k1 = random_rotation(3, rng), k2 = random_rotation(3, rng);
    EXPECT_NEAR(dist_to_so(k1 * M * k2).distance, dist_to_so(M).distance, 1e-10);
    auto r = dist_to_so(M);
    EXPECT_NEAR(r.rotation.determinant(), 1, 1e-12);
    EXPECT_NEAR((M - r.rotation).norm(), r.distance, 1e-10);
  }
}

TEST(BasePoint, Validation) {
  RMat z = RMat::Identity(2, 2) * 2;
  EXPECT_THROW(make_base_point(z), Error);
  auto b = from_upper_half_plane(0.3, 2.0);
  EXPECT_NEAR((b.z * b.z_inv - RMat::Identity(2, 2)).norm(), 0, 1e-14);
  EXPECT_NEAR(b.z.determinant(), 1, 1e-14);
  std::mt19937_64 rng(34);
  for (int n = 2; n <= 3; ++n) EXPECT_NEAR(random_base_point(n, rng).z.determinant(), 1, 1e-12);
}

TEST(Near, QuaternionUnitIsRotation) {
  auto A = Algebra::create({"q", QuaternionData{Rat(-1), Rat(3)}, true, ""});
  auto emb = real_embedding(*A);
  auto i = A->basis_element(1);
  auto r = near_so(identity_base_point(2), i, 1e-3, emb);
  EXPECT_TRUE(r.inside);
  EXPECT_NEAR(r.proximity.distance, 0, 1e-14);
  // Conjugating by z rotates the picture: z^-1 S z is no longer orthogonal.
  auto far = near_so(from_upper_half_plane(0, 4), i, 0.1, emb);
  EXPECT_FALSE(far.inside);
  EXPECT_THROW(normalize(A->zero(), Rat(0), emb), Error);
  EXPECT_THROW(normalize(i, Rat(2), emb), Error);
}

TEST(Near, InvariantUnderRotatingBasePoint) {
  auto A = Algebra::create({"q", QuaternionData{Rat(-1), Rat(3)}, true, ""});
  auto emb = real_embedding(*A);
  std::mt19937_64 rng(35);
  auto g = A->element({Rat(2), Rat(1), Rat(1), Rat(0)});
  auto z = random_base_point(2, rng);
  auto zk = make_base_point(z.z * random_rotation(2, rng));
  EXPECT_NEAR(near_so(z, g, 1, emb).proximity.distance, near_so(zk, g, 1, emb).proximity.distance, 1e-10);
}

TEST(DetKMinusOne, OddDegreeVanishes) {
  std::mt19937_64 rng(36);
  EXPECT_LT(det_k_minus_one(3, 1000, rng).max_abs_det, 1e-12);
  EXPECT_LT(det_k_minus_one(5, 200, rng).max_abs_det, 1e-11);
  EXPECT_THROW(det_k_minus_one(2, 10, rng), Error);
}
