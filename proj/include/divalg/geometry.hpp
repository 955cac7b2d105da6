#pragma once

// The proximity predicate behind the counting sets: normalise gamma to
// determinant one, conjugate by the base point z and measure the Frobenius
// distance to SO(n).

#include "divalg/algebra.hpp"

#include <Eigen/SVD>

#include <random>

namespace divalg {

using RMat = Eigen::MatrixXd;

inline constexpr double kAbsTol = 1e-9;

struct BasePoint {
  RMat z;
  RMat z_inv;
  double condition = 1.0;
};

inline BasePoint make_base_point(const RMat& z) {
  if (z.rows() != z.cols() || z.rows() < 2) throw Error("base point must be a square matrix");
  if (!z.allFinite()) throw Error("base point has non-finite entries");
  double d = z.determinant();
  if (std::fabs(d - 1.0) > kAbsTol * std::max(1.0, z.cwiseAbs().maxCoeff())) throw Error("base point must have determinant 1");
  Eigen::JacobiSVD<RMat> svd(z);
  const auto& s = svd.singularValues();
  BasePoint b;
  b.z = z;
  b.z_inv = z.inverse();
  b.condition = s(0) / s(s.size() - 1);
  return b;
}

inline BasePoint identity_base_point(int n) { return make_base_point(RMat::Identity(n, n)); }

/// z = [[sqrt(y), x / sqrt(y)], [0, 1 / sqrt(y)]], mapping i to x + iy.
inline BasePoint from_upper_half_plane(double x, double y) {
  if (!(y > 0)) throw Error("upper half-plane point needs y > 0");
  RMat z(2, 2);
  double r = std::sqrt(y);
  z << r, x / r, 0, 1 / r;
  return make_base_point(z);
}

/// Random Iwasawa-form base point n * a: unipotent upper part with entries in
/// [-radius, radius], diagonal exp(t_i) with sum t_i = 0 and |t_i| <= radius.
template <class Rng>
BasePoint random_base_point(int n, Rng& rng, double radius = 1.0) {
  std::uniform_real_distribution<double> u(-radius, radius);
  RMat N = RMat::Identity(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) N(i, j) = u(rng);
  std::vector<double> t(n);
  double sum = 0;
  for (int i = 0; i + 1 < n; ++i) {
    t[i] = u(rng) / 2;
    sum += t[i];
  }
  t[n - 1] = -sum;
  RMat A = RMat::Zero(n, n);
  for (int i = 0; i < n; ++i) A(i, i) = std::exp(t[i]);
  RMat z = N * A;
  z /= std::pow(z.determinant(), 1.0 / n);
  return make_base_point(z);
}

/// Haar-ish random rotation via QR of a Gaussian matrix.
template <class Rng>
RMat random_rotation(int n, Rng& rng) {
  std::normal_distribution<double> g;
  RMat m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = g(rng);
  Eigen::HouseholderQR<RMat> qr(m);
  RMat q = qr.householderQ();
  RMat r = qr.matrixQR();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) *= -1;
  if (q.determinant() < 0) q.col(0) *= -1;
  return q;
}

/// Rotation by angle t in the plane of coordinates (a, b).
inline RMat plane_rotation(int n, int a, int b, double t) {
  RMat k = RMat::Identity(n, n);
  k(a, a) = std::cos(t);
  k(a, b) = -std::sin(t);
  k(b, a) = std::sin(t);
  k(b, b) = std::cos(t);
  return k;
}

struct ProximityResult {
  double distance = 0;
  RMat rotation;
  Eigen::VectorXd singular_values;
};

/// min over k in SO(n) of ||M - k||_F.
inline ProximityResult dist_to_so(const RMat& M) {
  if (!M.allFinite()) throw Error("matrix has non-finite entries");
  const int n = static_cast<int>(M.rows());
  Eigen::JacobiSVD<RMat> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::VectorXd s = svd.singularValues();
  RMat U = svd.matrixU(), V = svd.matrixV();
  double sign = (U.determinant() * V.determinant() < 0) ? -1.0 : 1.0;
  double d2 = 0;
  for (int i = 0; i < n; ++i) {
    double target = (i == n - 1) ? sign : 1.0;
    d2 += (s(i) - target) * (s(i) - target);
  }
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(n);
  diag(n - 1) = sign;
  ProximityResult r;
  r.distance = std::sqrt(d2);
  r.rotation = U * diag.asDiagonal() * V.transpose();
  r.singular_values = s;
  return r;
}

/// Real image of gamma scaled by m^{-1/n}.
inline RMat normalize(const Element& g, const Rat& m, const RealEmbedding& emb) {
  if (m <= 0) throw Error("normalize requires positive norm");
  if (reduced_norm(g) != m) throw Error("normalize: m is not the reduced norm of the element");
  const int n = g.algebra()->degree();
  return emb.image(g.coords()) / std::pow(m.get_d(), 1.0 / n);
}

struct NearResult {
  bool inside = false;
  double margin = 0;  // delta - distance
  ProximityResult proximity;
};

/// Proximity for a normalised real matrix image.
inline NearResult near_so_image(const BasePoint& z, const RMat& normalized, double delta) {
  NearResult r;
  r.proximity = dist_to_so(z.z_inv * normalized * z.z);
  r.margin = delta - r.proximity.distance;
  r.inside = r.proximity.distance < delta;
  return r;
}

inline NearResult near_so(const BasePoint& z, const Element& g, double delta, const RealEmbedding& emb) {
  if (std::fabs(z.z.determinant()) < kAbsTol) throw Error("singular base point");
  Rat m = reduced_norm(g);
  if (m <= 0) throw Error("normalize requires positive norm");
  return near_so_image(z, normalize(g, m, emb), delta);
}

struct DetReport {
  std::size_t samples = 0;
  double max_abs_det = 0;
};

/// Samples rotations k in SO(n) and records max |det(k - I)|; zero in odd degree.
template <class Rng>
DetReport det_k_minus_one(int n, std::size_t samples, Rng& rng) {
  if (n % 2 == 0) throw Error("property holds only in odd degree");
  DetReport r;
  r.samples = samples;
  for (std::size_t s = 0; s < samples; ++s) {
    RMat k = random_rotation(n, rng);
    r.max_abs_det = std::max(r.max_abs_det, std::fabs((k - RMat::Identity(n, n)).determinant()));
  }
  return r;
}

}  // namespace divalg
