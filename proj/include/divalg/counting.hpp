#pragma once

// Enumeration of O(m; z, delta) = {gamma in O : nr(gamma) = m, z^-1 gamma~ z
// within delta of SO(n)} by Fincke-Pohst search on the form
// gamma -> ||z^-1 rho(gamma) z||_F^2, and the verifiers built on it.

#include "divalg/geometry.hpp"
#include "divalg/orders.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <atomic>
#include <functional>
#include <numeric>
#include <set>
#include <thread>

namespace divalg {

using i128 = __int128;

struct EnumOptions {
  unsigned jobs = 1;
  std::uint64_t budget = 10'000'000;  // search-tree nodes
  double safety = 1.05;
};

struct CountedElement {
  std::vector<long long> coords;  // order coordinates
  double distance = 0;
  double margin = 0;  // delta - distance
};

struct CountResult {
  Int m;
  double delta = 0;
  double bound = 0;  // enumeration radius^2 used
  std::uint64_t nodes = 0;
  std::vector<CountedElement> elements;
  std::size_t size() const { return elements.size(); }
};

class BudgetExceeded : public Error {
 public:
  BudgetExceeded(const std::string& what, CountResult partial) : Error(what), partial_(std::move(partial)) {}
  const CountResult& partial() const { return partial_; }

 private:
  CountResult partial_;
};

/// Gram matrix of gamma -> ||z^-1 rho(gamma) z||_F^2 on the order basis.
inline RMat quadratic_form_at(const BasePoint& z, const Order& o, const RealEmbedding& emb) {
  const std::size_t d = o.dim();
  std::vector<RMat> W(d);
  for (std::size_t k = 0; k < d; ++k) W[k] = z.z_inv * emb.image(o.basis().col(k)) * z.z;
  RMat G(d, d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = i; j < d; ++j) G(i, j) = G(j, i) = (W[i].array() * W[j].array()).sum();
  Eigen::LLT<RMat> llt(G);
  if (llt.info() != Eigen::Success) throw Error("embedding degenerate");
  return G;
}

/// Fincke-Pohst enumerator for one (order, base point) pair.
class Enumerator {
 public:
  Enumerator(OrderPtr order, BasePoint z) : order_(std::move(order)), z_(std::move(z)) {
    emb_ = real_embedding(*order_->algebra());
    const std::size_t d = order_->dim();
    n_ = order_->degree();
    if (z_.z.rows() != n_) throw Error("base point size differs from the algebra degree");
    gram_ = quadratic_form_at(z_, *order_, emb_);
    W_.resize(d);
    for (std::size_t k = 0; k < d; ++k) W_[k] = z_.z_inv * emb_.image(order_->basis().col(k)) * z_.z;
    // Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2 from G = R^T R.
    Eigen::LLT<RMat> llt(gram_);
    RMat R = llt.matrixU();
    q_ = RMat::Zero(d, d);
    for (std::size_t i = 0; i < d; ++i) {
      q_(i, i) = R(i, i) * R(i, i);
      for (std::size_t j = i + 1; j < d; ++j) q_(i, j) = R(i, j) / R(i, i);
    }
    // Leaf polynomial structure: how often coordinate 0 occurs in each term.
    const auto& nf = order_->norm_form();
    for (const auto& t : nf.terms) {
      LeafTerm lt;
      lt.num = t.num_ll;
      for (int s = 0; s < 3; ++s) {
        if (t.idx[s] == 255) continue;
        if (t.idx[s] == 0) ++lt.power;
        else lt.others[lt.n_others++] = t.idx[s];
      }
      leaf_terms_.push_back(lt);
    }
    small_ = nf.small_coeffs;
  }

  const Order& order() const { return *order_; }
  const OrderPtr& order_ptr() const { return order_; }
  const BasePoint& base_point() const { return z_; }
  const RealEmbedding& embedding() const { return emb_; }
  const RMat& gram() const { return gram_; }

  double radius_squared(const Int& m, double delta, double safety) const {
    double r = std::pow(m.get_d(), 2.0 / n_) * std::pow(std::sqrt(static_cast<double>(n_)) + delta, 2);
    return safety * r * (1 + 1e-9) + 1e-9;
  }

  /// Distance of z^-1 gamma~ z to SO(n) for order coordinates x with nr = m.
  ProximityResult proximity(const std::vector<long long>& x, const Int& m) const {
    RMat M = RMat::Zero(n_, n_);
    for (std::size_t k = 0; k < x.size(); ++k)
      if (x[k]) M += static_cast<double>(x[k]) * W_[k];
    M /= std::pow(m.get_d(), 1.0 / n_);
    return dist_to_so(M);
  }

  CountResult enumerate(const Int& m, double delta, const EnumOptions& opt = {}) const {
    validate(m, delta);
    const std::size_t d = order_->dim();
    CountResult res;
    res.m = m;
    res.delta = delta;
    res.bound = radius_squared(m, delta, opt.safety);
    const Int target_z = m * order_->norm_form().den;
    const bool fast = small_ && target_z.fits_slong_p();
    const i128 target = fast ? static_cast<i128>(target_z.get_si()) : 0;

    const std::size_t top = d - 1;
    double r = std::sqrt(res.bound / q_(top, top));
    long long lo = static_cast<long long>(std::ceil(-r - 1e-9));
    long long hi = static_cast<long long>(std::floor(r + 1e-9));
    std::vector<long long> tops;
    for (long long v = lo; v <= hi; ++v) tops.push_back(v);

    std::atomic<std::uint64_t> nodes{0};
    std::atomic<bool> abort{false};
    const unsigned jobs = std::max(1u, std::min<unsigned>(opt.jobs, static_cast<unsigned>(tops.size())));
    std::vector<std::vector<CountedElement>> found(jobs);
    std::vector<std::string> errors(jobs);
    auto worker = [&](unsigned w) {
      Ctx ctx{std::vector<long long>(d, 0), 0, &nodes, &abort, opt.budget, &found[w], &m, target, fast, &target_z,
              delta};
      try {
        for (std::size_t t = w; t < tops.size() && !abort.load(); t += jobs) {
          long long v = tops[t];
          ctx.x[top] = v;
          ++ctx.local_nodes;
          double rem = res.bound - q_(top, top) * static_cast<double>(v) * static_cast<double>(v);
          if (rem < -1e-9) continue;
          if (top == 0) leaf(ctx, 0.0, rem);
          else recurse(ctx, top - 1, rem);
        }
      } catch (const std::exception& e) {
        errors[w] = e.what();
        abort = true;
      }
      nodes += ctx.local_nodes;
    };
    if (jobs == 1) {
      worker(0);
    } else {
      std::vector<std::thread> threads;
      for (unsigned w = 0; w < jobs; ++w) threads.emplace_back(worker, w);
      for (auto& t : threads) t.join();
    }
    for (const auto& e : errors)
      if (!e.empty()) throw Error(e);
    for (auto& f : found)
      for (auto& e : f) res.elements.push_back(std::move(e));
    std::sort(res.elements.begin(), res.elements.end(),
              [](const CountedElement& a, const CountedElement& b) { return a.coords < b.coords; });
    res.nodes = nodes.load();
    if (res.nodes > opt.budget)
      throw BudgetExceeded("enumeration budget exceeded after " + std::to_string(res.nodes) + " nodes", res);
    return res;
  }

  /// Independent oracle: plain box scan over |x_i| <= sqrt(B (G^-1)_ii).
  CountResult scan(const Int& m, double delta, const EnumOptions& opt = {}) const {
    validate(m, delta);
    const std::size_t d = order_->dim();
    CountResult res;
    res.m = m;
    res.delta = delta;
    res.bound = radius_squared(m, delta, opt.safety);
    RMat Ginv = gram_.inverse();
    std::vector<long long> R(d);
    double total = 1;
    for (std::size_t i = 0; i < d; ++i) {
      R[i] = static_cast<long long>(std::floor(std::sqrt(res.bound * Ginv(i, i)) + 1e-9));
      total *= static_cast<double>(2 * R[i] + 1);
    }
    if (total > static_cast<double>(opt.budget)) throw Error("scan exceeds its budget");
    std::vector<long long> x(d);
    for (std::size_t i = 0; i < d; ++i) x[i] = -R[i];
    std::vector<Int> xi(d);
    while (true) {
      ++res.nodes;
      for (std::size_t i = 0; i < d; ++i) xi[i] = Int(static_cast<long>(x[i]));
      if (order_->norm(xi) == m) {
        auto p = proximity(x, m);
        if (p.distance < delta) res.elements.push_back({x, p.distance, delta - p.distance});
      }
      std::size_t k = 0;
      while (k < d && x[k] == R[k]) {
        x[k] = -R[k];
        ++k;
      }
      if (k == d) break;
      ++x[k];
    }
    std::sort(res.elements.begin(), res.elements.end(),
              [](const CountedElement& a, const CountedElement& b) { return a.coords < b.coords; });
    return res;
  }

 private:
  struct LeafTerm {
    long long num = 0;
    int power = 0;
    std::array<std::uint8_t, 3> others{};
    int n_others = 0;
  };
  struct Ctx {
    std::vector<long long> x;
    std::uint64_t local_nodes;
    std::atomic<std::uint64_t>* nodes;
    std::atomic<bool>* abort;
    std::uint64_t budget;
    std::vector<CountedElement>* out;
    const Int* m;
    i128 target;
    bool fast;
    const Int* target_z;
    double delta;
  };

  void validate(const Int& m, double delta) const {
    if (m < 1) throw Error("m must be a positive integer");
    if (!(delta > 0)) throw Error("delta must be positive");
    if (delta > 2) throw Error("delta must be at most 2");
  }

  void tick(Ctx& c) const {
    if (++c.local_nodes >= 4096) {
      std::uint64_t total = (*c.nodes += c.local_nodes);
      c.local_nodes = 0;
      if (total > c.budget) *c.abort = true;
    }
  }

  void recurse(Ctx& c, std::size_t i, double T) const {
    if (c.abort->load(std::memory_order_relaxed)) return;
    const std::size_t d = c.x.size();
    double center = 0;
    for (std::size_t j = i + 1; j < d; ++j) center -= q_(i, j) * static_cast<double>(c.x[j]);
    if (i == 0) {
      leaf(c, center, T);
      return;
    }
    double r = std::sqrt(std::max(0.0, T) / q_(i, i));
    long long lo = static_cast<long long>(std::ceil(center - r - 1e-9));
    long long hi = static_cast<long long>(std::floor(center + r + 1e-9));
    for (long long v = lo; v <= hi; ++v) {
      tick(c);
      double diff = static_cast<double>(v) - center;
      double rem = T - q_(i, i) * diff * diff;
      if (rem < -1e-9) continue;
      c.x[i] = v;
      recurse(c, i - 1, rem);
    }
    c.x[i] = 0;
  }

  void accept(Ctx& c, long long t) const {
    c.x[0] = t;
    auto p = proximity(c.x, *c.m);
    if (p.distance < c.delta) c.out->push_back({c.x, p.distance, c.delta - p.distance});
  }

  static bool eval_poly(const i128 a[4], long long t, i128& out) {
    i128 r = a[3];
    for (int k = 2; k >= 0; --k) {
      if (__builtin_mul_overflow(r, static_cast<i128>(t), &r)) return false;
      if (__builtin_add_overflow(r, a[k], &r)) return false;
    }
    out = r;
    return true;
  }

  void leaf(Ctx& c, double center, double T) const {
    tick(c);
    double r = std::sqrt(std::max(0.0, T) / q_(0, 0));
    long long lo = static_cast<long long>(std::ceil(center - r - 1e-9));
    long long hi = static_cast<long long>(std::floor(center + r + 1e-9));
    if (lo > hi) return;
    i128 a[4] = {0, 0, 0, 0};
    bool ok = c.fast;
    for (const auto& lt : leaf_terms_) {
      if (!ok) break;
      i128 prod = lt.num;
      for (int s = 0; s < lt.n_others && ok; ++s)
        ok = !__builtin_mul_overflow(prod, static_cast<i128>(c.x[lt.others[s]]), &prod);
      if (ok) ok = !__builtin_add_overflow(a[lt.power], prod, &a[lt.power]);
    }
    if (!ok) {
      leaf_slow(c, lo, hi);
      return;
    }
    a[0] -= c.target;  // solve P(t) = 0
    int deg = 3;
    while (deg > 0 && a[deg] == 0) --deg;
    auto check = [&](long long t) -> bool {
      i128 v;
      if (!eval_poly(a, t, v)) return false;
      if (v == 0) accept(c, t);
      return true;
    };
    if (hi - lo <= 8 || deg == 0) {
      if (deg == 0 && a[0] != 0) return;
      for (long long t = lo; t <= hi; ++t)
        if (!check(t)) {
          leaf_slow(c, t, hi);
          return;
        }
      return;
    }
    if (deg == 1) {
      if ((-a[0]) % a[1] == 0) {
        i128 t = (-a[0]) / a[1];
        if (t >= lo && t <= hi) accept(c, static_cast<long long>(t));
      }
      return;
    }
    // Monotone pieces between critical points; check points near them directly.
    std::vector<double> crit;
    double A3 = static_cast<double>(a[3]), A2 = static_cast<double>(a[2]), A1 = static_cast<double>(a[1]);
    if (deg == 2) {
      crit.push_back(-A1 / (2 * A2));
    } else {
      double qa = 3 * A3, qb = 2 * A2, qc = A1;
      double disc = qb * qb - 4 * qa * qc;
      if (disc >= 0) {
        double s = std::sqrt(disc);
        crit.push_back((-qb - s) / (2 * qa));
        crit.push_back((-qb + s) / (2 * qa));
      }
    }
    std::vector<long long> pts{lo, hi};
    for (double cp : crit) {
      if (!(cp > static_cast<double>(lo) - 2 && cp < static_cast<double>(hi) + 2)) continue;
      long long f = static_cast<long long>(std::floor(cp));
      for (long long t = f - 1; t <= f + 2; ++t)
        if (t >= lo && t <= hi) pts.push_back(t);
    }
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    for (long long t : pts)
      if (!check(t)) {
        leaf_slow(c, lo, hi);
        return;
      }
    for (std::size_t k = 0; k + 1 < pts.size(); ++k) {
      long long l = pts[k] + 1, h = pts[k + 1] - 1;
      if (l > h) continue;
      i128 vl, vh;
      if (!eval_poly(a, l, vl) || !eval_poly(a, h, vh)) {
        leaf_slow(c, l, h);
        continue;
      }
      if ((vl > 0 && vh > 0) || (vl < 0 && vh < 0)) continue;
      bool increasing = vh > vl;
      while (l < h) {
        long long mid = l + (h - l) / 2;
        i128 vm = 0;
        eval_poly(a, mid, vm);
        // first point with P >= 0 (increasing) or P <= 0 (decreasing)
        if (increasing ? vm < 0 : vm > 0) l = mid + 1;
        else h = mid;
      }
      i128 v;
      if (eval_poly(a, l, v) && v == 0) accept(c, l);
    }
  }

  void leaf_slow(Ctx& c, long long lo, long long hi) const {
    std::vector<Int> xi(c.x.size());
    for (long long t = lo; t <= hi; ++t) {
      c.x[0] = t;
      for (std::size_t i = 0; i < c.x.size(); ++i) xi[i] = Int(static_cast<long>(c.x[i]));
      if (order_->norm(xi) == *c.m) accept(c, t);
    }
  }

  OrderPtr order_;
  BasePoint z_;
  RealEmbedding emb_;
  int n_ = 2;
  RMat gram_, q_;
  std::vector<RMat> W_;
  std::vector<LeafTerm> leaf_terms_;
  bool small_ = true;
};

inline Element to_element(const Order& o, const std::vector<long long>& x) {
  std::vector<Int> xi(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xi[i] = Int(static_cast<long>(x[i]));
  return o.element(xi);
}

// ---------------------------------------------------------------------------
// Gram divisibility

struct GramCertificate {
  Rat s;
  bool integral = false;
  bool divisible = false;
  std::size_t rank = 0;
};

/// Trace form tr(e_a e_b) of the algebra on its standard basis.
inline MatQ algebra_trace_form(const Algebra& alg) {
  const std::size_t d = alg.dim();
  MatQ T(d, d);
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) T(a, b) = alg.trace(alg.product(a, b));
  return T;
}

/// Gram of tr(x_i x_j) as X^T T X with X the coordinate columns.
inline GramCertificate gram_divisibility(const std::vector<Element>& xs, const Int& D, const MatQ& T) {
  const std::size_t k = xs.size();
  if (k == 0) throw Error("empty tuple");
  const std::size_t d = xs[0].algebra()->dim();
  MatQ X(d, k);
  for (std::size_t j = 0; j < k; ++j) {
    if (xs[j].algebra() != xs[0].algebra()) throw Error("elements belong to different algebras");
    for (std::size_t i = 0; i < d; ++i) X(i, j) = xs[j][i];
  }
  MatQ g = X.transpose() * (T * X);
  GramCertificate c;
  c.s = det(g);
  c.rank = rank(g);
  c.integral = is_integer(c.s);
  c.divisible = c.integral && D != 0 && mpz_divisible_p(c.s.get_num_mpz_t(), D.get_mpz_t());
  return c;
}

inline GramCertificate gram_divisibility(const std::vector<Element>& xs, const Int& D) {
  if (xs.empty()) throw Error("empty tuple");
  return gram_divisibility(xs, D, algebra_trace_form(*xs[0].algebra()));
}

// ---------------------------------------------------------------------------
// Linear dependence of small-norm elements

struct ProperReport {
  double threshold = 0;          // D^{1/(4p(p-1))}
  bool below_threshold = false;  // L < threshold
  long long max_norm = 0;        // L^{2p-2}
  double radius = 0;             // (2p-2) delta
  std::size_t collected = 0;
  std::size_t span_rank = 0;
  std::size_t gram_rank = 0;
  bool rank_deficient = false;  // gram_rank < p^2
};

inline ProperReport lemma_proper_verify(const Enumerator& en, long long L, double delta, const EnumOptions& opt = {}) {
  const Order& o = en.order();
  const int p = o.degree();
  if (L < 1) throw Error("L must be positive");
  ProperReport r;
  r.threshold = std::pow(o.discriminant().get_d(), 1.0 / (4.0 * p * (p - 1)));
  r.below_threshold = static_cast<double>(L) < r.threshold;
  r.max_norm = pow_ll(L, static_cast<unsigned>(2 * p - 2));
  r.radius = (2 * p - 2) * delta;
  std::vector<std::vector<long long>> rows;
  for (long long m = 1; m <= r.max_norm; ++m) {
    auto res = en.enumerate(Int(static_cast<long>(m)), r.radius, opt);
    r.collected += res.size();
    for (const auto& e : res.elements) rows.push_back(e.coords);
  }
  // Basis of the span, then the Gram rank on that basis.
  MatQ X(std::max<std::size_t>(rows.size(), 1), o.dim());
  for (std::size_t i = 0; i < rows.size(); ++i)
    for (std::size_t j = 0; j < o.dim(); ++j) X(i, j) = Rat(static_cast<long>(rows[i][j]));
  std::vector<Element> basis;
  if (!rows.empty()) {
    MatQ Xr = X;
    auto piv = rref(Xr);
    r.span_rank = piv.size();
    for (std::size_t i = 0; i < piv.size(); ++i) {
      std::vector<Int> v(o.dim());
      // Clear denominators of the echelon row.
      Int den = 1;
      for (std::size_t j = 0; j < o.dim(); ++j) den = lcm_int(den, Xr(i, j).get_den());
      for (std::size_t j = 0; j < o.dim(); ++j) v[j] = Rat(Xr(i, j) * den).get_num();
      basis.push_back(o.element(v));
    }
    auto cert = gram_divisibility(basis, o.discriminant());
    r.gram_rank = cert.rank;
  }
  r.rank_deficient = r.gram_rank < static_cast<std::size_t>(p * p);
  return r;
}

// ---------------------------------------------------------------------------
// Commutators

inline Rat commutator_norm(const Element& a, const Element& b) { return reduced_norm(commutator(a, b)); }

struct CommutatorCertificate {
  Rat norm;                 // exact nr([g1, g2])
  double d1 = 0, d2 = 0;    // distances of z^-1 g~ z to SO(n)
  bool near1 = false, near2 = false;
  double bound = 0;         // certified bound on |nr([g1, g2])|
  bool certified_small = false;  // bound < 1
  bool vanishes = false;         // norm == 0
  bool commute = false;          // g1 g2 == g2 g1 exactly
  double ratio = 0;              // |norm| / (delta m1 m2)
};

/// In odd degree the rotation commutator k1 k2 - k2 k1 is singular, so
/// |nr([g1, g2])| <= m1 m2 (prod_j (|a_j| + f) - prod_j |a_j|) with a_j its
/// columns and f = 2 (d1 + d2 + d1 d2) bounding the perturbation.
/// Same, from proximity results already computed for g1 and g2 at one base point.
inline CommutatorCertificate commutator_certificate(const NearResult& n1, const NearResult& n2, double delta,
                                                    const Element& g1, const Element& g2) {
  const int n = g1.algebra()->degree();
  if (n % 2 == 0) throw Error("odd-degree mechanism");
  CommutatorCertificate c;
  Rat m1 = reduced_norm(g1), m2 = reduced_norm(g2);
  c.d1 = n1.proximity.distance;
  c.d2 = n2.proximity.distance;
  c.near1 = n1.inside;
  c.near2 = n2.inside;
  const RMat& k1 = n1.proximity.rotation;
  const RMat& k2 = n2.proximity.rotation;
  RMat A = k1 * k2 - k2 * k1;
  double f = 2 * (c.d1 + c.d2 + c.d1 * c.d2) + 1e-9;
  double with = 1, without = 1;
  for (int j = 0; j < n; ++j) {
    double a = A.col(j).norm() + 1e-12;
    with *= a + f;
    without *= a;
  }
  double mm = m1.get_d() * m2.get_d();
  c.bound = mm * (with - without + 1e-12);
  c.certified_small = c.bound < 1;
  Element comm = commutator(g1, g2);
  c.norm = reduced_norm(comm);
  c.vanishes = c.norm == 0;
  c.commute = comm.is_zero();
  c.ratio = std::fabs(c.norm.get_d()) / (delta * mm);
  return c;
}

inline CommutatorCertificate commutator_certificate(const BasePoint& z, double delta, const Element& g1,
                                                    const Element& g2, const RealEmbedding& emb) {
  if (g1.algebra()->degree() % 2 == 0) throw Error("odd-degree mechanism");
  return commutator_certificate(near_so(z, g1, delta, emb), near_so(z, g2, delta, emb), delta, g1, g2);
}

struct LevelDivisibility {
  Rat norm;
  bool divisible = false;
};

inline LevelDivisibility commutator_level_divisibility(const Order& o, const Int& N, const Element& g1,
                                                       const Element& g2) {
  if (!o.contains(g1) || !o.contains(g2)) throw Error("elements must lie in the order");
  LevelDivisibility r;
  r.norm = commutator_norm(g1, g2);
  r.divisible = is_integer(r.norm) && mpz_divisible_p(r.norm.get_num_mpz_t(), N.get_mpz_t());
  return r;
}

// ---------------------------------------------------------------------------
// Convexity mechanism

/// Largest rho with (2 + rho)^n - 2^n < 1 (for rho below it, |nr(gamma - 1)| < 1).
inline double convexity_threshold(int n) { return std::pow(std::pow(2.0, n) + 1.0, 1.0 / n) - 2.0; }

struct ConvexityReport {
  bool applicable = false;
  std::string reason;
  double threshold = 0;
  CountResult result;
  bool only_identity = false;
};

inline ConvexityReport convexity_verify(const Enumerator& en, double rho, const EnumOptions& opt = {}) {
  const Order& o = en.order();
  const int n = o.degree();
  ConvexityReport r;
  r.threshold = convexity_threshold(n);
  if (n % 2 == 0) r.reason = "even degree: det(k - 1) need not vanish";
  else if (!o.algebra()->spec().division_attested) r.reason = "algebra is not attested to be a division algebra";
  else r.applicable = true;
  if (r.applicable && !(rho < r.threshold)) {
    std::ostringstream os;
    os << "threshold violated: rho = " << rho << " exceeds " << r.threshold << " by " << (rho - r.threshold);
    throw Error(os.str());
  }
  r.result = en.enumerate(Int(1), rho, opt);
  std::vector<long long> one(o.dim());
  for (std::size_t i = 0; i < o.dim(); ++i) one[i] = o.one()[i].get_si();
  r.only_identity = r.result.size() == 1 && r.result.elements[0].coords == one;
  return r;
}

// ---------------------------------------------------------------------------
// Units of a commutative subring through trace boxes

struct SubfieldOrder {
  AlgebraPtr alg;
  std::vector<Element> basis;  // rank p, contains 1, commutative, closed
};

struct UnitBoxReport {
  int p = 0;
  std::vector<long long> box;          // half-widths for tr(xi^j), j = 1..p-1
  std::uint64_t trace_vectors = 0;     // integer points scanned
  std::uint64_t candidates = 0;        // charpolys built (two constant terms each)
  std::uint64_t admissible = 0;        // candidates realised by a unit of the subring
  std::vector<std::vector<Int>> units; // coordinates in the subring basis
  bool within_bound = false;           // #units <= p * admissible
};

inline UnitBoxReport unit_box_count(const SubfieldOrder& sub, double delta, double c = -1) {
  const std::size_t p = sub.basis.size();
  const AlgebraPtr& alg = sub.alg;
  if (static_cast<int>(p) != alg->degree()) throw Error("subfield order must have rank equal to the degree");
  if (c < 0) c = 2 * std::sqrt(static_cast<double>(alg->degree()));
  const std::size_t d = alg->dim();
  // Express products in the subring basis: choose p independent coordinate rows.
  MatQ B(d, p);
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t i = 0; i < d; ++i) B(i, k) = sub.basis[k][i];
  MatQ Bt = B.transpose();
  auto piv = rref(Bt);
  if (piv.size() != p) throw Error("subfield basis is linearly dependent");
  MatQ Bsq(p, p);
  for (std::size_t r = 0; r < p; ++r)
    for (std::size_t k = 0; k < p; ++k) Bsq(r, k) = B(piv[r], k);
  MatQ Binv = inverse(Bsq);
  auto solve_in = [&](const Element& x) -> std::vector<Rat> {
    std::vector<Rat> c2(p, Rat(0));
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t r = 0; r < p; ++r) c2[i] += Binv(i, r) * x[piv[r]];
    // verify exact membership
    Element back = alg->zero();
    for (std::size_t k = 0; k < p; ++k) back = back + c2[k] * sub.basis[k];
    if (!(back == x)) throw Error("subring is not closed under multiplication");
    return c2;
  };
  // Closure, commutativity, integrality, identity.
  for (std::size_t a = 0; a < p; ++a)
    for (std::size_t b = 0; b < p; ++b) {
      auto prod = sub.basis[a] * sub.basis[b];
      if (!(prod == sub.basis[b] * sub.basis[a])) throw Error("subring is not commutative");
      for (const auto& v : solve_in(prod))
        if (!is_integer(v)) throw Error("subring is not closed under multiplication");
    }
  for (const auto& v : solve_in(alg->one()))
    if (!is_integer(v)) throw Error("subring does not contain 1");

  // Real embeddings via a generic element's eigenvectors.
  std::vector<Eigen::MatrixXd> Lk(p, Eigen::MatrixXd(p, p));
  for (std::size_t k = 0; k < p; ++k)
    for (std::size_t l = 0; l < p; ++l) {
      auto col = solve_in(sub.basis[k] * sub.basis[l]);
      for (std::size_t i = 0; i < p; ++i) Lk[k](i, l) = col[i].get_d();
    }
  Eigen::MatrixXd Phi(p, p);
  bool found = false;
  for (int attempt = 1; attempt < 50 && !found; ++attempt) {
    Eigen::MatrixXd Lg = Eigen::MatrixXd::Zero(p, p);
    for (std::size_t k = 0; k < p; ++k) Lg += static_cast<double>((attempt * (k + 3) + k * k) % 7 + 1) * Lk[k];
    Eigen::EigenSolver<Eigen::MatrixXd> es(Lg);
    if (es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-9) continue;
    Eigen::VectorXd ev = es.eigenvalues().real();
    bool distinct = true;
    for (std::size_t i = 0; i < p; ++i)
      for (std::size_t j = i + 1; j < p; ++j)
        if (std::fabs(ev(i) - ev(j)) < 1e-6) distinct = false;
    if (!distinct) continue;
    Eigen::MatrixXd V = es.eigenvectors().real();
    Eigen::MatrixXd Vinv = V.inverse();
    for (std::size_t k = 0; k < p; ++k) {
      Eigen::MatrixXd D = Vinv * Lk[k] * V;
      for (std::size_t i = 0; i < p; ++i) Phi(i, k) = D(i, i);
    }
    found = true;
  }
  if (!found) throw Error("subring is not totally real");
  Eigen::MatrixXd PhiInv = Phi.inverse();

  UnitBoxReport rep;
  rep.p = static_cast<int>(p);
  for (std::size_t j = 1; j < p; ++j)
    rep.box.push_back(static_cast<long long>(std::floor(c * p * (1 + j * delta) + 1e-12)));
  std::vector<long long> t(p - 1);
  for (std::size_t j = 0; j + 1 < p; ++j) t[j] = -rep.box[j];
  std::set<std::vector<Int>> units;
  auto perms = [&]() {
    std::vector<std::vector<int>> out;
    std::vector<int> idx(p);
    std::iota(idx.begin(), idx.end(), 0);
    do out.push_back(idx);
    while (std::next_permutation(idx.begin(), idx.end()));
    return out;
  }();
  while (true) {
    ++rep.trace_vectors;
    std::vector<Rat> traces(p - 1);
    for (std::size_t j = 0; j + 1 < p; ++j) traces[j] = Rat(static_cast<long>(t[j]));
    // e_1..e_{p-1} from the first p-1 power sums; e_p = +-1.
    std::vector<Rat> e(p + 1, Rat(0));
    e[0] = 1;
    if (p > 1) {
      auto ee = power_sums_to_elementary(traces);
      for (std::size_t k = 1; k < p; ++k) e[k] = ee[k];
    }
    for (int sgn_e : {1, -1}) {
      ++rep.candidates;
      e[p] = sgn_e;
      std::vector<Rat> coef(p + 1);
      for (std::size_t k = 0; k <= p; ++k) coef[p - k] = (k % 2 == 0) ? e[k] : Rat(-e[k]);
      Poly cand(coef);
      bool integral = std::all_of(coef.begin(), coef.end(), [](const Rat& r) { return is_integer(r); });
      if (!integral) continue;
      // Real roots of the candidate.
      Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(p, p);
      for (std::size_t i = 1; i < p; ++i) comp(i, i - 1) = 1;
      for (std::size_t i = 0; i < p; ++i) comp(i, p - 1) = -coef[i].get_d();
      Eigen::EigenSolver<Eigen::MatrixXd> es(comp, false);
      // Repeated roots (e.g. (X - 1)^p) come back perturbed by about eps^{1/p};
      // the exact charpoly check below is what decides.
      if (es.eigenvalues().imag().cwiseAbs().maxCoeff() > 1e-3) continue;
      Eigen::VectorXd roots = es.eigenvalues().real();
      bool realised = false;
      for (const auto& perm : perms) {
        Eigen::VectorXd target(p);
        for (std::size_t i = 0; i < p; ++i) target(i) = roots(perm[i]);
        Eigen::VectorXd coords = PhiInv * target;
        std::vector<Int> ci(p);
        bool near_int = true;
        for (std::size_t k = 0; k < p; ++k) {
          double rd = std::round(coords(k));
          if (std::fabs(coords(k) - rd) > 1e-2) near_int = false;
          ci[k] = Int(static_cast<long>(rd));
        }
        if (!near_int) continue;
        Element xi = alg->zero();
        for (std::size_t k = 0; k < p; ++k) xi = xi + Rat(ci[k]) * sub.basis[k];
        if (reduced_charpoly(xi) == cand) {
          realised = true;
          units.insert(ci);
        }
      }
      if (realised) ++rep.admissible;
    }
    std::size_t k = 0;
    while (k + 1 < p && t[k] == rep.box[k]) {
      t[k] = -rep.box[k];
      ++k;
    }
    if (k + 1 >= p) break;
    ++t[k];
  }
  rep.units.assign(units.begin(), units.end());
  rep.within_bound = rep.units.size() <= p * rep.admissible;
  return rep;
}

// ---------------------------------------------------------------------------
// Local ideal counts

/// sum over a_1 + ... + a_p = e of q^{(p-1) a_1 + (p-2) a_2 + ... + a_{p-1}}.
inline Int ideal_count_formula(unsigned p, const Int& q, unsigned e) {
  if (p < 1) throw Error("degree must be positive");
  Int total = 0;
  std::vector<unsigned> a(p, 0);
  std::function<void(unsigned, unsigned)> rec = [&](unsigned j, unsigned left) {
    if (j + 1 == p) {
      a[j] = left;
      unsigned long w = 0;
      for (unsigned i = 0; i < p; ++i) w += static_cast<unsigned long>(p - 1 - i) * a[i];
      total += pow_int(q, w);
      return;
    }
    for (unsigned v = 0; v <= left; ++v) {
      a[j] = v;
      rec(j + 1, left - v);
    }
  };
  rec(0, e);
  return total;
}

/// Counts lower-triangular Hermite generator matrices of sublattices of Z^p of
/// index q^e: diagonal q^{a_i}, entries left of the diagonal in row i taken
/// in [0, q^{a_i}); each is checked to be canonical, of determinant q^e and to
/// contain q^e Z^p.
inline Int ideal_count_bruteforce(unsigned p, long q, unsigned e) {
  if (p < 1) throw Error("degree must be positive");
  double size = std::pow(static_cast<double>(q), e) * p * p;
  if (size > static_cast<double>(1u << 24)) throw Error("ideal count exceeds the enumeration budget");
  const Int qe = pow_int(Int(q), e);
  Int count = 0;
  std::vector<unsigned> a(p, 0);
  std::function<void(unsigned, unsigned)> rec = [&](unsigned j, unsigned left) {
    if (j + 1 == p) {
      a[j] = left;
      std::vector<long> piv(p);
      for (unsigned i = 0; i < p; ++i) piv[i] = pow_ll(q, a[i]);
      // off-diagonal cells (i, k) with k < i
      std::vector<std::pair<unsigned, unsigned>> cells;
      for (unsigned i = 0; i < p; ++i)
        for (unsigned k = 0; k < i; ++k) cells.push_back({i, k});
      std::vector<long> val(cells.size(), 0);
      while (true) {
        MatZ H(p, p);
        for (unsigned i = 0; i < p; ++i) H(i, i) = piv[i];
        for (std::size_t c = 0; c < cells.size(); ++c) H(cells[c].first, cells[c].second) = val[c];
        bool valid = hnf(H).form == H && abs_int(det(H)) == qe;
        if (valid) {
          MatQ Hinv = inverse(to_rational(H));
          valid = to_integer(Rat(qe) * Hinv).has_value();
        }
        if (valid) ++count;
        std::size_t c = 0;
        while (c < cells.size() && val[c] + 1 == piv[cells[c].first]) val[c++] = 0;
        if (c == cells.size()) break;
        ++val[c];
      }
      return;
    }
    for (unsigned v = 0; v <= left; ++v) {
      a[j] = v;
      rec(j + 1, left - v);
    }
  };
  rec(0, e);
  return count;
}

// ---------------------------------------------------------------------------
// Counting bound shape

struct CountBoundRow {
  long long m = 0;
  std::size_t count = 0;
  Int tau;
  double bound = 0;  // tau(m)^{p-1} (1 + delta)^{p-1}
  double ratio = 0;
  bool ramified = false;  // gcd(m, disc) > 1
};

struct CountBoundReport {
  std::vector<CountBoundRow> rows;
  double constant = 0;  // max ratio
  double threshold = 0; // D^{1/(4p(p-1))}
};

inline CountBoundReport count_bound_check(const Enumerator& en, double delta, long long m_max,
                                          const EnumOptions& opt = {}) {
  const Order& o = en.order();
  const int p = o.degree();
  CountBoundReport rep;
  rep.threshold = std::pow(o.discriminant().get_d(), 1.0 / (4.0 * p * (p - 1)));
  for (long long m = 1; m <= m_max; ++m) {
    CountBoundRow row;
    row.m = m;
    Int mz(static_cast<long>(m));
    row.count = en.enumerate(mz, delta, opt).size();
    row.tau = divisor_count(mz);
    row.bound = std::pow(row.tau.get_d(), p - 1) * std::pow(1 + delta, p - 1);
    row.ratio = row.count / row.bound;
    row.ramified = gcd_int(mz, o.discriminant()) != 1;
    rep.constant = std::max(rep.constant, row.ratio);
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace divalg
