#pragma once

// Orders: full Z-lattices closed under multiplication. Discriminants, index
// relations, O_0(N) sub-orders, reductions mod p^k with their Jacobson
// radical and unit groups, and the Gamma_0(N) index.

#include "divalg/algebra.hpp"

#include <numeric>
#include <unordered_set>

namespace divalg {

class Order;
using OrderPtr = std::shared_ptr<const Order>;

struct OrderCheck {
  bool ok = true;
  std::string witness;  // first violation found, empty when ok
};

namespace detail {

/// Coordinates of v (standard basis) in the lattice basis, or nullopt if v is
/// not in the Q-span's integral part.
inline std::optional<std::vector<Int>> integral_coords(const MatQ& basis_inv, const std::vector<Rat>& v) {
  std::vector<Int> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Rat s = 0;
    for (std::size_t j = 0; j < v.size(); ++j)
      if (v[j] != 0) s += basis_inv(i, j) * v[j];
    if (!is_integer(s)) return std::nullopt;
    out[i] = s.get_num();
  }
  return out;
}

}  // namespace detail

/// Checks that the columns of `basis` span a ring with 1.
inline OrderCheck verify_order(const Algebra& alg, const MatQ& basis) {
  const std::size_t d = alg.dim();
  if (basis.rows() != d || basis.cols() != d) throw Error("order basis must be dim x dim");
  if (det(basis) == 0) throw Error("order basis is rank-deficient");
  MatQ inv = inverse(basis);
  OrderCheck res;
  std::vector<Rat> one(d);
  auto one_el = alg.one();
  if (!detail::integral_coords(inv, one_el.coords())) {
    res.ok = false;
    res.witness = "1 is not in the lattice";
    return res;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      auto p = alg.multiply(basis.col(i), basis.col(j));
      if (!detail::integral_coords(inv, p)) {
        res.ok = false;
        std::ostringstream os;
        os << "b" << i << " * b" << j << " = " << alg.element(p).str() << " is not in the lattice";
        res.witness = os.str();
        return res;
      }
    }
  return res;
}

class Order {
 public:
  static OrderPtr create(std::string name, AlgebraPtr alg, const MatQ& basis) {
    auto check = verify_order(*alg, basis);
    if (!check.ok) throw Error("order '" + name + "' fails verification: " + check.witness);
    return std::shared_ptr<const Order>(new Order(std::move(name), std::move(alg), basis));
  }

  const std::string& name() const { return name_; }
  const AlgebraPtr& algebra() const { return alg_; }
  int degree() const { return alg_->degree(); }
  std::size_t dim() const { return dim_; }
  const MatQ& basis() const { return basis_; }
  const MatQ& basis_inverse() const { return basis_inv_; }
  const Int& discriminant() const { return disc_; }
  const MatZ& trace_gram() const { return gram_; }
  const NormForm& norm_form() const { return norm_form_; }
  const std::vector<Int>& one() const { return one_; }
  /// Order coordinates of b_i * b_j.
  const std::vector<Int>& product(std::size_t i, std::size_t j) const { return mult_[i * dim_ + j]; }

  Element element(const std::vector<Int>& x) const {
    std::vector<Rat> c(dim_, Rat(0));
    for (std::size_t k = 0; k < dim_; ++k) {
      if (x[k] == 0) continue;
      for (std::size_t i = 0; i < dim_; ++i) c[i] += basis_(i, k) * x[k];
    }
    return alg_->element(std::move(c));
  }
  Element basis_element(std::size_t k) const { return alg_->element(basis_.col(k)); }
  std::optional<std::vector<Int>> coords_of(const Element& x) const {
    if (x.algebra() != alg_) throw Error("element belongs to a different algebra");
    return detail::integral_coords(basis_inv_, x.coords());
  }
  bool contains(const Element& x) const { return coords_of(x).has_value(); }

  std::vector<Int> multiply(const std::vector<Int>& x, const std::vector<Int>& y) const {
    std::vector<Int> r(dim_, Int(0));
    for (std::size_t i = 0; i < dim_; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j) {
        if (y[j] == 0) continue;
        Int s = x[i] * y[j];
        const auto& p = product(i, j);
        for (std::size_t k = 0; k < dim_; ++k)
          if (p[k] != 0) r[k] += s * p[k];
      }
    }
    return r;
  }

  /// Reduced norm of an order-coordinate vector, exactly.
  Int norm(const std::vector<Int>& x) const {
    Int s = norm_form_.eval_scaled(x);
    Int q, r;
    mpz_tdiv_qr(q.get_mpz_t(), r.get_mpz_t(), s.get_mpz_t(), norm_form_.den.get_mpz_t());
    if (r != 0) throw Error("reduced norm of an order element is not integral");
    return q;
  }
  Int trace(const std::vector<Int>& x) const {
    Int t = 0;
    for (std::size_t k = 0; k < dim_; ++k) t += x[k] * traces_[k];
    return t;
  }
  const std::vector<Int>& basis_traces() const { return traces_; }

  /// Same lattice under another name.
  OrderPtr renamed(std::string name) const { return create(std::move(name), alg_, basis_); }

 private:
  Order(std::string name, AlgebraPtr alg, const MatQ& basis)
      : name_(std::move(name)), alg_(std::move(alg)), basis_(basis), dim_(alg_->dim()) {
    basis_inv_ = inverse(basis_);
    one_ = *detail::integral_coords(basis_inv_, alg_->one().coords());
    mult_.resize(dim_ * dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j)
        mult_[i * dim_ + j] = *detail::integral_coords(basis_inv_, alg_->multiply(basis_.col(i), basis_.col(j)));
    traces_.resize(dim_);
    for (std::size_t k = 0; k < dim_; ++k) {
      Rat t = alg_->trace(basis_.col(k));
      if (!is_integer(t)) throw Error("order '" + name_ + "' has a basis element of non-integral trace");
      traces_[k] = t.get_num();
    }
    gram_ = MatZ(dim_, dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) gram_(i, j) = trace(product(i, j));
    disc_ = abs_int(det(gram_));
    const auto& alg_ref = *alg_;
    const MatQ& b = basis_;
    norm_form_ = NormForm::build(alg_->degree(), dim_, [&](const std::vector<Rat>& x) {
      std::vector<Rat> c(x.size(), Rat(0));
      for (std::size_t k = 0; k < x.size(); ++k)
        if (x[k] != 0)
          for (std::size_t i = 0; i < x.size(); ++i) c[i] += b(i, k) * x[k];
      return alg_ref.norm_direct(c);
    });
  }

  std::string name_;
  AlgebraPtr alg_;
  MatQ basis_, basis_inv_;
  std::size_t dim_;
  std::vector<std::vector<Int>> mult_;
  std::vector<Int> one_, traces_;
  MatZ gram_;
  Int disc_;
  NormForm norm_form_;
};

inline Int discriminant(const Order& o) { return o.discriminant(); }

/// |det(tr(x_i x_j))| for an arbitrary tuple of algebra elements.
inline Rat gram_determinant(const std::vector<Element>& xs) {
  const std::size_t k = xs.size();
  MatQ g(k, k);
  for (std::size_t i = 0; i < k; ++i)
    for (std::size_t j = i; j < k; ++j) g(i, j) = g(j, i) = reduced_trace(xs[i] * xs[j]);
  return det(g);
}

/// Standard order with basis the standard basis (Z<1,i,j,ij>, Z<theta^i u^j>, M_n(Z)).
inline OrderPtr standard_order(const AlgebraPtr& alg, std::string name = "standard") {
  return Order::create(std::move(name), alg, MatQ::identity(alg->dim()));
}

struct OrderRelation {
  OrderPtr sub, sup;
  Int index;
  Int disc_ratio;
  bool consistent = false;  // index^2 * disc(sup) == disc(sub)
};

inline OrderRelation order_index(const OrderPtr& sub, const OrderPtr& sup) {
  if (sub->algebra() != sup->algebra()) throw Error("orders live in different algebras");
  OrderRelation r;
  r.sub = sub;
  r.sup = sup;
  r.index = lattice_index(sup->basis(), sub->basis());
  Rat ratio(sub->discriminant(), sup->discriminant());
  ratio.canonicalize();
  r.disc_ratio = is_integer(ratio) ? ratio.get_num() : Int(0);
  r.consistent = r.index * r.index * sup->discriminant() == sub->discriminant();
  return r;
}

// ---------------------------------------------------------------------------
// Splittings mod N and O_0(N)

inline Int inverse_mod(const Int& a, const Int& m) {
  Int r;
  if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0) throw Error("element not invertible mod N");
  return r;
}

inline Int rat_mod(const Rat& x, const Int& m) {
  Int den = x.get_den();
  if (gcd_int(den, m) != 1) throw Error("denominator not invertible modulo the level");
  return mod_floor(x.get_num() * inverse_mod(den, m), m);
}

inline MatZ mat_mod(const MatZ& a, const Int& m) {
  MatZ r = a;
  for (std::size_t i = 0; i < r.rows(); ++i)
    for (std::size_t j = 0; j < r.cols(); ++j) r(i, j) = mod_floor(r(i, j), m);
  return r;
}

/// Images in M_n(Z/N) of the algebra's standard basis elements.
struct Splitting {
  Int modulus;
  std::vector<MatZ> images;

  MatZ image(const std::vector<Rat>& coords) const {
    const std::size_t n = images.at(0).rows();
    MatZ m(n, n);
    for (std::size_t k = 0; k < coords.size(); ++k) {
      if (coords[k] == 0) continue;
      Int c = rat_mod(coords[k], modulus);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) += c * images[k](i, j);
    }
    return mat_mod(m, modulus);
  }
};

/// Built-in splitting of A/N into M_n(Z/N): identity for matrix algebras,
/// i -> diag(s, -s), j -> [[0, b], [1, 0]] (s^2 = a mod N) for quaternions,
/// and theta -> diag(r, sigma^2 r, sigma r), u -> [[0,0,b],[1,0,0],[0,1,0]] for a
/// prime N split in the cubic field.
inline Splitting auto_splitting(const Algebra& alg, const Int& N) {
  if (N < 1) throw Error("level must be positive");
  Splitting s;
  s.modulus = N;
  const int n = alg.degree();
  if (alg.is_matrix()) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        MatZ m(n, n);
        m(i, j) = 1;
        s.images.push_back(mat_mod(m, N));
      }
    return s;
  }
  if (const auto* q = std::get_if<QuaternionData>(&alg.spec().data)) {
    Int a = rat_mod(q->a, N), b = rat_mod(q->b, N);
    if (gcd_int(Int(2) * a * b, N) != 1) throw Error("no built-in splitting: N must be prime to 2ab");
    auto sqrt_mod = [&](const Int& v) -> std::optional<Int> {
      for (Int t = 0; t < N; ++t)
        if (mod_floor(t * t - v, N) == 0) return t;
      return std::nullopt;
    };
    MatZ one = MatZ::identity(2), I(2, 2), J(2, 2);
    if (auto r = sqrt_mod(a)) {
      I = MatZ{{*r, Int(0)}, {Int(0), Int(-*r)}};
      J = MatZ{{Int(0), b}, {Int(1), Int(0)}};
    } else if (auto r2 = sqrt_mod(b)) {
      J = MatZ{{*r2, Int(0)}, {Int(0), Int(-*r2)}};
      I = MatZ{{Int(0), a}, {Int(1), Int(0)}};
    } else {
      throw Error("no built-in splitting: neither a nor b is a square mod N");
    }
    s.images = {mat_mod(one, N), mat_mod(I, N), mat_mod(J, N), mat_mod(I * J, N)};
    return s;
  }
  const auto& c = std::get<CyclicData>(alg.spec().data);
  if (!is_prime(N)) throw Error("built-in cyclic splitting requires a prime level");
  const auto& f = c.field.f;
  const auto& sg = c.field.sigma;
  auto fval = [&](const Int& x) { return mod_floor(x * x * x + f[2] * x * x + f[1] * x + f[0], N); };
  auto sval = [&](const Int& x) { return mod_floor(sg[0] + sg[1] * x + sg[2] * x * x, N); };
  std::optional<Int> root;
  for (Int t = 0; t < N && !root; ++t)
    if (fval(t) == 0 && sval(t) != t) root = t;
  if (!root) throw Error("no built-in splitting: the level is not split in the cubic field");
  Int r0 = *root, r1 = sval(r0), r2 = sval(r1);
  Int b = rat_mod(c.b, N);
  MatZ D(3, 3);
  D(0, 0) = r0;
  D(1, 1) = r2;
  D(2, 2) = r1;
  MatZ U{{Int(0), Int(0), b}, {Int(1), Int(0), Int(0)}, {Int(0), Int(1), Int(0)}};
  MatZ Up = MatZ::identity(3);
  for (int j = 0; j < 3; ++j) {
    MatZ Dp = MatZ::identity(3);
    for (int i = 0; i < 3; ++i) {
      s.images.push_back(mat_mod(Dp * Up, N));
      Dp = mat_mod(Dp * D, N);
    }
    Up = mat_mod(Up * U, N);
  }
  return s;
}

/// Checks that the splitting is a ring isomorphism O/N O -> M_n(Z/N).
inline OrderCheck verify_splitting(const Order& base, const Splitting& s) {
  OrderCheck res;
  const std::size_t d = base.dim();
  const Int& N = s.modulus;
  if (s.images.size() != base.algebra()->dim()) {
    res.ok = false;
    res.witness = "wrong number of basis images";
    return res;
  }
  std::vector<MatZ> img;
  try {
    for (std::size_t k = 0; k < d; ++k) img.push_back(s.image(base.basis().col(k)));
  } catch (const Error& e) {
    res.ok = false;
    res.witness = e.what();
    return res;
  }
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      MatZ lhs = mat_mod(img[i] * img[j], N);
      MatZ rhs(lhs.rows(), lhs.cols());
      const auto& p = base.product(i, j);
      for (std::size_t k = 0; k < d; ++k) rhs = rhs + p[k] * img[k];
      if (!(lhs == mat_mod(rhs, N))) {
        res.ok = false;
        res.witness = "splitting is not multiplicative on b" + std::to_string(i) + " * b" + std::to_string(j);
        return res;
      }
    }
  MatZ flat(d, d);
  const std::size_t n = img[0].rows();
  for (std::size_t k = 0; k < d; ++k)
    for (std::size_t e = 0; e < n * n; ++e) flat(e, k) = img[k](e / n, e % n);
  if (gcd_int(det(flat), N) != 1) {
    res.ok = false;
    res.witness = "splitting is not bijective modulo N";
  }
  return res;
}

/// Sub-lattice {x in Z^d : C x = 0 mod N} for an r x d integer matrix C.
inline MatZ congruence_kernel(const MatZ& C, const Int& N) {
  const std::size_t r = C.rows(), d = C.cols();
  MatZ M(r + d, d + r);
  for (std::size_t i = 0; i < r; ++i) {
    for (std::size_t j = 0; j < d; ++j) M(i, j) = C(i, j);
    M(i, d + i) = N;
  }
  for (std::size_t j = 0; j < d; ++j) M(r + j, j) = 1;
  auto h = hnf(M).form;
  MatZ K(d, d);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < r; ++i)
      if (h(i, r + j) != 0) throw Error("congruence kernel extraction failed");
    for (std::size_t i = 0; i < d; ++i) K(i, j) = h(r + i, r + j);
  }
  return K;
}

/// The order {gamma in base : last row of its image is (0, ..., 0, *) mod N}.
inline OrderPtr o0n_order(const OrderPtr& base, const Int& N, const Splitting& s, std::string name = "") {
  if (name.empty()) name = base->name() + "_O0(" + N.get_str() + ")";
  if (N < 1) throw Error("level must be positive");
  if (N == 1) return base->renamed(name);
  if (s.modulus != N) throw Error("splitting modulus differs from the level");
  if (gcd_int(N, base->discriminant()) != 1) throw Error("ramified level");
  auto check = verify_splitting(*base, s);
  if (!check.ok) throw Error("splitting fails verification: " + check.witness);
  const std::size_t d = base->dim();
  const std::size_t n = static_cast<std::size_t>(base->degree());
  MatZ C(n - 1, d);
  for (std::size_t k = 0; k < d; ++k) {
    MatZ img = s.image(base->basis().col(k));
    for (std::size_t c = 0; c + 1 < n; ++c) C(c, k) = img(n - 1, c);
  }
  MatZ K = congruence_kernel(C, N);
  MatQ basis = base->basis() * to_rational(K);
  auto o = Order::create(name, base->algebra(), basis);
  Int expected = pow_int(N, n - 1);
  if (lattice_index(base->basis(), o->basis()) != expected) throw Error("O_0(N) index differs from N^(n-1)");
  return o;
}

// ---------------------------------------------------------------------------
// Finite algebras O / p^k O

struct FiniteAlgebra {
  long long p = 2;
  unsigned k = 1;
  long long mod = 2;
  std::size_t dim = 0;
  std::vector<long long> mult;                   // mult[(i*dim + j)*dim + l]
  std::vector<long long> one;                    // identity coordinates
  std::optional<std::vector<long long>> trace;   // reduced trace of basis elements
  std::optional<NormForm> norm;                  // norm form in the same coordinates

  long long& at(std::size_t i, std::size_t j, std::size_t l) { return mult[(i * dim + j) * dim + l]; }
  long long at(std::size_t i, std::size_t j, std::size_t l) const { return mult[(i * dim + j) * dim + l]; }

  std::vector<long long> multiply(const std::vector<long long>& x, const std::vector<long long>& y) const {
    std::vector<long long> r(dim, 0);
    for (std::size_t i = 0; i < dim; ++i) {
      if (!x[i]) continue;
      for (std::size_t j = 0; j < dim; ++j) {
        if (!y[j]) continue;
        long long s = x[i] * y[j] % mod;
        for (std::size_t l = 0; l < dim; ++l) r[l] = (r[l] + s * at(i, j, l)) % mod;
      }
    }
    return r;
  }

  /// Elements as base-mod digit vectors.
  std::uint64_t size() const {
    std::uint64_t s = 1;
    for (std::size_t i = 0; i < dim; ++i) {
      if (s > (1ull << 40) / static_cast<std::uint64_t>(mod)) return ~0ull;
      s *= static_cast<std::uint64_t>(mod);
    }
    return s;
  }
  std::vector<long long> decode(std::uint64_t code) const {
    std::vector<long long> x(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      x[i] = static_cast<long long>(code % static_cast<std::uint64_t>(mod));
      code /= static_cast<std::uint64_t>(mod);
    }
    return x;
  }
  std::uint64_t encode(const std::vector<long long>& x) const {
    std::uint64_t c = 0;
    for (std::size_t i = dim; i-- > 0;) c = c * static_cast<std::uint64_t>(mod) + static_cast<std::uint64_t>(x[i]);
    return c;
  }
};

inline long long pow_ll(long long b, unsigned e) {
  long long r = 1;
  for (unsigned i = 0; i < e; ++i) r *= b;
  return r;
}

inline FiniteAlgebra localize(const Order& o, long long p, unsigned k) {
  if (!is_prime(Int(static_cast<long>(p)))) throw Error("localize requires a prime");
  if (k < 1) throw Error("localize requires k >= 1");
  FiniteAlgebra F;
  F.p = p;
  F.k = k;
  F.mod = pow_ll(p, k);
  if (F.mod > (1ll << 20)) throw Error("modulus too large for a finite algebra");
  F.dim = o.dim();
  F.mult.assign(F.dim * F.dim * F.dim, 0);
  Int m(static_cast<long>(F.mod));
  for (std::size_t i = 0; i < F.dim; ++i)
    for (std::size_t j = 0; j < F.dim; ++j)
      for (std::size_t l = 0; l < F.dim; ++l) F.at(i, j, l) = mod_floor(o.product(i, j)[l], m).get_si();
  F.one.resize(F.dim);
  for (std::size_t i = 0; i < F.dim; ++i) F.one[i] = mod_floor(o.one()[i], m).get_si();
  std::vector<long long> tr(F.dim);
  for (std::size_t i = 0; i < F.dim; ++i) tr[i] = mod_floor(o.basis_traces()[i], m).get_si();
  F.trace = tr;
  F.norm = o.norm_form();
  return F;
}

namespace detail {

inline long long inv_mod_ll(long long a, long long p) {
  long long r = 1, b = ((a % p) + p) % p, e = p - 2;
  while (e > 0) {
    if (e & 1) r = r * b % p;
    b = b * b % p;
    e >>= 1;
  }
  return r;
}

/// Row-reduces rows over F_p in place; returns the rank. Rows become a basis
/// in reduced echelon form (first `rank` rows).
inline std::size_t rref_mod_p(std::vector<std::vector<long long>>& rows, long long p,
                              std::vector<std::size_t>* pivots = nullptr) {
  if (rows.empty()) return 0;
  const std::size_t cols = rows[0].size();
  std::size_t r = 0;
  for (auto& row : rows)
    for (auto& v : row) v = ((v % p) + p) % p;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t piv = r;
    while (piv < rows.size() && rows[piv][c] == 0) ++piv;
    if (piv == rows.size()) continue;
    std::swap(rows[piv], rows[r]);
    long long inv = inv_mod_ll(rows[r][c], p);
    for (auto& v : rows[r]) v = v * inv % p;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i][c] == 0) continue;
      long long f = rows[i][c];
      for (std::size_t j = 0; j < cols; ++j) rows[i][j] = ((rows[i][j] - f * rows[r][j]) % p + p) % p;
    }
    if (pivots) pivots->push_back(c);
    ++r;
  }
  rows.resize(r);
  return r;
}

/// Basis of the right kernel {x : A x = 0} over F_p for a square matrix A.
inline std::vector<std::vector<long long>> kernel_mod_p(std::vector<std::vector<long long>> A, long long p) {
  const std::size_t cols = A.empty() ? 0 : A[0].size();
  std::vector<std::size_t> piv;
  rref_mod_p(A, p, &piv);
  std::vector<bool> is_piv(cols, false);
  for (auto c : piv) is_piv[c] = true;
  std::vector<std::vector<long long>> ker;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_piv[f]) continue;
    std::vector<long long> v(cols, 0);
    v[f] = 1;
    for (std::size_t r = 0; r < piv.size(); ++r) v[piv[r]] = (p - A[r][f]) % p;
    ker.push_back(v);
  }
  return ker;
}

inline long long det_mod_p(std::vector<std::vector<long long>> a, long long p) {
  const std::size_t n = a.size();
  long long d = 1;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (piv < n && a[piv][c] % p == 0) ++piv;
    if (piv == n) return 0;
    if (piv != c) {
      std::swap(a[piv], a[c]);
      d = (p - d) % p;
    }
    long long x = ((a[c][c] % p) + p) % p;
    d = d * x % p;
    long long inv = inv_mod_ll(x, p);
    for (std::size_t i = c + 1; i < n; ++i) {
      long long f = ((a[i][c] % p) + p) % p * inv % p;
      if (!f) continue;
      for (std::size_t j = c; j < n; ++j) a[i][j] = ((a[i][j] - f * a[c][j]) % p + p) % p;
    }
  }
  return d;
}

}  // namespace detail

/// x is a unit of F iff left multiplication by x is bijective, i.e. its
/// determinant is nonzero mod p.
inline bool is_unit(const FiniteAlgebra& F, const std::vector<long long>& x) {
  std::vector<std::vector<long long>> L(F.dim, std::vector<long long>(F.dim, 0));
  for (std::size_t a = 0; a < F.dim; ++a) {
    long long xa = x[a] % F.p;
    if (!xa) continue;
    for (std::size_t j = 0; j < F.dim; ++j)
      for (std::size_t i = 0; i < F.dim; ++i) L[i][j] = (L[i][j] + xa * (F.at(a, j, i) % F.p)) % F.p;
  }
  return detail::det_mod_p(L, F.p) != 0;
}

inline constexpr std::uint64_t kUnitCountBudget = 1ull << 24;

/// Number of invertible elements of F by exhaustive enumeration.
inline Int unit_count_bruteforce(const FiniteAlgebra& F) {
  std::uint64_t size = F.size();
  if (size > kUnitCountBudget) throw Error("unit count exceeds the enumeration budget");
  std::uint64_t units = 0;
  std::vector<std::uint64_t> unit_codes;
  const bool tiny = size <= 256;
  // The norm criterion needs the common denominator of the norm form to be a unit at p.
  const bool norm_usable = F.norm && mod_floor(F.norm->den, Int(static_cast<long>(F.p))) != 0;
  for (std::uint64_t c = 0; c < size; ++c) {
    auto x = F.decode(c);
    bool u = is_unit(F, x);
    if (F.norm && norm_usable) {
      __int128 v = 0;
      if (F.norm->eval_scaled_i128(x.data(), v)) {
        long long r = static_cast<long long>(v % static_cast<__int128>(F.p));
        if ((r != 0) != u) throw Error("unit test by determinant and by reduced norm disagree");
      }
    }
    if (u) {
      ++units;
      if (tiny) unit_codes.push_back(c);
    }
  }
  if (tiny) {
    // two-sided inverse search
    std::uint64_t found = 0;
    for (std::uint64_t c = 0; c < size; ++c) {
      auto x = F.decode(c);
      for (std::uint64_t d = 0; d < size; ++d) {
        auto y = F.decode(d);
        if (F.multiply(x, y) == F.one && F.multiply(y, x) == F.one) {
          ++found;
          break;
        }
      }
    }
    if (found != units) throw Error("unit count cross-check by inverse search failed");
  }
  return Int(static_cast<unsigned long>(units));
}

struct RadicalResult {
  std::vector<std::vector<long long>> basis;  // echelon basis over F_p
  std::string method;                         // "trace-form" or "bruteforce"
  unsigned nilpotency = 0;                    // least r with J^r = 0
};

namespace detail {

inline std::vector<std::vector<long long>> span_products(const FiniteAlgebra& F,
                                                         const std::vector<std::vector<long long>>& A,
                                                         const std::vector<std::vector<long long>>& B) {
  std::vector<std::vector<long long>> rows;
  for (const auto& a : A)
    for (const auto& b : B) rows.push_back(F.multiply(a, b));
  rref_mod_p(rows, F.p);
  return rows;
}

inline bool in_span(std::vector<std::vector<long long>> basis, const std::vector<long long>& v, long long p) {
  std::size_t r = basis.size();
  basis.push_back(v);
  return rref_mod_p(basis, p) == r;
}

/// Checks that span(J) is a nilpotent two-sided ideal; returns the nilpotency index or 0.
inline unsigned nilpotent_ideal_index(const FiniteAlgebra& F, const std::vector<std::vector<long long>>& J) {
  if (J.empty()) return 1;
  std::vector<std::vector<long long>> unit_vectors;
  for (std::size_t i = 0; i < F.dim; ++i) {
    std::vector<long long> e(F.dim, 0);
    e[i] = 1;
    unit_vectors.push_back(e);
  }
  for (const auto& v : J)
    for (const auto& e : unit_vectors) {
      if (!in_span(J, F.multiply(v, e), F.p)) return 0;
      if (!in_span(J, F.multiply(e, v), F.p)) return 0;
    }
  auto power = J;
  for (unsigned r = 2; r <= F.dim + 1; ++r) {
    power = span_products(F, power, J);
    if (power.empty()) return r;
  }
  return 0;
}

}  // namespace detail

inline RadicalResult jacobson_radical(const FiniteAlgebra& F) {
  if (F.k != 1) throw Error("jacobson_radical requires a prime modulus");
  const long long p = F.p;
  auto trace_of = [&](const std::vector<long long>& x) {
    long long t = 0;
    if (F.trace) {
      for (std::size_t i = 0; i < F.dim; ++i) t = (t + x[i] * (*F.trace)[i]) % p;
    } else {
      // regular trace: sum_j coefficient of b_j in x * b_j
      for (std::size_t a = 0; a < F.dim; ++a)
        for (std::size_t j = 0; j < F.dim; ++j) t = (t + x[a] * F.at(a, j, j)) % p;
    }
    return t;
  };
  std::vector<std::vector<long long>> G(F.dim, std::vector<long long>(F.dim));
  for (std::size_t i = 0; i < F.dim; ++i)
    for (std::size_t j = 0; j < F.dim; ++j) {
      std::vector<long long> bi(F.dim, 0), bj(F.dim, 0);
      bi[i] = 1;
      bj[j] = 1;
      G[i][j] = trace_of(F.multiply(bi, bj));
    }
  auto ker = detail::kernel_mod_p(G, p);
  detail::rref_mod_p(ker, p);
  RadicalResult res;
  if (unsigned r = detail::nilpotent_ideal_index(F, ker)) {
    res.basis = ker;
    res.method = "trace-form";
    res.nilpotency = r;
    return res;
  }
  // Fallback: J = {x : 1 - y x is a unit for every y}.
  std::uint64_t size = F.size();
  if (size > 4096) throw Error("radical fallback exceeds the enumeration budget");
  std::vector<std::vector<long long>> members;
  for (std::uint64_t c = 0; c < size; ++c) {
    auto x = F.decode(c);
    bool in = true;
    for (std::uint64_t d = 0; d < size && in; ++d) {
      auto y = F.decode(d);
      auto yx = F.multiply(y, x);
      std::vector<long long> z(F.dim);
      for (std::size_t i = 0; i < F.dim; ++i) z[i] = ((F.one[i] - yx[i]) % p + p) % p;
      in = is_unit(F, z);
    }
    if (in) members.push_back(x);
  }
  detail::rref_mod_p(members, p);
  res.basis = members;
  res.method = "bruteforce";
  res.nilpotency = detail::nilpotent_ideal_index(F, members);
  return res;
}

/// Structure constants of F / span(J) over F_p.
inline FiniteAlgebra quotient_by(const FiniteAlgebra& F, const std::vector<std::vector<long long>>& J) {
  const long long p = F.p;
  std::vector<std::size_t> piv;
  auto Jb = J;
  detail::rref_mod_p(Jb, p, &piv);
  std::vector<bool> used(F.dim, false);
  for (auto c : piv) used[c] = true;
  std::vector<std::size_t> comp;
  for (std::size_t i = 0; i < F.dim; ++i)
    if (!used[i]) comp.push_back(i);
  // Reduce a vector modulo span(J) (rref rows), then read off complement coordinates.
  auto reduce = [&](std::vector<long long> v) {
    for (std::size_t r = 0; r < Jb.size(); ++r) {
      long long f = ((v[piv[r]] % p) + p) % p;
      if (!f) continue;
      for (std::size_t j = 0; j < F.dim; ++j) v[j] = ((v[j] - f * Jb[r][j]) % p + p) % p;
    }
    std::vector<long long> out(comp.size());
    for (std::size_t a = 0; a < comp.size(); ++a) out[a] = ((v[comp[a]] % p) + p) % p;
    return out;
  };
  FiniteAlgebra Q;
  Q.p = p;
  Q.k = 1;
  Q.mod = p;
  Q.dim = comp.size();
  Q.mult.assign(Q.dim * Q.dim * Q.dim, 0);
  for (std::size_t a = 0; a < Q.dim; ++a)
    for (std::size_t b = 0; b < Q.dim; ++b) {
      std::vector<long long> ea(F.dim, 0), eb(F.dim, 0);
      ea[comp[a]] = 1;
      eb[comp[b]] = 1;
      auto prod = reduce(F.multiply(ea, eb));
      for (std::size_t l = 0; l < Q.dim; ++l) Q.at(a, b, l) = prod[l];
    }
  Q.one = reduce(F.one);
  return Q;
}

struct UnitIndexReport {
  long long p = 0;
  unsigned k = 0;
  Int lattice_index;           // [sup : sub]
  Int index_p_part;            // p-part of the lattice index
  Int units_sup, units_sub;    // |(sup / p^k sup)^x|, |(sub / p^k sub)^x|
  Rat raw_ratio;               // units_sup / units_sub
  bool direct_available = false;  // p^k sup is contained in sub
  Int local_lattice_index;     // [sup_p : sub_p] from the image of sub in sup / p^k sup
  Int units_in_image;          // units of sup / p^k sup lying in the image of sub
  Rat direct_index;            // [sup_p^x : sub_p^x]
  // Filtration identity |(O/pO)^x| = p^dim * |(O/J)^x| / [O : J], for sub and sup.
  struct Filtration {
    Int lhs, rhs, radical_dim;
    bool holds = false;
  } filtration_sub, filtration_sup;
};

inline UnitIndexReport::Filtration filtration_identity(const Order& o, long long p) {
  auto F = localize(o, p, 1);
  auto J = jacobson_radical(F);
  auto Q = quotient_by(F, J.basis);
  UnitIndexReport::Filtration f;
  f.lhs = unit_count_bruteforce(F);
  Int units_q = Q.dim == 0 ? Int(0) : unit_count_bruteforce(Q);
  f.radical_dim = static_cast<unsigned long>(J.basis.size());
  Int pdim = pow_int(Int(static_cast<long>(p)), o.dim());
  Int index_j = pow_int(Int(static_cast<long>(p)), o.dim() - J.basis.size());
  Rat rhs = Rat(pdim * units_q) / Rat(index_j);
  f.rhs = rhs.get_num() / rhs.get_den();
  f.holds = is_integer(rhs) && f.rhs == f.lhs;
  return f;
}

inline UnitIndexReport unit_index_report(const OrderPtr& sub, const OrderPtr& sup, long long p, unsigned k) {
  UnitIndexReport r;
  r.p = p;
  r.k = k;
  r.lattice_index = lattice_index(sup->basis(), sub->basis());
  r.index_p_part = 1;
  Int rest = r.lattice_index;
  while (mpz_divisible_ui_p(rest.get_mpz_t(), static_cast<unsigned long>(p))) {
    rest /= static_cast<long>(p);
    r.index_p_part *= static_cast<long>(p);
  }
  auto Fsup = localize(*sup, p, k);
  auto Fsub = localize(*sub, p, k);
  r.units_sup = unit_count_bruteforce(Fsup);
  r.units_sub = unit_count_bruteforce(Fsub);
  r.raw_ratio = Rat(r.units_sup) / Rat(r.units_sub);
  r.raw_ratio.canonicalize();

  // T = coordinates of sub's basis in sup's basis.
  auto Tq = to_integer(sup->basis_inverse() * sub->basis());
  if (!Tq) throw Error("not a sublattice");
  MatZ T = *Tq;
  const long long mod = Fsup.mod;
  Int modz(static_cast<long>(mod));
  // p^k sup_p must lie in sub_p: denominators of sub^-1 p^k sup prime to p.
  // Then the image of sub in sup / p^k sup is that of sub_p.
  MatQ C = sub->basis_inverse() * (Rat(modz) * sup->basis());
  r.direct_available = true;
  for (std::size_t i = 0; i < C.rows(); ++i)
    for (std::size_t j = 0; j < C.cols(); ++j)
      if (mpz_divisible_ui_p(C(i, j).get_den_mpz_t(), static_cast<unsigned long>(p))) r.direct_available = false;
  if (r.direct_available) {
    std::uint64_t size = Fsup.size();
    if (size > kUnitCountBudget) throw Error("unit index exceeds the enumeration budget");
    std::vector<std::vector<long long>> Tl(T.rows(), std::vector<long long>(T.cols()));
    for (std::size_t i = 0; i < T.rows(); ++i)
      for (std::size_t j = 0; j < T.cols(); ++j) Tl[i][j] = mod_floor(T(i, j), modz).get_si();
    std::unordered_set<std::uint64_t> image;
    std::uint64_t units = 0;
    for (std::uint64_t c = 0; c < size; ++c) {
      auto y = Fsup.decode(c);
      std::vector<long long> x(Fsup.dim, 0);
      for (std::size_t i = 0; i < Fsup.dim; ++i) {
        long long s = 0;
        for (std::size_t j = 0; j < Fsup.dim; ++j) s = (s + Tl[i][j] * y[j]) % mod;
        x[i] = s;
      }
      if (image.insert(Fsup.encode(x)).second && is_unit(Fsup, x)) ++units;
    }
    r.units_in_image = static_cast<unsigned long>(units);
    r.local_lattice_index = Int(static_cast<unsigned long>(size)) / Int(static_cast<unsigned long>(image.size()));
    r.direct_index = Rat(r.units_sup) / Rat(r.units_in_image);
    r.direct_index.canonicalize();
  }
  r.filtration_sub = filtration_identity(*sub, p);
  r.filtration_sup = filtration_identity(*sup, p);
  return r;
}

/// N * prod_{p | N} (1 + 1/p).
inline Int gamma0_unit_index(const Int& N) {
  if (N < 1) throw Error("level must be positive");
  Rat r(N);
  for (const auto& [p, e] : factorize(N)) r *= Rat(p + 1) / Rat(p);
  r.canonicalize();
  return r.get_num();
}

/// |P^1(Z/N)| = #{(c, d) mod N : gcd(c, d, N) = 1} / phi(N), by enumeration.
inline Int projective_line_count(long N) {
  if (N < 1) throw Error("level must be positive");
  long count = 0;
  for (long c = 0; c < N; ++c)
    for (long d = 0; d < N; ++d)
      if (std::gcd(std::gcd(c, d), N) == 1) ++count;
  long phi = 0;
  for (long u = 0; u < N; ++u)
    if (std::gcd(u, N) == 1) ++phi;
  return Int(count / phi);
}

}  // namespace divalg
