#pragma once

// Central simple algebras over Q of degree 2 or 3: quaternion algebras
// (a, b), cyclic cubic algebras (E/Q, sigma, b) and the split controls M_n(Q).
// Exact arithmetic through structure constants, reduced trace/norm/charpoly,
// and the real splitting A -> M_n(R).

#include "divalg/poly.hpp"
#include "divalg/rational.hpp"

#include <Eigen/Dense>

#include <array>
#include <cfloat>
#include <functional>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace divalg {

struct QuaternionData {
  Rat a, b;
};

/// Monic cubic f = X^3 + f2 X^2 + f1 X + f0 with a cyclic automorphism
/// sigma(theta) = s0 + s1 theta + s2 theta^2.
struct CubicFieldSpec {
  std::array<Int, 3> f;      // f0, f1, f2
  std::array<Int, 3> sigma;  // s0, s1, s2
  int root_index = 0;        // which real root (ascending) theta maps to
};

struct CyclicData {
  CubicFieldSpec field;
  Rat b;
};

struct MatrixData {
  int n = 2;
};

struct AlgebraSpec {
  std::string name;
  std::variant<QuaternionData, CyclicData, MatrixData> data;
  bool division_attested = false;
  std::string provenance;
};

// ---------------------------------------------------------------------------
// The cubic field E = Q[X]/(f)

class CubicField {
 public:
  using Elt = std::array<Rat, 3>;

  explicit CubicField(const CubicFieldSpec& spec) : spec_(spec) {
    const auto& f = spec_.f;
    if (f[0] == 0) throw Error("cubic is reducible (root 0)");
    // Rational roots of a monic integer cubic are integer divisors of f0.
    auto divisors = all_divisors(abs_int(f[0]));
    for (const auto& d : divisors)
      for (int s : {1, -1}) {
        Int r = s * d;
        if (r * r * r + f[2] * r * r + f[1] * r + f[0] == 0) throw Error("cubic is reducible over Q");
      }
    if (discriminant() <= 0) throw Error("cubic field is not totally real");
    Elt th = theta();
    Elt s1 = sigma(th);
    if (s1 == th) throw Error("sigma is the identity");
    if (!is_zero(eval_f(s1))) throw Error("sigma(theta) is not a root of f");
    if (sigma(sigma(s1)) != th) throw Error("sigma does not have order 3");
  }

  const CubicFieldSpec& spec() const { return spec_; }

  static Elt zero() { return {Rat(0), Rat(0), Rat(0)}; }
  static Elt one() { return {Rat(1), Rat(0), Rat(0)}; }
  static Elt theta() { return {Rat(0), Rat(1), Rat(0)}; }
  static bool is_zero(const Elt& x) { return x[0] == 0 && x[1] == 0 && x[2] == 0; }

  Elt mul(const Elt& x, const Elt& y) const {
    std::array<Rat, 5> p{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) p[i + j] += x[i] * y[j];
    for (int d = 4; d >= 3; --d) {
      Rat c = p[d];
      if (c == 0) continue;
      p[d] = 0;
      // theta^d = theta^{d-3} * (-f2 theta^2 - f1 theta - f0)
      p[d - 1] -= c * spec_.f[2];
      p[d - 2] -= c * spec_.f[1];
      p[d - 3] -= c * spec_.f[0];
    }
    return {p[0], p[1], p[2]};
  }
  static Elt add(const Elt& x, const Elt& y) { return {x[0] + y[0], x[1] + y[1], x[2] + y[2]}; }
  static Elt sub(const Elt& x, const Elt& y) { return {x[0] - y[0], x[1] - y[1], x[2] - y[2]}; }
  static Elt scale(const Rat& s, const Elt& x) { return {s * x[0], s * x[1], s * x[2]}; }

  Elt sigma(const Elt& x) const {
    Elt s{Rat(spec_.sigma[0]), Rat(spec_.sigma[1]), Rat(spec_.sigma[2])};
    return add(add({x[0], Rat(0), Rat(0)}, scale(x[1], s)), scale(x[2], mul(s, s)));
  }
  Elt sigma_pow(const Elt& x, int k) const {
    Elt r = x;
    for (int i = 0; i < ((k % 3) + 3) % 3; ++i) r = sigma(r);
    return r;
  }

  Elt eval_f(const Elt& x) const {
    Elt x2 = mul(x, x), x3 = mul(x2, x);
    Elt r = add(x3, scale(Rat(spec_.f[2]), x2));
    r = add(r, scale(Rat(spec_.f[1]), x));
    r[0] += spec_.f[0];
    return r;
  }

  /// Tr_{E/Q}(theta^k) for k = 0, 1, 2 (power sums of the roots of f).
  std::array<Rat, 3> power_sums() const {
    Rat e1 = -Rat(spec_.f[2]), e2 = Rat(spec_.f[1]);
    Rat p1 = e1;
    Rat p2 = e1 * p1 - 2 * e2;
    return {Rat(3), p1, p2};
  }
  Rat trace(const Elt& x) const {
    auto ps = power_sums();
    return x[0] * ps[0] + x[1] * ps[1] + x[2] * ps[2];
  }
  Rat norm(const Elt& x) const {
    Elt p = mul(mul(x, sigma(x)), sigma(sigma(x)));
    if (p[1] != 0 || p[2] != 0) throw Error("field norm is not rational");
    return p[0];
  }

  Int discriminant() const {
    // disc of X^3 + a X^2 + b X + c
    const Int& a = spec_.f[2];
    const Int& b = spec_.f[1];
    const Int& c = spec_.f[0];
    return a * a * b * b - 4 * b * b * b - 4 * a * a * a * c - 27 * c * c + 18 * a * b * c;
  }

  Poly poly() const {
    return Poly({Rat(spec_.f[0]), Rat(spec_.f[1]), Rat(spec_.f[2]), Rat(1)});
  }

  static std::vector<Int> all_divisors(const Int& m) {
    std::vector<Int> ds{Int(1)};
    for (const auto& [p, e] : factorize(m)) {
      std::vector<Int> next;
      for (const auto& d : ds) {
        Int pk = 1;
        for (unsigned i = 0; i <= e; ++i) {
          next.push_back(d * pk);
          pk *= p;
        }
      }
      ds = std::move(next);
    }
    return ds;
  }

 private:
  CubicFieldSpec spec_;
};

// ---------------------------------------------------------------------------
// Homogeneous norm forms

/// A homogeneous polynomial of degree 2 or 3 in `vars` variables with
/// coefficients num / den, recovered from a norm function by polarization.
struct NormForm {
  struct Term {
    std::array<std::uint8_t, 3> idx{};  // sorted variable indices; unused slots = 255
    Int num;
    long long num_ll = 0;
  };
  int degree = 0;
  std::size_t vars = 0;
  std::vector<Term> terms;
  Int den = 1;
  bool small_coeffs = true;  // all numerators fit comfortably in 64 bits

  static NormForm build(int degree, std::size_t vars, const std::function<Rat(const std::vector<Rat>&)>& nr) {
    if (degree != 2 && degree != 3) throw Error("norm forms supported for degree 2 and 3 only");
    NormForm f;
    f.degree = degree;
    f.vars = vars;
    auto unit = [&](std::initializer_list<std::pair<std::size_t, int>> parts) {
      std::vector<Rat> v(vars, Rat(0));
      for (auto [i, s] : parts) v[i] += s;
      return nr(v);
    };
    std::vector<std::pair<std::array<std::uint8_t, 3>, Rat>> raw;
    auto key = [](std::size_t a, std::size_t b, std::size_t c) {
      return std::array<std::uint8_t, 3>{static_cast<std::uint8_t>(a), static_cast<std::uint8_t>(b),
                                         static_cast<std::uint8_t>(c)};
    };
    std::vector<Rat> diag(vars);
    for (std::size_t i = 0; i < vars; ++i) {
      diag[i] = unit({{i, 1}});
      raw.push_back({degree == 2 ? key(i, i, 255) : key(i, i, i), diag[i]});
    }
    if (degree == 2) {
      for (std::size_t i = 0; i < vars; ++i)
        for (std::size_t j = i + 1; j < vars; ++j)
          raw.push_back({key(i, j, 255), unit({{i, 1}, {j, 1}}) - diag[i] - diag[j]});
    } else {
      // c_iij: coefficient of x_i^2 x_j; c_ijj: of x_i x_j^2
      std::vector<std::vector<Rat>> c_iij(vars, std::vector<Rat>(vars)), c_ijj = c_iij;
      for (std::size_t i = 0; i < vars; ++i)
        for (std::size_t j = i + 1; j < vars; ++j) {
          Rat A = unit({{i, 1}, {j, 1}});
          Rat B = unit({{i, 1}, {j, -1}});
          c_ijj[i][j] = (A + B) / 2 - diag[i];
          c_iij[i][j] = (A - B) / 2 - diag[j];
          raw.push_back({key(i, i, j), c_iij[i][j]});
          raw.push_back({key(i, j, j), c_ijj[i][j]});
        }
      for (std::size_t i = 0; i < vars; ++i)
        for (std::size_t j = i + 1; j < vars; ++j)
          for (std::size_t k = j + 1; k < vars; ++k) {
            Rat s = unit({{i, 1}, {j, 1}, {k, 1}}) - diag[i] - diag[j] - diag[k] - c_iij[i][j] - c_ijj[i][j] -
                    c_iij[i][k] - c_ijj[i][k] - c_iij[j][k] - c_ijj[j][k];
            raw.push_back({key(i, j, k), s});
          }
    }
    Int den = 1;
    for (const auto& [k, c] : raw) den = lcm_int(den, c.get_den());
    f.den = den;
    const Int limit = Int(1) << 40;
    for (const auto& [k, c] : raw) {
      if (c == 0) continue;
      Term t;
      t.idx = k;
      t.num = Rat(c * den).get_num();
      if (abs_int(t.num) > limit) f.small_coeffs = false;
      else t.num_ll = t.num.get_si();
      f.terms.push_back(std::move(t));
    }
    return f;
  }

  Rat eval(const std::vector<Rat>& x) const {
    Rat s = 0;
    for (const auto& t : terms) {
      Rat m = Rat(t.num) * x[t.idx[0]] * x[t.idx[1]];
      if (t.idx[2] != 255) m *= x[t.idx[2]];
      s += m;
    }
    return s / Rat(den);
  }

  /// den * form(x) for integer x, exactly.
  Int eval_scaled(const std::vector<Int>& x) const {
    Int s = 0;
    for (const auto& t : terms) {
      Int m = t.num * x[t.idx[0]] * x[t.idx[1]];
      if (t.idx[2] != 255) m *= x[t.idx[2]];
      s += m;
    }
    return s;
  }

  /// den * form(x) in 128-bit arithmetic; false on (possible) overflow.
  bool eval_scaled_i128(const long long* x, __int128& out) const {
    if (!small_coeffs) return false;
    __int128 s = 0;
    for (const auto& t : terms) {
      __int128 m = static_cast<__int128>(t.num_ll) * x[t.idx[0]];
      if (__builtin_mul_overflow(m, static_cast<__int128>(x[t.idx[1]]), &m)) return false;
      if (t.idx[2] != 255 && __builtin_mul_overflow(m, static_cast<__int128>(x[t.idx[2]]), &m)) return false;
      if (__builtin_add_overflow(s, m, &s)) return false;
    }
    out = s;
    return true;
  }

  double eval_double(const std::vector<double>& x, double* magnitude = nullptr) const {
    double s = 0, mag = 0;
    for (const auto& t : terms) {
      double m = t.num.get_d() * x[t.idx[0]] * x[t.idx[1]];
      if (t.idx[2] != 255) m *= x[t.idx[2]];
      s += m;
      mag += std::fabs(m);
    }
    if (magnitude) *magnitude = mag / den.get_d();
    return s / den.get_d();
  }
};

// ---------------------------------------------------------------------------
// Algebras and elements

class Algebra;
using AlgebraPtr = std::shared_ptr<const Algebra>;

class Element {
 public:
  Element() = default;
  Element(AlgebraPtr alg, std::vector<Rat> coords);

  const AlgebraPtr& algebra() const { return alg_; }
  const std::vector<Rat>& coords() const { return c_; }
  const Rat& operator[](std::size_t i) const { return c_[i]; }
  bool is_zero() const {
    return std::all_of(c_.begin(), c_.end(), [](const Rat& r) { return r == 0; });
  }

  friend Element operator+(const Element& x, const Element& y);
  friend Element operator-(const Element& x, const Element& y);
  friend Element operator*(const Element& x, const Element& y);
  friend Element operator*(const Rat& s, const Element& x);
  friend bool operator==(const Element& x, const Element& y) { return x.alg_ == y.alg_ && x.c_ == y.c_; }

  std::string str() const {
    std::ostringstream os;
    os << '(';
    for (std::size_t i = 0; i < c_.size(); ++i) os << (i ? ", " : "") << c_[i];
    os << ')';
    return os.str();
  }

 private:
  AlgebraPtr alg_;
  std::vector<Rat> c_;
};

struct RealEmbedding {
  std::vector<Eigen::MatrixXd> images;  // one per standard basis element
  std::vector<double> error_radius;     // per image, bound on every entry's error
  Eigen::MatrixXd image(const std::vector<Rat>& coords) const {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(images[0].rows(), images[0].cols());
    for (std::size_t k = 0; k < coords.size(); ++k)
      if (coords[k] != 0) m += coords[k].get_d() * images[k];
    return m;
  }
  double radius(const std::vector<Rat>& coords) const {
    double r = 0;
    for (std::size_t k = 0; k < coords.size(); ++k) r += std::fabs(coords[k].get_d()) * error_radius[k];
    return r + 1e-15;
  }
};

class Algebra : public std::enable_shared_from_this<Algebra> {
 public:
  static AlgebraPtr create(const AlgebraSpec& spec) {
    auto a = std::shared_ptr<Algebra>(new Algebra(spec));
    a->init_norm_form();
    return a;
  }

  const AlgebraSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  int degree() const { return n_; }
  std::size_t dim() const { return dim_; }
  bool is_quaternion() const { return std::holds_alternative<QuaternionData>(spec_.data); }
  bool is_cyclic() const { return std::holds_alternative<CyclicData>(spec_.data); }
  bool is_matrix() const { return std::holds_alternative<MatrixData>(spec_.data); }
  const CubicField& field() const {
    if (!field_) throw Error("algebra has no cubic field");
    return *field_;
  }

  /// Coordinates of e_i * e_j.
  const std::vector<Rat>& product(std::size_t i, std::size_t j) const { return table_[i * dim_ + j]; }
  const std::vector<Rat>& basis_traces() const { return traces_; }
  const NormForm& norm_form() const { return norm_form_; }

  Element element(std::vector<Rat> coords) const { return Element(shared_from_this(), std::move(coords)); }
  Element one() const { return element(one_); }
  Element zero() const { return element(std::vector<Rat>(dim_, Rat(0))); }
  Element basis_element(std::size_t k) const {
    std::vector<Rat> c(dim_, Rat(0));
    c.at(k) = 1;
    return element(c);
  }

  std::vector<Rat> multiply(const std::vector<Rat>& x, const std::vector<Rat>& y) const {
    std::vector<Rat> r(dim_, Rat(0));
    for (std::size_t i = 0; i < dim_; ++i) {
      if (x[i] == 0) continue;
      for (std::size_t j = 0; j < dim_; ++j) {
        if (y[j] == 0) continue;
        Rat s = x[i] * y[j];
        const auto& p = product(i, j);
        for (std::size_t k = 0; k < dim_; ++k)
          if (p[k] != 0) r[k] += s * p[k];
      }
    }
    return r;
  }

  Rat trace(const std::vector<Rat>& x) const {
    Rat t = 0;
    for (std::size_t k = 0; k < dim_; ++k)
      if (x[k] != 0) t += x[k] * traces_[k];
    return t;
  }

  /// Reduced norm computed from the defining presentation.
  Rat norm_direct(const std::vector<Rat>& x) const;

  /// Matrix (in the standard basis) of left multiplication by x.
  MatQ left_regular(const std::vector<Rat>& x) const {
    MatQ m(dim_, dim_);
    for (std::size_t j = 0; j < dim_; ++j) {
      std::vector<Rat> ej(dim_, Rat(0));
      ej[j] = 1;
      auto col = multiply(x, ej);
      for (std::size_t i = 0; i < dim_; ++i) m(i, j) = col[i];
    }
    return m;
  }

 private:
  explicit Algebra(const AlgebraSpec& spec);
  void init_norm_form() {
    norm_form_ = NormForm::build(n_, dim_, [this](const std::vector<Rat>& v) { return norm_direct(v); });
  }

  AlgebraSpec spec_;
  int n_ = 0;
  std::size_t dim_ = 0;
  std::vector<std::vector<Rat>> table_;
  std::vector<Rat> traces_;
  std::vector<Rat> one_;
  std::unique_ptr<CubicField> field_;
  NormForm norm_form_;
};

inline Element::Element(AlgebraPtr alg, std::vector<Rat> coords) : alg_(std::move(alg)), c_(std::move(coords)) {
  if (!alg_) throw Error("element without algebra");
  if (c_.size() != alg_->dim()) throw Error("coordinate vector has the wrong length");
}

namespace detail {
inline void same_algebra(const Element& x, const Element& y) {
  if (x.algebra() != y.algebra()) throw Error("elements belong to different algebras");
}
}  // namespace detail

inline Element operator+(const Element& x, const Element& y) {
  detail::same_algebra(x, y);
  std::vector<Rat> c = x.c_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] += y.c_[i];
  return Element(x.alg_, std::move(c));
}
inline Element operator-(const Element& x, const Element& y) {
  detail::same_algebra(x, y);
  std::vector<Rat> c = x.c_;
  for (std::size_t i = 0; i < c.size(); ++i) c[i] -= y.c_[i];
  return Element(x.alg_, std::move(c));
}
inline Element operator*(const Element& x, const Element& y) {
  detail::same_algebra(x, y);
  return Element(x.alg_, x.alg_->multiply(x.c_, y.c_));
}
inline Element operator*(const Rat& s, const Element& x) {
  std::vector<Rat> c = x.c_;
  for (auto& v : c) v *= s;
  return Element(x.alg_, std::move(c));
}

inline Algebra::Algebra(const AlgebraSpec& spec) : spec_(spec) {
  if (const auto* q = std::get_if<QuaternionData>(&spec_.data)) {
    if (q->a == 0 || q->b == 0) throw Error("quaternion parameters must be nonzero");
    n_ = 2;
    dim_ = 4;
    const Rat &a = q->a, &b = q->b;
    // basis 1, i, j, k = ij
    auto v = [](Rat c0, Rat c1, Rat c2, Rat c3) { return std::vector<Rat>{c0, c1, c2, c3}; };
    const Rat z = 0;
    table_ = {
        v(1, z, z, z), v(z, 1, z, z),  v(z, z, 1, z),   v(z, z, z, 1),     // 1 * .
        v(z, 1, z, z), v(a, z, z, z),  v(z, z, z, 1),   v(z, z, a, z),     // i * .
        v(z, z, 1, z), v(z, z, z, -1), v(b, z, z, z),   v(z, -b, z, z),    // j * .
        v(z, z, z, 1), v(z, z, -a, z), v(z, b, z, z),   v(-a * b, z, z, z) // k * .
    };
    traces_ = {2, 0, 0, 0};
  } else if (const auto* c = std::get_if<CyclicData>(&spec_.data)) {
    if (c->b == 0) throw Error("cyclic algebra parameter b must be nonzero");
    field_ = std::make_unique<CubicField>(c->field);
    n_ = 3;
    dim_ = 9;
    const CubicField& E = *field_;
    std::array<CubicField::Elt, 3> theta_pow{CubicField::one(), CubicField::theta(),
                                             E.mul(CubicField::theta(), CubicField::theta())};
    table_.assign(dim_ * dim_, std::vector<Rat>(dim_, Rat(0)));
    // basis index 3j + i  <->  theta^i u^j
    for (int j = 0; j < 3; ++j)
      for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l)
          for (int k = 0; k < 3; ++k) {
            CubicField::Elt e = E.mul(theta_pow[i], E.sigma_pow(theta_pow[k], j));
            int up = j + l;
            if (up >= 3) {
              e = CubicField::scale(c->b, e);
              up -= 3;
            }
            auto& out = table_[(3 * j + i) * dim_ + (3 * l + k)];
            for (int r = 0; r < 3; ++r) out[3 * up + r] = e[r];
          }
    traces_.assign(dim_, Rat(0));
    auto ps = E.power_sums();
    for (int i = 0; i < 3; ++i) traces_[i] = ps[i];
  } else {
    const auto& m = std::get<MatrixData>(spec_.data);
    if (m.n < 2 || m.n > 3) throw Error("matrix algebra degree must be 2 or 3");
    n_ = m.n;
    dim_ = static_cast<std::size_t>(n_ * n_);
    table_.assign(dim_ * dim_, std::vector<Rat>(dim_, Rat(0)));
    for (int i = 0; i < n_; ++i)
      for (int j = 0; j < n_; ++j)
        for (int l = 0; l < n_; ++l) table_[(i * n_ + j) * dim_ + (j * n_ + l)][i * n_ + l] = 1;
    traces_.assign(dim_, Rat(0));
    for (int i = 0; i < n_; ++i) traces_[i * n_ + i] = 1;
  }
  one_.assign(dim_, Rat(0));
  if (is_matrix())
    for (int i = 0; i < n_; ++i) one_[i * n_ + i] = 1;
  else
    one_[0] = 1;
}

inline Rat Algebra::norm_direct(const std::vector<Rat>& x) const {
  if (const auto* q = std::get_if<QuaternionData>(&spec_.data)) {
    return x[0] * x[0] - q->a * x[1] * x[1] - q->b * x[2] * x[2] + q->a * q->b * x[3] * x[3];
  }
  if (const auto* c = std::get_if<CyclicData>(&spec_.data)) {
    // x = e0 + e1 u + e2 u^2 acting in M_3(E): e -> diag(e, s^2 e, s e),
    // u -> [[0,0,b],[1,0,0],[0,1,0]].
    const CubicField& E = *field_;
    std::array<CubicField::Elt, 3> e;
    for (int j = 0; j < 3; ++j) e[j] = {x[3 * j], x[3 * j + 1], x[3 * j + 2]};
    auto D = [&](const CubicField::Elt& v, int row) { return E.sigma_pow(v, (3 - row) % 3); };
    // matrix entries M[r][col]
    std::array<std::array<CubicField::Elt, 3>, 3> M;
    for (int r = 0; r < 3; ++r)
      for (int col = 0; col < 3; ++col) {
        // (U^j)[r][col] is 1 when col == r - j (mod 3), with factor b when the
        // wrap-around occurs (r - j < 0).
        int j = ((r - col) % 3 + 3) % 3;
        CubicField::Elt v = D(e[j], r);
        if (r - j < 0) v = CubicField::scale(c->b, v);
        M[r][col] = v;
      }
    auto m = [&](const CubicField::Elt& p, const CubicField::Elt& q) { return E.mul(p, q); };
    CubicField::Elt d = CubicField::zero();
    d = CubicField::add(d, m(M[0][0], CubicField::sub(m(M[1][1], M[2][2]), m(M[1][2], M[2][1]))));
    d = CubicField::sub(d, m(M[0][1], CubicField::sub(m(M[1][0], M[2][2]), m(M[1][2], M[2][0]))));
    d = CubicField::add(d, m(M[0][2], CubicField::sub(m(M[1][0], M[2][1]), m(M[1][1], M[2][0]))));
    if (d[1] != 0 || d[2] != 0) throw Error("reduced norm is not rational");
    return d[0];
  }
  MatQ m(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j) m(i, j) = x[i * n_ + j];
  return det(m);
}

// ---------------------------------------------------------------------------
// Free functions on elements

inline Rat reduced_trace(const Element& x) { return x.algebra()->trace(x.coords()); }

inline Rat reduced_norm(const Element& x) { return x.algebra()->norm_direct(x.coords()); }

inline Element power(const Element& x, unsigned k) {
  Element r = x.algebra()->one();
  for (unsigned i = 0; i < k; ++i) r = r * x;
  return r;
}

inline Poly reduced_charpoly(const Element& x) {
  const int n = x.algebra()->degree();
  std::vector<Rat> traces;
  Element p = x;
  for (int k = 1; k <= n; ++k) {
    traces.push_back(reduced_trace(p));
    if (k < n) p = p * x;
  }
  return power_traces_to_charpoly(traces);
}

/// Evaluates a polynomial at an algebra element.
inline Element evaluate(const Poly& f, const Element& x) {
  Element r = x.algebra()->zero();
  for (int i = f.degree(); i >= 0; --i) r = r * x + f.coeff(i) * x.algebra()->one();
  return r;
}

inline Element commutator(const Element& x, const Element& y) { return x * y - y * x; }

// ---------------------------------------------------------------------------
// Real splitting

inline RealEmbedding real_embedding(const Algebra& alg) {
  RealEmbedding emb;
  const double eps = DBL_EPSILON;
  if (const auto* q = std::get_if<QuaternionData>(&alg.spec().data)) {
    double a = q->a.get_d(), b = q->b.get_d();
    Eigen::Matrix2d one = Eigen::Matrix2d::Identity(), I, J;
    if (a > 0) {
      I << std::sqrt(a), 0, 0, -std::sqrt(a);
      J << 0, b, 1, 0;
    } else if (b > 0) {
      J << std::sqrt(b), 0, 0, -std::sqrt(b);
      I << 0, a, 1, 0;
    } else {
      throw Error("not split at the real place");
    }
    Eigen::Matrix2d K = I * J;
    emb.images = {one, I, J, K};
    for (const auto& m : emb.images) emb.error_radius.push_back(8 * eps * (1 + m.cwiseAbs().maxCoeff()));
    emb.error_radius[0] = 0;
    return emb;
  }
  if (const auto* c = std::get_if<CyclicData>(&alg.spec().data)) {
    const CubicField& E = alg.field();
    auto roots = isolate_real_roots(E.poly(), Rat(1, 1) / Rat(Int(1) << 60));
    if (roots.size() != 3) throw Error("cubic field is not totally real");
    int idx = c->field.root_index;
    if (idx < 0 || idx > 2) throw Error("root index must be 0, 1 or 2");
    auto snap = [&](double v) {
      int best = 0;
      for (int r = 1; r < 3; ++r)
        if (std::fabs(roots[r].approx() - v) < std::fabs(roots[best].approx() - v)) best = r;
      return best;
    };
    Poly s({Rat(c->field.sigma[0]), Rat(c->field.sigma[1]), Rat(c->field.sigma[2])});
    double alpha = roots[idx].approx();
    int i1 = snap(s.eval(alpha));
    int i2 = snap(s.eval(roots[i1].approx()));
    if (i1 == idx || i2 == idx || i1 == i2) throw Error("sigma does not permute the real roots cyclically");
    // theta -> diag(alpha, sigma^2(alpha), sigma(alpha))
    std::array<double, 3> d{alpha, roots[i2].approx(), roots[i1].approx()};
    double bd = c->b.get_d();
    Eigen::Matrix3d U;
    U << 0, 0, bd, 1, 0, 0, 0, 1, 0;
    Eigen::Matrix3d Up = Eigen::Matrix3d::Identity();
    for (int j = 0; j < 3; ++j) {
      for (int i = 0; i < 3; ++i) {
        Eigen::Matrix3d D = Eigen::Matrix3d::Zero();
        for (int r = 0; r < 3; ++r) D(r, r) = std::pow(d[r], i);
        Eigen::Matrix3d m = D * Up;
        emb.images.push_back(m);
        emb.error_radius.push_back(16 * eps * (1 + m.cwiseAbs().maxCoeff()));
      }
      Up = Up * U;
    }
    emb.error_radius[0] = 0;
    return emb;
  }
  const int n = alg.degree();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
      m(i, j) = 1;
      emb.images.push_back(m);
      emb.error_radius.push_back(0);
    }
  return emb;
}

// ---------------------------------------------------------------------------
// Division sanity search

struct DivisionSanityReport {
  bool pass = true;
  std::uint64_t checked = 0;
  std::optional<Element> witness;
};

/// Searches for a nonzero element whose coordinates are rationals p/q with
/// |p|, q <= height and whose reduced norm vanishes.
inline DivisionSanityReport division_sanity(const AlgebraPtr& alg, unsigned height,
                                            std::uint64_t budget = 20'000'000) {
  DivisionSanityReport rep;
  if (height == 0) return rep;
  std::vector<Rat> values;
  std::set<Rat> seen;
  for (long q = 1; q <= static_cast<long>(height); ++q)
    for (long p = -static_cast<long>(height); p <= static_cast<long>(height); ++p) {
      Rat r = make_rat(p, q);
      if (seen.insert(r).second) values.push_back(r);
    }
  std::sort(values.begin(), values.end());
  const std::size_t dim = alg->dim();
  double total = std::pow(static_cast<double>(values.size()), static_cast<double>(dim));
  if (total > static_cast<double>(budget)) throw Error("division_sanity search exceeds its budget");
  std::vector<double> vd(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) vd[i] = values[i].get_d();
  const NormForm& nf = alg->norm_form();
  std::vector<std::size_t> idx(dim, 0);
  std::vector<double> xd(dim);
  std::vector<Rat> xr(dim);
  while (true) {
    bool nonzero = false;
    for (std::size_t k = 0; k < dim; ++k) {
      xd[k] = vd[idx[k]];
      nonzero |= values[idx[k]] != 0;
    }
    if (nonzero) {
      ++rep.checked;
      double mag = 0;
      double v = nf.eval_double(xd, &mag);
      if (std::fabs(v) <= 1e-9 * (1 + mag)) {
        for (std::size_t k = 0; k < dim; ++k) xr[k] = values[idx[k]];
        if (alg->norm_direct(xr) == 0) {
          rep.pass = false;
          rep.witness = alg->element(xr);
          return rep;
        }
      }
    }
    std::size_t k = 0;
    while (k < dim && ++idx[k] == values.size()) idx[k++] = 0;
    if (k == dim) break;
  }
  return rep;
}

}  // namespace divalg
