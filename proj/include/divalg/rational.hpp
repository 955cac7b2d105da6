#pragma once

// Exact scalars, dense exact matrices, lattice normal forms and the small
// arithmetic functions every other header builds on.

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace divalg {

using Int = mpz_class;
using Rat = mpq_class;

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw Error("zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

inline Rat make_rat(long num, long den = 1) { return make_rat(Int(num), Int(den)); }

inline bool is_integer(const Rat& r) { return r.get_den() == 1; }

inline Int abs_int(const Int& a) { return a < 0 ? Int(-a) : a; }

inline Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

inline Int mod_floor(const Int& a, const Int& m) {
  Int r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

inline Int gcd_int(const Int& a, const Int& b) {
  Int g;
  mpz_gcd(g.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return g;
}

inline Int lcm_int(const Int& a, const Int& b) {
  Int l;
  mpz_lcm(l.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return l;
}

// s*a + t*b = g >= 0
inline void ext_gcd(const Int& a, const Int& b, Int& g, Int& s, Int& t) {
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
}

inline Int pow_int(const Int& base, unsigned long e) {
  Int r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

inline Rat pow_rat(const Rat& base, unsigned long e) {
  Rat r(1);
  for (unsigned long i = 0; i < e; ++i) r *= base;
  return r;
}

inline std::string to_string(const Rat& r) { return r.get_str(); }
inline std::string to_string(const Int& r) { return r.get_str(); }

/// Parses "p", "-p" or "p/q".
inline Rat parse_rat(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) throw Error("empty rational literal");
  if (s.front() == '+') s.erase(s.begin());
  Rat r;
  if (r.set_str(s, 10) != 0) throw Error("malformed rational literal '" + text + "'");
  if (r.get_den() == 0) throw Error("zero denominator in '" + text + "'");
  r.canonicalize();
  return r;
}

// ---------------------------------------------------------------------------
// Dense matrices

template <class T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {
    if (rows == 0 || cols == 0) throw Error("matrix dimensions must be positive");
  }
  Matrix(std::initializer_list<std::initializer_list<T>> rows) {
    rows_ = rows.size();
    cols_ = rows_ ? rows.begin()->size() : 0;
    if (rows_ == 0 || cols_ == 0) throw Error("matrix dimensions must be positive");
    for (const auto& r : rows) {
      if (r.size() != cols_) throw Error("ragged matrix literal");
      data_.insert(data_.end(), r.begin(), r.end());
    }
  }

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }

  static Matrix from_columns(const std::vector<std::vector<T>>& cols) {
    if (cols.empty()) throw Error("matrix dimensions must be positive");
    Matrix m(cols.front().size(), cols.size());
    for (std::size_t j = 0; j < cols.size(); ++j) {
      if (cols[j].size() != m.rows_) throw Error("ragged column list");
      for (std::size_t i = 0; i < m.rows_; ++i) m(i, j) = cols[j][i];
    }
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }
  bool square() const { return rows_ == cols_; }

  T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::vector<T> col(std::size_t j) const {
    std::vector<T> v(rows_);
    for (std::size_t i = 0; i < rows_; ++i) v[i] = (*this)(i, j);
    return v;
  }
  std::vector<T> row(std::size_t i) const {
    return std::vector<T>(data_.begin() + i * cols_, data_.begin() + (i + 1) * cols_);
  }
  void set_col(std::size_t j, const std::vector<T>& v) {
    for (std::size_t i = 0; i < rows_; ++i) (*this)(i, j) = v[i];
  }

  void swap_rows(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t j = 0; j < cols_; ++j) std::swap((*this)(a, j), (*this)(b, j));
  }
  void swap_cols(std::size_t a, std::size_t b) {
    if (a == b) return;
    for (std::size_t i = 0; i < rows_; ++i) std::swap((*this)(i, a), (*this)(i, b));
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
      for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  bool is_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& x) { return x == 0; });
  }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw Error("matrix product dimension mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::size_t i = 0; i < a.rows_; ++i)
      for (std::size_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (aik == 0) continue;
        for (std::size_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend Matrix operator+(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error("matrix sum dimension mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] += b.data_[i];
    return c;
  }
  friend Matrix operator-(const Matrix& a, const Matrix& b) {
    if (a.rows_ != b.rows_ || a.cols_ != b.cols_) throw Error("matrix difference dimension mismatch");
    Matrix c = a;
    for (std::size_t i = 0; i < c.data_.size(); ++i) c.data_[i] -= b.data_[i];
    return c;
  }
  friend Matrix operator*(const T& s, const Matrix& a) {
    Matrix c = a;
    for (auto& x : c.data_) x *= s;
    return c;
  }
  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  friend std::ostream& operator<<(std::ostream& os, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows_; ++i) {
      if (i) os << "; ";
      for (std::size_t j = 0; j < m.cols_; ++j) {
        if (j) os << ' ';
        os << m(i, j);
      }
    }
    return os;
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

using MatZ = Matrix<Int>;
using MatQ = Matrix<Rat>;

inline MatQ to_rational(const MatZ& m) {
  MatQ q(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) q(i, j) = Rat(m(i, j));
  return q;
}

inline std::optional<MatZ> to_integer(const MatQ& m) {
  MatZ z(m.rows(), m.cols());
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) {
      if (!is_integer(m(i, j))) return std::nullopt;
      z(i, j) = m(i, j).get_num();
    }
  return z;
}

/// Determinant by fraction-free Bareiss elimination.
inline Int det(MatZ m) {
  if (!m.square()) throw Error("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  Int prev = 1;
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (m(k, k) == 0) {
      std::size_t r = k + 1;
      while (r < n && m(r, k) == 0) ++r;
      if (r == n) return 0;
      m.swap_rows(k, r);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i)
      for (std::size_t j = k + 1; j < n; ++j) {
        Int v = m(i, j) * m(k, k) - m(i, k) * m(k, j);
        mpz_divexact(v.get_mpz_t(), v.get_mpz_t(), prev.get_mpz_t());
        m(i, j) = v;
      }
    prev = m(k, k);
  }
  return sign * m(n - 1, n - 1);
}

inline Rat det(MatQ m) {
  if (!m.square()) throw Error("determinant of a non-square matrix");
  const std::size_t n = m.rows();
  Rat d = 1;
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    while (p < n && m(p, k) == 0) ++p;
    if (p == n) return 0;
    if (p != k) {
      m.swap_rows(p, k);
      d = -d;
    }
    d *= m(k, k);
    for (std::size_t i = k + 1; i < n; ++i) {
      if (m(i, k) == 0) continue;
      Rat f = m(i, k) / m(k, k);
      for (std::size_t j = k; j < n; ++j) m(i, j) -= f * m(k, j);
    }
  }
  return d;
}

/// Reduced row echelon form in place; returns pivot columns.
inline std::vector<std::size_t> rref(MatQ& m) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
    std::size_t p = r;
    while (p < m.rows() && m(p, c) == 0) ++p;
    if (p == m.rows()) continue;
    m.swap_rows(p, r);
    Rat inv = 1 / m(r, c);
    for (std::size_t j = c; j < m.cols(); ++j) m(r, j) *= inv;
    for (std::size_t i = 0; i < m.rows(); ++i) {
      if (i == r || m(i, c) == 0) continue;
      Rat f = m(i, c);
      for (std::size_t j = c; j < m.cols(); ++j) m(i, j) -= f * m(r, j);
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

inline std::size_t rank(MatQ m) { return rref(m).size(); }
inline std::size_t rank(const MatZ& m) { return rank(to_rational(m)); }

inline MatQ inverse(const MatQ& a) {
  if (!a.square()) throw Error("inverse of a non-square matrix");
  const std::size_t n = a.rows();
  MatQ aug(n, 2 * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n + i) = 1;
  }
  auto piv = rref(aug);
  if (piv.size() < n || piv[n - 1] != n - 1) throw Error("matrix is singular");
  MatQ inv(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) inv(i, j) = aug(i, n + j);
  return inv;
}

/// Solves a·x = b for square nonsingular a.
inline std::vector<Rat> solve(const MatQ& a, const std::vector<Rat>& b) {
  if (!a.square() || a.rows() != b.size()) throw Error("solve dimension mismatch");
  const std::size_t n = a.rows();
  MatQ aug(n, n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) aug(i, j) = a(i, j);
    aug(i, n) = b[i];
  }
  auto piv = rref(aug);
  if (piv.size() < n || piv[n - 1] != n - 1) throw Error("matrix is singular");
  std::vector<Rat> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = aug(i, n);
  return x;
}

// ---------------------------------------------------------------------------
// Normal forms

struct NormalFormResult {
  MatZ form;   // transformed matrix
  MatZ left;   // unimodular, applied on the left (identity for HNF)
  MatZ right;  // unimodular, applied on the right
  std::size_t rank = 0;
};

namespace detail {

inline void col_combine(MatZ& m, std::size_t p, std::size_t k, const Int& s, const Int& t, const Int& u,
                        const Int& v) {
  // (col_p, col_k) <- (s col_p + t col_k, u col_p + v col_k)
  for (std::size_t i = 0; i < m.rows(); ++i) {
    Int a = m(i, p), b = m(i, k);
    m(i, p) = s * a + t * b;
    m(i, k) = u * a + v * b;
  }
}

inline void row_combine(MatZ& m, std::size_t p, std::size_t k, const Int& s, const Int& t, const Int& u,
                        const Int& v) {
  for (std::size_t j = 0; j < m.cols(); ++j) {
    Int a = m(p, j), b = m(k, j);
    m(p, j) = s * a + t * b;
    m(k, j) = u * a + v * b;
  }
}

}  // namespace detail

/// Column-style Hermite normal form: M·U = H with H lower triangular
/// (column echelon), positive pivots, and every entry of a pivot row lying
/// in a previous pivot column reduced into [0, pivot).
inline NormalFormResult hnf(const MatZ& m) {
  if (m.is_zero()) throw Error("degenerate lattice");
  MatZ h = m;
  MatZ u = MatZ::identity(m.cols());
  std::size_t pc = 0;
  std::vector<std::pair<std::size_t, std::size_t>> pivots;  // (row, col)
  for (std::size_t i = 0; i < h.rows() && pc < h.cols(); ++i) {
    for (std::size_t k = pc + 1; k < h.cols(); ++k) {
      if (h(i, k) == 0) continue;
      Int g, s, t;
      ext_gcd(h(i, pc), h(i, k), g, s, t);
      Int a = h(i, pc) / g, b = h(i, k) / g;
      detail::col_combine(h, pc, k, s, t, Int(-b), a);
      detail::col_combine(u, pc, k, s, t, Int(-b), a);
    }
    if (h(i, pc) == 0) continue;
    if (h(i, pc) < 0) {
      for (std::size_t r = 0; r < h.rows(); ++r) h(r, pc) = -h(r, pc);
      for (std::size_t r = 0; r < u.rows(); ++r) u(r, pc) = -u(r, pc);
    }
    for (const auto& [pr, pcol] : pivots) {
      (void)pr;
      Int q = floor_div(h(i, pcol), h(i, pc));
      if (q == 0) continue;
      for (std::size_t r = 0; r < h.rows(); ++r) h(r, pcol) -= q * h(r, pc);
      for (std::size_t r = 0; r < u.rows(); ++r) u(r, pcol) -= q * u(r, pc);
    }
    pivots.emplace_back(i, pc);
    ++pc;
  }
  NormalFormResult res{h, MatZ::identity(m.rows()), u, pivots.size()};
  return res;
}

/// Smith normal form U·M·V = diag(d_1, ..., d_n), d_i | d_{i+1}, d_i > 0.
inline NormalFormResult snf(const MatZ& m) {
  if (!m.square()) throw Error("snf requires a square matrix");
  if (det(m) == 0) throw Error("snf requires a nonsingular matrix");
  const std::size_t n = m.rows();
  MatZ d = m, l = MatZ::identity(n), r = MatZ::identity(n);
  for (std::size_t t = 0; t < n; ++t) {
    while (true) {
      // Move the smallest nonzero entry of the trailing block to (t, t).
      std::size_t bi = t, bj = t;
      Int best = 0;
      for (std::size_t i = t; i < n; ++i)
        for (std::size_t j = t; j < n; ++j)
          if (d(i, j) != 0 && (best == 0 || abs_int(d(i, j)) < best)) {
            best = abs_int(d(i, j));
            bi = i;
            bj = j;
          }
      d.swap_rows(t, bi);
      l.swap_rows(t, bi);
      d.swap_cols(t, bj);
      r.swap_cols(t, bj);
      bool clean = true;
      for (std::size_t i = t + 1; i < n; ++i) {
        if (d(i, t) == 0) continue;
        Int q = floor_div(d(i, t), d(t, t));
        detail::row_combine(d, t, i, Int(1), Int(0), Int(-q), Int(1));
        detail::row_combine(l, t, i, Int(1), Int(0), Int(-q), Int(1));
        if (d(i, t) != 0) clean = false;
      }
      for (std::size_t j = t + 1; j < n; ++j) {
        if (d(t, j) == 0) continue;
        Int q = floor_div(d(t, j), d(t, t));
        detail::col_combine(d, t, j, Int(1), Int(0), Int(-q), Int(1));
        detail::col_combine(r, t, j, Int(1), Int(0), Int(-q), Int(1));
        if (d(t, j) != 0) clean = false;
      }
      if (!clean) continue;
      // Divisibility: fold any offending row into row t.
      bool divides = true;
      for (std::size_t i = t + 1; i < n && divides; ++i)
        for (std::size_t j = t + 1; j < n; ++j)
          if (mod_floor(d(i, j), d(t, t)) != 0) {
            detail::row_combine(d, t, i, Int(1), Int(1), Int(0), Int(1));
            detail::row_combine(l, t, i, Int(1), Int(1), Int(0), Int(1));
            divides = false;
            break;
          }
      if (divides) break;
    }
    if (d(t, t) < 0) {
      for (std::size_t j = 0; j < n; ++j) {
        d(t, j) = -d(t, j);
        l(t, j) = -l(t, j);
      }
    }
  }
  return NormalFormResult{d, l, r, n};
}

/// Index [sup : sub] of lattices given by column bases.
inline Int lattice_index(const MatQ& sup_basis, const MatQ& sub_basis) {
  if (!sup_basis.square() || !sub_basis.square() || sup_basis.rows() != sub_basis.rows())
    throw Error("lattice_index requires square bases of equal size");
  if (det(sup_basis) == 0 || det(sub_basis) == 0) throw Error("rank-deficient lattice basis");
  MatQ x = inverse(sup_basis) * sub_basis;
  auto xi = to_integer(x);
  if (!xi) throw Error("not a sublattice");
  return abs_int(det(*xi));
}

// ---------------------------------------------------------------------------
// Elementary arithmetic functions

inline constexpr std::uint64_t kTrialDivisionBound = 1u << 20;

/// Prime factorisation by trial division up to 2^20.
inline std::map<Int, unsigned> factorize(const Int& m) {
  if (m <= 0) throw Error("factorize requires a positive integer");
  std::map<Int, unsigned> f;
  Int r = m;
  for (std::uint64_t d = 2; d <= kTrialDivisionBound; d += (d == 2 ? 1 : 2)) {
    Int dd(static_cast<unsigned long>(d));
    if (dd * dd > r) break;
    while (mpz_divisible_ui_p(r.get_mpz_t(), d)) {
      ++f[dd];
      r /= dd;
    }
  }
  if (r > 1) {
    Int bound(static_cast<unsigned long>(kTrialDivisionBound));
    if (r > bound * bound) throw Error("integer has a cofactor beyond the trial-division bound");
    ++f[r];
  }
  return f;
}

inline Int divisor_count(const Int& m) {
  if (m == 0) throw Error("divisor_count of zero");
  Int t = 1;
  for (const auto& [p, e] : factorize(abs_int(m))) t *= (e + 1);
  return t;
}

inline bool is_prime(const Int& n) {
  if (n < 2) return false;
  auto f = factorize(n);
  return f.size() == 1 && f.begin()->second == 1;
}

inline Int binomial(unsigned long n, unsigned long k) {
  Int r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

/// Number of tuples (a_1..a_p) of nonnegative integers summing to e.
inline Int compositions_count(unsigned long e, unsigned long p) {
  if (p == 0) throw Error("compositions_count requires p >= 1");
  return binomial(e + p - 1, p - 1);
}

inline Int euler_phi(const Int& n) {
  Int r = n;
  for (const auto& [p, e] : factorize(n)) r = r / p * (p - 1);
  return r;
}

/// Primes q with L <= q <= 2L that are not in `ramified`, ascending.
inline std::vector<long> primes_in_window(double L, const std::set<long>& ramified) {
  if (!(L > 5.0)) throw std::invalid_argument("primes_in_window requires L > 5");
  const long lo = static_cast<long>(std::ceil(L));
  const long hi = static_cast<long>(std::floor(2.0 * L));
  const long root = static_cast<long>(std::sqrt(static_cast<double>(hi))) + 1;
  std::vector<bool> small(root + 1, true);
  std::vector<long> base;
  for (long i = 2; i <= root; ++i) {
    if (!small[i]) continue;
    base.push_back(i);
    for (long j = i * i; j <= root; j += i) small[j] = false;
  }
  std::vector<bool> seg(hi - lo + 1, true);
  for (long p : base) {
    long start = std::max(p * p, ((lo + p - 1) / p) * p);
    for (long j = start; j <= hi; j += p) seg[j - lo] = false;
  }
  std::vector<long> out;
  for (long q = std::max(lo, 2L); q <= hi; ++q)
    if (seg[q - lo] && !ramified.count(q)) out.push_back(q);
  return out;
}

}  // namespace divalg
