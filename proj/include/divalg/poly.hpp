#pragma once

// Univariate polynomials over Q, Newton identities and certified real-root
// isolation (Sturm sequences with exact rational bisection).

#include "divalg/rational.hpp"

#include <vector>

namespace divalg {

/// Coefficients low to high; the zero polynomial is the empty vector.
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<Rat> c) : c_(std::move(c)) { trim(); }

  static Poly monomial(std::size_t deg, const Rat& coef = 1) {
    std::vector<Rat> c(deg + 1, Rat(0));
    c[deg] = coef;
    return Poly(c);
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const std::vector<Rat>& coeffs() const { return c_; }
  Rat coeff(std::size_t i) const { return i < c_.size() ? c_[i] : Rat(0); }
  Rat lead() const { return c_.empty() ? Rat(0) : c_.back(); }

  Rat operator()(const Rat& x) const {
    Rat r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + *it;
    return r;
  }
  double eval(double x) const {
    double r = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) r = r * x + it->get_d();
    return r;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] += b.c_[i];
    return Poly(c);
  }
  friend Poly operator-(const Poly& a, const Poly& b) {
    std::vector<Rat> c(std::max(a.c_.size(), b.c_.size()), Rat(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) c[i] += a.c_[i];
    for (std::size_t i = 0; i < b.c_.size(); ++i) c[i] -= b.c_[i];
    return Poly(c);
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<Rat> c(a.c_.size() + b.c_.size() - 1, Rat(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i)
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    return Poly(c);
  }
  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }

  Poly derivative() const {
    if (c_.size() <= 1) return Poly();
    std::vector<Rat> d(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * static_cast<long>(i);
    return Poly(d);
  }

  /// Euclidean division; returns (quotient, remainder).
  std::pair<Poly, Poly> divmod(const Poly& d) const {
    if (d.is_zero()) throw Error("polynomial division by zero");
    std::vector<Rat> r = c_;
    std::vector<Rat> q(c_.size() >= d.c_.size() ? c_.size() - d.c_.size() + 1 : 0, Rat(0));
    for (int i = static_cast<int>(r.size()) - 1; i >= static_cast<int>(d.c_.size()) - 1; --i) {
      if (r[i] == 0) continue;
      Rat f = r[i] / d.lead();
      std::size_t shift = i - (d.c_.size() - 1);
      q[shift] = f;
      for (std::size_t j = 0; j < d.c_.size(); ++j) r[shift + j] -= f * d.c_[j];
    }
    return {Poly(q), Poly(r)};
  }

  std::string str(const std::string& var = "X") const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
      const Rat& a = c_[i];
      if (a == 0) continue;
      Rat mag = abs(a);
      os << (a < 0 ? (first ? "-" : " - ") : (first ? "" : " + "));
      if (mag != 1 || i == 0) os << mag;
      if (i >= 1) os << var;
      if (i >= 2) os << '^' << i;
      first = false;
    }
    return os.str();
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<Rat> c_;
};

/// Monic polynomial whose roots have power sums traces[0..n-1]
/// (traces[k-1] = p_k). Uses k e_k = sum_{i=1}^k (-1)^{i-1} e_{k-i} p_i.
inline Poly power_traces_to_charpoly(const std::vector<Rat>& traces) {
  const std::size_t n = traces.size();
  if (n == 0) throw Error("power_traces_to_charpoly needs at least one trace");
  std::vector<Rat> e(n + 1);
  e[0] = 1;
  for (std::size_t k = 1; k <= n; ++k) {
    Rat s = 0;
    for (std::size_t i = 1; i <= k; ++i) {
      Rat term = e[k - i] * traces[i - 1];
      if (i % 2 == 0) s -= term;
      else s += term;
    }
    e[k] = s / static_cast<long>(k);
  }
  std::vector<Rat> c(n + 1);
  for (std::size_t k = 0; k <= n; ++k) c[n - k] = (k % 2 == 0) ? e[k] : Rat(-e[k]);
  return Poly(c);
}

/// Elementary symmetric functions e_1..e_k from power sums p_1..p_k.
inline std::vector<Rat> power_sums_to_elementary(const std::vector<Rat>& traces) {
  Poly cp = power_traces_to_charpoly(traces);
  const std::size_t n = traces.size();
  std::vector<Rat> e(n + 1);
  for (std::size_t k = 0; k <= n; ++k) e[k] = (k % 2 == 0) ? cp.coeff(n - k) : Rat(-cp.coeff(n - k));
  return e;
}

/// Sturm sequence of p.
inline std::vector<Poly> sturm_sequence(const Poly& p) {
  std::vector<Poly> s{p, p.derivative()};
  while (!s.back().is_zero()) {
    auto r = s[s.size() - 2].divmod(s.back()).second;
    if (r.is_zero()) break;
    s.push_back(Poly() - r);
  }
  return s;
}

inline int sign_changes_at(const std::vector<Poly>& s, const Rat& x) {
  int changes = 0, last = 0;
  for (const auto& q : s) {
    int v = sgn(q(x));
    if (v == 0) continue;
    if (last != 0 && v != last) ++changes;
    last = v;
  }
  return changes;
}

/// A real root isolated in [lo, hi] with hi - lo <= width.
struct RootInterval {
  Rat lo, hi;
  double approx() const { return Rat((lo + hi) / 2).get_d(); }
};

/// Isolates every real root of a squarefree p, ascending, to the given width.
inline std::vector<RootInterval> isolate_real_roots(const Poly& p, const Rat& width) {
  if (p.degree() < 1) return {};
  auto s = sturm_sequence(p);
  // Cauchy bound
  Rat bound = 0;
  for (int i = 0; i < p.degree(); ++i) bound = std::max(bound, Rat(abs(p.coeff(i) / p.lead())));
  bound += 1;
  std::vector<RootInterval> out;
  std::vector<std::pair<Rat, Rat>> stack{{-bound, bound}};
  while (!stack.empty()) {
    auto [lo, hi] = stack.back();
    stack.pop_back();
    int count = sign_changes_at(s, lo) - sign_changes_at(s, hi);
    if (count == 0) continue;
    if (count == 1) {
      // Bisect to width with a sign test; p(lo), p(hi) have opposite signs unless
      // a root sits on an endpoint.
      while (hi - lo > width) {
        Rat mid = (lo + hi) / 2;
        if (p(mid) == 0) {
          lo = hi = mid;
          break;
        }
        if (sign_changes_at(s, lo) - sign_changes_at(s, mid) == 1) hi = mid;
        else lo = mid;
      }
      out.push_back({lo, hi});
      continue;
    }
    Rat mid = (lo + hi) / 2;
    if (p(mid) == 0) {
      out.push_back({mid, mid});
      // Shrink around mid so it is not counted twice.
      Rat eps = (hi - lo) / 1024;
      while (sign_changes_at(s, mid - eps) - sign_changes_at(s, mid + eps) > 1) eps /= 2;
      stack.push_back({lo, mid - eps});
      stack.push_back({mid + eps, hi});
    } else {
      stack.push_back({lo, mid});
      stack.push_back({mid, hi});
    }
  }
  std::sort(out.begin(), out.end(), [](const RootInterval& a, const RootInterval& b) { return a.lo < b.lo; });
  return out;
}

}  // namespace divalg
