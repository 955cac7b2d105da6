#pragma once

// Exact savings exponents for the sup-norm bounds, the amplifier length
// optimisations behind them, and a numeric evaluator of the split pretrace
// bracket fed by enumeration counts.

#include "divalg/counting.hpp"

#include <map>
#include <tuple>

namespace divalg {

struct ExponentReport {
  std::string regime;
  Rat delta1;  // spectral saving
  Rat delta2;  // volume saving
  std::vector<std::pair<std::string, Rat>> l_exponents;
  std::string note;
};

inline Int require_int(long v, long lo, const char* what) {
  if (v < lo) throw Error(std::string(what) + " must be at least " + std::to_string(lo));
  return Int(v);
}

/// Division algebra of prime degree p >= 3.
inline ExponentReport exponents_main(long p) {
  if (p == 2) throw Error("use exponents_quaternion");
  Int P = require_int(p, 3, "p");
  if (!is_prime(P)) throw Error("p must be prime");
  ExponentReport r;
  r.regime = "main";
  r.delta1 = Rat(1, 1) / Rat(16 * P * P * P);
  r.delta2 = Rat(1, 1) / Rat(8 * P * P * P * (P - 1));
  r.l_exponents = {{"L vs D", Rat(1) / Rat(4 * P * P * P * (P - 1))}, {"L vs S", Rat(1) / Rat(P * P * P * P * (P - 1))}};
  r.note = "division algebra of prime degree; hybrid of the spectral and volume regimes";
  return r;
}

/// Quaternion case: the amplifier balances L^-1 against S^{-1/2} L^{14}.
inline ExponentReport exponents_quaternion() {
  ExponentReport r;
  r.regime = "quaternion";
  r.delta1 = Rat(1, 120);
  r.delta2 = Rat(1, 30);
  // -x = -1/2 + 14 x
  Rat x = Rat(1, 2) / Rat(15);
  r.l_exponents = {{"L vs S*D", x}};
  r.note = "degree 2, amplifier length L = (S D)^x";
  return r;
}

/// Orders with O_0(N)-type level structure in odd degree n.
inline ExponentReport exponents_eichler(long n) {
  Int N = require_int(n, 3, "n");
  if (n % 2 == 0) throw Error("n must be odd");
  ExponentReport r;
  r.regime = "eichler";
  r.delta1 = Rat(1) / Rat(8 * N * N * N);
  r.delta2 = Rat(1) / Rat(4 * N * N * N * (N - 1));
  r.l_exponents = {{"L vs N", Rat(1) / Rat(2 * N * N * N)},
                   {"L vs S", Rat(1) / Rat(N * N * N * N * (N - 1))}};
  r.note = "level-aspect savings, twice those of the prime-degree case";
  return r;
}

struct SpectralOptimum {
  Rat optimal;    // 1 / (n(n-1)(n^2 + n(n-1)(n-2) + 1))
  Rat weakened;   // 1 / (n^4 (n-1))
  Rat l_exponent; // L = S^x at the balance point
  Rat first_term; // exponent of S in L^-1 at the balance point
  Rat second_term;// exponent of S in S^{-1/(n(n-1))} L^{n^2 + n(n-1)(n-2)}
  bool balanced = false;
};

inline SpectralOptimum optimize_L_spectral(long n) {
  Int N = require_int(n, 3, "n");
  Rat a = Rat(1) / Rat(N * (N - 1));
  Rat K = Rat(N * N + N * (N - 1) * (N - 2));
  SpectralOptimum s;
  // -x = -a + K x
  s.l_exponent = a / (K + 1);
  s.optimal = s.l_exponent;
  s.weakened = Rat(1) / Rat(N * N * N * N * (N - 1));
  s.first_term = -s.l_exponent;
  s.second_term = -a + K * s.l_exponent;
  s.balanced = s.first_term == s.second_term;
  return s;
}

struct DiscOptimum {
  Rat l_exponent;  // L = D^x
  Rat saving;      // D-saving before interpolation
  Rat hybrid;      // after multiplying with the spectral regime bound
};

inline DiscOptimum optimize_L_disc(long n) {
  Int N = require_int(n, 3, "n");
  DiscOptimum d;
  d.l_exponent = Rat(1) / Rat(4 * N * N * N * (N - 1));
  d.saving = d.l_exponent;
  d.hybrid = d.saving / 2;
  return d;
}

struct ConsistencyRow {
  std::string name;
  Rat derived;
  Rat stated;
  bool equal = false;
};

/// Rebuilds the prime-degree savings from the two optimisations: the spectral
/// saving in S converts to lambda through S ~ lambda^{n(n-1)/4}, and the
/// interpolation halves both.
inline std::vector<ConsistencyRow> hybrid_consistency(long p) {
  auto main = exponents_main(p);
  auto spec = optimize_L_spectral(p);
  auto disc = optimize_L_disc(p);
  Rat conv = make_rat(p * (p - 1), 4);
  std::vector<ConsistencyRow> rows;
  rows.push_back({"delta2 = disc saving / 2", disc.hybrid, main.delta2, disc.hybrid == main.delta2});
  Rat d1 = spec.weakened / 4 * conv;
  rows.push_back({"delta1 = weakened spectral saving / 4 in lambda", d1, main.delta1, d1 == main.delta1});
  rows.push_back({"optimal >= weakened", spec.optimal, spec.weakened, spec.optimal >= spec.weakened});
  return rows;
}

/// S proxy from a Laplace eigenvalue: 1 + lambda^{n(n-1)/4}.
inline double eigenvalue_to_S(double lambda, int n) {
  if (!(lambda > 0)) throw Error("lambda must be positive");
  if (n < 2) throw Error("n must be at least 2");
  return 1.0 + std::pow(lambda, n * (n - 1) / 4.0);
}

// ---------------------------------------------------------------------------
// Pretrace bracket

using PretraceKey = std::tuple<int, long, long>;  // (nu, l1, l2)

struct PretraceCounts {
  std::map<PretraceKey, std::size_t> near;  // #O(l1^nu l2^{(n-1)nu}; z, delta)
  std::map<PretraceKey, std::size_t> far;   // #O(same; z, rho)
};

struct PretraceParams {
  int n = 2;
  double S = 1;
  double L = 1;
  double delta = 0.1;
  std::vector<long> primes;
};

struct PretraceTerms {
  double identity = 0;  // |P|^-2 * |P|
  double near = 0;
  double far = 0;
  double total() const { return identity + near + far; }
};

inline PretraceTerms pretrace_rhs(const PretraceCounts& c, const PretraceParams& p) {
  if (p.primes.empty()) throw Error("prime set is empty");
  if (!(p.S >= 1)) throw Error("S must be at least 1");
  if (!(p.delta > 0)) throw Error("delta must be positive");
  const double P = static_cast<double>(p.primes.size());
  PretraceTerms t;
  t.identity = P / (P * P);
  double snear = 0, sfar = 0;
  for (int nu = 1; nu <= p.n; ++nu)
    for (long l1 : p.primes)
      for (long l2 : p.primes) {
        PretraceKey k{nu, l1, l2};
        auto a = c.near.find(k), b = c.far.find(k);
        if (a == c.near.end() || b == c.far.end()) {
          std::ostringstream os;
          os << "missing count for cell (nu=" << nu << ", l1=" << l1 << ", l2=" << l2 << ")";
          throw Error(os.str());
        }
        double w = std::pow(p.L, -static_cast<double>((p.n - 1) * nu));
        snear += w * static_cast<double>(a->second);
        sfar += w * static_cast<double>(b->second);
      }
  t.near = snear / (P * P);
  t.far = std::pow(p.S, -1.0 / (p.n * (p.n - 1))) * std::pow(p.delta, -0.5) * sfar / (P * P);
  return t;
}

/// Norm of the amplifier cell (nu, l1, l2): l1^nu l2^{(n-1)nu}.
inline Int amplifier_norm(int n, int nu, long l1, long l2) {
  return pow_int(Int(l1), static_cast<unsigned long>(nu)) *
         pow_int(Int(l2), static_cast<unsigned long>((n - 1) * nu));
}

/// Fills every cell by enumeration; each distinct norm is enumerated once.
inline PretraceCounts pretrace_counts(const Enumerator& en, const PretraceParams& p, double rho,
                                      const EnumOptions& opt = {}) {
  PretraceCounts c;
  std::map<std::pair<std::string, double>, std::size_t> cache;
  auto count = [&](const Int& m, double d) {
    auto key = std::make_pair(m.get_str(), d);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::size_t v = en.enumerate(m, d, opt).size();
    cache[key] = v;
    return v;
  };
  for (int nu = 1; nu <= p.n; ++nu)
    for (long l1 : p.primes)
      for (long l2 : p.primes) {
        Int m = amplifier_norm(p.n, nu, l1, l2);
        c.near[{nu, l1, l2}] = count(m, p.delta);
        c.far[{nu, l1, l2}] = count(m, rho);
      }
  return c;
}

}  // namespace divalg
