#pragma once

// Verification suites over a loaded workspace. Reports are plain tables whose
// content depends only on the workspace and seed (never on timing or worker
// count), so runs can be diffed byte for byte.

#include "divalg/bounds.hpp"
#include "divalg/config.hpp"

#include <cstdio>

namespace divalg {

enum class Status { Pass, Fail, Info };

inline const char* status_name(Status s) {
  switch (s) {
    case Status::Pass: return "PASS";
    case Status::Fail: return "FAIL";
    default: return "INFO";
  }
}

struct CheckLine {
  std::string suite, subject, check;
  Status status = Status::Pass;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckLine> lines;

  bool ok() const {
    return std::none_of(lines.begin(), lines.end(), [](const CheckLine& l) { return l.status == Status::Fail; });
  }
  std::size_t count(Status s) const {
    return static_cast<std::size_t>(
        std::count_if(lines.begin(), lines.end(), [&](const CheckLine& l) { return l.status == s; }));
  }
  std::string text() const {
    std::ostringstream os;
    for (const auto& l : lines) {
      char head[160];
      std::snprintf(head, sizeof head, "%-10s %-14s %-34s %s", l.suite.c_str(), l.subject.c_str(), l.check.c_str(),
                    status_name(l.status));
      os << head;
      if (!l.detail.empty()) os << "  " << l.detail;
      os << '\n';
    }
    os << "summary: " << count(Status::Pass) << " pass, " << count(Status::Fail) << " fail, " << count(Status::Info)
       << " info\n";
    return os.str();
  }
};

struct VerifyOptions {
  unsigned jobs = 1;
  std::uint64_t budget = 10'000'000;
};

inline std::string fmt(double v) {
  char b[64];
  std::snprintf(b, sizeof b, "%.6g", v);
  return b;
}

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"gram", "commutator", "ideal", "units", "convexity", "index", "counting"};
  return names;
}

namespace detail {

using Rng = std::mt19937_64;

inline std::vector<Int> random_coords(Rng& rng, std::size_t d, long r) {
  std::uniform_int_distribution<long> u(-r, r);
  std::vector<Int> x(d);
  for (auto& v : x) v = Int(u(rng));
  return x;
}

inline std::vector<BasePoint> base_points(int n, int extra, Rng& rng) {
  std::vector<BasePoint> zs{identity_base_point(n)};
  for (int i = 0; i < extra; ++i) zs.push_back(random_base_point(n, rng, 0.5));
  return zs;
}

struct Ctx {
  const Workspace& ws;
  VerifyOptions opt;
  VerifyReport& rep;
  Rng rng;

  void add(const std::string& suite, const std::string& subject, const std::string& check, Status s,
           std::string detail = "") {
    rep.lines.push_back({suite, subject, check, s, std::move(detail)});
  }
  void add(const std::string& suite, const std::string& subject, const std::string& check, bool pass,
           std::string detail = "") {
    add(suite, subject, check, pass ? Status::Pass : Status::Fail, std::move(detail));
  }
  EnumOptions enum_options() const { return {opt.jobs, opt.budget, 1.05}; }
};

inline void suite_gram(Ctx& c) {
  const auto& v = c.ws.verify;
  for (const auto& name : c.ws.order_names) {
    const Order& o = *c.ws.order(name).order;
    const Int& D = o.discriminant();
    MatQ T = algebra_trace_form(*o.algebra());
    std::vector<Element> basis;
    for (std::size_t k = 0; k < o.dim(); ++k) basis.push_back(o.basis_element(k));
    auto cert = gram_divisibility(basis, D, T);
    c.add("gram", name, "basis tuple |s| = D", is_integer(cert.s) && abs_int(cert.s.get_num()) == D,
          "s=" + cert.s.get_str() + " D=" + D.get_str());
    std::size_t bad = 0, singular = 0;
    for (std::size_t t = 0; t < v.samples; ++t) {
      std::vector<Element> tuple;
      for (std::size_t k = 0; k < o.dim(); ++k) tuple.push_back(o.element(random_coords(c.rng, o.dim(), 3)));
      auto g = gram_divisibility(tuple, D, T);
      if (!g.divisible) ++bad;
      if (g.s == 0) ++singular;
    }
    c.add("gram", name, "D | s on random tuples", bad == 0,
          "samples=" + std::to_string(v.samples) + " singular=" + std::to_string(singular) +
              " failures=" + std::to_string(bad));
    Enumerator en(c.ws.order(name).order, identity_base_point(o.degree()));
    auto pr = lemma_proper_verify(en, v.L, v.delta, c.enum_options());
    std::string detail = "L=" + std::to_string(v.L) + " threshold=" + fmt(pr.threshold) +
                         " collected=" + std::to_string(pr.collected) + " rank=" + std::to_string(pr.gram_rank);
    if (pr.below_threshold) c.add("gram", name, "small elements are dependent", pr.rank_deficient, detail);
    else c.add("gram", name, "small elements are dependent", Status::Info, "above threshold; " + detail);
  }
}

// Pairs grow quadratically; split controls in degree 3 produce thousands of elements.
inline constexpr std::size_t kCommutatorElementCap = 300;

inline void suite_commutator(Ctx& c) {
  const auto& v = c.ws.verify;
  for (const auto& name : c.ws.order_names) {
    const auto& entry = c.ws.order(name);
    const Order& o = *entry.order;
    const int n = o.degree();
    if (entry.level > 1) {
      std::size_t bad = 0;
      for (std::size_t t = 0; t < v.samples; ++t) {
        auto g1 = o.element(random_coords(c.rng, o.dim(), 4));
        auto g2 = o.element(random_coords(c.rng, o.dim(), 4));
        if (!commutator_level_divisibility(o, entry.level, g1, g2).divisible) ++bad;
      }
      c.add("commutator", name, "N | nr([g1, g2])", bad == 0,
            "N=" + entry.level.get_str() + " samples=" + std::to_string(v.samples) + " failures=" + std::to_string(bad));
    }
    if (n % 2 == 0) {
      c.add("commutator", name, "odd-degree vanishing", Status::Info, "inapplicable in even degree");
      continue;
    }
    const bool division = o.algebra()->spec().division_attested;
    const auto& emb = real_embedding(*o.algebra());
    std::size_t elements = 0, pairs = 0, certified = 0, bad = 0, nonzero = 0;
    bool sampled = false;
    double max_ratio = 0;
    for (const auto& z : base_points(n, v.points, c.rng)) {
      Enumerator en(entry.order, z);
      std::vector<Element> found;
      for (long m = 1; m <= v.comm_m_max; ++m)
        for (const auto& e : en.enumerate(Int(m), v.comm_delta, c.enum_options()).elements)
          found.push_back(to_element(o, e.coords));
      elements += found.size();
      if (found.size() > kCommutatorElementCap) {
        // evenly spaced subsample of the (sorted) enumeration output
        std::vector<Element> kept;
        for (std::size_t k = 0; k < kCommutatorElementCap; ++k)
          kept.push_back(found[k * found.size() / kCommutatorElementCap]);
        found.swap(kept);
        sampled = true;
      }
      std::vector<NearResult> near;
      for (const auto& g : found) near.push_back(near_so(z, g, v.comm_delta, emb));
      for (std::size_t i = 0; i < found.size(); ++i)
        for (std::size_t j = i; j < found.size(); ++j) {
          auto cert = commutator_certificate(near[i], near[j], v.comm_delta, found[i], found[j]);
          ++pairs;
          if (!cert.vanishes) ++nonzero;
          max_ratio = std::max(max_ratio, cert.ratio);
          if (!cert.certified_small) continue;
          ++certified;
          if (!cert.vanishes || (division && !cert.commute)) ++bad;
        }
    }
    c.add("commutator", name, "certified-small norms vanish", bad == 0,
          "elements=" + std::to_string(elements) + " pairs=" + std::to_string(pairs) +
              " certified=" + std::to_string(certified) + " nonzero=" + std::to_string(nonzero) +
              " max_ratio=" + fmt(max_ratio) + " failures=" + std::to_string(bad) +
              (sampled ? " sampled=" + std::to_string(kCommutatorElementCap) + "/point" : ""));
  }
}

inline void suite_ideal(Ctx& c) {
  for (unsigned p : {2u, 3u})
    for (long q : {2L, 3L, 5L})
      for (unsigned e = 0; e <= c.ws.verify.ideal_e_max; ++e) {
        Int f = ideal_count_formula(p, Int(q), e);
        std::string subject = "p=" + std::to_string(p) + " q=" + std::to_string(q) + " e=" + std::to_string(e);
        try {
          Int b = ideal_count_bruteforce(p, q, e);
          c.add("ideal", subject, "formula = enumeration", f == b, f.get_str() + " vs " + b.get_str());
        } catch (const Error& ex) {
          c.add("ideal", subject, "formula = enumeration", Status::Info, std::string("skipped: ") + ex.what());
        }
      }
}

/// Units of a rank-2 subring {1, w} with |tr| <= bound, by direct search.
inline std::set<std::vector<Int>> quadratic_units_direct(const SubfieldOrder& s, long bound) {
  Element w = s.basis[1];
  Rat t = reduced_trace(w), nw = reduced_norm(w);
  Rat disc = t * t - 4 * nw;  // disc of w; (tr xi)^2 - 4 nr xi = c1^2 disc
  std::set<std::vector<Int>> out;
  if (disc <= 0) return out;
  if (!(s.basis[0] == s.alg->one())) throw Error("direct search expects the basis to start with 1");
  long r = static_cast<long>(std::ceil(std::sqrt((static_cast<double>(bound) * bound + 4) / disc.get_d()))) + 1;
  const double td = t.get_d();
  for (long c1 = -r; c1 <= r; ++c1) {
    // tr(c0 + c1 w) = 2 c0 + c1 tr(w)
    long lo = static_cast<long>(std::floor((-bound - c1 * td) / 2)) - 1;
    long hi = static_cast<long>(std::ceil((bound - c1 * td) / 2)) + 1;
    for (long c0 = lo; c0 <= hi; ++c0) {
      Element x = Rat(c0) * s.basis[0] + Rat(c1) * w;
      if (abs(reduced_trace(x)) > bound) continue;
      Rat nr = reduced_norm(x);
      if (nr == 1 || nr == -1) out.insert({Int(c0), Int(c1)});
    }
  }
  return out;
}

inline void suite_units(Ctx& c) {
  const auto& v = c.ws.verify;
  for (const auto& name : c.ws.subring_names) {
    const auto& s = c.ws.subrings.at(name).sub;
    auto rep = unit_box_count(s, v.units_delta, v.units_c);
    std::string box;
    for (auto b : rep.box) box += (box.empty() ? "" : ",") + std::to_string(b);
    c.add("units", name, "units <= p * admissible", rep.within_bound,
          "p=" + std::to_string(rep.p) + " box=" + box + " scanned=" + std::to_string(rep.trace_vectors) +
              " admissible=" + std::to_string(rep.admissible) + " units=" + std::to_string(rep.units.size()));
    std::vector<Int> one(rep.p, Int(0));
    bool has_one = false, exact = true;
    for (const auto& u : rep.units) {
      Element x = s.alg->zero();
      for (int k = 0; k < rep.p; ++k) x = x + Rat(u[k]) * s.basis[k];
      if (x == s.alg->one()) has_one = true;
      Rat nr = reduced_norm(x);
      if (nr != 1 && nr != -1) exact = false;
    }
    c.add("units", name, "1 found; all norms are +-1", has_one && exact);
    if (rep.p == 2) {
      auto direct = quadratic_units_direct(s, rep.box[0]);
      std::set<std::vector<Int>> found(rep.units.begin(), rep.units.end());
      c.add("units", name, "matches direct search", direct == found,
            std::to_string(found.size()) + " vs " + std::to_string(direct.size()));
    }
  }
}

inline void suite_convexity(Ctx& c) {
  const auto& v = c.ws.verify;
  for (const auto& name : c.ws.order_names) {
    const auto& entry = c.ws.order(name);
    const Order& o = *entry.order;
    const int n = o.degree();
    auto zs = base_points(n, v.points, c.rng);
    try {
      Enumerator en0(entry.order, zs[0]);
      auto first = convexity_verify(en0, v.rho, c.enum_options());
      if (!first.applicable) {
        c.add("convexity", name, "O(1; z, rho) = {1}", Status::Info,
              "inapplicable (" + first.reason + "); |O(1; I, rho)|=" + std::to_string(first.result.size()));
        continue;
      }
      std::size_t ok = first.only_identity;
      for (std::size_t i = 1; i < zs.size(); ++i) {
        Enumerator en(entry.order, zs[i]);
        if (convexity_verify(en, v.rho, c.enum_options()).only_identity) ++ok;
      }
      c.add("convexity", name, "O(1; z, rho) = {1}", ok == zs.size(),
            "rho=" + fmt(v.rho) + " threshold=" + fmt(first.threshold) + " points=" + std::to_string(zs.size()) +
                " ok=" + std::to_string(ok));
    } catch (const BudgetExceeded&) {
      throw;
    } catch (const Error& e) {
      c.add("convexity", name, "O(1; z, rho) = {1}", false, e.what());
    }
  }
}

/// |P^{n-1}(Z/p^v)| = p^{(v-1)(n-1)} (p^n - 1)/(p - 1).
inline Int projective_space_size(long p, unsigned v, int n) {
  Int P(p);
  return pow_int(P, static_cast<unsigned long>((v - 1) * (n - 1))) * (pow_int(P, n) - 1) / (P - 1);
}

inline void unit_index_lines(Ctx& c, const std::string& subject, const OrderPtr& sub, const OrderPtr& sup,
                             std::optional<Int> level) {
  auto rel = order_index(sub, sup);
  for (const auto& [p, vp] : factorize(rel.index)) {
    long pl = p.get_si();
    unsigned k = vp;
    double size = std::pow(static_cast<double>(pl), static_cast<double>(k * sub->dim()));
    std::string tag = "p=" + p.get_str();
    if (size > static_cast<double>(kUnitCountBudget)) {
      c.add("index", subject, "local unit index at " + tag, Status::Info, "local ring too large");
      continue;
    }
    auto r = unit_index_report(sub, sup, pl, k);
    std::string detail = "raw=" + r.raw_ratio.get_str() + " direct=" + r.direct_index.get_str() +
                         " radical_dim=" + r.filtration_sub.radical_dim.get_str() + "/" +
                         r.filtration_sup.radical_dim.get_str();
    bool pass = r.direct_available && r.filtration_sub.holds && r.filtration_sup.holds;
    if (level) {
      unsigned v = 0;
      for (Int t = *level; t % p == 0; t /= p) ++v;
      Int expect = projective_space_size(pl, v, sub->degree());
      pass = pass && r.direct_index == Rat(expect);
      detail += " expected=" + expect.get_str();
    }
    c.add("index", subject, "local unit index at " + tag, pass, detail);
  }
}

inline void suite_index(Ctx& c) {
  for (const auto& name : c.ws.order_names) {
    const auto& entry = c.ws.order(name);
    if (entry.level == 1) continue;
    const auto& base = c.ws.order(entry.base).order;
    auto rel = order_index(entry.order, base);
    int n = entry.order->degree();
    Int expect = pow_int(entry.level, static_cast<unsigned long>(n - 1));
    c.add("index", name, "[base : O] = N^(n-1)", rel.index == expect,
          rel.index.get_str() + " vs " + expect.get_str());
    c.add("index", name, "disc(O) = index^2 disc(base)",
          entry.order->discriminant() == rel.index * rel.index * base->discriminant(),
          entry.order->discriminant().get_str());
    unit_index_lines(c, name, entry.order, base, entry.level);
  }
  for (const auto& r : c.ws.relations) {
    const auto& sub = c.ws.order(r.sub).order;
    const auto& sup = c.ws.order(r.sup).order;
    auto rel = order_index(sub, sup);
    c.add("index", r.name, "disc(sub) = index^2 disc(sup)", rel.consistent,
          "index=" + rel.index.get_str() + " disc " + sub->discriminant().get_str() + "/" +
              sup->discriminant().get_str());
    unit_index_lines(c, r.name, sub, sup, std::nullopt);
  }
  std::size_t bad = 0;
  for (long N = 1; N <= 60; ++N)
    if (gamma0_unit_index(Int(N)) != projective_line_count(N)) ++bad;
  c.add("index", "N<=60", "N prod(1+1/p) = |P^1(Z/N)|", bad == 0, "failures=" + std::to_string(bad));
}

inline void suite_counting(Ctx& c) {
  const auto& v = c.ws.verify;
  for (const auto& name : c.ws.order_names) {
    const auto& entry = c.ws.order(name);
    Enumerator en(entry.order, identity_base_point(entry.order->degree()));
    auto rep = count_bound_check(en, v.delta, v.m_max, c.enum_options());
    std::size_t ramified = 0;
    for (const auto& row : rep.rows) ramified += row.ramified;
    bool finite = std::isfinite(rep.constant);
    c.add("counting", name, "count / tau^(p-1)(1+d)^(p-1)", finite,
          "m<=" + std::to_string(v.m_max) + " constant=" + fmt(rep.constant) + " ramified_m=" + std::to_string(ramified));
  }
}

}  // namespace detail

inline VerifyReport run_verify(const Workspace& ws, const std::string& suite, const VerifyOptions& opt = {}) {
  const auto& names = suite_names();
  if (suite != "all" && std::find(names.begin(), names.end(), suite) == names.end())
    throw Error("unknown suite '" + suite + "'");
  VerifyReport rep;
  for (std::size_t idx = 0; idx < names.size(); ++idx) {
    const auto& s = names[idx];
    if (suite != "all" && suite != s) continue;
    // Each suite draws from its own stream so selecting one suite reproduces its lines from "all".
    detail::Ctx c{ws, opt, rep, detail::Rng(ws.seed * 1000003ull + idx)};
    if (s == "gram") detail::suite_gram(c);
    else if (s == "commutator") detail::suite_commutator(c);
    else if (s == "ideal") detail::suite_ideal(c);
    else if (s == "units") detail::suite_units(c);
    else if (s == "convexity") detail::suite_convexity(c);
    else if (s == "index") detail::suite_index(c);
    else detail::suite_counting(c);
  }
  return rep;
}

}  // namespace divalg
