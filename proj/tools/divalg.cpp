// divalg: define workspaces, enumerate O(m; z, delta), run verifiers and
// print savings exponents.

#include "divalg/divalg.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <fstream>
#include <iostream>

using namespace divalg;
using nlohmann::json;

namespace {

enum Exit { kOk = 0, kValidation = 1, kCheckFailed = 2, kBudget = 3 };

std::vector<Int> parse_m_range(const std::string& text) {
  auto dots = text.find("..");
  std::vector<Int> out;
  if (dots == std::string::npos) {
    Rat r = parse_rat(text);
    if (!is_integer(r)) throw Error("--m must be an integer or a range a..b");
    out.push_back(r.get_num());
  } else {
    Rat a = parse_rat(text.substr(0, dots)), b = parse_rat(text.substr(dots + 2));
    if (!is_integer(a) || !is_integer(b) || a > b) throw Error("--m range must be a..b with integers a <= b");
    for (Int m = a.get_num(); m <= b.get_num(); ++m) out.push_back(m);
  }
  for (const auto& m : out)
    if (m < 1) throw Error("m must be a positive integer");
  return out;
}

std::string type_name(const Algebra& a) {
  if (a.is_quaternion()) return "quaternion";
  if (a.is_cyclic()) return "cyclic3";
  return "matrix";
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write '" + path + "'");
  f << text;
}

int cmd_define(const std::vector<std::string>& configs, const std::string& out) {
  Workspace ws = load_workspace(configs);
  json j;
  std::cout << "algebras\n";
  for (const auto& name : ws.algebra_names) {
    const auto& e = ws.algebras.at(name);
    const auto& spec = e.alg->spec();
    std::cout << "  " << name << "  type=" << type_name(*e.alg) << " degree=" << e.alg->degree()
              << " division=" << (spec.division_attested ? "attested" : "no");
    if (e.sanity_height > 0)
      std::cout << " sanity(height " << e.sanity_height << ")=" << (e.sanity.pass ? "pass" : "zero divisor") << " over "
                << e.sanity.checked << " points";
    std::cout << '\n';
    j["algebras"].push_back({{"name", name},
                             {"type", type_name(*e.alg)},
                             {"degree", e.alg->degree()},
                             {"division_attested", spec.division_attested},
                             {"sanity_checked", e.sanity.checked}});
  }
  std::cout << "orders\n";
  for (const auto& name : ws.order_names) {
    const auto& e = ws.orders.at(name);
    std::cout << "  " << name << "  algebra=" << e.order->algebra()->name()
              << " disc=" << e.order->discriminant().get_str();
    if (e.level > 1) std::cout << " base=" << e.base << " level=" << e.level.get_str();
    std::cout << '\n';
    j["orders"].push_back({{"name", name},
                           {"algebra", e.order->algebra()->name()},
                           {"disc", e.order->discriminant().get_str()},
                           {"level", e.level.get_str()}});
  }
  for (const auto& r : ws.relations) {
    auto rel = order_index(ws.order(r.sub).order, ws.order(r.sup).order);
    std::cout << "relation " << r.name << "  [" << r.sup << " : " << r.sub << "] = " << rel.index.get_str() << '\n';
  }
  if (!out.empty()) write_file(out, j.dump(2) + "\n");
  return kOk;
}

BasePoint parse_base_point(const std::string& text, int n) {
  if (text.empty()) return identity_base_point(n);
  RMat z = parse_real_matrix(text);
  if (z.rows() != n || z.cols() != n) throw Error("--z must be " + std::to_string(n) + "x" + std::to_string(n));
  return make_base_point(z);
}

int cmd_enumerate(const std::vector<std::string>& configs, const std::string& order, const std::string& m_text,
                  double delta, const std::string& z_text, unsigned jobs, std::uint64_t budget,
                  const std::string& out) {
  Workspace ws = load_workspace(configs);
  const auto& entry = ws.order(order);
  if (!(delta > 0)) throw Error("delta must be positive");
  auto ms = parse_m_range(m_text);
  Enumerator en(entry.order, parse_base_point(z_text, entry.order->degree()));
  EnumOptions opt{jobs, budget, 1.05};
  std::ostringstream csv;
  csv << "m";
  for (std::size_t k = 0; k < entry.order->dim(); ++k) csv << ",c" << k;
  csv << ",norm,distance,margin\n";
  json summary{{"order", order}, {"delta", delta}, {"jobs_independent", true}};
  std::size_t total = 0;
  for (const auto& m : ms) {
    CountResult r;
    try {
      r = en.enumerate(m, delta, opt);
    } catch (const BudgetExceeded& e) {
      std::cerr << "error: " << e.what() << "; partial: m=" << m.get_str() << " found=" << e.partial().size()
                << " nodes=" << e.partial().nodes << '\n';
      return kBudget;
    }
    for (const auto& e : r.elements) {
      csv << m.get_str();
      for (auto c : e.coords) csv << ',' << c;
      char buf[96];
      std::snprintf(buf, sizeof buf, ",%s,%.12g,%.12g\n", m.get_str().c_str(), e.distance, e.margin);
      csv << buf;
    }
    total += r.size();
    summary["counts"].push_back({{"m", m.get_str()}, {"count", r.size()}, {"bound", r.bound}, {"nodes", r.nodes}});
  }
  summary["total"] = total;
  if (out.empty()) {
    std::cout << csv.str();
  } else {
    write_file(out, csv.str());
    write_file(out + ".json", summary.dump(2) + "\n");
    std::cout << "wrote " << total << " rows to " << out << '\n';
  }
  return kOk;
}

int cmd_verify(const std::vector<std::string>& configs, const std::string& suite, unsigned jobs,
               std::optional<std::uint64_t> seed, const std::string& out) {
  Workspace ws = load_workspace(configs);
  if (seed) ws.seed = *seed;
  VerifyReport rep;
  try {
    rep = run_verify(ws, suite, {jobs, 10'000'000});
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kBudget;
  }
  std::cout << rep.text();
  if (!out.empty()) {
    json j;
    for (const auto& l : rep.lines)
      j["checks"].push_back({{"suite", l.suite},
                             {"subject", l.subject},
                             {"check", l.check},
                             {"status", status_name(l.status)},
                             {"detail", l.detail}});
    j["pass"] = rep.count(Status::Pass);
    j["fail"] = rep.count(Status::Fail);
    j["info"] = rep.count(Status::Info);
    write_file(out, j.dump(2) + "\n");
  }
  return rep.ok() ? kOk : kCheckFailed;
}

struct BoundsArgs {
  std::string theorem;
  long p = 0;
  double S = 0, D = 0, lambda = 0;
  std::vector<std::string> configs;
  std::string order;
  double L = 0, delta = 0.1, rho = 0.05;
  unsigned jobs = 1;
  std::uint64_t budget = 50'000'000;
};

void print_report(const ExponentReport& r) {
  std::cout << "regime: " << r.regime << "\n";
  std::cout << "δ₁ = " << r.delta1.get_str() << ", δ₂ = " << r.delta2.get_str() << "\n";
  for (const auto& [name, x] : r.l_exponents) std::cout << "L exponent (" << name << "): " << x.get_str() << "\n";
  std::cout << "note: " << r.note << "\n";
}

int cmd_bounds(BoundsArgs a) {
  double S = a.S;
  if (a.lambda > 0) {
    int n = a.theorem == "quaternion" ? 2 : static_cast<int>(a.p);
    S = eigenvalue_to_S(a.lambda, n);
    std::cout << "S from lambda: " << fmt(S) << "\n";
  }
  if (!a.theorem.empty()) {
    ExponentReport r;
    if (a.theorem == "main") {
      if (a.p == 0) throw Error("--theorem main needs --p");
      r = exponents_main(a.p);
    } else if (a.theorem == "quaternion") {
      r = exponents_quaternion();
    } else if (a.theorem == "eichler") {
      if (a.p == 0) throw Error("--theorem eichler needs --n");
      r = exponents_eichler(a.p);
    } else {
      throw Error("--theorem must be main, quaternion or eichler");
    }
    print_report(r);
    if (a.theorem == "main") {
      auto spec = optimize_L_spectral(a.p);
      auto disc = optimize_L_disc(a.p);
      std::cout << "spectral optimum: " << spec.optimal.get_str() << " (weakened " << spec.weakened.get_str()
                << ", balanced " << (spec.balanced ? "yes" : "no") << ")\n";
      std::cout << "volume L exponent: " << disc.l_exponent.get_str() << ", hybrid " << disc.hybrid.get_str() << "\n";
      for (const auto& row : hybrid_consistency(a.p))
        std::cout << "  " << row.name << ": " << row.derived.get_str() << " vs " << row.stated.get_str() << " "
                  << (row.equal ? "ok" : "differs") << "\n";
    }
    if (S > 0 || a.D > 0) {
      double s = std::max(S, 1.0), d = std::max(a.D, 1.0);
      for (const auto& [name, x] : r.l_exponents) {
        double base = name.find("S*D") != std::string::npos ? s * d : (name.find('S') != std::string::npos ? s : d);
        std::cout << "L (" << name << ") = " << fmt(std::pow(base, x.get_d())) << "\n";
      }
      std::cout << "saving factor S^-δ₁ D^-δ₂ = " << fmt(std::pow(s, -r.delta1.get_d()) * std::pow(d, -r.delta2.get_d()))
                << "\n";
    }
  }
  if (!a.order.empty()) {
    if (a.L <= 5) throw Error("--L must exceed 5 for the pretrace evaluation");
    Workspace ws = load_workspace(a.configs);
    const auto& entry = ws.order(a.order);
    std::set<long> ramified;
    for (const auto& [p, e] : factorize(entry.order->discriminant())) ramified.insert(p.get_si());
    PretraceParams pp;
    pp.n = entry.order->degree();
    pp.S = std::max(S, 1.0);
    pp.L = a.L;
    pp.delta = a.delta;
    pp.primes = primes_in_window(a.L, ramified);
    Enumerator en(entry.order, identity_base_point(pp.n));
    PretraceCounts counts;
    try {
      counts = pretrace_counts(en, pp, a.rho, {a.jobs, a.budget, 1.05});
    } catch (const BudgetExceeded& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kBudget;
    }
    auto t = pretrace_rhs(counts, pp);
    std::cout << "pretrace bracket for " << a.order << " (L=" << fmt(a.L) << ", |P|=" << pp.primes.size()
              << ", delta=" << fmt(a.delta) << ", rho=" << fmt(a.rho) << ", S=" << fmt(pp.S) << ")\n";
    for (const auto& [k, c] : counts.near) {
      auto [nu, l1, l2] = k;
      std::cout << "  nu=" << nu << " l1=" << l1 << " l2=" << l2 << " m=" << amplifier_norm(pp.n, nu, l1, l2).get_str()
                << " count_delta=" << c << " count_rho=" << counts.far.at(k) << "\n";
    }
    std::cout << "identity term: " << fmt(t.identity) << "\nnear term: " << fmt(t.near) << "\nfar term: " << fmt(t.far)
              << "\ntotal: " << fmt(t.total()) << "\n";
  }
  if (a.theorem.empty() && a.order.empty()) throw Error("bounds needs --theorem or --order");
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Arithmetic of orders in division algebras: enumeration and verification"};
  app.require_subcommand(1);

  std::vector<std::string> configs;
  std::string out, order, m_text = "1", z_text, suite = "all";
  double delta = 0;
  unsigned jobs = 1;
  std::uint64_t budget = 10'000'000;
  std::uint64_t seed_value = 0;

  auto* define = app.add_subcommand("define", "load and validate a workspace");
  define->add_option("--config", configs, "config file (repeatable)")->required();
  define->add_option("--out", out, "JSON summary path");

  auto* enumerate = app.add_subcommand("enumerate", "list O(m; z, delta) as CSV");
  enumerate->add_option("--config", configs, "config file (repeatable)")->required();
  enumerate->add_option("--order", order, "order name")->required();
  enumerate->add_option("--m", m_text, "norm m or range a..b");
  enumerate->add_option("--delta", delta, "proximity radius")->required();
  enumerate->add_option("--z", z_text, "base point, rows separated by ';'");
  enumerate->add_option("--jobs", jobs, "worker threads");
  enumerate->add_option("--budget", budget, "search node budget");
  enumerate->add_option("--out", out, "CSV path; the JSON summary goes to <out>.json");

  auto* verify = app.add_subcommand("verify", "run verification suites");
  verify->add_option("--config", configs, "config file (repeatable)")->required();
  verify->add_option("--suite", suite, "gram|commutator|ideal|units|convexity|index|counting|all");
  verify->add_option("--jobs", jobs, "worker threads");
  auto* seed_opt = verify->add_option("--seed", seed_value, "random seed (default from config, else 0)");
  verify->add_option("--out", out, "JSON report path");

  BoundsArgs b;
  auto* bounds = app.add_subcommand("bounds", "savings exponents and pretrace evaluation");
  bounds->add_option("--theorem", b.theorem, "main|quaternion|eichler");
  bounds->add_option("--p,--n", b.p, "degree");
  bounds->add_option("--S", b.S, "spectral size");
  bounds->add_option("--D", b.D, "discriminant or level size");
  bounds->add_option("--lambda", b.lambda, "Laplace eigenvalue (sets S)");
  bounds->add_option("--config", b.configs, "config file for the pretrace evaluation");
  bounds->add_option("--order", b.order, "order for the pretrace evaluation");
  bounds->add_option("--L", b.L, "amplifier length");
  bounds->add_option("--delta", b.delta, "near radius");
  bounds->add_option("--rho", b.rho, "far radius");
  bounds->add_option("--jobs", b.jobs, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kValidation;
  }

  try {
    if (*define) return cmd_define(configs, out);
    if (*enumerate) return cmd_enumerate(configs, order, m_text, delta, z_text, jobs, budget, out);
    if (*verify) {
      std::optional<std::uint64_t> seed;
      if (*seed_opt) seed = seed_value;
      return cmd_verify(configs, suite, jobs, seed, out);
    }
    return cmd_bounds(b);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kValidation;
  }
}
