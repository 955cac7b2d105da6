#pragma once

// Line-oriented workspace files: [kind name] sections of key = value pairs.
// Lattice data is exact: matrices are semicolon-separated rows of integers or
// slash-fractions, one row per basis element.

#include "divalg/counting.hpp"

#include <fstream>
#include <map>

namespace divalg {

class ConfigError : public Error {
 public:
  ConfigError(const std::string& source, int line, const std::string& msg)
      : Error(source + ":" + std::to_string(line) + ": " + msg), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ConfigEntry {
  std::string key, value;
  int line = 0;
};

struct ConfigSection {
  std::string kind, name, source;
  int line = 0;
  std::vector<ConfigEntry> entries;

  const ConfigEntry* find(const std::string& key) const {
    for (const auto& e : entries)
      if (e.key == key) return &e;
    return nullptr;
  }
  const ConfigEntry& require(const std::string& key) const {
    if (const auto* e = find(key)) return *e;
    throw ConfigError(source, line, "[" + kind + " " + name + "] is missing '" + key + "'");
  }
};

inline std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_ws(const std::string& s) {
  std::istringstream is(s);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

inline std::vector<ConfigSection> parse_config(std::istream& in, const std::string& source) {
  std::vector<ConfigSection> out;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(source, line, "unterminated section header");
      auto words = split_ws(s.substr(1, s.size() - 2));
      if (words.empty() || words.size() > 2) throw ConfigError(source, line, "section header must be [kind name]");
      ConfigSection sec;
      sec.kind = words[0];
      sec.name = words.size() == 2 ? words[1] : "";
      sec.source = source;
      sec.line = line;
      out.push_back(std::move(sec));
      continue;
    }
    auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError(source, line, "expected key = value");
    if (out.empty()) throw ConfigError(source, line, "key outside of any section");
    ConfigEntry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (e.key.empty()) throw ConfigError(source, line, "empty key");
    if (out.back().find(e.key)) throw ConfigError(source, line, "duplicate key '" + e.key + "'");
    out.back().entries.push_back(std::move(e));
  }
  return out;
}

/// Rows separated by ';', entries by whitespace.
inline std::vector<std::vector<Rat>> parse_rat_rows(const std::string& text) {
  std::vector<std::vector<Rat>> rows;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, ';')) {
    auto words = split_ws(cur);
    if (words.empty()) continue;
    std::vector<Rat> row;
    for (const auto& w : words) row.push_back(parse_rat(w));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline RMat parse_real_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::string cur;
  std::istringstream is(text);
  while (std::getline(is, cur, ';')) {
    auto words = split_ws(cur);
    if (words.empty()) continue;
    std::vector<double> row;
    for (const auto& w : words) {
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(w, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != w.size()) throw Error("not a real number: '" + w + "'");
      row.push_back(v);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error("empty matrix");
  RMat m(rows.size(), rows[0].size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows[0].size()) throw Error("ragged matrix rows");
    for (std::size_t j = 0; j < rows[i].size(); ++j) m(i, j) = rows[i][j];
  }
  return m;
}

// ---------------------------------------------------------------------------
// Workspace

struct AlgebraEntry {
  AlgebraPtr alg;
  unsigned sanity_height = 0;
  DivisionSanityReport sanity;
};

struct OrderEntry {
  OrderPtr order;
  std::string base;  // for level orders
  Int level = 1;
  std::optional<Int> expect_disc;
};

struct RelationEntry {
  std::string name, sub, sup;
};

struct SubringEntry {
  std::string name, algebra;
  SubfieldOrder sub;
};

struct VerifySettings {
  double delta = 0.05;        // gram/proper/convexity radius
  double rho = 0.05;          // convexity radius
  double comm_delta = 0.5;    // radius for commutator pairs
  long comm_m_max = 8;
  long L = 1;
  long m_max = 20;
  std::size_t samples = 1000;
  double units_delta = 0.1;
  double units_c = -1;  // default 2 sqrt(n)
  int points = 4;       // random base points per order
  unsigned ideal_e_max = 4;
};

struct Workspace {
  std::vector<std::string> algebra_names, order_names, subring_names;
  std::map<std::string, AlgebraEntry> algebras;
  std::map<std::string, OrderEntry> orders;
  std::map<std::string, SubringEntry> subrings;
  std::vector<RelationEntry> relations;
  VerifySettings verify;
  std::uint64_t seed = 0;

  const OrderEntry& order(const std::string& name) const {
    auto it = orders.find(name);
    if (it == orders.end()) throw Error("unknown order '" + name + "'");
    return it->second;
  }
};

namespace detail {

inline Int parse_int_at(const ConfigSection& s, const ConfigEntry& e) {
  try {
    Rat r = parse_rat(e.value);
    if (!is_integer(r)) throw Error("x");
    return r.get_num();
  } catch (const std::exception&) {
    throw ConfigError(s.source, e.line, "'" + e.key + "' must be an integer");
  }
}

inline Rat parse_rat_at(const ConfigSection& s, const ConfigEntry& e) {
  try {
    return parse_rat(e.value);
  } catch (const std::exception&) {
    throw ConfigError(s.source, e.line, "'" + e.key + "' must be a rational number");
  }
}

inline double parse_double_at(const ConfigSection& s, const ConfigEntry& e) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(e.value, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != e.value.size() || !std::isfinite(v))
    throw ConfigError(s.source, e.line, "'" + e.key + "' must be a real number");
  return v;
}

inline std::array<Int, 3> parse_triple(const ConfigSection& s, const ConfigEntry& e) {
  auto w = split_ws(e.value);
  if (w.size() != 3) throw ConfigError(s.source, e.line, "'" + e.key + "' needs three integers");
  std::array<Int, 3> out;
  for (int i = 0; i < 3; ++i) {
    ConfigEntry tmp{e.key, w[i], e.line};
    out[i] = parse_int_at(s, tmp);
  }
  return out;
}

inline void check_keys(const ConfigSection& s, std::initializer_list<const char*> allowed, bool allow_image = false) {
  for (const auto& e : s.entries) {
    bool ok = allow_image && e.key.rfind("image.", 0) == 0;
    for (const char* a : allowed) ok = ok || e.key == a;
    if (!ok) throw ConfigError(s.source, e.line, "unknown key '" + e.key + "' in [" + s.kind + "]");
  }
}

inline void load_algebra(Workspace& ws, const ConfigSection& s) {
  check_keys(s, {"type", "a", "b", "f", "sigma", "root", "n", "division", "provenance", "sanity_height"});
  AlgebraSpec spec;
  spec.name = s.name;
  const auto& type = s.require("type");
  unsigned default_height = 0;
  if (type.value == "quaternion") {
    spec.data = QuaternionData{parse_rat_at(s, s.require("a")), parse_rat_at(s, s.require("b"))};
    default_height = 3;
  } else if (type.value == "cyclic3") {
    CubicFieldSpec f;
    f.f = parse_triple(s, s.require("f"));
    f.sigma = parse_triple(s, s.require("sigma"));
    if (const auto* r = s.find("root")) f.root_index = static_cast<int>(parse_int_at(s, *r).get_si());
    spec.data = CyclicData{f, parse_rat_at(s, s.require("b"))};
    default_height = 1;
  } else if (type.value == "matrix") {
    spec.data = MatrixData{static_cast<int>(parse_int_at(s, s.require("n")).get_si())};
  } else {
    throw ConfigError(s.source, type.line, "unknown algebra type '" + type.value + "'");
  }
  if (const auto* d = s.find("division")) {
    if (d->value == "attested") spec.division_attested = true;
    else if (d->value != "no") throw ConfigError(s.source, d->line, "division must be 'attested' or 'no'");
    if (spec.division_attested && std::holds_alternative<MatrixData>(spec.data))
      throw ConfigError(s.source, d->line, "a matrix algebra is not a division algebra");
  }
  if (const auto* p = s.find("provenance")) spec.provenance = p->value;
  AlgebraEntry entry;
  try {
    entry.alg = Algebra::create(spec);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(s.source, s.line, e.what());
  }
  entry.sanity_height = spec.division_attested ? default_height : 0;
  if (const auto* h = s.find("sanity_height"))
    entry.sanity_height = static_cast<unsigned>(parse_int_at(s, *h).get_ui());
  if (entry.sanity_height > 0) {
    try {
      entry.sanity = division_sanity(entry.alg, entry.sanity_height);
    } catch (const std::exception& e) {
      throw ConfigError(s.source, s.line, e.what());
    }
    if (spec.division_attested && !entry.sanity.pass)
      throw ConfigError(s.source, s.line, "division attested but a zero divisor was found: " +
                                              entry.sanity.witness->str());
  }
  ws.algebras[s.name] = entry;
  ws.algebra_names.push_back(s.name);
}

inline MatQ parse_basis(const ConfigSection& s, const ConfigEntry& e, std::size_t dim) {
  std::vector<std::vector<Rat>> rows;
  try {
    rows = parse_rat_rows(e.value);
  } catch (const std::exception& ex) {
    throw ConfigError(s.source, e.line, ex.what());
  }
  if (rows.size() != dim) throw ConfigError(s.source, e.line, "basis needs " + std::to_string(dim) + " rows");
  MatQ B(dim, dim);
  for (std::size_t k = 0; k < dim; ++k) {
    if (rows[k].size() != dim)
      throw ConfigError(s.source, e.line, "basis row " + std::to_string(k + 1) + " needs " + std::to_string(dim) +
                                              " entries");
    for (std::size_t i = 0; i < dim; ++i) B(i, k) = rows[k][i];
  }
  return B;
}

inline void load_order(Workspace& ws, const ConfigSection& s) {
  check_keys(s, {"algebra", "basis", "base", "level", "splitting", "expect_disc"}, true);
  OrderEntry entry;
  auto wrap = [&](int line, auto&& fn) {
    try {
      return fn();
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& ex) {
      throw ConfigError(s.source, line, ex.what());
    }
  };
  if (const auto* b = s.find("base")) {
    if (s.find("algebra") || s.find("basis"))
      throw ConfigError(s.source, b->line, "a level order takes 'base', not 'algebra'/'basis'");
    auto it = ws.orders.find(b->value);
    if (it == ws.orders.end()) throw ConfigError(s.source, b->line, "unknown base order '" + b->value + "'");
    const auto& lv = s.require("level");
    Int N = parse_int_at(s, lv);
    if (N < 1) throw ConfigError(s.source, lv.line, "level must be positive");
    const OrderPtr& base = it->second.order;
    const Algebra& alg = *base->algebra();
    Splitting sp;
    const auto* mode = s.find("splitting");
    if (!mode || mode->value == "auto") {
      sp = wrap(lv.line, [&] { return auto_splitting(alg, N); });
    } else if (mode->value == "images") {
      sp.modulus = N;
      for (std::size_t k = 0; k < alg.dim(); ++k) {
        const auto* im = s.find("image." + std::to_string(k));
        if (!im) throw ConfigError(s.source, mode->line, "missing image." + std::to_string(k));
        auto rows = wrap(im->line, [&] { return parse_rat_rows(im->value); });
        MatZ m(rows.size(), rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
          if (rows[i].size() != rows.size()) throw ConfigError(s.source, im->line, "image must be square");
          for (std::size_t j = 0; j < rows.size(); ++j) {
            if (!is_integer(rows[i][j])) throw ConfigError(s.source, im->line, "image entries must be integers");
            m(i, j) = rows[i][j].get_num();
          }
        }
        sp.images.push_back(m);
      }
    } else {
      throw ConfigError(s.source, mode->line, "splitting must be 'auto' or 'images'");
    }
    entry.order = wrap(lv.line, [&] { return o0n_order(base, N, sp, s.name); });
    entry.base = b->value;
    entry.level = N;
  } else {
    const auto& a = s.require("algebra");
    auto it = ws.algebras.find(a.value);
    if (it == ws.algebras.end()) throw ConfigError(s.source, a.line, "unknown algebra '" + a.value + "'");
    const AlgebraPtr& alg = it->second.alg;
    const auto& bs = s.require("basis");
    if (bs.value == "standard") {
      entry.order = wrap(bs.line, [&] { return standard_order(alg, s.name); });
    } else {
      MatQ B = parse_basis(s, bs, alg->dim());
      entry.order = wrap(bs.line, [&] { return Order::create(s.name, alg, B); });
    }
  }
  if (const auto* d = s.find("expect_disc")) {
    entry.expect_disc = parse_int_at(s, *d);
    if (*entry.expect_disc != entry.order->discriminant())
      throw ConfigError(s.source, d->line, "discriminant is " + entry.order->discriminant().get_str() + ", expected " +
                                               entry.expect_disc->get_str());
  }
  ws.orders[s.name] = entry;
  ws.order_names.push_back(s.name);
}

inline void load_subring(Workspace& ws, const ConfigSection& s) {
  check_keys(s, {"algebra", "basis"});
  const auto& a = s.require("algebra");
  auto it = ws.algebras.find(a.value);
  if (it == ws.algebras.end()) throw ConfigError(s.source, a.line, "unknown algebra '" + a.value + "'");
  const AlgebraPtr& alg = it->second.alg;
  const auto& b = s.require("basis");
  std::vector<std::vector<Rat>> rows;
  try {
    rows = parse_rat_rows(b.value);
  } catch (const std::exception& ex) {
    throw ConfigError(s.source, b.line, ex.what());
  }
  SubringEntry e;
  e.name = s.name;
  e.algebra = a.value;
  e.sub.alg = alg;
  for (const auto& r : rows) {
    if (r.size() != alg->dim()) throw ConfigError(s.source, b.line, "subring rows need " + std::to_string(alg->dim()) + " entries");
    e.sub.basis.push_back(alg->element(r));
  }
  ws.subrings[s.name] = e;
  ws.subring_names.push_back(s.name);
}

inline void load_verify(Workspace& ws, const ConfigSection& s) {
  check_keys(s, {"delta", "rho", "comm_delta", "comm_m_max", "L", "m_max", "samples", "units_delta", "units_c",
                 "points", "ideal_e_max", "seed"});
  auto& v = ws.verify;
  for (const auto& e : s.entries) {
    if (e.key == "delta") v.delta = parse_double_at(s, e);
    else if (e.key == "rho") v.rho = parse_double_at(s, e);
    else if (e.key == "comm_delta") v.comm_delta = parse_double_at(s, e);
    else if (e.key == "units_delta") v.units_delta = parse_double_at(s, e);
    else if (e.key == "units_c") v.units_c = parse_double_at(s, e);
    else {
      Int x = parse_int_at(s, e);
      if (x < 0) throw ConfigError(s.source, e.line, "'" + e.key + "' must be nonnegative");
      if (e.key == "comm_m_max") v.comm_m_max = x.get_si();
      else if (e.key == "L") v.L = x.get_si();
      else if (e.key == "m_max") v.m_max = x.get_si();
      else if (e.key == "samples") v.samples = x.get_ui();
      else if (e.key == "points") v.points = static_cast<int>(x.get_si());
      else if (e.key == "ideal_e_max") v.ideal_e_max = static_cast<unsigned>(x.get_ui());
      else if (e.key == "seed") ws.seed = x.get_ui();
    }
  }
  for (double d : {v.delta, v.rho, v.comm_delta, v.units_delta})
    if (!(d > 0) || d > 2) throw ConfigError(s.source, s.line, "radii must lie in (0, 2]");
}

}  // namespace detail

inline void load_sections(Workspace& ws, const std::vector<ConfigSection>& secs) {
  for (const auto& s : secs) {
    if (s.kind != "verify" && s.name.empty()) throw ConfigError(s.source, s.line, "[" + s.kind + "] needs a name");
    bool known = s.kind == "algebra" || s.kind == "order" || s.kind == "relation" || s.kind == "subring" ||
                 s.kind == "verify";
    if (!known) throw ConfigError(s.source, s.line, "unknown section kind '" + s.kind + "'");
    if ((s.kind == "algebra" && ws.algebras.count(s.name)) || (s.kind == "order" && ws.orders.count(s.name)) ||
        (s.kind == "subring" && ws.subrings.count(s.name)))
      throw ConfigError(s.source, s.line, "duplicate " + s.kind + " '" + s.name + "'");
    if (s.kind == "algebra") detail::load_algebra(ws, s);
    else if (s.kind == "order") detail::load_order(ws, s);
    else if (s.kind == "subring") detail::load_subring(ws, s);
    else if (s.kind == "verify") detail::load_verify(ws, s);
    else {
      detail::check_keys(s, {"sub", "sup"});
      RelationEntry r{s.name, s.require("sub").value, s.require("sup").value};
      for (const auto* key : {"sub", "sup"}) {
        const auto& e = s.require(key);
        if (!ws.orders.count(e.value)) throw ConfigError(s.source, e.line, "unknown order '" + e.value + "'");
      }
      try {
        auto rel = order_index(ws.orders[r.sub].order, ws.orders[r.sup].order);
        (void)rel;
      } catch (const std::exception& ex) {
        throw ConfigError(s.source, s.line, ex.what());
      }
      ws.relations.push_back(r);
    }
  }
}

inline Workspace load_workspace(const std::vector<std::string>& paths) {
  Workspace ws;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw Error("cannot read config '" + p + "'");
    load_sections(ws, parse_config(in, p));
  }
  if (ws.algebras.empty()) throw Error("no algebra defined");
  return ws;
}

inline Workspace load_workspace_text(const std::string& text, const std::string& source = "<string>") {
  std::istringstream in(text);
  Workspace ws;
  load_sections(ws, parse_config(in, source));
  if (ws.algebras.empty()) throw Error("no algebra defined");
  return ws;
}

}  // namespace divalg
