#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "quantcsp/csp.hpp"
#include "quantcsp/linopt.hpp"
#include "quantcsp/qpoly.hpp"
#include "quantcsp/tvcsp.hpp"

namespace quantcsp::io {

using json = nlohmann::ordered_json;

namespace detail {

[[noreturn]] inline void fail(const std::string &path, const std::string &msg) {
  throw InputError(path + ": " + msg);
}

inline const json &field(const json &j, const char *key, const std::string &path) {
  if (!j.is_object())
    fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end())
    fail(path, std::string("missing field '") + key + "'");
  return *it;
}

inline const json &array_field(const json &j, const char *key, const std::string &path) {
  const json &a = field(j, key, path);
  if (!a.is_array())
    fail(path + "." + key, "expected an array");
  return a;
}

inline std::string at(const std::string &path, std::size_t i) {
  return path + "[" + std::to_string(i) + "]";
}

inline std::size_t natural(const json &j, const std::string &path) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
    fail(path, "expected a nonnegative integer");
  return j.get<std::size_t>();
}

inline std::string label(const json &j, const std::string &path) {
  if (j.is_string())
    return j.get<std::string>();
  if (j.is_number_integer())
    return j.dump();
  fail(path, "expected a label (string or integer)");
}

} // namespace detail

/// Finite rationals as integers or "p/q" strings; "inf" and "-inf".
inline json to_json(const ExtReal &x) {
  if (x.is_pos_inf())
    return "inf";
  if (x.is_neg_inf())
    return "-inf";
  const Rational &v = x.value();
  if (denominator_of(v) == 1) {
    BigInt n = numerator_of(v);
    if (n >= std::numeric_limits<long long>::min() && n <= std::numeric_limits<long long>::max())
      return n.convert_to<long long>();
  }
  return to_string(v);
}

inline ExtReal ext_from_json(const json &j, const std::string &path) {
  if (j.is_number_integer())
    return ExtReal(Rational(j.get<long long>()));
  if (j.is_number_unsigned())
    return ExtReal(Rational(BigInt(j.get<unsigned long long>())));
  if (j.is_string()) {
    auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf")
      return ExtReal::pos_inf();
    if (s == "-inf")
      return ExtReal::neg_inf();
    try {
      return ExtReal(parse_rational(s));
    } catch (const std::exception &) {
      detail::fail(path, "'" + s + "' is not a rational, \"inf\" or \"-inf\"");
    }
  }
  detail::fail(path, "expected an extended rational (integer, \"p/q\", \"inf\", \"-inf\")");
}

inline Rational rational_from_json(const json &j, const std::string &path) {
  ExtReal x = ext_from_json(j, path);
  if (!x.is_finite())
    detail::fail(path, "expected a finite rational");
  return x.value();
}

inline json to_json(const QValue &v) {
  if (v.quantale() == Quantale::Two)
    return v.as_bool();
  return to_json(v.as_real());
}

inline QValue value_from_json(const json &j, Quantale q, const std::string &path) {
  if (q == Quantale::Two) {
    if (!j.is_boolean())
      detail::fail(path, "expected a boolean");
    return QValue(j.get<bool>());
  }
  return QValue(ext_from_json(j, path));
}

inline json to_json(const FiniteSet &s) { return s.labels(); }

inline FiniteSet set_from_json(const json &j, const std::string &path) {
  if (!j.is_array())
    detail::fail(path, "expected an array of labels");
  std::vector<std::string> labels;
  std::set<std::string> seen;
  for (std::size_t i = 0; i < j.size(); ++i) {
    labels.push_back(detail::label(j[i], detail::at(path, i)));
    if (!seen.insert(labels.back()).second)
      detail::fail(detail::at(path, i), "duplicate label '" + labels.back() + "'");
  }
  return FiniteSet(std::move(labels));
}

inline json tuple_to_json(const Table &t, const FiniteSet &cod) {
  json a = json::array();
  for (auto v : t)
    a.push_back(cod.label(v));
  return a;
}

inline Table tuple_from_json(const json &j, const FiniteSet &cod, std::size_t arity,
                             const std::string &path) {
  if (!j.is_array())
    detail::fail(path, "expected an array of labels");
  if (j.size() != arity)
    detail::fail(path, "expected " + std::to_string(arity) + " components, got " +
                           std::to_string(j.size()));
  Table t;
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto l = detail::label(j[i], detail::at(path, i));
    auto idx = cod.find(l);
    if (!idx)
      detail::fail(detail::at(path, i), "unknown label '" + l + "'");
    t.push_back(*idx);
  }
  return t;
}

inline json to_json(const FnArrow &f) { return tuple_to_json(f.table(), f.cod()); }

inline Quantale quantale_from_json(const json &j, const std::string &path) {
  if (j == "2" || j == 2)
    return Quantale::Two;
  if (j == "Rbar" || j == "R")
    return Quantale::Rbar;
  detail::fail(path, "quantale must be \"2\" or \"Rbar\"");
}

/// {quantale, dom, cod, entries: [[table, value], ...]}; absent keys are bottom.
inline json to_json(const QMorphism &m) {
  json entries = json::array();
  for (const auto &[k, v] : m.entries())
    entries.push_back(json::array({tuple_to_json(k, m.cod()), to_json(v)}));
  return json{{"quantale", quantale_name(m.quantale())},
              {"dom", to_json(m.dom())},
              {"cod", to_json(m.cod())},
              {"entries", entries}};
}

inline QMorphism morphism_from_json(const json &j, const std::string &path = "$") {
  Quantale q = quantale_from_json(detail::field(j, "quantale", path), path + ".quantale");
  FiniteSet dom = set_from_json(detail::field(j, "dom", path), path + ".dom");
  FiniteSet cod = set_from_json(detail::field(j, "cod", path), path + ".cod");
  QMorphism m(q, dom, cod);
  const json &entries = detail::array_field(j, "entries", path);
  for (std::size_t i = 0; i < entries.size(); ++i) {
    auto p = detail::at(path + ".entries", i);
    if (!entries[i].is_array() || entries[i].size() != 2)
      detail::fail(p, "expected [table, value]");
    Table t = tuple_from_json(entries[i][0], cod, dom.size(), p + "[0]");
    m.set(t, value_from_json(entries[i][1], q, p + "[1]"));
  }
  return m;
}

/// Crisp relation as {arity, tuples}.
inline json relation_to_json(const QMorphism &rel) {
  json tuples = json::array();
  for (const auto &[k, v] : rel.entries())
    tuples.push_back(tuple_to_json(k, rel.cod()));
  return json{{"arity", rel.dom().size()}, {"tuples", tuples}};
}

inline QMorphism relation_from_json(const json &j, const FiniteSet &domain,
                                    const std::string &path) {
  std::size_t k = detail::natural(detail::field(j, "arity", path), path + ".arity");
  const json &tuples = detail::array_field(j, "tuples", path);
  std::vector<Table> rows;
  for (std::size_t i = 0; i < tuples.size(); ++i)
    rows.push_back(tuple_from_json(tuples[i], domain, k, detail::at(path + ".tuples", i)));
  return make_relation(domain, k, rows);
}

/// Rbar-valued relation as {arity, entries: [[tuple, value]]}; absent tuples are inf.
inline json valued_relation_to_json(const QMorphism &rel) {
  json entries = json::array();
  for (const auto &[k, v] : rel.entries())
    entries.push_back(json::array({tuple_to_json(k, rel.cod()), to_json(v)}));
  return json{{"arity", rel.dom().size()}, {"entries", entries}};
}

inline json weighted_pairs_to_json(const QMorphism &m) {
  json entries = json::array();
  for (const auto &[k, v] : m.entries())
    entries.push_back(json::array({tuple_to_json(k, m.cod()), to_json(v)}));
  return entries;
}

inline QMorphism weighted_pairs_from_json(const json &j, std::size_t arity, const FiniteSet &cod,
                                          const std::string &path) {
  if (!j.is_array())
    detail::fail(path, "expected an array of [tuple, value] pairs");
  QMorphism m(Quantale::Rbar, FiniteSet::ordinal(arity), cod);
  for (std::size_t i = 0; i < j.size(); ++i) {
    auto p = detail::at(path, i);
    if (!j[i].is_array() || j[i].size() != 2)
      detail::fail(p, "expected [tuple, value]");
    Table t = tuple_from_json(j[i][0], cod, arity, p + "[0]");
    if (m.support().count(t))
      detail::fail(p, "tuple listed twice");
    m.set(t, QValue(ext_from_json(j[i][1], p + "[1]")));
  }
  return m;
}

inline QMorphism valued_relation_from_json(const json &j, const FiniteSet &domain,
                                           const std::string &path) {
  std::size_t k = detail::natural(detail::field(j, "arity", path), path + ".arity");
  return weighted_pairs_from_json(detail::field(j, "entries", path), k, domain, path + ".entries");
}

/// {variables, domain, constraints: [{arity, scope, relation}]}.
inline json to_json(const CspInstance &inst) {
  json cs = json::array();
  for (const auto &c : inst.constraints) {
    json tuples = json::array();
    for (const auto &[k, v] : c.relation.entries())
      tuples.push_back(tuple_to_json(k, inst.domain));
    cs.push_back(json{{"arity", c.arity}, {"scope", to_json(c.scope)}, {"relation", tuples}});
  }
  return json{{"variables", to_json(inst.variables)},
              {"domain", to_json(inst.domain)},
              {"constraints", cs}};
}

inline CspInstance csp_from_json(const json &j, const std::string &path = "$") {
  CspInstance inst{set_from_json(detail::field(j, "variables", path), path + ".variables"),
                   set_from_json(detail::field(j, "domain", path), path + ".domain"),
                   {}};
  const json &cs = detail::array_field(j, "constraints", path);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    auto p = detail::at(path + ".constraints", i);
    std::size_t k = detail::natural(detail::field(cs[i], "arity", p), p + ".arity");
    Table scope = tuple_from_json(detail::field(cs[i], "scope", p), inst.variables, k, p + ".scope");
    const json &tuples = detail::array_field(cs[i], "relation", p);
    std::vector<Table> rows;
    for (std::size_t r = 0; r < tuples.size(); ++r)
      rows.push_back(tuple_from_json(tuples[r], inst.domain, k, detail::at(p + ".relation", r)));
    inst.constraints.push_back({k, FnArrow(FiniteSet::ordinal(k), inst.variables, scope),
                                make_relation(inst.domain, k, rows)});
  }
  return inst;
}

/// {domain, relations: [{arity, tuples}]}.
inline json to_json(const ConstraintLanguage &lang) {
  json rels = json::array();
  for (const auto &r : lang.relations)
    rels.push_back(relation_to_json(r));
  return json{{"domain", to_json(lang.domain)}, {"relations", rels}};
}

inline ConstraintLanguage language_from_json(const json &j, const std::string &path = "$") {
  ConstraintLanguage lang{set_from_json(detail::field(j, "domain", path), path + ".domain"), {}};
  const json &rels = detail::array_field(j, "relations", path);
  for (std::size_t i = 0; i < rels.size(); ++i)
    lang.relations.push_back(
        relation_from_json(rels[i], lang.domain, detail::at(path + ".relations", i)));
  return lang;
}

/// {domain, relations: [{arity, entries: [[tuple, value]]}]}.
inline json to_json(const ValuedLanguage &lang) {
  json rels = json::array();
  for (const auto &r : lang.relations)
    rels.push_back(valued_relation_to_json(r));
  return json{{"domain", to_json(lang.domain)}, {"relations", rels}};
}

inline ValuedLanguage valued_language_from_json(const json &j, const std::string &path = "$") {
  ValuedLanguage lang{set_from_json(detail::field(j, "domain", path), path + ".domain"), {}};
  const json &rels = detail::array_field(j, "relations", path);
  for (std::size_t i = 0; i < rels.size(); ++i)
    lang.relations.push_back(
        valued_relation_from_json(rels[i], lang.domain, detail::at(path + ".relations", i)));
  return lang;
}

/// {variables, domain, constraints: [{arity, sigma, rho}]}.
inline json to_json(const TvcspInstance &inst) {
  json cs = json::array();
  for (const auto &c : inst.constraints)
    cs.push_back(json{{"arity", c.arity},
                      {"sigma", weighted_pairs_to_json(c.sigma)},
                      {"rho", weighted_pairs_to_json(c.rho)}});
  return json{{"variables", to_json(inst.variables)},
              {"domain", to_json(inst.domain)},
              {"constraints", cs}};
}

inline TvcspInstance tvcsp_from_json(const json &j, const std::string &path = "$") {
  TvcspInstance inst{set_from_json(detail::field(j, "variables", path), path + ".variables"),
                     set_from_json(detail::field(j, "domain", path), path + ".domain"),
                     {}};
  const json &cs = detail::array_field(j, "constraints", path);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    auto p = detail::at(path + ".constraints", i);
    std::size_t k = detail::natural(detail::field(cs[i], "arity", p), p + ".arity");
    inst.constraints.push_back(
        {k, weighted_pairs_from_json(detail::field(cs[i], "sigma", p), k, inst.variables, p + ".sigma"),
         weighted_pairs_from_json(detail::field(cs[i], "rho", p), k, inst.domain, p + ".rho")});
  }
  return inst;
}

/// Instances over D = R are marked by "domain": "R".
inline bool is_linear_instance(const json &j) {
  return j.is_object() && j.contains("domain") && j["domain"] == "R";
}

/// {variables, domain: "R", constraints: [{arity, weights, sigma}]}.
inline json to_json(const LinearTvcsp &inst) {
  json cs = json::array();
  for (const auto &c : inst.constraints) {
    json w = json::array(), sigma = json::array();
    for (const auto &x : c.rho.weights)
      w.push_back(to_json(ExtReal(x)));
    for (const auto &[x, v] : c.sigma)
      sigma.push_back(json::array({tuple_to_json(x, inst.variables), to_json(v)}));
    cs.push_back(json{{"arity", c.rho.arity()}, {"weights", w}, {"sigma", sigma}});
  }
  return json{{"variables", to_json(inst.variables)}, {"domain", "R"}, {"constraints", cs}};
}

inline LinearTvcsp linear_from_json(const json &j, const std::string &path = "$") {
  if (!is_linear_instance(j))
    detail::fail(path + ".domain", "linear instances must have domain \"R\"");
  LinearTvcsp inst{set_from_json(detail::field(j, "variables", path), path + ".variables"), {}};
  const json &cs = detail::array_field(j, "constraints", path);
  for (std::size_t i = 0; i < cs.size(); ++i) {
    auto p = detail::at(path + ".constraints", i);
    std::size_t k = detail::natural(detail::field(cs[i], "arity", p), p + ".arity");
    if (!cs[i].contains("weights"))
      detail::fail(p, "rho is not linear: over D = R every relation needs 'weights'");
    const json &w = detail::array_field(cs[i], "weights", p);
    if (w.size() != k)
      detail::fail(p + ".weights", "expected " + std::to_string(k) + " weights");
    LinearConstraint c;
    for (std::size_t r = 0; r < w.size(); ++r)
      c.rho.weights.push_back(rational_from_json(w[r], detail::at(p + ".weights", r)));
    const json &sigma = detail::array_field(cs[i], "sigma", p);
    for (std::size_t r = 0; r < sigma.size(); ++r) {
      auto q = detail::at(p + ".sigma", r);
      if (!sigma[r].is_array() || sigma[r].size() != 2)
        detail::fail(q, "expected [tuple, value]");
      c.sigma.emplace_back(tuple_from_json(sigma[r][0], inst.variables, k, q + "[0]"),
                           ext_from_json(sigma[r][1], q + "[1]"));
    }
    inst.constraints.push_back(std::move(c));
  }
  return inst;
}

/// {variable_names, rows: [{coefficients, offset}]}.
inline json to_json(const LinearProgram &lp) {
  json rows = json::array();
  for (const auto &r : lp.rows) {
    json c = json::array();
    for (const auto &x : r.coefficients)
      c.push_back(to_json(ExtReal(x)));
    rows.push_back(json{{"coefficients", c}, {"offset", to_json(ExtReal(r.offset))}});
  }
  return json{{"variables", lp.variable_names}, {"rows", rows}};
}

/// {activities: [{name, processing, due}], precedences: [[before, after]], horizon?}.
inline json to_json(const SchedulingProblem &p) {
  json acts = json::array(), precs = json::array();
  for (const auto &a : p.activities)
    acts.push_back(json{{"name", a.name}, {"processing", a.processing}, {"due", a.due}});
  for (const auto &[a, b] : p.precedences)
    precs.push_back(json::array({a, b}));
  return json{{"activities", acts}, {"precedences", precs}};
}

inline SchedulingProblem scheduling_from_json(const json &j, const std::string &path = "$") {
  SchedulingProblem p;
  const json &acts = detail::array_field(j, "activities", path);
  for (std::size_t i = 0; i < acts.size(); ++i) {
    auto q = detail::at(path + ".activities", i);
    p.activities.push_back({detail::label(detail::field(acts[i], "name", q), q + ".name"),
                            detail::natural(detail::field(acts[i], "processing", q), q + ".processing"),
                            detail::natural(detail::field(acts[i], "due", q), q + ".due")});
  }
  if (j.contains("precedences")) {
    const json &precs = detail::array_field(j, "precedences", path);
    for (std::size_t i = 0; i < precs.size(); ++i) {
      auto q = detail::at(path + ".precedences", i);
      if (!precs[i].is_array() || precs[i].size() != 2)
        detail::fail(q, "expected [before, after]");
      p.precedences.emplace_back(detail::label(precs[i][0], q + "[0]"),
                                 detail::label(precs[i][1], q + "[1]"));
    }
  }
  return p;
}

/// A black-box function R^k -> R with the sample grids used to probe it.
struct QconvexSpec {
  std::string kind;
  std::size_t dimension = 1;
  PointEvaluator evaluate;
  std::vector<std::vector<Rational>> samples;
  std::vector<Rational> lambdas;
};

/// {function: {kind: polynomial|quadratic|linear, ...}, samples, lambdas}.
///   polynomial: coefficients c_0, c_1, ... of a univariate polynomial
///   quadratic:  x^T Q x + b.x + c from matrix, vector, constant
///   linear:     w.x + c from weights, constant
inline QconvexSpec qconvex_from_json(const json &j, const std::string &path = "$") {
  QconvexSpec spec;
  const json &f = detail::field(j, "function", path);
  auto fp = path + ".function";
  spec.kind = detail::label(detail::field(f, "kind", fp), fp + ".kind");
  auto rationals = [&](const json &a, const std::string &p) {
    if (!a.is_array())
      detail::fail(p, "expected an array of rationals");
    std::vector<Rational> out;
    for (std::size_t i = 0; i < a.size(); ++i)
      out.push_back(rational_from_json(a[i], detail::at(p, i)));
    return out;
  };
  Rational constant = 0;
  if (f.contains("constant"))
    constant = rational_from_json(f["constant"], fp + ".constant");
  if (spec.kind == "polynomial") {
    auto c = rationals(detail::field(f, "coefficients", fp), fp + ".coefficients");
    spec.dimension = 1;
    spec.evaluate = [c](const std::vector<Rational> &x) {
      Rational acc = 0;
      for (auto it = c.rbegin(); it != c.rend(); ++it)
        acc = acc * x[0] + *it;
      return ExtReal(acc);
    };
  } else if (spec.kind == "quadratic") {
    const json &mj = detail::array_field(f, "matrix", fp);
    std::vector<std::vector<Rational>> m;
    for (std::size_t i = 0; i < mj.size(); ++i)
      m.push_back(rationals(mj[i], detail::at(fp + ".matrix", i)));
    for (std::size_t i = 0; i < m.size(); ++i)
      if (m[i].size() != m.size())
        detail::fail(detail::at(fp + ".matrix", i), "matrix must be square");
    std::vector<Rational> b(m.size());
    if (f.contains("vector"))
      b = rationals(f["vector"], fp + ".vector");
    if (b.size() != m.size())
      detail::fail(fp + ".vector", "length must match the matrix");
    spec.dimension = m.size();
    spec.evaluate = [m, b, constant](const std::vector<Rational> &x) {
      Rational acc = constant;
      for (std::size_t i = 0; i < m.size(); ++i) {
        acc += b[i] * x[i];
        for (std::size_t k = 0; k < m.size(); ++k)
          acc += x[i] * m[i][k] * x[k];
      }
      return ExtReal(acc);
    };
  } else if (spec.kind == "linear") {
    auto w = rationals(detail::field(f, "weights", fp), fp + ".weights");
    spec.dimension = w.size();
    spec.evaluate = [w, constant](const std::vector<Rational> &x) {
      Rational acc = constant;
      for (std::size_t i = 0; i < w.size(); ++i)
        acc += w[i] * x[i];
      return ExtReal(acc);
    };
  } else {
    detail::fail(fp + ".kind", "unknown function kind '" + spec.kind +
                                   "' (polynomial, quadratic, linear)");
  }
  const json &samples = detail::array_field(j, "samples", path);
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto p = detail::at(path + ".samples", i);
    std::vector<Rational> pt =
        samples[i].is_array() ? rationals(samples[i], p)
                              : std::vector<Rational>{rational_from_json(samples[i], p)};
    if (pt.size() != spec.dimension)
      detail::fail(p, "sample has dimension " + std::to_string(pt.size()) + ", expected " +
                          std::to_string(spec.dimension));
    spec.samples.push_back(std::move(pt));
  }
  spec.lambdas = rationals(detail::field(j, "lambdas", path), path + ".lambdas");
  for (std::size_t i = 0; i < spec.lambdas.size(); ++i)
    if (spec.lambdas[i] < 0 || spec.lambdas[i] > 1)
      detail::fail(detail::at(path + ".lambdas", i), "lambda must lie in [0, 1]");
  return spec;
}

/// 64-bit FNV-1a, hex.
inline std::string digest(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

inline std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in)
    throw InputError(path + ": cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string &text, const std::string &name) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    // nlohmann reports a byte offset; turn it into line and column
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw InputError(name + ": " + ParseError("malformed JSON", line, col).what());
  }
}

struct RunReport {
  std::string command;
  std::string input_digest;
  json result = json::object();
  json stats = json::object();
  std::optional<double> timing_ms;
};

inline json to_json(const RunReport &r) {
  json j{{"command", r.command}, {"input", r.input_digest}, {"result", r.result}};
  if (!r.stats.empty())
    j["stats"] = r.stats;
  if (r.timing_ms)
    j["timing_ms"] = *r.timing_ms;
  return j;
}

inline json to_json(const SolverStats &s) {
  return json{{"nodes", s.nodes}, {"propagations", s.propagations}, {"failures", s.failures}};
}

} // namespace quantcsp::io
