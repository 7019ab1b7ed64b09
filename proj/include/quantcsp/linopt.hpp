#pragma once

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "quantcsp/errors.hpp"
#include "quantcsp/finset.hpp"
#include "quantcsp/quantale.hpp"
#include "quantcsp/simplex.hpp"

namespace quantcsp {

/// rho(d) = sum_j w_j d_j on R^k.
struct LinearRel {
  std::vector<Rational> weights;
  std::size_t arity() const { return weights.size(); }
};

/// (k, sigma, rho) over D = R; sigma is given by its finite domain.
struct LinearConstraint {
  LinearRel rho;
  std::vector<std::pair<Table, ExtReal>> sigma;
};

struct LinearTvcsp {
  FiniteSet variables;
  std::vector<LinearConstraint> constraints;

  void validate() const {
    for (std::size_t i = 0; i < constraints.size(); ++i)
      for (const auto &[x, w] : constraints[i].sigma) {
        if (x.size() != constraints[i].rho.arity())
          throw InputError("constraint " + std::to_string(i) + ": sigma tuple has the wrong arity");
        for (auto v : x)
          if (v >= variables.size())
            throw InputError("constraint " + std::to_string(i) + ": unknown variable in sigma");
      }
  }
};

/// alpha >= sum_v coefficients[v] s(v) + offset.
struct LpRow {
  std::vector<Rational> coefficients;
  Rational offset;
  friend bool operator==(const LpRow &, const LpRow &) = default;
};

/// Minimise alpha over free alpha and s(v), v in V.
struct LinearProgram {
  std::vector<std::string> variable_names;
  std::vector<LpRow> rows;
};

struct LpResult {
  LpStatus status = LpStatus::Infeasible;
  ExtReal value;
  std::vector<Rational> point;
  std::uint64_t pivots = 0;
};

/// One row alpha >= sum_j w_j s(x_j) - sigma(x) per constraint and x in dom sigma.
inline LinearProgram build_lp(const LinearTvcsp &inst) {
  inst.validate();
  LinearProgram lp{inst.variables.labels(), {}};
  const std::size_t nv = inst.variables.size();
  for (std::size_t i = 0; i < inst.constraints.size(); ++i) {
    const auto &c = inst.constraints[i];
    for (const auto &[x, w] : c.sigma) {
      if (w.is_pos_inf())
        continue;
      if (w.is_neg_inf())
        throw InputError("constraint " + std::to_string(i) +
                         ": sigma = -inf makes the row alpha >= inf");
      LpRow row{std::vector<Rational>(nv), -w.value()};
      for (std::size_t j = 0; j < x.size(); ++j)
        row.coefficients[x[j]] += c.rho.weights[j];
      lp.rows.push_back(std::move(row));
    }
  }
  return lp;
}

/// S(I)(s) as the maximum of the row affine functions; -inf without rows.
inline ExtReal eval_linear(const LinearProgram &lp, const std::vector<Rational> &s) {
  if (s.size() != lp.variable_names.size())
    throw ContractViolation("assignment has the wrong length");
  ExtReal acc = ExtReal::neg_inf();
  for (const auto &row : lp.rows) {
    Rational v = row.offset;
    for (std::size_t j = 0; j < s.size(); ++j)
      v += row.coefficients[j] * s[j];
    if (ExtReal(v) > acc)
      acc = ExtReal(v);
  }
  return acc;
}

/// S(I)(s) straight from the instance.
inline ExtReal eval_linear(const LinearTvcsp &inst, const std::vector<Rational> &s) {
  return eval_linear(build_lp(inst), s);
}

inline LpResult solve_lp(const LinearProgram &lp,
                         std::uint64_t pivot_limit = kDefaultIterationLimit) {
  const std::size_t nv = lp.variable_names.size();
  std::vector<std::vector<Rational>> a;
  std::vector<Rational> b;
  for (const auto &row : lp.rows) {
    std::vector<Rational> r(nv + 1);
    r[0] = 1;
    for (std::size_t j = 0; j < nv; ++j)
      r[j + 1] = -row.coefficients[j];
    a.push_back(std::move(r));
    b.push_back(row.offset);
  }
  std::vector<Rational> c(nv + 1);
  c[0] = 1;
  SimplexResult s = minimise_free(a, b, c, pivot_limit);
  LpResult out;
  out.status = s.status;
  out.pivots = s.pivots;
  if (s.status == LpStatus::Optimal) {
    out.value = ExtReal(s.value);
    out.point.assign(s.point.begin() + 1, s.point.end());
  } else if (s.status == LpStatus::UnboundedBelow) {
    out.value = ExtReal::neg_inf();
  } else {
    out.value = ExtReal::pos_inf();
  }
  return out;
}

namespace detail {

inline bool plain_identifier(const std::string &s) {
  if (s.empty())
    return false;
  return std::all_of(s.begin(), s.end(), [](unsigned char ch) {
    return std::isalnum(ch) || ch == '_';
  });
}

inline std::vector<std::string> lp_variable_names(const LinearProgram &lp) {
  std::vector<std::string> out;
  for (std::size_t j = 0; j < lp.variable_names.size(); ++j) {
    const auto &l = lp.variable_names[j];
    out.push_back(plain_identifier(l) ? "s_" + l : "s__" + std::to_string(j));
  }
  return out;
}

inline std::string decimal_or_fraction(const Rational &r) {
  std::string s;
  return to_exact_decimal(r, s) ? s : to_string(r);
}

inline void emit_term(std::ostream &os, const Rational &coef, const std::string &var, bool first) {
  Rational mag = coef < 0 ? Rational(-coef) : coef;
  if (first) {
    if (coef < 0)
      os << "- ";
  } else {
    os << (coef < 0 ? " - " : " + ");
  }
  if (mag != 1)
    os << decimal_or_fraction(mag) << ' ';
  os << var;
}

} // namespace detail

/// LP text: "Minimize / Subject To / Bounds / End", one row per line as
///   rI: a - <coefficients> >= <offset>.
/// Rows with non-terminating decimals are multiplied by the lcm of their
/// denominators and preceded by a comment holding the exact fractions.
inline std::string emit_lp_file(const LinearProgram &lp) {
  auto names = detail::lp_variable_names(lp);
  std::ostringstream os;
  os << "Minimize\n obj: a\nSubject To\n";
  for (std::size_t i = 0; i < lp.rows.size(); ++i) {
    const auto &row = lp.rows[i];
    bool exact = true;
    std::string tmp;
    for (const auto &c : row.coefficients)
      exact = exact && to_exact_decimal(c, tmp);
    exact = exact && to_exact_decimal(row.offset, tmp);
    Rational scale = 1;
    if (!exact) {
      BigInt l = denominator_of(row.offset);
      for (const auto &c : row.coefficients)
        l = boost::multiprecision::lcm(l, denominator_of(c));
      scale = Rational(l);
      os << "\\ r" << i << " scaled by " << l << " from: a";
      for (std::size_t j = 0; j < row.coefficients.size(); ++j)
        if (row.coefficients[j] != 0)
          os << (row.coefficients[j] > 0 ? " - " : " + ")
             << to_string(row.coefficients[j] > 0 ? row.coefficients[j]
                                                   : Rational(-row.coefficients[j]))
             << ' ' << names[j];
      os << " >= " << to_string(row.offset) << '\n';
    }
    os << " r" << i << ": ";
    detail::emit_term(os, scale, "a", true);
    for (std::size_t j = 0; j < row.coefficients.size(); ++j)
      if (row.coefficients[j] != 0)
        detail::emit_term(os, -row.coefficients[j] * scale, names[j], false);
    os << " >= " << detail::decimal_or_fraction(row.offset * scale) << '\n';
  }
  os << "Bounds\n a free\n";
  for (const auto &n : names)
    os << ' ' << n << " free\n";
  os << "End\n";
  return os.str();
}

/// Reads the format written by emit_lp_file. Rows are normalised to unit
/// coefficient on a; variable names lose their "s_" prefix.
inline LinearProgram parse_lp_file(std::string_view text) {
  enum class Section { None, Objective, Rows, Bounds, Done } sec = Section::None;
  std::vector<std::pair<std::string, std::map<std::string, Rational>>> raw_rows;
  std::vector<Rational> raw_rhs;
  std::vector<std::string> vars;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '\\')
      continue;
    std::string body = line.substr(start);
    while (!body.empty() && (body.back() == '\r' || body.back() == ' '))
      body.pop_back();
    if (body == "Minimize") {
      sec = Section::Objective;
      continue;
    }
    if (body == "Subject To") {
      sec = Section::Rows;
      continue;
    }
    if (body == "Bounds") {
      sec = Section::Bounds;
      continue;
    }
    if (body == "End") {
      sec = Section::Done;
      continue;
    }
    switch (sec) {
    case Section::None:
    case Section::Done:
      throw ParseError("text outside any section", line_no, start + 1);
    case Section::Objective:
      if (body != "obj: a")
        throw ParseError("objective must be 'obj: a'", line_no, start + 1);
      break;
    case Section::Bounds: {
      std::istringstream ls(body);
      std::string v, kw;
      ls >> v >> kw;
      if (kw != "free")
        throw ParseError("expected '<var> free'", line_no, start + 1);
      if (v != "a")
        vars.push_back(v);
      break;
    }
    case Section::Rows: {
      auto colon = body.find(':');
      auto ge = body.find(">=");
      if (colon == std::string::npos || ge == std::string::npos || ge < colon)
        throw ParseError("expected 'name: expression >= constant'", line_no, start + 1);
      std::map<std::string, Rational> coefs;
      std::istringstream ls(body.substr(colon + 1, ge - colon - 1));
      std::string tok;
      Rational sign = 1;
      std::optional<Rational> pending;
      while (ls >> tok) {
        if (tok == "+" || tok == "-") {
          if (pending)
            throw ParseError("coefficient without a variable", line_no, start + colon + 2);
          sign = tok == "-" ? -1 : 1;
          continue;
        }
        if (std::isdigit(static_cast<unsigned char>(tok[0])) || tok[0] == '.') {
          try {
            pending = parse_rational(tok);
          } catch (const std::exception &) {
            throw ParseError("bad coefficient '" + tok + "'", line_no, start + colon + 2);
          }
          continue;
        }
        coefs[tok] += sign * pending.value_or(Rational(1));
        pending.reset();
        sign = 1;
      }
      std::string rhs = body.substr(ge + 2);
      auto rs = rhs.find_first_not_of(' ');
      try {
        raw_rhs.push_back(parse_rational(rhs.substr(rs == std::string::npos ? 0 : rs)));
      } catch (const std::exception &) {
        throw ParseError("bad right-hand side", line_no, start + ge + 3);
      }
      raw_rows.emplace_back(body.substr(0, colon), std::move(coefs));
      break;
    }
    }
  }
  if (sec != Section::Done)
    throw ParseError("missing End", line_no, 1);
  LinearProgram lp;
  for (const auto &v : vars)
    lp.variable_names.push_back(v.rfind("s_", 0) == 0 ? v.substr(2) : v);
  for (std::size_t i = 0; i < raw_rows.size(); ++i) {
    auto &coefs = raw_rows[i].second;
    auto it = coefs.find("a");
    if (it == coefs.end() || it->second <= 0)
      throw InputError("row " + raw_rows[i].first + " needs a positive coefficient on a");
    Rational scale = it->second;
    LpRow row{std::vector<Rational>(vars.size()), raw_rhs[i] / scale};
    for (const auto &[name, c] : coefs) {
      if (name == "a")
        continue;
      auto pos = std::find(vars.begin(), vars.end(), name);
      if (pos == vars.end())
        throw InputError("row " + raw_rows[i].first + " uses undeclared variable " + name);
      row.coefficients[pos - vars.begin()] = -c / scale;
    }
    lp.rows.push_back(std::move(row));
  }
  return lp;
}

struct QuasiconvexityCounterexample {
  std::vector<Rational> x, y;
  Rational lambda;
  ExtReal lhs, rhs;
};

using PointEvaluator = std::function<ExtReal(const std::vector<Rational> &)>;

/// First (x, y, lambda) over the grids with
///   max(rho(x), rho(y)) < rho(lambda x + (1 - lambda) y),
/// i.e. (f_lambda, 0) is not an Rbar-valued polymorphism of rho. No result
/// only means none was found on the samples.
inline std::optional<QuasiconvexityCounterexample>
quasiconvexity_falsify(const PointEvaluator &rho, const std::vector<std::vector<Rational>> &samples,
                       const std::vector<Rational> &lambdas) {
  for (const auto &x : samples)
    for (const auto &y : samples) {
      if (x.size() != y.size())
        throw ContractViolation("sample points of different dimension");
      ExtReal fx = rho(x), fy = rho(y);
      ExtReal lhs = fx > fy ? fx : fy;
      for (const auto &l : lambdas) {
        std::vector<Rational> z(x.size());
        for (std::size_t i = 0; i < x.size(); ++i)
          z[i] = l * x[i] + (1 - l) * y[i];
        ExtReal rhs = rho(z);
        if (lhs < rhs)
          return QuasiconvexityCounterexample{x, y, l, lhs, rhs};
      }
    }
  return std::nullopt;
}

} // namespace quantcsp
