#pragma once

#include <cstdint>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "quantcsp/csp.hpp"

namespace quantcsp {

namespace detail {

/// Whitespace tokenizer that tracks 1-based line/column positions.
class LineTokenizer {
public:
  explicit LineTokenizer(std::string_view text) : text_(text) {}

  struct Token {
    std::string_view text;
    std::size_t line;
    std::size_t column;
  };

  /// Tokens of the next non-blank line; false at end of input.
  bool next_line(std::vector<Token> &out) {
    out.clear();
    while (pos_ < text_.size()) {
      std::size_t end = text_.find('\n', pos_);
      if (end == std::string_view::npos)
        end = text_.size();
      std::string_view line = text_.substr(pos_, end - pos_);
      ++line_no_;
      std::size_t i = 0;
      while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
          ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i])))
          ++i;
        if (i > start)
          out.push_back({line.substr(start, i - start), line_no_, start + 1});
      }
      pos_ = end + 1;
      if (!out.empty())
        return true;
    }
    return false;
  }

  std::size_t line() const { return line_no_; }

private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

inline long long parse_int_token(const LineTokenizer::Token &t, const char *what) {
  long long v = 0;
  bool neg = false;
  std::size_t i = 0;
  if (!t.text.empty() && (t.text[0] == '-' || t.text[0] == '+')) {
    neg = t.text[0] == '-';
    i = 1;
  }
  if (i == t.text.size())
    throw ParseError(std::string("expected ") + what + ", got '" + std::string(t.text) + "'",
                     t.line, t.column);
  for (; i < t.text.size(); ++i) {
    char c = t.text[i];
    if (c < '0' || c > '9' || v > (1ll << 40))
      throw ParseError(std::string("expected ") + what + ", got '" + std::string(t.text) + "'",
                       t.line, t.column);
    v = v * 10 + (c - '0');
  }
  return neg ? -v : v;
}

} // namespace detail

/// A CNF formula as read from DIMACS: literals are nonzero signed variable
/// numbers.
struct CnfFormula {
  std::size_t num_vars = 0;
  std::vector<std::vector<long long>> clauses;
};

inline CnfFormula parse_dimacs_cnf(std::string_view text) {
  detail::LineTokenizer tok(text);
  std::vector<detail::LineTokenizer::Token> line;
  CnfFormula f;
  bool header = false;
  std::size_t declared_clauses = 0;
  std::vector<long long> current;
  std::size_t last_line = 0, last_col = 0;
  while (tok.next_line(line)) {
    const auto &first = line.front();
    if (first.text[0] == 'c')
      continue;
    if (first.text == "%")
      break;
    if (first.text == "p") {
      if (header)
        throw ParseError("duplicate problem line", first.line, first.column);
      if (line.size() != 4 || line[1].text != "cnf")
        throw ParseError("expected 'p cnf <vars> <clauses>'", first.line, first.column);
      long long n = detail::parse_int_token(line[2], "variable count");
      long long m = detail::parse_int_token(line[3], "clause count");
      if (n < 0 || m < 0)
        throw ParseError("negative count in problem line", first.line, first.column);
      f.num_vars = static_cast<std::size_t>(n);
      declared_clauses = static_cast<std::size_t>(m);
      header = true;
      continue;
    }
    if (!header)
      throw ParseError("clause before the problem line", first.line, first.column);
    for (const auto &t : line) {
      long long lit = detail::parse_int_token(t, "literal");
      last_line = t.line;
      last_col = t.column;
      if (lit == 0) {
        f.clauses.push_back(std::move(current));
        current.clear();
        continue;
      }
      long long var = lit < 0 ? -lit : lit;
      if (static_cast<std::size_t>(var) > f.num_vars)
        throw ParseError("literal " + std::string(t.text) + " references undeclared variable " +
                             std::to_string(var),
                         t.line, t.column);
      current.push_back(lit);
    }
  }
  if (!header)
    throw ParseError("missing 'p cnf' problem line", tok.line(), 1);
  if (!current.empty())
    throw ParseError("last clause is not terminated by 0", last_line, last_col);
  if (f.clauses.size() != declared_clauses)
    throw ParseError("problem line declares " + std::to_string(declared_clauses) +
                         " clauses but " + std::to_string(f.clauses.size()) + " were given",
                     tok.line(), 1);
  return f;
}

/// Variables x1..xn over {0,1}; a clause of width w becomes the constraint
/// whose relation is {0,1}^w minus the single falsifying tuple.
inline CspInstance cnf_to_csp(const CnfFormula &f) {
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= f.num_vars; ++i)
    names.push_back("x" + std::to_string(i));
  CspInstance inst{FiniteSet(std::move(names)), FiniteSet::range(2), {}};
  for (const auto &clause : f.clauses) {
    std::size_t w = clause.size();
    Table falsifying(w);
    std::vector<std::string> scope;
    for (std::size_t j = 0; j < w; ++j) {
      falsifying[j] = clause[j] > 0 ? 0 : 1;
      scope.push_back("x" + std::to_string(clause[j] > 0 ? clause[j] : -clause[j]));
    }
    std::vector<Table> tuples;
    for_each_table(w, 2, [&](const Table &t) {
      if (t != falsifying)
        tuples.push_back(t);
    });
    inst.add(std::move(scope), make_relation(inst.domain, w, tuples));
  }
  return inst;
}

inline CspInstance from_dimacs_cnf(std::string_view text) {
  return cnf_to_csp(parse_dimacs_cnf(text));
}

/// An undirected graph with vertices labelled "1".."n".
struct Graph {
  FiniteSet vertices;
  std::vector<std::pair<std::string, std::string>> edges;
};

/// "p edge n m" followed by "e u v" lines (1-based vertices).
inline Graph parse_dimacs_graph(std::string_view text) {
  detail::LineTokenizer tok(text);
  std::vector<detail::LineTokenizer::Token> line;
  Graph g;
  bool header = false;
  std::size_t n = 0, m = 0;
  while (tok.next_line(line)) {
    const auto &first = line.front();
    if (first.text[0] == 'c')
      continue;
    if (first.text == "p") {
      if (header)
        throw ParseError("duplicate problem line", first.line, first.column);
      if (line.size() != 4 || (line[1].text != "edge" && line[1].text != "col"))
        throw ParseError("expected 'p edge <vertices> <edges>'", first.line, first.column);
      long long nn = detail::parse_int_token(line[2], "vertex count");
      long long mm = detail::parse_int_token(line[3], "edge count");
      if (nn < 0 || mm < 0)
        throw ParseError("negative count in problem line", first.line, first.column);
      n = static_cast<std::size_t>(nn);
      m = static_cast<std::size_t>(mm);
      std::vector<std::string> labels;
      for (std::size_t i = 1; i <= n; ++i)
        labels.push_back(std::to_string(i));
      g.vertices = FiniteSet(std::move(labels));
      header = true;
      continue;
    }
    if (first.text == "e") {
      if (!header)
        throw ParseError("edge before the problem line", first.line, first.column);
      if (line.size() != 3)
        throw ParseError("expected 'e <u> <v>'", first.line, first.column);
      std::string ends[2];
      for (int i = 0; i < 2; ++i) {
        long long v = detail::parse_int_token(line[1 + i], "vertex");
        if (v < 1 || static_cast<std::size_t>(v) > n)
          throw ParseError("vertex " + std::string(line[1 + i].text) + " out of range 1.." +
                               std::to_string(n),
                           line[1 + i].line, line[1 + i].column);
        ends[i] = std::to_string(v);
      }
      g.edges.emplace_back(ends[0], ends[1]);
      continue;
    }
    throw ParseError("unexpected line starting with '" + std::string(first.text) + "'",
                     first.line, first.column);
  }
  if (!header)
    throw ParseError("missing 'p edge' problem line", tok.line(), 1);
  if (g.edges.size() != m)
    throw ParseError("problem line declares " + std::to_string(m) + " edges but " +
                         std::to_string(g.edges.size()) + " were given",
                     tok.line(), 1);
  return g;
}

} // namespace quantcsp
