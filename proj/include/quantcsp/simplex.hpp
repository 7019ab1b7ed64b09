#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "quantcsp/errors.hpp"
#include "quantcsp/rational.hpp"

namespace quantcsp {

enum class LpStatus { Optimal, UnboundedBelow, Infeasible };

inline const char *lp_status_name(LpStatus s) {
  switch (s) {
  case LpStatus::Optimal:
    return "optimal";
  case LpStatus::UnboundedBelow:
    return "unbounded_below";
  case LpStatus::Infeasible:
    return "infeasible";
  }
  return "?";
}

struct SimplexResult {
  LpStatus status = LpStatus::Infeasible;
  Rational value;
  std::vector<Rational> point;
  std::uint64_t pivots = 0;
};

namespace detail {

/// Dense tableau for min c.y, M y = b, y >= 0 with b >= 0.
class Tableau {
public:
  Tableau(std::vector<std::vector<Rational>> rows, std::vector<Rational> rhs)
      : t_(std::move(rows)), rhs_(std::move(rhs)) {}

  std::size_t rows() const { return t_.size(); }
  std::size_t cols() const { return t_.empty() ? 0 : t_[0].size(); }

  void pivot(std::size_t r, std::size_t c, std::vector<Rational> &obj, Rational &objval) {
    Rational p = t_[r][c];
    for (auto &x : t_[r])
      x /= p;
    rhs_[r] /= p;
    for (std::size_t i = 0; i < rows(); ++i) {
      if (i == r || t_[i][c] == 0)
        continue;
      Rational f = t_[i][c];
      for (std::size_t j = 0; j < cols(); ++j)
        if (t_[r][j] != 0)
          t_[i][j] -= f * t_[r][j];
      rhs_[i] -= f * rhs_[r];
    }
    if (obj[c] != 0) {
      Rational f = obj[c];
      for (std::size_t j = 0; j < cols(); ++j)
        if (t_[r][j] != 0)
          obj[j] -= f * t_[r][j];
      objval -= f * rhs_[r];
    }
    basis_[r] = c;
    ++pivots_;
  }

  /// Bland's rule over the allowed columns. Returns false when unbounded.
  bool optimise(std::vector<Rational> &obj, Rational &objval, std::size_t allowed_cols,
                std::uint64_t pivot_limit) {
    while (true) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < allowed_cols; ++j)
        if (obj[j] < 0) {
          enter = j;
          break;
        }
      if (!enter)
        return true;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < rows(); ++i) {
        if (t_[i][*enter] <= 0)
          continue;
        Rational ratio = rhs_[i] / t_[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave)
        return false;
      if (pivots_ >= pivot_limit)
        throw Error("simplex pivot limit reached");
      pivot(*leave, *enter, obj, objval);
    }
  }

  std::vector<std::vector<Rational>> t_;
  std::vector<Rational> rhs_;
  std::vector<std::size_t> basis_;
  std::uint64_t pivots_ = 0;
};

} // namespace detail

/// Minimise c.x subject to a_i.x >= b_i with every x free. Exact two-phase
/// simplex with Bland's rule; free variables are split as x+ - x-.
inline SimplexResult minimise_free(const std::vector<std::vector<Rational>> &a,
                                   const std::vector<Rational> &b, const std::vector<Rational> &c,
                                   std::uint64_t pivot_limit = kDefaultIterationLimit) {
  const std::size_t m = a.size(), n = c.size();
  for (const auto &row : a)
    if (row.size() != n)
      throw ContractViolation("constraint row has the wrong width");
  if (b.size() != m)
    throw ContractViolation("right-hand side has the wrong length");
  // columns: x+ (n), x- (n), surplus (m), artificial (m)
  const std::size_t real_cols = 2 * n + m, cols = real_cols + m;
  std::vector<std::vector<Rational>> rows(m, std::vector<Rational>(cols));
  std::vector<Rational> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    int sign = b[i] < 0 ? -1 : 1;
    for (std::size_t j = 0; j < n; ++j) {
      rows[i][j] = sign * a[i][j];
      rows[i][n + j] = -sign * a[i][j];
    }
    rows[i][2 * n + i] = -sign;
    rows[i][real_cols + i] = 1;
    rhs[i] = sign * b[i];
  }
  detail::Tableau tab(std::move(rows), std::move(rhs));
  tab.basis_.resize(m);
  for (std::size_t i = 0; i < m; ++i)
    tab.basis_[i] = real_cols + i;

  SimplexResult res;
  // phase 1: minimise the sum of artificials
  std::vector<Rational> obj(cols);
  Rational objval = 0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < real_cols; ++j)
      obj[j] -= tab.t_[i][j];
    objval -= tab.rhs_[i];
  }
  tab.optimise(obj, objval, real_cols, pivot_limit);
  if (objval != 0) {
    res.status = LpStatus::Infeasible;
    res.pivots = tab.pivots_;
    return res;
  }
  // drive remaining artificials out of the basis, dropping redundant rows
  for (std::size_t i = 0; i < tab.rows();) {
    if (tab.basis_[i] < real_cols) {
      ++i;
      continue;
    }
    std::optional<std::size_t> col;
    for (std::size_t j = 0; j < real_cols; ++j)
      if (tab.t_[i][j] != 0) {
        col = j;
        break;
      }
    if (col) {
      tab.pivot(i, *col, obj, objval);
      ++i;
    } else {
      tab.t_.erase(tab.t_.begin() + i);
      tab.rhs_.erase(tab.rhs_.begin() + i);
      tab.basis_.erase(tab.basis_.begin() + i);
    }
  }
  // phase 2
  std::vector<Rational> cost(cols);
  for (std::size_t j = 0; j < n; ++j) {
    cost[j] = c[j];
    cost[n + j] = -c[j];
  }
  obj = cost;
  objval = 0;
  for (std::size_t i = 0; i < tab.rows(); ++i) {
    Rational f = obj[tab.basis_[i]];
    if (f == 0)
      continue;
    for (std::size_t j = 0; j < cols; ++j)
      obj[j] -= f * tab.t_[i][j];
    objval -= f * tab.rhs_[i];
  }
  bool bounded = tab.optimise(obj, objval, real_cols, pivot_limit);
  res.pivots = tab.pivots_;
  if (!bounded) {
    res.status = LpStatus::UnboundedBelow;
    return res;
  }
  std::vector<Rational> y(cols);
  for (std::size_t i = 0; i < tab.rows(); ++i)
    y[tab.basis_[i]] = tab.rhs_[i];
  res.point.resize(n);
  for (std::size_t j = 0; j < n; ++j)
    res.point[j] = y[j] - y[n + j];
  res.value = -objval;
  res.status = LpStatus::Optimal;
  return res;
}

} // namespace quantcsp
