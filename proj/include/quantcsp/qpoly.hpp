#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "quantcsp/csp.hpp"
#include "quantcsp/polymorphism.hpp"
#include "quantcsp/qmorphism.hpp"

namespace quantcsp {

/// A finite family of Q-valued relations on one domain.
struct ValuedLanguage {
  FiniteSet domain;
  std::vector<QMorphism> relations;
};

/// (f, alpha): f is a polymorphism of degree at least alpha.
struct GradedPolymorphism {
  FnArrow op;
  QValue grade;
};

/// Pol(rho)_n(f): the largest alpha with
///   alpha (x) (rho(pi_1 . chi) /\ ... /\ rho(pi_n . chi)) <= rho(f . chi)
/// for every chi : K -> A^n. Only chi whose rows all lie in supp(rho)
/// contribute below top, so the loop runs over n-tuples of support rows.
inline QValue pol_degree(const QMorphism &rho, std::size_t n, const FnArrow &f,
                         std::uint64_t iteration_limit = kDefaultIterationLimit) {
  if (operation_arity(f) != n)
    throw ContractViolation("operation arity does not match n");
  if (!(rho.cod() == f.cod()))
    throw DomainMismatch("operation and relation live on different sets");
  const Quantale q = rho.quantale();
  auto rows = rho.entries();
  check_guard(boost::multiprecision::pow(BigInt(rows.size()), static_cast<unsigned>(n)),
              iteration_limit);
  std::size_t k = rho.dom().size();
  std::size_t base = rho.cod().size();
  QValue acc = top(q);
  if (rows.empty() && n > 0)
    return acc;
  std::vector<std::size_t> pick(n, 0);
  Table args(n), image(k);
  while (true) {
    QValue row_meet = top(q);
    for (std::size_t i = 0; i < n; ++i)
      row_meet = meet2(row_meet, rows[pick[i]].second);
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i)
        args[i] = rows[pick[i]].first[j];
      image[j] = f.table()[encode_tuple(args, base)];
    }
    acc = meet2(acc, residual(rho.value(image), row_meet));
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++pick[i] < rows.size())
        break;
      pick[i] = 0;
      if (i == 0)
        return acc;
    }
    if (n == 0)
      return acc;
  }
}

/// The same degree computed as (rho / ({pi_i} \ rho))(f), materialising the
/// right lifting over Hom(K, A^n).
inline QValue pol_degree_by_extension(const QMorphism &rho, std::size_t n, const FnArrow &f,
                                      std::uint64_t limit = default_enum_limit()) {
  QMorphism rows = right_lifting(projections_morphism(rho.quantale(), rho.cod(), n), rho, limit);
  return eval_right_extension_at(rho, rows, f);
}

/// Pol(R)_n(f), the meet over the family.
inline QValue graded_degree(const std::vector<QMorphism> &family, std::size_t n,
                            const FnArrow &f, Quantale q,
                            std::uint64_t iteration_limit = kDefaultIterationLimit) {
  QValue acc = top(q);
  for (const auto &rho : family)
    acc = meet2(acc, pol_degree(rho, n, f, iteration_limit));
  return acc;
}

/// alpha <= Pol(rho)_n(f) for every rho in the family. Over Rbar this is
///   alpha + sup_i rho(row_i) >= rho(f-image row) for all row choices.
inline bool check_graded(const std::vector<QMorphism> &family, std::size_t n,
                         const FnArrow &f, const QValue &alpha,
                         std::uint64_t iteration_limit = kDefaultIterationLimit) {
  for (const auto &rho : family)
    if (!leq(alpha, pol_degree(rho, n, f, iteration_limit)))
      return false;
  return true;
}

namespace detail {

/// Memoised Pol(R)_n over operations of each arity.
class DegreeCache {
public:
  DegreeCache(const std::vector<QMorphism> &family, const FiniteSet &a, Quantale q)
      : family_(family), a_(a), q_(q) {}

  const FiniteSet &power_of(std::size_t n) {
    auto it = powers_.find(n);
    if (it == powers_.end())
      it = powers_.emplace(n, power(a_, n)).first;
    return it->second;
  }

  QValue degree(std::size_t n, const Table &t) {
    auto &memo = memo_[n];
    auto it = memo.find(t);
    if (it != memo.end())
      return it->second;
    QValue v = graded_degree(family_, n, FnArrow(power_of(n), a_, t), q_);
    memo.emplace(t, v);
    return v;
  }

private:
  const std::vector<QMorphism> &family_;
  FiniteSet a_;
  Quantale q_;
  std::map<std::size_t, FiniteSet> powers_;
  std::map<std::size_t, std::unordered_map<Table, QValue, TableHash>> memo_;
};

/// Table of g . <f_1, ..., f_m> with g over A^m and f_i over A^n.
inline Table superpose(const Table &g, const std::vector<const Table *> &fs, std::size_t base,
                       std::size_t cells) {
  Table out(cells);
  Table args(fs.size());
  for (std::size_t c = 0; c < cells; ++c) {
    for (std::size_t i = 0; i < fs.size(); ++i)
      args[i] = (*fs[i])[c];
    out[c] = g[encode_tuple(args, base)];
  }
  return out;
}

/// Random operation table A^n -> A, or the `index`-th one in lexicographic
/// order when exhaustive.
inline Table operation_table(std::uint64_t index, std::size_t base, std::size_t cells) {
  return decode_tuple(index, base, cells);
}

} // namespace detail

/// Graded clone laws for the family:
///   e <= Pol(R)_n(pi_i), and
///   Pol(R)_m(g) (x) (Pol(R)_n(f_1) /\ ... /\ Pol(R)_n(f_m)) <= Pol(R)_n(g . <f_1..f_m>)
/// for 1 <= m, n <= max_arity. Superpositions are exhaustive when at most
/// max_checks per (m, n), sampled otherwise.
inline LawReport check_graded_clone_laws(const std::vector<QMorphism> &family,
                                         const FiniteSet &a, Quantale q,
                                         std::size_t max_arity = 2,
                                         std::uint64_t max_checks = 100'000,
                                         std::uint64_t seed = 1) {
  LawReport report;
  detail::DegreeCache cache(family, a, q);
  std::size_t base = a.size();
  for (std::size_t n = 1; n <= max_arity; ++n)
    for (std::size_t i = 1; i <= n; ++i) {
      ++report.checked;
      if (!leq(unit(q), cache.degree(n, projection(a, n, i).table())))
        report.violations.push_back("projection " + std::to_string(i) + " of arity " +
                                    std::to_string(n) + " has degree below e");
    }
  for (std::size_t m = 1; m <= max_arity; ++m)
    for (std::size_t n = 1; n <= max_arity; ++n) {
      std::size_t cells_m = cache.power_of(m).size(), cells_n = cache.power_of(n).size();
      BigInt ops_m = boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(cells_m));
      BigInt ops_n = boost::multiprecision::pow(BigInt(base), static_cast<unsigned>(cells_n));
      BigInt total = ops_m * boost::multiprecision::pow(ops_n, static_cast<unsigned>(m));
      std::mt19937_64 rng(seed + 977 * m + n);
      auto random_table = [&](std::size_t cells) {
        Table t(cells);
        for (auto &x : t)
          x = std::uniform_int_distribution<std::uint32_t>(0, base - 1)(rng);
        return t;
      };
      auto check = [&](const Table &g, const std::vector<Table> &fs) {
        ++report.checked;
        std::vector<const Table *> ptrs;
        QValue fmeet = top(q);
        for (const auto &f : fs) {
          ptrs.push_back(&f);
          fmeet = meet2(fmeet, cache.degree(n, f));
        }
        QValue lhs = tensor(cache.degree(m, g), fmeet);
        Table comp = detail::superpose(g, ptrs, base, cells_n);
        if (!leq(lhs, cache.degree(n, comp)))
          report.violations.push_back("graded superposition inequality fails for g" +
                                      detail::table_str(g) + " at arity " + std::to_string(n));
      };
      if (total <= max_checks) {
        std::uint64_t om = ops_m.convert_to<std::uint64_t>(), on = ops_n.convert_to<std::uint64_t>();
        std::vector<std::size_t> sizes(m + 1, on);
        sizes[0] = om;
        detail::visit_combinations(sizes, max_checks, seed, [&](const auto &pick) {
          std::vector<Table> fs;
          for (std::size_t i = 1; i <= m; ++i)
            fs.push_back(detail::operation_table(pick[i], base, cells_n));
          check(detail::operation_table(pick[0], base, cells_m), fs);
        });
      } else {
        for (std::uint64_t c = 0; c < max_checks; ++c) {
          Table g = random_table(cells_m);
          std::vector<Table> fs;
          for (std::size_t i = 0; i < m; ++i)
            fs.push_back(random_table(cells_n));
          check(g, fs);
        }
      }
    }
  return report;
}

/// Graded closure properties for relations rho_j : K -|-> A over one quantale:
///   /\_j Pol(rho_j)_n <= Pol(/\_j rho_j)_n   and   Pol(rho_j)_n <= Pol(rho_j / sigma)_n,
/// checked at operations f : A^n -> A (all of them when at most max_checks,
/// sampled otherwise).
inline LawReport check_graded_closure(const std::vector<QMorphism> &rhos,
                                      const std::optional<QMorphism> &sigma, std::size_t n,
                                      std::uint64_t max_checks = 100'000, std::uint64_t seed = 1,
                                      std::uint64_t limit = default_enum_limit()) {
  LawReport report;
  if (rhos.empty())
    return report;
  const Quantale q = rhos.front().quantale();
  const FiniteSet &a = rhos.front().cod();
  QMorphism inter = meet(q, rhos.front().dom(), a, rhos, limit);
  std::vector<QMorphism> extended;
  if (sigma)
    for (const auto &rho : rhos)
      extended.push_back(right_extension(rho, *sigma, limit));
  FiniteSet pw = power(a, n);
  std::vector<std::size_t> sizes(pw.size(), a.size());
  detail::visit_combinations(sizes, max_checks, seed, [&](const auto &pick) {
    Table t(pick.begin(), pick.end());
    FnArrow f(pw, a, t);
    QValue lhs = top(q);
    std::vector<QValue> each;
    for (const auto &rho : rhos) {
      each.push_back(pol_degree(rho, n, f));
      lhs = meet2(lhs, each.back());
    }
    ++report.checked;
    if (!leq(lhs, pol_degree(inter, n, f)))
      report.violations.push_back("meet of degrees exceeds degree of the meet at f" +
                                  detail::table_str(t));
    for (std::size_t j = 0; j < extended.size(); ++j) {
      ++report.checked;
      if (!leq(each[j], pol_degree(extended[j], n, f)))
        report.violations.push_back("degree drops under right extension at f" +
                                    detail::table_str(t));
    }
  });
  return report;
}

/// rho^alpha = { d | alpha >= rho(d) } for alpha < inf.
inline QMorphism sublevel(const QMorphism &rho, const ExtReal &alpha) {
  if (rho.quantale() != Quantale::Rbar)
    throw ContractViolation("sublevel expects an Rbar-valued relation");
  if (alpha.is_pos_inf())
    throw ContractViolation("sublevel threshold must be below +inf");
  QMorphism out(Quantale::Two, rho.dom(), rho.cod());
  for (const auto &[d, v] : rho.support())
    if (alpha >= v.as_real())
      out.set(d, QValue(true));
  return out;
}

/// Thresholds at which the sublevel sets of rho can change: the attained
/// values plus -inf, ascending.
inline std::vector<ExtReal> sublevel_thresholds(const QMorphism &rho) {
  std::vector<ExtReal> out{ExtReal::neg_inf()};
  for (const auto &[d, v] : rho.support())
    out.push_back(v.as_real());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

/// U(L) = { rho^alpha | rho in L, alpha < inf }, materialised from the finite
/// threshold sets with duplicates removed. Includes the empty relation
/// rho^{-inf} when rho never attains -inf.
inline ConstraintLanguage language_sublevels(const ValuedLanguage &lang) {
  ConstraintLanguage out{lang.domain, {}};
  for (const auto &rho : lang.relations)
    for (const auto &alpha : sublevel_thresholds(rho)) {
      QMorphism s = sublevel(rho, alpha);
      if (std::find(out.relations.begin(), out.relations.end(), s) == out.relations.end())
        out.relations.push_back(std::move(s));
    }
  return out;
}

/// Both sides of the (f, 0) criterion: (f, 0) is an Rbar-valued polymorphism
/// of the family, and f preserves every sublevel set.
struct FZeroSides {
  bool graded;
  bool sublevel;
  bool agree() const { return graded == sublevel; }
};

inline FZeroSides f_zero_sides(const ValuedLanguage &lang, std::size_t n, const FnArrow &f) {
  FZeroSides s{};
  s.graded = check_graded(lang.relations, n, f, QValue(ExtReal(0)));
  s.sublevel = true;
  for (const auto &rel : language_sublevels(lang).relations)
    if (!is_polymorphism(f, rel)) {
      s.sublevel = false;
      break;
    }
  return s;
}

inline bool verify_f_zero(const ValuedLanguage &lang, std::size_t n, const FnArrow &f) {
  return f_zero_sides(lang, n, f).agree();
}

} // namespace quantcsp
