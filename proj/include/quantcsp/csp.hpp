#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "quantcsp/finset.hpp"
#include "quantcsp/qmorphism.hpp"

namespace quantcsp {

/// A crisp k-ary relation on D as a 2-morphism [k] -|-> D.
inline QMorphism make_relation(const FiniteSet &domain, std::size_t arity,
                               const std::vector<Table> &tuples) {
  FiniteSet k = FiniteSet::ordinal(arity);
  QMorphism rel(Quantale::Two, k, domain);
  for (const auto &t : tuples) {
    if (t.size() != arity)
      throw InputError("tuple of length " + std::to_string(t.size()) + " in a relation of arity " +
                       std::to_string(arity));
    rel.set(FnArrow(k, domain, t), QValue(true));
  }
  return rel;
}

/// D^k as a relation.
inline QMorphism full_relation(const FiniteSet &domain, std::size_t arity) {
  return QMorphism::top_morphism(Quantale::Two, FiniteSet::ordinal(arity), domain);
}

/// The disequality relation on D.
inline QMorphism neq_relation(const FiniteSet &domain) {
  std::vector<Table> tuples;
  for (std::uint32_t a = 0; a < domain.size(); ++a)
    for (std::uint32_t b = 0; b < domain.size(); ++b)
      if (a != b)
        tuples.push_back({a, b});
  return make_relation(domain, 2, tuples);
}

/// (k, x, rho) with x : [k] -> V and rho : [k] -|-> D over 2.
struct Constraint {
  std::size_t arity;
  FnArrow scope;
  QMorphism relation;
};

struct CspInstance {
  FiniteSet variables;
  FiniteSet domain;
  std::vector<Constraint> constraints;

  /// Throws InputError if some constraint is malformed.
  void validate() const {
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      const auto &c = constraints[i];
      auto where = "constraint " + std::to_string(i) + ": ";
      FiniteSet k = FiniteSet::ordinal(c.arity);
      if (!(c.scope.dom() == k) || !(c.scope.cod() == variables))
        throw InputError(where + "scope must be a function [k] -> V");
      if (c.relation.quantale() != Quantale::Two || !(c.relation.dom() == k) ||
          !(c.relation.cod() == domain))
        throw InputError(where + "relation must be a 2-valued morphism [k] -|-> D");
    }
  }

  void add(std::vector<std::string> scope_labels, QMorphism relation) {
    std::size_t k = scope_labels.size();
    FnArrow scope = FnArrow::from_labels(FiniteSet::ordinal(k), variables, scope_labels);
    constraints.push_back({k, std::move(scope), std::move(relation)});
  }
};

/// A domain together with a finite family of crisp relations.
struct ConstraintLanguage {
  FiniteSet domain;
  std::vector<QMorphism> relations;
};

/// s . x in rho for every constraint.
inline bool is_solution(const CspInstance &inst, const FnArrow &s) {
  for (const auto &c : inst.constraints)
    if (!c.relation.support().count(compose_tables(s.table(), c.scope.table())))
      return false;
  return true;
}

/// S(I)(s), evaluated as the meet of the right extensions rho / {x} at s.
inline bool solution_value_at(const CspInstance &inst, const FnArrow &s) {
  QValue acc(true);
  for (const auto &c : inst.constraints) {
    auto x = QMorphism::singleton(Quantale::Two, c.scope);
    acc = meet2(acc, eval_right_extension_at(c.relation, x, s));
    if (!acc.as_bool())
      break;
  }
  return acc.as_bool();
}

/// S(I) : V -|-> D as the intersection of rho / {x}; materialised.
inline QMorphism solution_set(const CspInstance &inst,
                              std::uint64_t limit = default_enum_limit()) {
  check_guard(hom_size(inst.variables, inst.domain), limit);
  std::vector<QMorphism> parts;
  parts.reserve(inst.constraints.size());
  for (const auto &c : inst.constraints)
    parts.push_back(
        right_extension(c.relation, QMorphism::singleton(Quantale::Two, c.scope), limit));
  return meet(Quantale::Two, inst.variables, inst.domain, parts, limit);
}

/// S(I) computed language-wise: for each distinct relation rho, sigma_rho is
/// the join of the scope singletons, and S(I) is the intersection of
/// rho / sigma_rho.
inline QMorphism solution_set_by_language(const CspInstance &inst,
                                          std::uint64_t limit = default_enum_limit()) {
  check_guard(hom_size(inst.variables, inst.domain), limit);
  std::vector<std::pair<QMorphism, QMorphism>> groups; // (rho, sigma_rho)
  for (const auto &c : inst.constraints) {
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const auto &g) { return g.first == c.relation; });
    if (it == groups.end()) {
      groups.emplace_back(c.relation,
                          QMorphism(Quantale::Two, c.relation.dom(), inst.variables));
      it = std::prev(groups.end());
    }
    it->second.set(c.scope, QValue(true));
  }
  std::vector<QMorphism> parts;
  for (const auto &[rho, sigma] : groups)
    parts.push_back(right_extension(rho, sigma, limit));
  return meet(Quantale::Two, inst.variables, inst.domain, parts, limit);
}

struct SolverStats {
  std::uint64_t nodes = 0;
  std::uint64_t propagations = 0;
  std::uint64_t failures = 0;
};

struct SolveResult {
  std::optional<FnArrow> solution;
  SolverStats stats;
};

namespace detail {

/// Backtracking search with generalised arc consistency. Branches on the
/// unfixed variable with the smallest current domain (ties by variable
/// order), trying values in domain order.
class Search {
public:
  explicit Search(const CspInstance &inst) : inst_(inst) {
    nvars_ = inst.variables.size();
    nvals_ = inst.domain.size();
    watchers_.resize(nvars_);
    for (std::size_t ci = 0; ci < inst.constraints.size(); ++ci) {
      const auto &c = inst.constraints[ci];
      Compiled cc;
      cc.scope = c.scope.table();
      for (auto &[t, v] : c.relation.entries())
        cc.tuples.push_back(t);
      for (std::size_t j = 0; j < cc.scope.size(); ++j)
        for (std::size_t j2 = j + 1; j2 < cc.scope.size(); ++j2)
          if (cc.scope[j] == cc.scope[j2])
            cc.repeats.emplace_back(j, j2);
      for (auto v : cc.scope)
        if (watchers_[v].empty() || watchers_[v].back() != ci)
          watchers_[v].push_back(ci);
      compiled_.push_back(std::move(cc));
    }
  }

  template <class OnSolution>
  SolverStats run(OnSolution &&on_solution) {
    State st;
    st.alive.assign(nvars_, std::vector<char>(nvals_, 1));
    st.count.assign(nvars_, nvals_);
    std::vector<std::size_t> all(compiled_.size());
    for (std::size_t i = 0; i < all.size(); ++i)
      all[i] = i;
    if (nvals_ == 0 && nvars_ > 0) {
      ++stats_.failures;
      return stats_;
    }
    if (propagate(st, all))
      dfs(st, on_solution);
    else
      ++stats_.failures;
    return stats_;
  }

private:
  struct Compiled {
    Table scope;
    std::vector<Table> tuples;
    std::vector<std::pair<std::size_t, std::size_t>> repeats;
  };
  struct State {
    std::vector<std::vector<char>> alive;
    std::vector<std::size_t> count;
  };

  bool valid(const State &st, const Compiled &c, const Table &t) const {
    for (std::size_t j = 0; j < t.size(); ++j)
      if (!st.alive[c.scope[j]][t[j]])
        return false;
    for (auto [a, b] : c.repeats)
      if (t[a] != t[b])
        return false;
    return true;
  }

  // Returns false on a wipe-out.
  bool propagate(State &st, std::vector<std::size_t> queue) {
    std::vector<char> queued(compiled_.size(), 0);
    for (auto ci : queue)
      queued[ci] = 1;
    std::size_t head = 0;
    while (head < queue.size()) {
      std::size_t ci = queue[head++];
      queued[ci] = 0;
      ++stats_.propagations;
      const Compiled &c = compiled_[ci];
      std::size_t k = c.scope.size();
      std::vector<std::vector<char>> supported(k, std::vector<char>(nvals_, 0));
      bool any = false;
      for (const auto &t : c.tuples)
        if (valid(st, c, t)) {
          any = true;
          for (std::size_t j = 0; j < k; ++j)
            supported[j][t[j]] = 1;
        }
      if (!any)
        return false;
      for (std::size_t j = 0; j < k; ++j) {
        auto v = c.scope[j];
        bool changed = false;
        for (std::size_t d = 0; d < nvals_; ++d)
          if (st.alive[v][d] && !supported[j][d]) {
            st.alive[v][d] = 0;
            --st.count[v];
            changed = true;
          }
        if (st.count[v] == 0)
          return false;
        if (changed)
          for (auto other : watchers_[v])
            if (!queued[other]) {
              queued[other] = 1;
              queue.push_back(other);
            }
      }
    }
    return true;
  }

  // Returns true when the caller asked to stop.
  template <class OnSolution>
  bool dfs(State &st, OnSolution &on_solution) {
    ++stats_.nodes;
    std::size_t best = nvars_;
    for (std::size_t v = 0; v < nvars_; ++v)
      if (st.count[v] > 1 && (best == nvars_ || st.count[v] < st.count[best]))
        best = v;
    if (best == nvars_) {
      Table s(nvars_);
      for (std::size_t v = 0; v < nvars_; ++v)
        s[v] = static_cast<std::uint32_t>(
            std::find(st.alive[v].begin(), st.alive[v].end(), 1) - st.alive[v].begin());
      return !on_solution(FnArrow(inst_.variables, inst_.domain, std::move(s)));
    }
    for (std::size_t d = 0; d < nvals_; ++d) {
      if (!st.alive[best][d])
        continue;
      State child = st;
      std::fill(child.alive[best].begin(), child.alive[best].end(), 0);
      child.alive[best][d] = 1;
      child.count[best] = 1;
      if (propagate(child, watchers_[best])) {
        if (dfs(child, on_solution))
          return true;
      } else {
        ++stats_.failures;
      }
    }
    return false;
  }

  const CspInstance &inst_;
  std::size_t nvars_ = 0;
  std::size_t nvals_ = 0;
  std::vector<Compiled> compiled_;
  std::vector<std::vector<std::size_t>> watchers_;
  SolverStats stats_;
};

} // namespace detail

/// Some solution, or none. Deterministic.
inline SolveResult solve(const CspInstance &inst) {
  SolveResult r;
  detail::Search search(inst);
  r.stats = search.run([&](FnArrow s) {
    r.solution = std::move(s);
    return false;
  });
  return r;
}

/// Up to `limit` solutions in search order.
inline std::vector<FnArrow> solve_all(const CspInstance &inst, std::uint64_t limit,
                                      SolverStats *stats = nullptr) {
  std::vector<FnArrow> out;
  detail::Search search(inst);
  auto st = search.run([&](FnArrow s) {
    out.push_back(std::move(s));
    return out.size() < limit;
  });
  if (stats)
    *stats = st;
  return out;
}

/// O(I) = {!_D} . S(I) is nonempty, i.e. I has a solution.
inline bool o_value(const CspInstance &inst) { return solve(inst).solution.has_value(); }

/// One disequality constraint per edge, over the colours {0, ..., k-1}.
inline CspInstance from_graph_colouring(const FiniteSet &vertices,
                                        const std::vector<std::pair<std::string, std::string>> &edges,
                                        std::size_t colours) {
  CspInstance inst{vertices, FiniteSet::range(colours), {}};
  QMorphism neq = neq_relation(inst.domain);
  for (const auto &[u, v] : edges) {
    if (!vertices.find(u) || !vertices.find(v))
      throw InputError("edge (" + u + ", " + v + ") uses an undeclared vertex");
    inst.add({u, v}, neq);
  }
  return inst;
}

} // namespace quantcsp
