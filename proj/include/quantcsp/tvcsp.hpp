#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "quantcsp/csp.hpp"
#include "quantcsp/polymorphism.hpp"
#include "quantcsp/qpoly.hpp"

namespace quantcsp {

/// (k, sigma, rho) with sigma : [k] -|-> V and rho : [k] -|-> D, both Rbar-valued.
struct ValuedConstraint {
  std::size_t arity;
  QMorphism sigma;
  QMorphism rho;
};

struct TvcspInstance {
  FiniteSet variables;
  FiniteSet domain;
  std::vector<ValuedConstraint> constraints;

  void validate() const {
    for (std::size_t i = 0; i < constraints.size(); ++i) {
      const auto &c = constraints[i];
      auto where = "constraint " + std::to_string(i) + ": ";
      FiniteSet k = FiniteSet::ordinal(c.arity);
      if (c.sigma.quantale() != Quantale::Rbar || !(c.sigma.dom() == k) ||
          !(c.sigma.cod() == variables))
        throw InputError(where + "sigma must be an Rbar-valued morphism [k] -|-> V");
      if (c.rho.quantale() != Quantale::Rbar || !(c.rho.dom() == k) ||
          !(c.rho.cod() == domain))
        throw InputError(where + "rho must be an Rbar-valued morphism [k] -|-> D");
    }
  }
};

struct TvcspResult {
  ExtReal value;
  std::optional<FnArrow> minimiser;
  std::uint64_t csp_calls = 0;
  SolverStats stats;
};

/// S(I)(s) = sup over constraints and x in dom sigma of rho(s . x) - sigma(x),
/// the difference taken in the residual table.
inline ExtReal eval_assignment(const TvcspInstance &inst, const FnArrow &s) {
  if (!(s.dom() == inst.variables) || !(s.cod() == inst.domain))
    throw DomainMismatch("assignment must be a function V -> D");
  ExtReal acc = ExtReal::neg_inf();
  for (const auto &c : inst.constraints)
    for (const auto &[x, w] : c.sigma.support()) {
      ExtReal v = ext_sub(c.rho.value(compose_tables(s.table(), x)).as_real(), w.as_real());
      if (v > acc)
        acc = v;
      if (acc.is_pos_inf())
        return acc;
    }
  return acc;
}

/// O(I) by enumerating all assignments. Ties keep the first in lexicographic
/// order; an empty D with nonempty V gives inf and no minimiser.
inline TvcspResult solve_bruteforce(const TvcspInstance &inst,
                                    std::uint64_t limit = default_enum_limit()) {
  check_guard(hom_size(inst.variables, inst.domain), limit);
  TvcspResult r{ExtReal::pos_inf(), std::nullopt, 0, {}};
  for_each_table(inst.variables.size(), inst.domain.size(), [&](const Table &t) {
    FnArrow s(inst.variables, inst.domain, t);
    ExtReal v = eval_assignment(inst, s);
    if (!r.minimiser || v < r.value) {
      r.value = v;
      r.minimiser = std::move(s);
    }
    return !r.value.is_neg_inf();
  });
  return r;
}

/// I^alpha: one crisp constraint (k, x, rho^{sigma(x) + alpha}) per
/// constraint and x in dom sigma.
inline CspInstance reduce_to_csp(const TvcspInstance &inst, const ExtReal &alpha) {
  if (alpha.is_pos_inf())
    throw ContractViolation("reduce_to_csp needs alpha < inf");
  CspInstance out{inst.variables, inst.domain, {}};
  for (const auto &c : inst.constraints) {
    FiniteSet k = FiniteSet::ordinal(c.arity);
    for (const auto &[x, w] : c.sigma.entries())
      out.constraints.push_back(
          {c.arity, FnArrow(k, inst.variables, x), sublevel(c.rho, ext_add(w.as_real(), alpha))});
  }
  return out;
}

/// {rho(d) - sigma(x)} without inf, plus -inf; ascending.
inline std::vector<ExtReal> candidate_alphas(const TvcspInstance &inst) {
  std::vector<ExtReal> out{ExtReal::neg_inf()};
  for (const auto &c : inst.constraints)
    for (const auto &[d, rv] : c.rho.support())
      for (const auto &[x, sv] : c.sigma.support()) {
        ExtReal v = ext_sub(rv.as_real(), sv.as_real());
        if (!v.is_pos_inf())
          out.push_back(std::move(v));
      }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

enum class SearchMethod { Binary, Linear };

struct ReductionOptions {
  SearchMethod method = SearchMethod::Binary;
  unsigned jobs = 1;
};

/// Satisfiability of I^alpha at each candidate, in candidate order.
inline std::vector<std::pair<ExtReal, bool>> satisfiability_profile(const TvcspInstance &inst) {
  std::vector<std::pair<ExtReal, bool>> out;
  for (const auto &a : candidate_alphas(inst))
    out.emplace_back(a, o_value(reduce_to_csp(inst, a)));
  return out;
}

namespace detail {

inline std::optional<FnArrow> first_assignment(const TvcspInstance &inst) {
  if (inst.domain.empty() && !inst.variables.empty())
    return std::nullopt;
  return FnArrow(inst.variables, inst.domain, Table(inst.variables.size(), 0));
}

inline void add_stats(SolverStats &into, const SolverStats &s) {
  into.nodes += s.nodes;
  into.propagations += s.propagations;
  into.failures += s.failures;
}

} // namespace detail

/// O(I) as the least candidate alpha with I^alpha satisfiable, inf if none.
/// The minimiser is the CSP solution at that alpha.
inline TvcspResult solve_by_reduction(const TvcspInstance &inst, ReductionOptions opt = {}) {
  auto cands = candidate_alphas(inst);
  TvcspResult r{ExtReal::pos_inf(), std::nullopt, 0, {}};
  std::vector<std::optional<SolveResult>> results(cands.size());
  auto run = [&](std::size_t i) -> const SolveResult & {
    if (!results[i]) {
      results[i] = solve(reduce_to_csp(inst, cands[i]));
      ++r.csp_calls;
      detail::add_stats(r.stats, results[i]->stats);
    }
    return *results[i];
  };
  std::optional<std::size_t> best;
  if (opt.jobs > 1) {
    std::atomic<std::size_t> next{0}, least{cands.size()};
    std::vector<std::optional<SolveResult>> slots(cands.size());
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < opt.jobs; ++j)
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < cands.size(); i = next++) {
          if (i > least.load())
            break;
          slots[i] = solve(reduce_to_csp(inst, cands[i]));
          if (slots[i]->solution) {
            std::size_t cur = least.load();
            while (i < cur && !least.compare_exchange_weak(cur, i)) {
            }
          }
        }
      });
    for (auto &t : pool)
      t.join();
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (slots[i]) {
        ++r.csp_calls;
        detail::add_stats(r.stats, slots[i]->stats);
      }
    if (least.load() < cands.size()) {
      best = least.load();
      results[*best] = std::move(slots[*best]);
    }
  } else if (opt.method == SearchMethod::Linear) {
    for (std::size_t i = 0; i < cands.size(); ++i)
      if (run(i).solution) {
        best = i;
        break;
      }
  } else {
    std::size_t lo = 0, hi = cands.size();
    while (lo < hi) {
      std::size_t mid = lo + (hi - lo) / 2;
      if (run(mid).solution)
        hi = mid;
      else
        lo = mid + 1;
    }
    if (lo < cands.size())
      best = lo;
  }
  if (best) {
    r.value = cands[*best];
    r.minimiser = results[*best]->solution;
  } else {
    r.minimiser = detail::first_assignment(inst);
  }
  return r;
}

/// The reverse reduction: each crisp constraint (k, x, R) with R = rho^alpha
/// for some rho in the language becomes (k, {x}^alpha, rho). I0 is satisfiable
/// iff 0 >= O(result).
inline TvcspInstance csp_to_tvcsp(const CspInstance &inst, const ValuedLanguage &lang) {
  if (!(inst.domain == lang.domain))
    throw DomainMismatch("instance and language live on different domains");
  TvcspInstance out{inst.variables, inst.domain, {}};
  for (std::size_t i = 0; i < inst.constraints.size(); ++i) {
    const auto &c = inst.constraints[i];
    std::optional<ValuedConstraint> found;
    for (const auto &rho : lang.relations) {
      if (rho.dom().size() != c.arity)
        continue;
      for (const auto &alpha : sublevel_thresholds(rho))
        if (sublevel(rho, alpha) == c.relation) {
          found = ValuedConstraint{c.arity, QMorphism::singleton_weighted(c.scope, QValue(alpha)),
                                   rho};
          break;
        }
      if (found)
        break;
    }
    if (!found)
      throw NoPreimage("constraint " + std::to_string(i) +
                       " is not a sublevel set of any relation in the language");
    out.constraints.push_back(std::move(*found));
  }
  return out;
}

/// TVCSP(D) is in P iff U(D) has a Siggers polymorphism, NP-hard otherwise.
inline Classification classify_tvcsp(const ValuedLanguage &lang,
                                     SiggersMode mode = SiggersMode::Auto,
                                     std::uint64_t limit = default_enum_limit(),
                                     unsigned jobs = 1) {
  Classification c = classify(language_sublevels(lang), mode, limit, jobs);
  if (c.verdict == Verdict::NPComplete)
    c.verdict = Verdict::NPHard;
  return c;
}

struct Activity {
  std::string name;
  std::uint64_t processing = 0;
  std::uint64_t due = 0;
};

struct SchedulingProblem {
  std::vector<Activity> activities;
  /// (i, j): j starts no earlier than i finishes.
  std::vector<std::pair<std::string, std::string>> precedences;
};

/// Start times in {0, ..., N}; minimise the maximum deviation |d_i - (s_i + p_i)|.
inline TvcspInstance from_scheduling(const SchedulingProblem &p, std::uint64_t horizon) {
  std::vector<std::string> names;
  for (const auto &a : p.activities)
    names.push_back(a.name);
  FiniteSet v(names);
  if (v.size() != names.size())
    throw InputError("duplicate activity name");
  FiniteSet d = FiniteSet::range(horizon + 1);
  TvcspInstance inst{v, d, {}};
  FiniteSet one = FiniteSet::ordinal(1), two = FiniteSet::ordinal(2);
  for (std::size_t i = 0; i < p.activities.size(); ++i) {
    const auto &a = p.activities[i];
    QMorphism rho(Quantale::Rbar, one, d);
    for (std::uint64_t t = 0; t <= horizon; ++t) {
      BigInt dev = BigInt(a.due) - BigInt(t + a.processing);
      rho.set(Table{static_cast<std::uint32_t>(t)}, QValue(ExtReal(Rational(abs(dev)))));
    }
    FnArrow x(one, v, Table{static_cast<std::uint32_t>(i)});
    inst.constraints.push_back({1, QMorphism::singleton_weighted(x, QValue(ExtReal(0))), rho});
  }
  for (const auto &[from, to] : p.precedences) {
    auto i = v.find(from), j = v.find(to);
    if (!i || !j)
      throw InputError("precedence (" + from + ", " + to + ") names an unknown activity");
    std::uint64_t pi = p.activities[*i].processing;
    QMorphism rho(Quantale::Rbar, two, d);
    for (std::uint64_t ti = 0; ti <= horizon; ++ti)
      for (std::uint64_t tj = ti + pi; tj <= horizon; ++tj)
        rho.set(Table{static_cast<std::uint32_t>(ti), static_cast<std::uint32_t>(tj)},
                QValue(ExtReal(0)));
    FnArrow x(two, v, Table{*i, *j});
    inst.constraints.push_back({2, QMorphism::singleton_weighted(x, QValue(ExtReal(0))), rho});
  }
  return inst;
}

} // namespace quantcsp
