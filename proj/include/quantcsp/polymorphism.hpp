#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "quantcsp/csp.hpp"
#include "quantcsp/finset.hpp"
#include "quantcsp/qmorphism.hpp"

namespace quantcsp {

/// An n-ary operation A^n -> A on the canonical power.
struct PolWitness {
  FnArrow op;
  std::size_t arity;
};

/// Arity n of an operation f : A^n -> A; throws unless dom(f) is the
/// canonical power of cod(f).
inline std::size_t operation_arity(const FnArrow &f) {
  auto info = f.dom().power_info();
  if (!info || !(info->first == f.cod()))
    throw ContractViolation("operation domain is not the canonical power of its codomain");
  return info->second;
}

/// {pi_i}_{i=1..n} : A^n -|-> A, valued e on projections and bottom elsewhere.
inline QMorphism projections_morphism(Quantale q, const FiniteSet &a, std::size_t n) {
  QMorphism m(q, power(a, n), a);
  for (std::size_t i = 1; i <= n; ++i)
    m.set(projection(a, n, i), unit(q));
  return m;
}

namespace detail {

/// Membership index for a crisp relation K -|-> A: bitmap over A^|K| when
/// small, hash set otherwise.
class RelationIndex {
public:
  explicit RelationIndex(const QMorphism &rel) : base_(rel.cod().size()), k_(rel.dom().size()) {
    for (auto &[t, v] : rel.entries())
      tuples_.push_back(t);
    BigInt space = boost::multiprecision::pow(BigInt(base_), static_cast<unsigned>(k_));
    if (space <= (1u << 22)) {
      bitmap_.assign(static_cast<std::size_t>(space), 0);
      for (const auto &t : tuples_)
        bitmap_[encode_tuple(t, base_)] = 1;
    } else {
      for (const auto &t : tuples_)
        set_.insert(t);
    }
  }

  bool contains(const Table &t) const {
    if (!bitmap_.empty() || set_.empty())
      return !bitmap_.empty() && bitmap_[encode_tuple(t, base_)];
    return set_.count(t) > 0;
  }

  const std::vector<Table> &tuples() const { return tuples_; }
  std::size_t arity() const { return k_; }
  std::size_t base() const { return base_; }

private:
  std::size_t base_;
  std::size_t k_;
  std::vector<Table> tuples_;
  std::vector<char> bitmap_;
  std::unordered_set<Table, TableHash> set_;
};

/// Does the operation table (over A^n, |A| = base) preserve the relation?
/// Iterates over all n-tuples of relation rows.
inline bool preserves(const Table &op, std::size_t n, const RelationIndex &rel) {
  const auto &rows = rel.tuples();
  std::size_t k = rel.arity();
  std::size_t base = rel.base();
  if (rows.empty() && n > 0)
    return true;
  std::vector<std::size_t> pick(n, 0);
  Table args(n), image(k);
  while (true) {
    for (std::size_t j = 0; j < k; ++j) {
      for (std::size_t i = 0; i < n; ++i)
        args[i] = rows[pick[i]][j];
      image[j] = op[encode_tuple(args, base)];
    }
    if (!rel.contains(image))
      return false;
    std::size_t i = n;
    while (i > 0) {
      --i;
      if (++pick[i] < rows.size())
        break;
      pick[i] = 0;
      if (i == 0)
        return true;
    }
    if (n == 0)
      return true;
  }
}

} // namespace detail

/// f is a polymorphism of rho : K -|-> A: every f-image of rho-rows is in rho.
inline bool is_polymorphism(const FnArrow &f, const QMorphism &rho) {
  if (rho.quantale() != Quantale::Two)
    throw ContractViolation("is_polymorphism expects a crisp relation");
  if (!(rho.cod() == f.cod()))
    throw DomainMismatch("operation and relation live on different sets");
  std::size_t n = operation_arity(f);
  return detail::preserves(f.table(), n, detail::RelationIndex(rho));
}

/// Pol(rho)_n = rho / ({pi_i} \ rho) : A^n -|-> A.
inline QMorphism pol_set(const QMorphism &rho, std::size_t n,
                         std::uint64_t limit = default_enum_limit()) {
  if (rho.quantale() != Quantale::Two)
    throw ContractViolation("pol_set expects a crisp relation");
  const FiniteSet &a = rho.cod();
  check_guard(hom_size(power(a, n), a), limit);
  QMorphism rows = right_lifting(projections_morphism(Quantale::Two, a, n), rho, limit);
  return right_extension(rho, rows, limit);
}

/// Pol(L)_n, the intersection over the language.
inline QMorphism pol_set(const ConstraintLanguage &lang, std::size_t n,
                         std::uint64_t limit = default_enum_limit()) {
  std::vector<QMorphism> parts;
  for (const auto &rho : lang.relations)
    parts.push_back(pol_set(rho, n, limit));
  return meet(Quantale::Two, power(lang.domain, n), lang.domain, parts, limit);
}

/// Outcome of a law check: empty violations means the law holds on
/// everything that was checked.
struct LawReport {
  std::uint64_t checked = 0;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

namespace detail {

inline std::string table_str(const Table &t) {
  std::string s = "[";
  for (std::size_t i = 0; i < t.size(); ++i)
    s += (i ? "," : "") + std::to_string(t[i]);
  return s + "]";
}

/// Visits `count` index vectors (one per slot, slot sizes given): all of them
/// when the product is at most max_checks, otherwise max_checks random ones.
template <class Fn>
void visit_combinations(const std::vector<std::size_t> &sizes, std::uint64_t max_checks,
                        std::uint64_t seed, Fn &&fn) {
  BigInt total = 1;
  for (auto s : sizes)
    total *= s;
  if (total == 0)
    return;
  std::vector<std::size_t> pick(sizes.size(), 0);
  if (total <= max_checks) {
    while (true) {
      fn(pick);
      std::size_t i = sizes.size();
      while (i > 0) {
        --i;
        if (++pick[i] < sizes[i])
          break;
        pick[i] = 0;
        if (i == 0)
          return;
      }
      if (sizes.empty())
        return;
    }
  }
  std::mt19937_64 rng(seed);
  for (std::uint64_t c = 0; c < max_checks; ++c) {
    for (std::size_t i = 0; i < sizes.size(); ++i)
      pick[i] = std::uniform_int_distribution<std::size_t>(0, sizes[i] - 1)(rng);
    fn(pick);
  }
}

} // namespace detail

/// Clone laws on a family F_n (2-morphisms A^n -|-> A keyed by n): every
/// projection is in F_n, and g . <f_1..f_m> is in F_n for g in F_m and f_i in
/// F_n. Superpositions are enumerated exhaustively when there are at most
/// max_checks of them for a given (m, n), else sampled.
inline LawReport check_clone_laws(const FiniteSet &a, const std::map<std::size_t, QMorphism> &family,
                                  std::uint64_t max_checks = 100'000, std::uint64_t seed = 1) {
  LawReport report;
  for (const auto &[n, fn] : family) {
    if (!(fn.cod() == a) || !(fn.dom() == power(a, n)))
      throw DomainMismatch("family member for arity " + std::to_string(n) +
                           " is not a morphism A^n -|-> A");
    for (std::size_t i = 1; i <= n; ++i) {
      ++report.checked;
      if (!fn.contains(projection(a, n, i)))
        report.violations.push_back("projection " + std::to_string(i) + " of arity " +
                                    std::to_string(n) + " missing");
    }
  }
  for (const auto &[m, gm] : family) {
    auto gs = gm.arrows();
    for (const auto &[n, fnn] : family) {
      auto fs = fnn.arrows();
      std::vector<std::size_t> sizes(m + 1, fs.size());
      sizes[0] = gs.size();
      detail::visit_combinations(sizes, max_checks, seed + m * 131 + n, [&](const auto &pick) {
        ++report.checked;
        const FnArrow &g = gs[pick[0]];
        FnArrow composite = [&] {
          if (m == 0)
            return FnArrow(power(a, n), a, Table(power(a, n).size(), g.table().at(0)));
          std::vector<FnArrow> args;
          for (std::size_t i = 1; i <= m; ++i)
            args.push_back(fs[pick[i]]);
          return compose(g, tupling(args));
        }();
        if (!fnn.contains(composite)) {
          std::string msg = "superposition g" + detail::table_str(g.table()) + " . <";
          for (std::size_t i = 1; i <= m; ++i)
            msg += (i > 1 ? "," : "") + detail::table_str(fs[pick[i]].table());
          report.violations.push_back(msg + "> of arity " + std::to_string(n) + " not in family");
        }
      });
    }
  }
  return report;
}

/// Closure of polymorphisms under intersection of same-arity relations and
/// under right extension along sigma : K -|-> L (both over 2).
inline LawReport check_closure_properties(const std::vector<QMorphism> &rhos,
                                          const std::optional<QMorphism> &sigma, std::size_t n,
                                          std::uint64_t limit = default_enum_limit()) {
  LawReport report;
  if (rhos.empty())
    return report;
  const auto &first = rhos.front();
  std::vector<QMorphism> pols;
  for (const auto &rho : rhos)
    pols.push_back(pol_set(rho, n, limit));
  QMorphism lhs = meet(Quantale::Two, power(first.cod(), n), first.cod(), pols, limit);
  QMorphism inter = meet(Quantale::Two, first.dom(), first.cod(), rhos, limit);
  ++report.checked;
  if (!leq(lhs, pol_set(inter, n, limit)))
    report.violations.push_back("intersection of Pol(rho_j) not contained in Pol(intersection)");
  if (sigma) {
    for (std::size_t j = 0; j < rhos.size(); ++j) {
      ++report.checked;
      QMorphism ext = right_extension(rhos[j], *sigma, limit);
      if (!leq(pols[j], pol_set(ext, n, limit)))
        report.violations.push_back("Pol(rho_" + std::to_string(j) +
                                    ") not contained in Pol(rho / sigma)");
    }
  }
  return report;
}

/// Pol(L)_n is contained in Pol(S(I))_n for an instance over the language.
inline LawReport check_solution_polymorphisms(const CspInstance &inst,
                                              const ConstraintLanguage &lang, std::size_t n,
                                              std::uint64_t limit = default_enum_limit()) {
  LawReport report;
  ++report.checked;
  QMorphism sol = solution_set(inst, limit);
  if (!leq(pol_set(lang, n, limit), pol_set(sol, n, limit)))
    report.violations.push_back("Pol(L) not contained in Pol(S(I))");
  return report;
}

namespace detail {

/// Index pairs (i, j), i != j, of D^4 that a Siggers operation must identify:
/// (y,x,y,z) ~ (x,y,z,x).
inline std::vector<std::pair<std::uint32_t, std::uint32_t>> siggers_pairs(std::size_t d) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> out;
  for (std::uint32_t x = 0; x < d; ++x)
    for (std::uint32_t y = 0; y < d; ++y)
      for (std::uint32_t z = 0; z < d; ++z) {
        std::uint32_t l[] = {y, x, y, z};
        std::uint32_t r[] = {x, y, z, x};
        auto i = encode_tuple(l, d), j = encode_tuple(r, d);
        if (i != j)
          out.emplace_back(i, j);
      }
  return out;
}

inline bool table_is_siggers(const Table &t,
                             const std::vector<std::pair<std::uint32_t, std::uint32_t>> &pairs) {
  for (auto [i, j] : pairs)
    if (t[i] != t[j])
      return false;
  return true;
}

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x)
      x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b)
      parent_[std::max(a, b)] = std::min(a, b);
  }

private:
  std::vector<std::size_t> parent_;
};

} // namespace detail

/// f(y,x,y,z) = f(x,y,z,x) for all x, y, z.
inline bool is_siggers(const FnArrow &f) {
  if (operation_arity(f) != 4)
    throw ContractViolation("Siggers operations are 4-ary");
  return detail::table_is_siggers(f.table(), detail::siggers_pairs(f.cod().size()));
}

enum class SiggersMode { Exhaustive, Indicator, Auto };

inline const char *mode_name(SiggersMode m) {
  switch (m) {
  case SiggersMode::Exhaustive:
    return "exhaustive";
  case SiggersMode::Indicator:
    return "indicator";
  default:
    return "auto";
  }
}

struct SiggersSearch {
  std::optional<FnArrow> witness;
  SiggersMode mode_used = SiggersMode::Exhaustive;
  std::uint64_t scanned = 0;   // operations visited (exhaustive)
  SolverStats solver;          // indicator CSP statistics
  std::size_t indicator_variables = 0;
  std::size_t indicator_constraints = 0;
};

/// The indicator instance: one variable per class of D^4 under the Siggers
/// identification, and for every relation and every 4-tuple of its rows a
/// constraint forcing the image tuple back into the relation. Its solutions
/// are exactly the Siggers polymorphisms of the language. The second member
/// maps each element of D^4 to its variable.
inline std::pair<CspInstance, std::vector<std::uint32_t>>
siggers_indicator_instance(const ConstraintLanguage &lang) {
  std::size_t d = lang.domain.size();
  FiniteSet d4 = power(lang.domain, 4);
  detail::UnionFind uf(d4.size());
  for (auto [i, j] : detail::siggers_pairs(d))
    uf.unite(i, j);
  std::vector<std::uint32_t> var_of(d4.size());
  std::vector<std::string> names;
  std::map<std::size_t, std::uint32_t> root_var;
  for (std::size_t i = 0; i < d4.size(); ++i) {
    auto r = uf.find(i);
    auto [it, fresh] = root_var.try_emplace(r, static_cast<std::uint32_t>(names.size()));
    if (fresh)
      names.push_back(d4.label(r));
    var_of[i] = it->second;
  }
  CspInstance inst{FiniteSet(std::move(names)), lang.domain, {}};
  for (const auto &rho : lang.relations) {
    if (!(rho.cod() == lang.domain))
      throw DomainMismatch("language relation over a different domain");
    detail::RelationIndex idx(rho);
    const auto &rows = idx.tuples();
    std::size_t k = idx.arity();
    std::unordered_set<Table, TableHash> seen;
    std::vector<std::size_t> sizes(4, rows.size());
    detail::visit_combinations(sizes, UINT64_MAX, 0, [&](const auto &pick) {
      Table scope(k);
      for (std::size_t j = 0; j < k; ++j) {
        std::uint32_t arg[] = {rows[pick[0]][j], rows[pick[1]][j], rows[pick[2]][j],
                               rows[pick[3]][j]};
        scope[j] = var_of[encode_tuple(arg, d)];
      }
      if (seen.insert(scope).second)
        inst.constraints.push_back({k, FnArrow(rho.dom(), inst.variables, scope), rho});
    });
  }
  return {std::move(inst), std::move(var_of)};
}

namespace detail {

inline std::optional<Table> exhaustive_siggers_scan(const ConstraintLanguage &lang,
                                                    std::uint64_t total, unsigned jobs,
                                                    std::uint64_t &scanned) {
  std::size_t d = lang.domain.size();
  std::size_t cells = static_cast<std::size_t>(
      boost::multiprecision::pow(BigInt(d), 4).convert_to<std::uint64_t>());
  auto pairs = siggers_pairs(d);
  std::vector<RelationIndex> rels;
  for (const auto &rho : lang.relations)
    rels.emplace_back(rho);
  jobs = std::max(1u, jobs);
  std::atomic<std::uint64_t> best{UINT64_MAX};
  std::atomic<std::uint64_t> visited{0};
  auto worker = [&](std::uint64_t begin, std::uint64_t end) {
    Table t = decode_tuple(begin, d, cells);
    std::uint64_t local = 0;
    for (std::uint64_t idx = begin; idx < end && idx < best.load(); ++idx) {
      ++local;
      if (table_is_siggers(t, pairs) &&
          std::all_of(rels.begin(), rels.end(),
                      [&](const RelationIndex &r) { return preserves(t, 4, r); })) {
        std::uint64_t cur = best.load();
        while (idx < cur && !best.compare_exchange_weak(cur, idx)) {
        }
        break;
      }
      for (std::size_t i = cells; i-- > 0;) {
        if (++t[i] < d)
          break;
        t[i] = 0;
      }
    }
    visited += local;
  };
  if (jobs == 1 || total < jobs) {
    worker(0, total);
  } else {
    std::vector<std::thread> threads;
    std::uint64_t chunk = (total + jobs - 1) / jobs;
    for (unsigned j = 0; j < jobs; ++j) {
      std::uint64_t b = j * chunk, e = std::min<std::uint64_t>(total, b + chunk);
      if (b < e)
        threads.emplace_back(worker, b, e);
    }
    for (auto &th : threads)
      th.join();
  }
  scanned = visited.load();
  if (best.load() == UINT64_MAX)
    return std::nullopt;
  return decode_tuple(best.load(), d, cells);
}

} // namespace detail

/// Searches for a Siggers polymorphism of the language. Exhaustive mode scans
/// Hom(D^4, D) lexicographically and returns the least witness; indicator
/// mode solves the indicator CSP. Auto picks exhaustive when the scan fits
/// under the limit.
inline SiggersSearch find_siggers(const ConstraintLanguage &lang, SiggersMode mode,
                                  std::uint64_t limit = default_enum_limit(),
                                  unsigned jobs = 1) {
  FiniteSet d4 = power(lang.domain, 4);
  BigInt total = hom_size(d4, lang.domain);
  if (mode == SiggersMode::Auto)
    mode = total <= limit ? SiggersMode::Exhaustive : SiggersMode::Indicator;
  SiggersSearch out;
  out.mode_used = mode;
  if (mode == SiggersMode::Exhaustive) {
    check_guard(total, limit);
    if (auto t = detail::exhaustive_siggers_scan(lang, total.convert_to<std::uint64_t>(), jobs,
                                                 out.scanned))
      out.witness = FnArrow(d4, lang.domain, *t);
    return out;
  }
  auto [inst, var_of] = siggers_indicator_instance(lang);
  out.indicator_variables = inst.variables.size();
  out.indicator_constraints = inst.constraints.size();
  SolveResult r = solve(inst);
  out.solver = r.stats;
  if (r.solution) {
    Table t(d4.size());
    for (std::size_t i = 0; i < t.size(); ++i)
      t[i] = r.solution->table()[var_of[i]];
    out.witness = FnArrow(d4, lang.domain, std::move(t));
  }
  return out;
}

enum class Verdict { InP, NPComplete, NPHard };

inline const char *verdict_name(Verdict v) {
  switch (v) {
  case Verdict::InP:
    return "InP";
  case Verdict::NPComplete:
    return "NPComplete";
  default:
    return "NPHard";
  }
}

struct Classification {
  Verdict verdict;
  std::optional<FnArrow> witness;
  SiggersSearch search;
};

/// CSP(L) is in P iff some Siggers operation is a polymorphism of L;
/// NP-complete otherwise.
inline Classification classify(const ConstraintLanguage &lang,
                               SiggersMode mode = SiggersMode::Auto,
                               std::uint64_t limit = default_enum_limit(), unsigned jobs = 1) {
  SiggersSearch s = find_siggers(lang, mode, limit, jobs);
  Classification c{s.witness ? Verdict::InP : Verdict::NPComplete, s.witness, s};
  return c;
}

} // namespace quantcsp
