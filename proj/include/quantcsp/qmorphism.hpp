#pragma once

#include <algorithm>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "quantcsp/finset.hpp"
#include "quantcsp/quantale.hpp"

namespace quantcsp {

/// A morphism A -|-> B of QFinSet: a map Hom(A, B) -> Q, stored sparsely.
/// Keys absent from the support have value bottom; the support never stores
/// bottom.
class QMorphism {
public:
  using Support = std::unordered_map<Table, QValue, TableHash>;

  QMorphism(Quantale q, FiniteSet dom, FiniteSet cod)
      : q_(q), dom_(std::move(dom)), cod_(std::move(cod)) {}

  /// {f}: e at f, bottom elsewhere.
  static QMorphism singleton(Quantale q, const FnArrow &f) {
    return singleton_weighted(f, unit(q));
  }

  /// {f}^alpha
  static QMorphism singleton_weighted(const FnArrow &f, const QValue &alpha) {
    QMorphism m(alpha.quantale(), f.dom(), f.cod());
    m.set(f.table(), alpha);
    return m;
  }

  /// The 2-valued morphism given by a set of functions.
  static QMorphism from_set(const FiniteSet &dom, const FiniteSet &cod,
                            std::span<const FnArrow> fs) {
    QMorphism m(Quantale::Two, dom, cod);
    for (const auto &f : fs)
      m.set(m.checked_key(f), QValue(true));
    return m;
  }

  /// Constant-top morphism; materialises the whole hom set.
  static QMorphism top_morphism(Quantale q, const FiniteSet &dom, const FiniteSet &cod,
                                std::uint64_t limit = default_enum_limit()) {
    check_guard(hom_size(dom, cod), limit);
    QMorphism m(q, dom, cod);
    QValue t = top(q);
    for_each_table(dom.size(), cod.size(), [&](const Table &k) { m.support_.emplace(k, t); });
    return m;
  }

  Quantale quantale() const { return q_; }
  const FiniteSet &dom() const { return dom_; }
  const FiniteSet &cod() const { return cod_; }
  const Support &support() const { return support_; }
  std::size_t support_size() const { return support_.size(); }

  QValue value(const Table &key) const {
    auto it = support_.find(key);
    return it == support_.end() ? bottom(q_) : it->second;
  }
  QValue value(const FnArrow &f) const { return value(checked_key(f)); }
  bool contains(const FnArrow &f) const { return support_.count(checked_key(f)) > 0; }

  /// Sets a value, keeping the support canonical.
  void set(const Table &key, const QValue &v) {
    if (v.quantale() != q_)
      throw ContractViolation("value from a different quantale");
    if (key.size() != dom_.size())
      throw DomainMismatch("key length does not match the domain");
    if (is_bottom(v))
      support_.erase(key);
    else
      support_.insert_or_assign(key, v);
  }
  void set(const FnArrow &f, const QValue &v) { set(checked_key(f), v); }

  /// Support entries sorted by key, for deterministic iteration and output.
  std::vector<std::pair<Table, QValue>> entries() const {
    std::vector<std::pair<Table, QValue>> out(support_.begin(), support_.end());
    std::sort(out.begin(), out.end(),
              [](const auto &a, const auto &b) { return a.first < b.first; });
    return out;
  }

  /// Support keys as arrows, sorted.
  std::vector<FnArrow> arrows() const {
    std::vector<FnArrow> out;
    for (auto &[k, v] : entries())
      out.emplace_back(dom_, cod_, k);
    return out;
  }

  friend bool operator==(const QMorphism &a, const QMorphism &b) {
    return a.q_ == b.q_ && a.dom_ == b.dom_ && a.cod_ == b.cod_ && a.support_ == b.support_;
  }

private:
  const Table &checked_key(const FnArrow &f) const {
    if (!(f.dom() == dom_) || !(f.cod() == cod_))
      throw DomainMismatch("arrow is not in the hom set of this morphism");
    return f.table();
  }

  Quantale q_;
  FiniteSet dom_;
  FiniteSet cod_;
  Support support_;
};

namespace detail {
inline void same_quantale(const QMorphism &a, const QMorphism &b) {
  if (a.quantale() != b.quantale())
    throw ContractViolation("mixing morphisms over different quantales");
}
inline void parallel(const QMorphism &a, const QMorphism &b) {
  same_quantale(a, b);
  if (!(a.dom() == b.dom()) || !(a.cod() == b.cod()))
    throw DomainMismatch("morphisms are not parallel");
}
} // namespace detail

/// psi . phi: (psi . phi)(h) = join of psi(g) (x) phi(f) over g . f = h.
/// Cost is proportional to the product of the supports.
inline QMorphism compose(const QMorphism &psi, const QMorphism &phi) {
  detail::same_quantale(psi, phi);
  if (!(phi.cod() == psi.dom()))
    throw DomainMismatch("cannot compose morphisms: codomain/domain mismatch");
  QMorphism out(psi.quantale(), phi.dom(), psi.cod());
  QMorphism::Support acc;
  for (const auto &[f, a] : phi.support())
    for (const auto &[g, b] : psi.support()) {
      QValue v = tensor(b, a);
      auto [it, fresh] = acc.try_emplace(compose_tables(g, f), v);
      if (!fresh)
        it->second = join2(it->second, v);
    }
  for (auto &[k, v] : acc)
    out.set(k, v);
  return out;
}

/// (theta / phi)(g) for a single g : B -> C, where theta : A -|-> C and
/// phi : A -|-> B. Arrows outside supp(phi) contribute top, so only the
/// support is visited.
inline QValue eval_right_extension_at(const QMorphism &theta, const QMorphism &phi,
                                      const Table &g) {
  detail::same_quantale(theta, phi);
  QValue acc = top(theta.quantale());
  for (const auto &[f, a] : phi.support()) {
    acc = meet2(acc, residual(theta.value(compose_tables(g, f)), a));
    if (is_bottom(acc))
      break;
  }
  return acc;
}

inline QValue eval_right_extension_at(const QMorphism &theta, const QMorphism &phi,
                                      const FnArrow &g) {
  if (!(g.dom() == phi.cod()) || !(g.cod() == theta.cod()))
    throw DomainMismatch("point is not in Hom(cod(phi), cod(theta))");
  return eval_right_extension_at(theta, phi, g.table());
}

/// (psi \ theta)(f) for a single f : A -> B, where psi : B -|-> C and
/// theta : A -|-> C.
inline QValue eval_right_lifting_at(const QMorphism &psi, const QMorphism &theta,
                                    const Table &f) {
  detail::same_quantale(psi, theta);
  QValue acc = top(theta.quantale());
  for (const auto &[g, b] : psi.support()) {
    acc = meet2(acc, residual(theta.value(compose_tables(g, f)), b));
    if (is_bottom(acc))
      break;
  }
  return acc;
}

inline QValue eval_right_lifting_at(const QMorphism &psi, const QMorphism &theta,
                                    const FnArrow &f) {
  if (!(f.dom() == theta.dom()) || !(f.cod() == psi.dom()))
    throw DomainMismatch("point is not in Hom(dom(theta), dom(psi))");
  return eval_right_lifting_at(psi, theta, f.table());
}

/// theta / phi : B -|-> C, materialised over Hom(B, C).
inline QMorphism right_extension(const QMorphism &theta, const QMorphism &phi,
                                 std::uint64_t limit = default_enum_limit()) {
  detail::same_quantale(theta, phi);
  if (!(theta.dom() == phi.dom()))
    throw DomainMismatch("right extension needs dom(theta) = dom(phi)");
  check_guard(hom_size(phi.cod(), theta.cod()), limit);
  QMorphism out(theta.quantale(), phi.cod(), theta.cod());
  for_each_table(phi.cod().size(), theta.cod().size(),
                 [&](const Table &g) { out.set(g, eval_right_extension_at(theta, phi, g)); });
  return out;
}

/// psi \ theta : A -|-> B, materialised over Hom(A, B).
inline QMorphism right_lifting(const QMorphism &psi, const QMorphism &theta,
                               std::uint64_t limit = default_enum_limit()) {
  detail::same_quantale(psi, theta);
  if (!(psi.cod() == theta.cod()))
    throw DomainMismatch("right lifting needs cod(psi) = cod(theta)");
  check_guard(hom_size(theta.dom(), psi.dom()), limit);
  QMorphism out(theta.quantale(), theta.dom(), psi.dom());
  for_each_table(theta.dom().size(), psi.dom().size(),
                 [&](const Table &f) { out.set(f, eval_right_lifting_at(psi, theta, f)); });
  return out;
}

/// Pointwise order.
inline bool leq(const QMorphism &phi, const QMorphism &psi) {
  detail::parallel(phi, psi);
  for (const auto &[k, v] : phi.support())
    if (!leq(v, psi.value(k)))
      return false;
  return true;
}

/// Pointwise join; sparse.
inline QMorphism join(Quantale q, const FiniteSet &dom, const FiniteSet &cod,
                      std::span<const QMorphism> ms) {
  QMorphism out(q, dom, cod);
  for (const auto &m : ms) {
    detail::parallel(out, m);
    for (const auto &[k, v] : m.support())
      out.set(k, join2(out.value(k), v));
  }
  return out;
}

/// Pointwise meet. The empty meet is the constant-top morphism and is
/// materialised under the guard; a nonempty meet is sparse.
inline QMorphism meet(Quantale q, const FiniteSet &dom, const FiniteSet &cod,
                      std::span<const QMorphism> ms,
                      std::uint64_t limit = default_enum_limit()) {
  if (ms.empty())
    return QMorphism::top_morphism(q, dom, cod, limit);
  QMorphism out(q, dom, cod);
  detail::parallel(out, ms.front());
  for (const auto &[k, v] : ms.front().support()) {
    QValue acc = v;
    for (std::size_t i = 1; i < ms.size() && !is_bottom(acc); ++i)
      acc = meet2(acc, ms[i].value(k));
    out.set(k, acc);
  }
  for (std::size_t i = 1; i < ms.size(); ++i)
    detail::parallel(out, ms[i]);
  return out;
}

inline QMorphism join(const QMorphism &a, const QMorphism &b) {
  QMorphism ms[] = {a, b};
  return join(a.quantale(), a.dom(), a.cod(), ms);
}
inline QMorphism meet(const QMorphism &a, const QMorphism &b) {
  QMorphism ms[] = {a, b};
  return meet(a.quantale(), a.dom(), a.cod(), ms);
}

} // namespace quantcsp
