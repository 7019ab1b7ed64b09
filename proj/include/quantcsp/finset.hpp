#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <limits>
#include <type_traits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "quantcsp/errors.hpp"
#include "quantcsp/rational.hpp"

namespace quantcsp {

/// Codomain indices of a function, one per domain element.
using Table = std::vector<std::uint32_t>;

struct TableHash {
  std::size_t operator()(const Table &t) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (auto v : t) {
      h ^= v + 0x9e3779b97f4a7c15ull;
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

class FiniteSet;

namespace detail {
struct SetData {
  std::vector<std::string> labels;
  std::unordered_map<std::string, std::uint32_t> index;
  // Set when this set is the canonical power base^exponent.
  std::shared_ptr<const SetData> power_base;
  std::size_t power_exponent = 0;
};
} // namespace detail

/// A finite set of distinct string labels. The label order is the canonical
/// iteration order. Copies share storage.
class FiniteSet {
public:
  FiniteSet() : data_(std::make_shared<detail::SetData>()) {}

  explicit FiniteSet(std::vector<std::string> labels) {
    auto d = std::make_shared<detail::SetData>();
    d->labels = std::move(labels);
    for (std::uint32_t i = 0; i < d->labels.size(); ++i)
      if (!d->index.emplace(d->labels[i], i).second)
        throw InputError("duplicate set element '" + d->labels[i] + "'");
    data_ = std::move(d);
  }

  /// {0, ..., n-1}
  static FiniteSet range(std::size_t n) {
    std::vector<std::string> l;
    l.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
      l.push_back(std::to_string(i));
    return FiniteSet(std::move(l));
  }

  /// [k] = {1, ..., k}, the arity object.
  static FiniteSet ordinal(std::size_t k) {
    std::vector<std::string> l;
    l.reserve(k);
    for (std::size_t i = 1; i <= k; ++i)
      l.push_back(std::to_string(i));
    return FiniteSet(std::move(l));
  }

  std::size_t size() const { return data_->labels.size(); }
  bool empty() const { return size() == 0; }
  const std::string &label(std::size_t i) const { return data_->labels.at(i); }
  const std::vector<std::string> &labels() const { return data_->labels; }

  std::optional<std::uint32_t> find(const std::string &label) const {
    auto it = data_->index.find(label);
    if (it == data_->index.end())
      return std::nullopt;
    return it->second;
  }
  std::uint32_t index_of(const std::string &label) const {
    if (auto i = find(label))
      return *i;
    throw InputError("'" + label + "' is not an element of the set");
  }

  /// Base and exponent when this set was built by power().
  std::optional<std::pair<FiniteSet, std::size_t>> power_info() const {
    if (!data_->power_base)
      return std::nullopt;
    return std::make_pair(FiniteSet(data_->power_base), data_->power_exponent);
  }

  friend bool operator==(const FiniteSet &a, const FiniteSet &b) {
    return a.data_ == b.data_ || a.data_->labels == b.data_->labels;
  }

private:
  explicit FiniteSet(std::shared_ptr<const detail::SetData> d) : data_(std::move(d)) {}
  friend FiniteSet power(const FiniteSet &a, std::size_t n);

  std::shared_ptr<const detail::SetData> data_;
};

/// |B|^|A|
inline BigInt hom_size(const FiniteSet &a, const FiniteSet &b) {
  return boost::multiprecision::pow(BigInt(b.size()), static_cast<unsigned>(a.size()));
}

inline void check_guard(const BigInt &required, std::uint64_t limit) {
  if (required > limit)
    throw SizeExceeded(required, BigInt(limit));
}

/// Index of the tuple (a_1, ..., a_n) in the canonical power: lexicographic,
/// first component most significant.
inline std::uint32_t encode_tuple(std::span<const std::uint32_t> components,
                                  std::size_t base) {
  std::uint64_t idx = 0;
  for (auto c : components)
    idx = idx * base + c;
  return static_cast<std::uint32_t>(idx);
}

inline Table decode_tuple(std::uint64_t idx, std::size_t base, std::size_t n) {
  Table t(n);
  for (std::size_t i = n; i-- > 0;) {
    t[i] = static_cast<std::uint32_t>(idx % base);
    idx /= base;
  }
  return t;
}

/// The canonical power A^n, elements in lexicographic order, labelled
/// "(a1,...,an)".
inline FiniteSet power(const FiniteSet &a, std::size_t n) {
  BigInt sz = boost::multiprecision::pow(BigInt(a.size()), static_cast<unsigned>(n));
  if (sz > std::numeric_limits<std::uint32_t>::max())
    throw SizeExceeded(sz, BigInt(std::numeric_limits<std::uint32_t>::max()));
  auto d = std::make_shared<detail::SetData>();
  auto count = static_cast<std::uint64_t>(sz);
  d->labels.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    Table t = decode_tuple(i, a.size(), n);
    std::string l = "(";
    for (std::size_t j = 0; j < n; ++j) {
      if (j)
        l += ",";
      l += a.label(t[j]);
    }
    l += ")";
    d->index.emplace(l, static_cast<std::uint32_t>(i));
    d->labels.push_back(std::move(l));
  }
  d->power_base = a.data_;
  d->power_exponent = n;
  return FiniteSet(std::shared_ptr<const detail::SetData>(std::move(d)));
}

/// A total function between finite sets stored as a lookup table.
class FnArrow {
public:
  FnArrow(FiniteSet dom, FiniteSet cod, Table table)
      : dom_(std::move(dom)), cod_(std::move(cod)), table_(std::move(table)) {
    if (table_.size() != dom_.size())
      throw DomainMismatch("function table has " + std::to_string(table_.size()) +
                           " entries for a domain of size " + std::to_string(dom_.size()));
    for (auto v : table_)
      if (v >= cod_.size())
        throw DomainMismatch("function table entry " + std::to_string(v) +
                             " outside codomain of size " + std::to_string(cod_.size()));
  }

  /// Builds from codomain labels aligned with the domain order.
  static FnArrow from_labels(FiniteSet dom, FiniteSet cod,
                             const std::vector<std::string> &values) {
    if (values.size() != dom.size())
      throw InputError("function has " + std::to_string(values.size()) +
                       " values for a domain of size " + std::to_string(dom.size()));
    Table t;
    t.reserve(values.size());
    for (const auto &v : values)
      t.push_back(cod.index_of(v));
    return FnArrow(std::move(dom), std::move(cod), std::move(t));
  }

  static FnArrow identity(const FiniteSet &a) {
    Table t(a.size());
    for (std::uint32_t i = 0; i < t.size(); ++i)
      t[i] = i;
    return FnArrow(a, a, std::move(t));
  }

  /// The unique map into the terminal set [1].
  static FnArrow to_terminal(const FiniteSet &a) {
    return FnArrow(a, FiniteSet::ordinal(1), Table(a.size(), 0));
  }

  const FiniteSet &dom() const { return dom_; }
  const FiniteSet &cod() const { return cod_; }
  const Table &table() const { return table_; }

  std::uint32_t operator()(std::size_t i) const { return table_.at(i); }
  const std::string &apply(const std::string &label) const {
    return cod_.label(table_[dom_.index_of(label)]);
  }

  friend bool operator==(const FnArrow &a, const FnArrow &b) {
    return a.table_ == b.table_ && a.dom_ == b.dom_ && a.cod_ == b.cod_;
  }

private:
  FiniteSet dom_;
  FiniteSet cod_;
  Table table_;
};

struct FnArrowHash {
  std::size_t operator()(const FnArrow &f) const noexcept { return TableHash{}(f.table()); }
};

/// Table of g . f, no checks.
inline Table compose_tables(const Table &g, const Table &f) {
  Table h(f.size());
  for (std::size_t i = 0; i < f.size(); ++i)
    h[i] = g[f[i]];
  return h;
}

/// g . f
inline FnArrow compose(const FnArrow &g, const FnArrow &f) {
  if (!(f.cod() == g.dom()))
    throw DomainMismatch("cannot compose: codomain of the first arrow is not the "
                         "domain of the second");
  return FnArrow(f.dom(), g.cod(), compose_tables(g.table(), f.table()));
}

/// pi_i : A^n -> A, with 1 <= i <= n.
inline FnArrow projection(const FiniteSet &a, std::size_t n, std::size_t i) {
  if (i < 1 || i > n)
    throw ContractViolation("projection index " + std::to_string(i) +
                            " out of range 1.." + std::to_string(n));
  FiniteSet pw = power(a, n);
  Table t(pw.size());
  for (std::uint64_t idx = 0; idx < t.size(); ++idx)
    t[idx] = decode_tuple(idx, a.size(), n)[i - 1];
  return FnArrow(pw, a, std::move(t));
}

/// <f_1, ..., f_m> : X -> A^m for f_i : X -> A.
inline FnArrow tupling(std::span<const FnArrow> fs) {
  if (fs.empty())
    throw ContractViolation("tupling of an empty family needs explicit domain and codomain");
  const FiniteSet &x = fs.front().dom();
  const FiniteSet &a = fs.front().cod();
  for (const auto &f : fs)
    if (!(f.dom() == x) || !(f.cod() == a))
      throw DomainMismatch("tupling requires a common domain and codomain");
  FiniteSet pw = power(a, fs.size());
  Table t(x.size());
  Table comp(fs.size());
  for (std::size_t e = 0; e < x.size(); ++e) {
    for (std::size_t j = 0; j < fs.size(); ++j)
      comp[j] = fs[j].table()[e];
    t[e] = encode_tuple(comp, a.size());
  }
  return FnArrow(x, pw, std::move(t));
}

inline FnArrow tupling(std::initializer_list<FnArrow> fs) {
  return tupling(std::span<const FnArrow>(fs.begin(), fs.size()));
}

/// Calls fn(table) for every function A -> B in lexicographic table order.
/// Returns early when fn returns false. No size guard.
template <class Fn>
void for_each_table(std::size_t dom_size, std::size_t cod_size, Fn &&fn) {
  if (cod_size == 0 && dom_size > 0)
    return;
  Table t(dom_size, 0);
  while (true) {
    if constexpr (std::is_same_v<std::invoke_result_t<Fn &, const Table &>, bool>) {
      if (!fn(static_cast<const Table &>(t)))
        return;
    } else {
      fn(static_cast<const Table &>(t));
    }
    std::size_t i = dom_size;
    while (i > 0) {
      --i;
      if (++t[i] < cod_size)
        break;
      t[i] = 0;
      if (i == 0)
        return;
    }
    if (dom_size == 0)
      return;
  }
}

/// All functions A -> B in lexicographic table order.
inline std::vector<FnArrow> enumerate_hom(const FiniteSet &a, const FiniteSet &b,
                                          std::uint64_t limit = default_enum_limit()) {
  check_guard(hom_size(a, b), limit);
  std::vector<FnArrow> out;
  for_each_table(a.size(), b.size(), [&](const Table &t) { out.emplace_back(a, b, t); });
  return out;
}

} // namespace quantcsp
