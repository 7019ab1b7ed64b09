#pragma once

#include <initializer_list>
#include <ostream>
#include <span>
#include <string>
#include <variant>

#include "quantcsp/errors.hpp"
#include "quantcsp/rational.hpp"

namespace quantcsp {

/// The two quantales built in: the two-element chain (conjunction) and the
/// extended reals (reverse numeric order, extended addition).
enum class Quantale { Two, Rbar };

inline const char *quantale_name(Quantale q) {
  return q == Quantale::Two ? "2" : "Rbar";
}

/// Element of R u {+inf, -inf}. Comparison operators follow the usual
/// numeric order; the quantale order is the reverse and lives in QValue.
class ExtReal {
public:
  enum class Kind : unsigned char { NegInf, Finite, PosInf };

  ExtReal() = default;
  ExtReal(Rational v) : kind_(Kind::Finite), value_(std::move(v)) {}
  ExtReal(long long v) : kind_(Kind::Finite), value_(v) {}
  ExtReal(int v) : kind_(Kind::Finite), value_(v) {}

  static ExtReal pos_inf() { return ExtReal(Kind::PosInf); }
  static ExtReal neg_inf() { return ExtReal(Kind::NegInf); }

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::Finite; }
  bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  bool is_neg_inf() const { return kind_ == Kind::NegInf; }

  /// Only meaningful for finite values.
  const Rational &value() const {
    if (!is_finite())
      throw ContractViolation("value() of an infinite ExtReal");
    return value_;
  }

  friend bool operator==(const ExtReal &a, const ExtReal &b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }
  friend bool operator<(const ExtReal &a, const ExtReal &b) {
    if (a.kind_ != b.kind_)
      return a.kind_ < b.kind_;
    return a.kind_ == Kind::Finite && a.value_ < b.value_;
  }
  friend bool operator>(const ExtReal &a, const ExtReal &b) { return b < a; }
  friend bool operator<=(const ExtReal &a, const ExtReal &b) { return !(b < a); }
  friend bool operator>=(const ExtReal &a, const ExtReal &b) { return !(a < b); }

  std::string str() const {
    switch (kind_) {
    case Kind::NegInf:
      return "-inf";
    case Kind::PosInf:
      return "inf";
    default:
      return value_.str();
    }
  }

  friend std::ostream &operator<<(std::ostream &os, const ExtReal &x) {
    return os << x.str();
  }

private:
  explicit ExtReal(Kind k) : kind_(k) {}

  Kind kind_ = Kind::Finite;
  Rational value_;
};

/// beta + alpha, extended so that +inf absorbs everything (it is the quantale
/// bottom) and -inf absorbs finite values.
inline ExtReal ext_add(const ExtReal &beta, const ExtReal &alpha) {
  if (beta.is_pos_inf() || alpha.is_pos_inf())
    return ExtReal::pos_inf();
  if (beta.is_neg_inf() || alpha.is_neg_inf())
    return ExtReal::neg_inf();
  return ExtReal(beta.value() + alpha.value());
}

/// gamma - beta as the residual of ext_add: the numerically least x with
/// beta + x >= gamma.
inline ExtReal ext_sub(const ExtReal &gamma, const ExtReal &beta) {
  if (beta.is_pos_inf() || gamma.is_neg_inf())
    return ExtReal::neg_inf();
  if (gamma.is_pos_inf() || beta.is_neg_inf())
    return ExtReal::pos_inf();
  return ExtReal(gamma.value() - beta.value());
}

/// An element of one of the built-in quantales.
class QValue {
public:
  QValue() : v_(false) {}
  QValue(bool b) : v_(b) {}
  QValue(ExtReal x) : v_(std::move(x)) {}

  static QValue real(long long v) { return QValue(ExtReal(v)); }
  static QValue real(Rational v) { return QValue(ExtReal(std::move(v))); }

  Quantale quantale() const {
    return std::holds_alternative<bool>(v_) ? Quantale::Two : Quantale::Rbar;
  }
  bool as_bool() const {
    if (auto *b = std::get_if<bool>(&v_))
      return *b;
    throw ContractViolation("QValue is not a truth value");
  }
  const ExtReal &as_real() const {
    if (auto *x = std::get_if<ExtReal>(&v_))
      return *x;
    throw ContractViolation("QValue is not an extended real");
  }

  friend bool operator==(const QValue &a, const QValue &b) { return a.v_ == b.v_; }

  std::string str() const {
    if (auto *b = std::get_if<bool>(&v_))
      return *b ? "1" : "0";
    return std::get<ExtReal>(v_).str();
  }
  friend std::ostream &operator<<(std::ostream &os, const QValue &x) {
    return os << x.str();
  }

private:
  std::variant<bool, ExtReal> v_;
};

inline QValue bottom(Quantale q) {
  return q == Quantale::Two ? QValue(false) : QValue(ExtReal::pos_inf());
}
inline QValue top(Quantale q) {
  return q == Quantale::Two ? QValue(true) : QValue(ExtReal::neg_inf());
}
inline QValue unit(Quantale q) {
  return q == Quantale::Two ? QValue(true) : QValue(ExtReal(0));
}

namespace detail {
inline void same_quantale(const QValue &a, const QValue &b) {
  if (a.quantale() != b.quantale())
    throw ContractViolation("mixing values of different quantales");
}
} // namespace detail

inline bool is_bottom(const QValue &a) { return a == bottom(a.quantale()); }

/// Quantale order: false <= true in 2, numeric >= in Rbar.
inline bool leq(const QValue &a, const QValue &b) {
  detail::same_quantale(a, b);
  if (a.quantale() == Quantale::Two)
    return !a.as_bool() || b.as_bool();
  return a.as_real() >= b.as_real();
}

inline QValue tensor(const QValue &a, const QValue &b) {
  detail::same_quantale(a, b);
  if (a.quantale() == Quantale::Two)
    return QValue(a.as_bool() && b.as_bool());
  return QValue(ext_add(b.as_real(), a.as_real()));
}

/// Residual a / b: the greatest x with b (x) x <= a. Both built-in quantales
/// are commutative, so right extension and right lifting coincide.
inline QValue residual(const QValue &a, const QValue &b) {
  detail::same_quantale(a, b);
  if (a.quantale() == Quantale::Two)
    return QValue(!b.as_bool() || a.as_bool());
  return QValue(ext_sub(a.as_real(), b.as_real()));
}

inline QValue join2(const QValue &a, const QValue &b) { return leq(a, b) ? b : a; }
inline QValue meet2(const QValue &a, const QValue &b) { return leq(a, b) ? a : b; }

inline QValue join(Quantale q, std::span<const QValue> values) {
  QValue acc = bottom(q);
  for (const auto &v : values)
    acc = join2(acc, v);
  return acc;
}
inline QValue meet(Quantale q, std::span<const QValue> values) {
  QValue acc = top(q);
  for (const auto &v : values)
    acc = meet2(acc, v);
  return acc;
}
inline QValue join(Quantale q, std::initializer_list<QValue> values) {
  return join(q, std::span<const QValue>(values.begin(), values.size()));
}
inline QValue meet(Quantale q, std::initializer_list<QValue> values) {
  return meet(q, std::span<const QValue>(values.begin(), values.size()));
}

} // namespace quantcsp
