#include <gtest/gtest.h>

#include "support/oracles.hpp"

using namespace quantcsp;

namespace {

const ExtReal kInf = ExtReal::pos_inf();
const ExtReal kNegInf = ExtReal::neg_inf();

QValue r(long long v) { return QValue(ExtReal(v)); }
QValue r(ExtReal v) { return QValue(std::move(v)); }

std::vector<ExtReal> grid() {
  std::vector<ExtReal> g{kInf, kNegInf};
  for (int p = -6; p <= 6; ++p)
    for (int q : {1, 2, 3})
      g.emplace_back(make_rational(p, q));
  std::sort(g.begin(), g.end());
  g.erase(std::unique(g.begin(), g.end()), g.end());
  return g;
}

} // namespace

TEST(TableOne, AdditionCells) {
  ExtReal t(3), s(-5);
  // rows beta, columns alpha: inf, s, -inf
  EXPECT_EQ(ext_add(kInf, kInf), kInf);
  EXPECT_EQ(ext_add(kInf, s), kInf);
  EXPECT_EQ(ext_add(kInf, kNegInf), kInf);
  EXPECT_EQ(ext_add(t, kInf), kInf);
  EXPECT_EQ(ext_add(t, s), ExtReal(-2));
  EXPECT_EQ(ext_add(t, kNegInf), kNegInf);
  EXPECT_EQ(ext_add(kNegInf, kInf), kInf);
  EXPECT_EQ(ext_add(kNegInf, s), kNegInf);
  EXPECT_EQ(ext_add(kNegInf, kNegInf), kNegInf);
}

TEST(TableOne, SubtractionCells) {
  ExtReal u(7), t(2);
  // rows gamma, columns beta: inf, t, -inf
  EXPECT_EQ(ext_sub(kInf, kInf), kNegInf);
  EXPECT_EQ(ext_sub(kInf, t), kInf);
  EXPECT_EQ(ext_sub(kInf, kNegInf), kInf);
  EXPECT_EQ(ext_sub(u, kInf), kNegInf);
  EXPECT_EQ(ext_sub(u, t), ExtReal(5));
  EXPECT_EQ(ext_sub(u, kNegInf), kInf);
  EXPECT_EQ(ext_sub(kNegInf, kInf), kNegInf);
  EXPECT_EQ(ext_sub(kNegInf, t), kNegInf);
  EXPECT_EQ(ext_sub(kNegInf, kNegInf), kNegInf);
}

TEST(TableOne, AgreesWithReferenceOnGrid) {
  for (const auto &a : grid())
    for (const auto &b : grid()) {
      EXPECT_EQ(ext_add(a, b), oracle::plus(a, b)) << a.str() << " + " << b.str();
      EXPECT_EQ(ext_sub(a, b), oracle::minus(a, b)) << a.str() << " - " << b.str();
    }
}

TEST(Quantale, BoundsAndUnit) {
  EXPECT_EQ(bottom(Quantale::Rbar), r(kInf));
  EXPECT_EQ(top(Quantale::Rbar), r(kNegInf));
  EXPECT_EQ(unit(Quantale::Rbar), r(0));
  EXPECT_EQ(bottom(Quantale::Two), QValue(false));
  EXPECT_EQ(top(Quantale::Two), QValue(true));
  EXPECT_EQ(unit(Quantale::Two), QValue(true));
}

TEST(Quantale, TensorExamples) {
  EXPECT_EQ(tensor(r(kNegInf), r(kInf)), r(kInf));
  EXPECT_EQ(tensor(r(kNegInf), r(4)), r(kNegInf));
  EXPECT_EQ(tensor(r(3), r(5)), r(8));
  EXPECT_EQ(tensor(QValue(true), QValue(false)), QValue(false));
}

TEST(Quantale, ResidualExamples) {
  EXPECT_EQ(residual(r(kInf), r(kInf)), r(kNegInf));
  EXPECT_EQ(residual(r(9), r(4)), r(5));
  EXPECT_EQ(residual(QValue(false), QValue(true)), QValue(false));
  EXPECT_EQ(residual(QValue(false), QValue(false)), QValue(true));
  EXPECT_EQ(residual(QValue(true), QValue(false)), QValue(true));
}

TEST(Quantale, JoinMeet) {
  std::vector<QValue> xs{r(3), r(5)};
  EXPECT_EQ(join(Quantale::Rbar, xs), r(3));
  EXPECT_EQ(meet(Quantale::Rbar, xs), r(5));
  EXPECT_EQ(meet(Quantale::Rbar, std::span<const QValue>{}), r(kNegInf));
  EXPECT_EQ(join(Quantale::Rbar, std::span<const QValue>{}), r(kInf));
  EXPECT_EQ(join(Quantale::Two, {QValue(false), QValue(true)}), QValue(true));
  EXPECT_EQ(meet(Quantale::Two, {QValue(false), QValue(true)}), QValue(false));
}

TEST(Quantale, OrderIsReversedNumericOnRbar) {
  EXPECT_TRUE(leq(r(kInf), r(-100)));
  EXPECT_TRUE(leq(r(5), r(3)));
  EXPECT_FALSE(leq(r(3), r(5)));
  EXPECT_TRUE(leq(r(3), r(kNegInf)));
}

TEST(Quantale, MixingQuantalesIsAContractViolation) {
  EXPECT_THROW(tensor(QValue(true), r(1)), ContractViolation);
  EXPECT_THROW(leq(QValue(true), r(1)), ContractViolation);
  EXPECT_THROW(QValue(true).as_real(), ContractViolation);
}

TEST(Quantale, ResiduationAdjointness) {
  auto check = [](const std::vector<QValue> &vals) {
    for (const auto &a : vals)
      for (const auto &b : vals)
        for (const auto &x : vals)
          ASSERT_EQ(leq(tensor(b, x), a), leq(x, residual(a, b)))
              << a.str() << " " << b.str() << " " << x.str();
  };
  check({QValue(false), QValue(true)});
  std::vector<QValue> rv;
  for (const auto &g : grid())
    rv.emplace_back(g);
  check(rv);
}

TEST(Quantale, MonoidLaws) {
  std::vector<QValue> rv;
  for (const auto &g : grid())
    rv.emplace_back(g);
  for (const auto &a : rv) {
    EXPECT_EQ(tensor(a, unit(Quantale::Rbar)), a);
    EXPECT_EQ(tensor(unit(Quantale::Rbar), a), a);
    for (const auto &b : rv) {
      EXPECT_EQ(tensor(a, b), tensor(b, a));
      for (const auto &c : {rv[0], rv[3], rv[rv.size() / 2], rv.back()})
        EXPECT_EQ(tensor(tensor(a, b), c), tensor(a, tensor(b, c)));
    }
  }
}

TEST(Quantale, TensorPreservesJoins) {
  std::vector<QValue> rv;
  for (const auto &g : grid())
    rv.emplace_back(g);
  for (const auto &a : rv)
    for (std::size_t i = 0; i + 2 < rv.size(); i += 3) {
      std::vector<QValue> family{rv[i], rv[i + 1], rv[i + 2]};
      std::vector<QValue> mapped;
      for (const auto &x : family)
        mapped.push_back(tensor(a, x));
      EXPECT_EQ(tensor(a, join(Quantale::Rbar, family)), join(Quantale::Rbar, mapped));
    }
  // the empty join goes to bottom
  for (const auto &a : rv)
    EXPECT_EQ(tensor(a, join(Quantale::Rbar, std::span<const QValue>{})), bottom(Quantale::Rbar));
}

TEST(ExtReal, Rendering) {
  EXPECT_EQ(ExtReal(make_rational(3, 2)).str(), "3/2");
  EXPECT_EQ(kInf.str(), "inf");
  EXPECT_EQ(kNegInf.str(), "-inf");
  EXPECT_EQ(make_rational(6, -4), make_rational(-3, 2));
}

TEST(Rational, Parsing) {
  EXPECT_EQ(parse_rational("7"), Rational(7));
  EXPECT_EQ(parse_rational("-3/4"), make_rational(-3, 4));
  EXPECT_EQ(parse_rational("2.5"), make_rational(5, 2));
  EXPECT_EQ(parse_rational("-0.125"), make_rational(-1, 8));
  EXPECT_THROW(parse_rational("1/0"), std::exception);
  EXPECT_THROW(parse_rational("x"), std::exception);
  std::string s;
  EXPECT_TRUE(to_exact_decimal(make_rational(-5, 4), s));
  EXPECT_EQ(s, "-1.25");
  EXPECT_FALSE(to_exact_decimal(make_rational(1, 3), s));
}
