#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace quantcsp;

namespace {

QValue r(long long v) { return QValue(ExtReal(v)); }

} // namespace

TEST(QMorphism, SingletonsAndSparseness) {
  FiniteSet a = FiniteSet::range(2);
  FnArrow id = FnArrow::identity(a);
  QMorphism e = QMorphism::singleton(Quantale::Rbar, id);
  EXPECT_EQ(QMorphism::singleton_weighted(id, r(0)), e);
  QMorphism empty = QMorphism::singleton_weighted(id, bottom(Quantale::Rbar));
  EXPECT_EQ(empty.support_size(), 0u);
  gen::Rng rng(3);
  for (int i = 0; i < 50; ++i) {
    QMorphism m = gen::morphism(rng, Quantale::Rbar, a, a);
    EXPECT_EQ(compose(m, e), m);
    EXPECT_EQ(compose(e, m), m);
  }
}

TEST(QMorphism, PowersetComposition) {
  FiniteSet a = FiniteSet::range(2), b = FiniteSet::range(2);
  FnArrow f0(a, b, {0, 0}), f1(a, b, {0, 1});
  FnArrow g0(b, a, {1, 0}), g1(b, a, {1, 1});
  std::vector<FnArrow> phis{f0, f1}, psis{g0, g1};
  QMorphism phi = QMorphism::from_set(a, b, phis), psi = QMorphism::from_set(b, a, psis);
  QMorphism c = compose(psi, phi);
  std::set<Table> expected;
  for (const auto &f : phis)
    for (const auto &g : psis)
      expected.insert(compose(g, f).table());
  std::set<Table> got;
  for (const auto &[k, v] : c.entries())
    got.insert(k);
  EXPECT_EQ(got, expected);
}

TEST(QMorphism, RbarSingletonTensor) {
  FiniteSet a = FiniteSet::range(2);
  FnArrow f(a, a, {1, 0}), g(a, a, {0, 0});
  QMorphism c = compose(QMorphism::singleton_weighted(g, r(3)), QMorphism::singleton_weighted(f, r(2)));
  EXPECT_EQ(c, QMorphism::singleton_weighted(compose(g, f), r(5)));
  EXPECT_EQ(compose(c, QMorphism(Quantale::Rbar, a, a)).support_size(), 0u);
}

TEST(QMorphism, ExtensionOfDisequality) {
  FiniteSet d = FiniteSet::range(2), v({"v1", "v2"});
  QMorphism neq = neq_relation(d);
  FnArrow x = FnArrow::from_labels(FiniteSet::ordinal(2), v, {"v1", "v2"});
  QMorphism ext = right_extension(neq, QMorphism::singleton(Quantale::Two, x));
  std::vector<Table> keys;
  for (const auto &[k, val] : ext.entries())
    keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<Table>{{0, 1}, {1, 0}}));
}

TEST(QMorphism, ExtensionAlongIdentity) {
  gen::Rng rng(5);
  for (Quantale q : {Quantale::Two, Quantale::Rbar})
    for (int i = 0; i < 50; ++i) {
      FiniteSet a = gen::small_set(rng), c = gen::small_set(rng);
      QMorphism theta = gen::morphism(rng, q, a, c);
      QMorphism id = QMorphism::singleton(q, FnArrow::identity(a));
      EXPECT_EQ(right_extension(theta, id), theta);
    }
}

TEST(QMorphism, RbarExtensionAtPoint) {
  // Hom([1], {0,1}) has two elements; theta = {h}^5 with h = g . f
  FiniteSet one = FiniteSet::ordinal(1), b = FiniteSet::range(2);
  FnArrow f(one, b, {0}), g(b, b, {1, 1});
  FnArrow h = compose(g, f);
  QMorphism theta = QMorphism::singleton_weighted(h, r(5));
  QMorphism phi = QMorphism::singleton_weighted(f, r(2));
  EXPECT_EQ(eval_right_extension_at(theta, phi, g), r(3));
  // the other element f' of Hom([1], {0,1}) has phi(f') = inf and contributes top
  QMorphism ext = right_extension(theta, phi);
  EXPECT_EQ(ext.value(g), r(3));
  FnArrow g2(b, b, {0, 0});
  EXPECT_EQ(ext.value(g2), QValue(ExtReal::pos_inf()));
}

TEST(QMorphism, EmptyPhiGivesTop) {
  FiniteSet a = FiniteSet::range(2);
  QMorphism theta(Quantale::Rbar, a, a), phi(Quantale::Rbar, a, a);
  for (const auto &g : enumerate_hom(a, a, 100))
    EXPECT_EQ(eval_right_extension_at(theta, phi, g), top(Quantale::Rbar));
}

TEST(QMorphism, OrderJoinMeet) {
  FiniteSet a = FiniteSet::range(2);
  FnArrow f(a, a, {0, 1});
  QMorphism x = QMorphism::singleton_weighted(f, r(3)), y = QMorphism::singleton_weighted(f, r(5));
  EXPECT_TRUE(leq(x, x));
  EXPECT_EQ(join(x, y), x);
  EXPECT_EQ(meet(x, y), y);
  std::vector<QMorphism> none;
  EXPECT_EQ(meet(Quantale::Two, a, a, none).support_size(), 4u);
  EXPECT_EQ(join(Quantale::Two, a, a, none).support_size(), 0u);
}

TEST(QMorphism, GuardOnMaterialisation) {
  FiniteSet big = FiniteSet::range(10);
  QMorphism theta(Quantale::Two, big, big), phi(Quantale::Two, big, big);
  EXPECT_THROW(right_extension(theta, phi, 1000), SizeExceeded);
  EXPECT_THROW(right_lifting(theta, phi, 1000), SizeExceeded);
}

class RandomMorphisms : public ::testing::TestWithParam<Quantale> {};

TEST_P(RandomMorphisms, MatchDenseReference) {
  Quantale q = GetParam();
  gen::Rng rng(q == Quantale::Two ? 101 : 202);
  for (int trial = 0; trial < 300; ++trial) {
    FiniteSet a = gen::small_set(rng), b = gen::small_set(rng), c = gen::small_set(rng);
    QMorphism phi = gen::morphism(rng, q, a, b), psi = gen::morphism(rng, q, b, c);
    QMorphism theta = gen::morphism(rng, q, a, c);
    auto dphi = oracle::to_dense(phi), dpsi = oracle::to_dense(psi), dtheta = oracle::to_dense(theta);
    ASSERT_TRUE(oracle::same(oracle::compose(dpsi, dphi), compose(psi, phi)));
    QMorphism ext = right_extension(theta, phi);
    ASSERT_TRUE(oracle::same(oracle::extension(dtheta, dphi), ext));
    QMorphism lift = right_lifting(psi, theta);
    ASSERT_TRUE(oracle::same(oracle::lifting(dpsi, dtheta), lift));
    for (const auto &g : enumerate_hom(b, c, 1000))
      ASSERT_EQ(eval_right_extension_at(theta, phi, g), ext.value(g));
    for (const auto &f : enumerate_hom(a, b, 1000))
      ASSERT_EQ(eval_right_lifting_at(psi, theta, f), lift.value(f));
  }
}

TEST_P(RandomMorphisms, CompositionLaws) {
  Quantale q = GetParam();
  gen::Rng rng(q == Quantale::Two ? 7 : 8);
  for (int trial = 0; trial < 200; ++trial) {
    FiniteSet a = gen::small_set(rng), b = gen::small_set(rng), c = gen::small_set(rng),
              d = gen::small_set(rng);
    QMorphism phi = gen::morphism(rng, q, a, b), phi2 = gen::morphism(rng, q, a, b);
    QMorphism psi = gen::morphism(rng, q, b, c), chi = gen::morphism(rng, q, c, d);
    ASSERT_EQ(compose(chi, compose(psi, phi)), compose(compose(chi, psi), phi));
    ASSERT_EQ(compose(psi, join(phi, phi2)), join(compose(psi, phi), compose(psi, phi2)));
    QMorphism psi2 = gen::morphism(rng, q, b, c);
    ASSERT_EQ(compose(join(psi, psi2), phi), join(compose(psi, phi), compose(psi2, phi)));
  }
}

INSTANTIATE_TEST_SUITE_P(BothQuantales, RandomMorphisms,
                         ::testing::Values(Quantale::Two, Quantale::Rbar),
                         [](const auto &info) { return std::string(quantale_name(info.param)) == "2"
                                                           ? std::string("Two")
                                                           : std::string("Rbar"); });

#include "support/laws.hpp"

TEST_P(RandomMorphisms, Adjointness) {
  gen::Rng rng(GetParam() == Quantale::Two ? 41 : 42);
  int premise = 0;
  for (int trial = 0; trial < 300; ++trial) {
    auto t = laws::adjointness(rng, GetParam());
    ASSERT_TRUE(t.failure.empty()) << t.failure;
    premise += t.premise_held;
  }
  EXPECT_GT(premise, 50);
  EXPECT_LT(premise, 300);
}

TEST_P(RandomMorphisms, ExtensionAndLiftingIdentities) {
  gen::Rng rng(GetParam() == Quantale::Two ? 51 : 52);
  for (int trial = 0; trial < 200; ++trial) {
    auto t = laws::identities(rng, GetParam());
    ASSERT_TRUE(t.failure.empty()) << t.failure;
  }
}
