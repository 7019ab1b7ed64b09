#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace quantcsp;

namespace {

QValue r(long long v) { return QValue(ExtReal(v)); }

// V = {v}, D = {0, 1}, sigma((v)) = 0, rho(0) = 2, rho(1) = 5.
TvcspInstance unary() {
  TvcspInstance inst{FiniteSet({"v"}), FiniteSet::range(2), {}};
  FiniteSet one = FiniteSet::ordinal(1);
  QMorphism sigma(Quantale::Rbar, one, inst.variables);
  sigma.set(Table{0}, r(0));
  QMorphism rho(Quantale::Rbar, one, inst.domain);
  rho.set(Table{0}, r(2));
  rho.set(Table{1}, r(5));
  inst.constraints.push_back({1, sigma, rho});
  return inst;
}

// The crisp relation R as an Rbar relation: 0 on R, inf elsewhere.
QMorphism crisp(const QMorphism &rel) {
  QMorphism out(Quantale::Rbar, rel.dom(), rel.cod());
  for (const auto &[t, v] : rel.entries())
    out.set(t, r(0));
  return out;
}

CspInstance colouring(std::vector<std::pair<std::string, std::string>> edges,
                      std::vector<std::string> vertices, std::size_t k) {
  return from_graph_colouring(FiniteSet(std::move(vertices)), edges, k);
}

} // namespace

TEST(Tvcsp, UnaryEvaluation) {
  TvcspInstance inst = unary();
  EXPECT_EQ(eval_assignment(inst, FnArrow(inst.variables, inst.domain, {0})), ExtReal(2));
  EXPECT_EQ(eval_assignment(inst, FnArrow(inst.variables, inst.domain, {1})), ExtReal(5));
  EXPECT_THROW(eval_assignment(inst, FnArrow(inst.variables, FiniteSet::range(3), {2})),
               DomainMismatch);
}

TEST(Tvcsp, UnaryCandidatesAndReduction) {
  TvcspInstance inst = unary();
  EXPECT_EQ(candidate_alphas(inst),
            (std::vector<ExtReal>{ExtReal::neg_inf(), ExtReal(2), ExtReal(5)}));
  CspInstance at2 = reduce_to_csp(inst, ExtReal(2));
  ASSERT_EQ(at2.constraints.size(), 1u);
  EXPECT_EQ(at2.constraints[0].relation.support_size(), 1u);
  EXPECT_TRUE(o_value(at2));
  EXPECT_FALSE(o_value(reduce_to_csp(inst, ExtReal::neg_inf())));
  EXPECT_THROW(reduce_to_csp(inst, ExtReal::pos_inf()), ContractViolation);
  auto profile = satisfiability_profile(inst);
  ASSERT_EQ(profile.size(), 3u);
  EXPECT_FALSE(profile[0].second);
  EXPECT_TRUE(profile[1].second);
  EXPECT_TRUE(profile[2].second);
}

TEST(Tvcsp, UnarySolve) {
  TvcspInstance inst = unary();
  for (auto res : {solve_bruteforce(inst), solve_by_reduction(inst),
                   solve_by_reduction(inst, {SearchMethod::Linear, 1})}) {
    EXPECT_EQ(res.value, ExtReal(2));
    ASSERT_TRUE(res.minimiser);
    EXPECT_EQ(res.minimiser->table(), Table{0});
  }
  EXPECT_EQ(solve_by_reduction(inst, {SearchMethod::Linear, 1}).csp_calls, 2u);
}

TEST(Tvcsp, NoConstraints) {
  TvcspInstance inst{FiniteSet({"a", "b"}), FiniteSet::range(2), {}};
  EXPECT_EQ(candidate_alphas(inst), std::vector<ExtReal>{ExtReal::neg_inf()});
  auto brute = solve_bruteforce(inst);
  auto red = solve_by_reduction(inst);
  EXPECT_TRUE(brute.value.is_neg_inf());
  EXPECT_TRUE(red.value.is_neg_inf());
  ASSERT_TRUE(brute.minimiser && red.minimiser);
  EXPECT_EQ(brute.minimiser->table(), (Table{0, 0}));
}

TEST(Tvcsp, InfiniteSigmaContributesNothing) {
  // sigma never finite and rho finite: finite - inf = -inf
  TvcspInstance inst = unary();
  inst.constraints[0].sigma = QMorphism(Quantale::Rbar, FiniteSet::ordinal(1), inst.variables);
  EXPECT_TRUE(solve_bruteforce(inst).value.is_neg_inf());
  EXPECT_TRUE(solve_by_reduction(inst).value.is_neg_inf());
}

TEST(Tvcsp, InfeasibleInstance) {
  TvcspInstance inst = unary();
  inst.constraints[0].rho = QMorphism(Quantale::Rbar, FiniteSet::ordinal(1), inst.domain);
  auto brute = solve_bruteforce(inst);
  auto red = solve_by_reduction(inst);
  EXPECT_TRUE(brute.value.is_pos_inf());
  EXPECT_TRUE(red.value.is_pos_inf());
  ASSERT_TRUE(red.minimiser);
  EXPECT_EQ(red.minimiser->table(), brute.minimiser->table());
  TvcspInstance empty_domain{FiniteSet({"v"}), FiniteSet::range(0), {}};
  EXPECT_TRUE(solve_by_reduction(empty_domain).value.is_pos_inf());
  EXPECT_FALSE(solve_by_reduction(empty_domain).minimiser);
  EXPECT_FALSE(solve_bruteforce(empty_domain).minimiser);
}

TEST(Tvcsp, NegativeInfinityWeights) {
  // sigma = -inf turns rho(d) - sigma into inf unless rho(d) = -inf
  TvcspInstance inst = unary();
  inst.constraints[0].sigma.set(Table{0}, QValue(ExtReal::neg_inf()));
  EXPECT_TRUE(solve_bruteforce(inst).value.is_pos_inf());
  EXPECT_TRUE(solve_by_reduction(inst).value.is_pos_inf());
  inst.constraints[0].rho.set(Table{1}, QValue(ExtReal::neg_inf()));
  auto brute = solve_bruteforce(inst);
  EXPECT_EQ(brute.value, oracle::tvcsp_optimum(inst));
  EXPECT_EQ(solve_by_reduction(inst).value, brute.value);
}

TEST(Tvcsp, ReductionMatchesBruteForceAndOracle) {
  gen::Rng rng(101);
  int finite = 0;
  for (int trial = 0; trial < 600; ++trial) {
    TvcspInstance inst = gen::tvcsp(rng);
    ExtReal expected = oracle::tvcsp_optimum(inst);
    auto brute = solve_bruteforce(inst);
    auto red = solve_by_reduction(inst);
    ASSERT_EQ(brute.value, expected) << "trial " << trial;
    ASSERT_EQ(red.value, expected) << "trial " << trial;
    ASSERT_TRUE(red.minimiser);
    ASSERT_EQ(eval_assignment(inst, *red.minimiser), expected) << "trial " << trial;
    ASSERT_EQ(oracle::tvcsp_value(inst, red.minimiser->table()), expected);
    finite += expected.is_finite();
  }
  EXPECT_GT(finite, 200);
}

TEST(Tvcsp, SearchVariantsAgree) {
  gen::Rng rng(103);
  for (int trial = 0; trial < 200; ++trial) {
    TvcspInstance inst = gen::tvcsp(rng);
    auto bin = solve_by_reduction(inst);
    auto lin = solve_by_reduction(inst, {SearchMethod::Linear, 1});
    auto par = solve_by_reduction(inst, {SearchMethod::Binary, 3});
    ASSERT_EQ(bin.value, lin.value);
    ASSERT_EQ(bin.value, par.value);
    ASSERT_TRUE(par.minimiser);
    ASSERT_EQ(eval_assignment(inst, *par.minimiser), bin.value);
  }
}

TEST(Tvcsp, SatisfiabilityIsMonotoneAndValueIsACandidate) {
  gen::Rng rng(107);
  for (int trial = 0; trial < 300; ++trial) {
    TvcspInstance inst = gen::tvcsp(rng);
    auto cands = candidate_alphas(inst);
    ASSERT_TRUE(std::is_sorted(cands.begin(), cands.end()));
    std::size_t bound = 1;
    for (const auto &c : inst.constraints)
      bound += c.sigma.support_size() * c.rho.support_size();
    ASSERT_LE(cands.size(), bound);
    auto profile = satisfiability_profile(inst);
    bool seen_sat = false;
    for (const auto &[alpha, sat] : profile) {
      ASSERT_TRUE(sat || !seen_sat) << "satisfiability dropped at " << alpha;
      seen_sat = seen_sat || sat;
    }
    ExtReal value = solve_bruteforce(inst).value;
    bool member = value.is_pos_inf() ||
                  std::find(cands.begin(), cands.end(), value) != cands.end();
    ASSERT_TRUE(member) << value;
    // alpha >= O(I) iff I^alpha is satisfiable
    for (const auto &[alpha, sat] : profile)
      ASSERT_EQ(sat, alpha >= value);
  }
}

TEST(Tvcsp, ValidateRejectsWrongQuantale) {
  TvcspInstance inst = unary();
  inst.constraints[0].rho = QMorphism(Quantale::Two, FiniteSet::ordinal(1), inst.domain);
  EXPECT_THROW(inst.validate(), InputError);
  EXPECT_NO_THROW(unary().validate());
}

TEST(CspToTvcsp, Colourings) {
  FiniteSet d = FiniteSet::range(2);
  ValuedLanguage lang{d, {crisp(neq_relation(d))}};
  auto path = colouring({{"1", "2"}}, {"1", "2"}, 2);
  auto k3 = colouring({{"1", "2"}, {"2", "3"}, {"1", "3"}}, {"1", "2", "3"}, 2);
  EXPECT_EQ(solve_by_reduction(csp_to_tvcsp(path, lang)).value, ExtReal(0));
  EXPECT_TRUE(solve_by_reduction(csp_to_tvcsp(k3, lang)).value.is_pos_inf());
  CspInstance none{FiniteSet({"x"}), d, {}};
  EXPECT_TRUE(solve_by_reduction(csp_to_tvcsp(none, lang)).value.is_neg_inf());
}

TEST(CspToTvcsp, Errors) {
  FiniteSet d = FiniteSet::range(2);
  ValuedLanguage lang{d, {crisp(neq_relation(d))}};
  CspInstance eq{FiniteSet({"x", "y"}), d, {}};
  eq.add({"x", "y"}, make_relation(d, 2, {{0, 0}, {1, 1}}));
  EXPECT_THROW(csp_to_tvcsp(eq, lang), NoPreimage);
  CspInstance other{FiniteSet({"x"}), FiniteSet::range(3), {}};
  EXPECT_THROW(csp_to_tvcsp(other, lang), DomainMismatch);
}

TEST(CspToTvcsp, RoundTripPreservesSatisfiability) {
  // Over a valued language, every sublevel instance maps back with
  // satisfiable iff 0 >= O.
  gen::Rng rng(109);
  const std::vector<ExtReal> pool{ExtReal(-1), ExtReal(0), ExtReal(2), ExtReal::pos_inf()};
  for (int trial = 0; trial < 200; ++trial) {
    FiniteSet d = gen::small_set(rng, 1, 3);
    ValuedLanguage lang{d, {gen::valued_relation(rng, d, 2, pool),
                            gen::valued_relation(rng, d, 1, pool)}};
    ConstraintLanguage levels = language_sublevels(lang);
    CspInstance inst{FiniteSet::range(rng.between(1, 3)), d, {}};
    for (std::size_t c = rng.between(0, 3); c > 0; --c) {
      const QMorphism &rel = levels.relations[rng.below(levels.relations.size())];
      std::size_t k = rel.dom().size();
      inst.constraints.push_back(
          {k, FnArrow(rel.dom(), inst.variables, rng.table(k, inst.variables.size())), rel});
    }
    TvcspInstance back = csp_to_tvcsp(inst, lang);
    ASSERT_EQ(o_value(inst), ExtReal(0) >= solve_by_reduction(back).value);
    ASSERT_EQ(o_value(inst), oracle::csp_bruteforce(inst).has_value());
  }
}

TEST(ClassifyTvcsp, Examples) {
  FiniteSet d2 = FiniteSet::range(2), d3 = FiniteSet::range(3);
  EXPECT_EQ(classify_tvcsp({d2, {crisp(neq_relation(d2))}}).verdict, Verdict::InP);
  EXPECT_EQ(classify_tvcsp({d3, {crisp(neq_relation(d3))}}).verdict, Verdict::NPHard);
  QMorphism single(Quantale::Rbar, FiniteSet::ordinal(2), d3);
  single.set(Table{1, 2}, r(4));
  auto c = classify_tvcsp({d3, {single}});
  EXPECT_EQ(c.verdict, Verdict::InP);
  ASSERT_TRUE(c.witness);
  EXPECT_TRUE(is_siggers(*c.witness));
}

TEST(ClassifyTvcsp, AgreesWithGradedSiggersSearch) {
  // InP iff some Siggers f has (f, 0) graded; checked by brute force on |D| = 2.
  gen::Rng rng(113);
  const std::vector<ExtReal> pool{ExtReal(-1), ExtReal(0), ExtReal(1), ExtReal::pos_inf()};
  FiniteSet d = FiniteSet::range(2);
  FiniteSet d4 = power(d, 4);
  for (int trial = 0; trial < 30; ++trial) {
    ValuedLanguage lang{d, {gen::valued_relation(rng, d, 2, pool)}};
    bool expected = false;
    for_each_table(d4.size(), 2, [&](const Table &t) {
      FnArrow f(d4, d, t);
      if (is_siggers(f) && oracle::qleq(r(0), oracle::pol_degree(lang.relations[0], 4, t)))
        expected = true;
      return !expected;
    });
    EXPECT_EQ(classify_tvcsp(lang).verdict == Verdict::InP, expected);
  }
}

TEST(Scheduling, TwoActivities) {
  SchedulingProblem p{{{"a1", 1, 2}, {"a2", 1, 2}}, {{"a1", "a2"}}};
  TvcspInstance inst = from_scheduling(p, 3);
  EXPECT_EQ(inst.domain.size(), 4u);
  EXPECT_EQ(solve_bruteforce(inst).value, ExtReal(1));
  auto red = solve_by_reduction(inst);
  EXPECT_EQ(red.value, ExtReal(1));
  ASSERT_TRUE(red.minimiser);
  EXPECT_GE((*red.minimiser)(1), (*red.minimiser)(0) + 1);
}

TEST(Scheduling, OnTime) {
  SchedulingProblem p{{{"a", 2, 2}, {"b", 3, 3}}, {}};
  auto res = solve_by_reduction(from_scheduling(p, 4));
  EXPECT_EQ(res.value, ExtReal(0));
  EXPECT_EQ(res.minimiser->table(), (Table{0, 0}));
}

TEST(Scheduling, TightHorizon) {
  // a chain of three unit jobs all due at 1 must finish at 1, 2, 3
  SchedulingProblem p{{{"a", 1, 1}, {"b", 1, 1}, {"c", 1, 1}}, {{"a", "b"}, {"b", "c"}}};
  TvcspInstance inst = from_scheduling(p, 2);
  EXPECT_EQ(solve_bruteforce(inst).value, ExtReal(2));
  EXPECT_EQ(solve_by_reduction(inst).value, ExtReal(2));
  EXPECT_TRUE(solve_by_reduction(from_scheduling(p, 1)).value.is_pos_inf());
}

TEST(Scheduling, Errors) {
  SchedulingProblem unknown{{{"a", 1, 1}}, {{"a", "z"}}};
  EXPECT_THROW(from_scheduling(unknown, 2), InputError);
  SchedulingProblem dup{{{"a", 1, 1}, {"a", 1, 1}}, {}};
  EXPECT_THROW(from_scheduling(dup, 2), InputError);
}
