#include <gtest/gtest.h>

#include <set>

#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace quantcsp;

namespace {

CspInstance triangle(std::size_t k) {
  return from_graph_colouring(FiniteSet({"1", "2", "3"}), {{"1", "2"}, {"2", "3"}, {"1", "3"}}, k);
}

} // namespace

TEST(Csp, IsSolutionExamples) {
  CspInstance none{FiniteSet({"a", "b"}), FiniteSet::range(2), {}};
  for (const auto &s : enumerate_hom(none.variables, none.domain, 100))
    EXPECT_TRUE(is_solution(none, s));
  CspInstance k3 = triangle(2);
  for (const auto &s : enumerate_hom(k3.variables, k3.domain, 100))
    EXPECT_FALSE(is_solution(k3, s));
  CspInstance one{FiniteSet({"v1", "v2"}), FiniteSet::range(2), {}};
  one.add({"v1", "v2"}, neq_relation(one.domain));
  EXPECT_TRUE(is_solution(one, FnArrow(one.variables, one.domain, {0, 1})));
}

TEST(Csp, SolutionSetOfPath) {
  CspInstance path{FiniteSet({"v1", "v2"}), FiniteSet::range(2), {}};
  path.add({"v1", "v2"}, neq_relation(path.domain));
  QMorphism sol = solution_set(path);
  EXPECT_EQ(sol.support_size(), 2u);
  CspInstance none{FiniteSet({"a", "b"}), FiniteSet::range(3), {}};
  EXPECT_EQ(solution_set(none).support_size(), 9u);
}

TEST(Csp, SolveColouring) {
  auto r3 = solve(triangle(3));
  ASSERT_TRUE(r3.solution);
  EXPECT_TRUE(is_solution(triangle(3), *r3.solution));
  EXPECT_TRUE(o_value(triangle(3)));
  EXPECT_FALSE(o_value(triangle(2)));
  EXPECT_EQ(triangle(3).constraints.size(), 3u);
}

TEST(Csp, EmptyRelationAndArityZero) {
  CspInstance inst{FiniteSet({"x"}), FiniteSet::range(2), {}};
  inst.add({"x"}, make_relation(inst.domain, 1, {}));
  EXPECT_FALSE(o_value(inst));
  CspInstance zero{FiniteSet({"x"}), FiniteSet::range(2), {}};
  zero.add({}, make_relation(zero.domain, 0, {Table{}}));
  EXPECT_TRUE(o_value(zero));
  zero.add({}, make_relation(zero.domain, 0, {}));
  EXPECT_FALSE(o_value(zero));
}

TEST(Csp, RepeatedScopeVariables) {
  CspInstance inst{FiniteSet({"x", "y"}), FiniteSet::range(3), {}};
  inst.add({"x", "x"}, neq_relation(inst.domain));
  EXPECT_FALSE(o_value(inst));
}

TEST(Csp, DeterministicBranching) {
  CspInstance inst{FiniteSet({"a", "b", "c"}), FiniteSet::range(2), {}};
  auto r = solve(inst);
  ASSERT_TRUE(r.solution);
  EXPECT_EQ(r.solution->table(), (Table{0, 0, 0}));
  EXPECT_EQ(solve_all(inst, 100).size(), 8u);
}

TEST(Csp, SolverMatchesBruteForce) {
  gen::Rng rng(17);
  int sat = 0;
  for (int trial = 0; trial < 1500; ++trial) {
    CspInstance inst = gen::csp(rng, 5, 3, 6, 3);
    auto expected = oracle::csp_bruteforce(inst);
    auto got = solve(inst);
    ASSERT_EQ(got.solution.has_value(), expected.has_value()) << "trial " << trial;
    if (got.solution) {
      ++sat;
      ASSERT_TRUE(is_solution(inst, *got.solution));
    }
  }
  EXPECT_GT(sat, 100);
  EXPECT_LT(sat, 1400);
}

TEST(Csp, EnumerationIsComplete) {
  gen::Rng rng(23);
  for (int trial = 0; trial < 300; ++trial) {
    CspInstance inst = gen::csp(rng, 4, 3, 4, 2);
    std::size_t expected = 0;
    for (const auto &s : enumerate_hom(inst.variables, inst.domain, 10000))
      expected += is_solution(inst, s);
    auto all = solve_all(inst, 100000);
    ASSERT_EQ(all.size(), expected);
    std::set<Table> distinct;
    for (const auto &s : all)
      distinct.insert(s.table());
    ASSERT_EQ(distinct.size(), expected);
  }
}

TEST(Csp, SolutionValueAndSolutionSetAgree) {
  gen::Rng rng(29);
  for (int trial = 0; trial < 300; ++trial) {
    CspInstance inst = gen::csp(rng, 4, 3, 4, 2);
    QMorphism sol = solution_set(inst);
    QMorphism by_language = solution_set_by_language(inst);
    ASSERT_EQ(sol, by_language);
    for (const auto &s : enumerate_hom(inst.variables, inst.domain, 10000)) {
      bool direct = is_solution(inst, s);
      ASSERT_EQ(solution_value_at(inst, s), direct);
      ASSERT_EQ(sol.contains(s), direct);
    }
  }
}

TEST(Dimacs, ClauseToConstraint) {
  CspInstance inst = from_dimacs_cnf("p cnf 2 1\n1 -2 0\n");
  ASSERT_EQ(inst.constraints.size(), 1u);
  const auto &c = inst.constraints[0];
  EXPECT_EQ(c.arity, 2u);
  EXPECT_EQ(c.scope.table(), (Table{0, 1}));
  std::set<Table> tuples;
  for (const auto &[k, v] : c.relation.entries())
    tuples.insert(k);
  EXPECT_EQ(tuples, (std::set<Table>{{0, 0}, {1, 0}, {1, 1}}));
  EXPECT_EQ(inst.variables.labels(), (std::vector<std::string>{"x1", "x2"}));
}

TEST(Dimacs, ParsesCommentsAndMultilineClauses) {
  CnfFormula f = parse_dimacs_cnf("c hello\np cnf 3 2\n1 2\n 3 0 -1 0\n");
  EXPECT_EQ(f.num_vars, 3u);
  ASSERT_EQ(f.clauses.size(), 2u);
  EXPECT_EQ(f.clauses[0], (std::vector<long long>{1, 2, 3}));
  EXPECT_TRUE(o_value(cnf_to_csp(parse_dimacs_cnf("p cnf 1 0\n"))));
}

TEST(Dimacs, ErrorsCarryPositions) {
  try {
    parse_dimacs_cnf("p cnf 2 1\n1 3 0\n");
    FAIL();
  } catch (const ParseError &e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_EQ(e.column(), 3u);
  }
  EXPECT_THROW(parse_dimacs_cnf("p cnf 2 2\n1 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs_cnf("1 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs_cnf("p cnf 2 1\n1 x 0\n"), ParseError);
  EXPECT_THROW(parse_dimacs_cnf("p cnf 2 1\n1 2\n"), ParseError);
}

TEST(Dimacs, GraphFormat) {
  Graph g = parse_dimacs_graph("c k3\np edge 3 3\ne 1 2\ne 2 3\ne 1 3\n");
  EXPECT_EQ(g.vertices.size(), 3u);
  EXPECT_EQ(g.edges.size(), 3u);
  EXPECT_FALSE(o_value(from_graph_colouring(g.vertices, g.edges, 2)));
  EXPECT_THROW(parse_dimacs_graph("p edge 2 1\ne 1 3\n"), ParseError);
}
