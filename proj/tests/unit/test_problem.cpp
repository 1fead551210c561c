#include <gtest/gtest.h>

#include "conmat/problem.hpp"

using namespace conmat;

namespace {

const std::string kData = CONMAT_TEST_DATA;

Literal lit(const Problem& p, const std::string& text) {
  std::vector<std::string> vars;
  return parse_literal(text, p.symbols(), vars);
}

}  // namespace

TEST(Parser, ReadsClausesInOrder) {
  auto p = parse_problem_file(kData + "/two_clause.p");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p.clause(0).name, "neg");
  EXPECT_EQ(p.clause(1).name, "pos");
  EXPECT_EQ(p.clause(0).literals.size(), 2u);
  EXPECT_EQ(p.clause(0).num_vars, 2u);
  EXPECT_EQ(p.clause(1).num_vars, 1u);
  EXPECT_FALSE(p.is_epr());
  EXPECT_EQ(p.total_literals(), 4u);
}

TEST(Parser, RolesAndComments) {
  auto p = parse_problem(
      "% comment\n"
      "cnf(a, negated_conjecture, p(c)).\n"
      "cnf(b, hypothesis, (~p(X) | q(X))). % trailing\n"
      "cnf(d, axiom, ~q(c)).\n");
  ASSERT_EQ(p.size(), 3u);
  EXPECT_EQ(p.clause(0).role, Role::NegatedConjecture);
  EXPECT_EQ(p.clause(1).role, Role::Hypothesis);
  EXPECT_TRUE(p.is_epr());
  EXPECT_EQ(p.constants().size(), 1u);
}

TEST(Parser, RoundTripIsStable) {
  for (const char* f : {"two_clause.p", "chain.p", "instance_chain.p", "split.p"}) {
    auto p = parse_problem_file(kData + "/" + f);
    const auto text = to_tptp(p);
    auto q = parse_problem(text);
    EXPECT_EQ(to_tptp(q), text) << f;
    EXPECT_EQ(p.hash(), q.hash()) << f;
  }
}

TEST(Parser, RemovesTautologies) {
  auto p = parse_problem("cnf(a, axiom, (p(X) | ~p(X))).\ncnf(b, axiom, q(a)).\n");
  ASSERT_EQ(p.size(), 1u);
  EXPECT_EQ(p.clause(0).name, "b");
}

TEST(Parser, RejectsArityClash) {
  EXPECT_THROW(parse_problem("cnf(a, axiom, p(a)).\ncnf(b, axiom, p(a,b)).\n"), ParseError);
  EXPECT_THROW(parse_problem("cnf(a, axiom, p(f(a))).\ncnf(b, axiom, q(f)).\n"), ParseError);
}

TEST(Parser, RejectsEquality) {
  EXPECT_THROW(parse_problem("cnf(a, axiom, X = a).\n"), ParseError);
  EXPECT_THROW(parse_problem("cnf(a, axiom, a != b).\n"), ParseError);
}

TEST(Parser, ReportsPosition) {
  try {
    parse_problem("cnf(a, axiom, p(a)).\ncnf(b, axiom, p(a).\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line, 2u);
  }
}

TEST(Parser, RejectsMalformed) {
  EXPECT_THROW(parse_problem("fof(a, axiom, p).\n"), ParseError);
  EXPECT_THROW(parse_problem("cnf(a, lemma, p(a)).\n"), ParseError);
  EXPECT_THROW(parse_problem(""), ParseError);
}

TEST(Connectable, SymmetricAndRenamedApart) {
  auto p = parse_problem_file(kData + "/two_clause.p");
  // ~p(X) and p(f(Z)) connect; so do literals of different copies of one clause.
  EXPECT_TRUE(can_connect(p.clause(0).literals[0], p.clause(1).literals[1]));
  for (std::uint32_t a = 0; a < p.size(); ++a)
    for (std::uint32_t i = 0; i < p.clause(a).literals.size(); ++i)
      for (std::uint32_t b = 0; b < p.size(); ++b)
        for (std::uint32_t j = 0; j < p.clause(b).literals.size(); ++j)
          EXPECT_EQ(p.connectable({a, i}, {b, j}), p.connectable({b, j}, {a, i}));
}

TEST(Connectable, RespectsPolarityAndOccurs) {
  auto p = parse_problem(
      "cnf(a, axiom, (p(X, f(X)))).\ncnf(b, axiom, (~p(Y, Y))).\ncnf(c, axiom, (~p(f(a), f(f(a))))).\n");
  EXPECT_FALSE(can_connect(p.clause(0).literals[0], p.clause(1).literals[0]));
  EXPECT_TRUE(can_connect(p.clause(0).literals[0], p.clause(2).literals[0]));
  EXPECT_FALSE(can_connect(p.clause(1).literals[0], p.clause(2).literals[0]));
  EXPECT_FALSE(can_connect(p.clause(0).literals[0], p.clause(0).literals[0]));
}

TEST(Connectable, UnifiableDualSharesVariables) {
  auto p = parse_problem("cnf(a, axiom, (p(X) | ~q(X))).\ncnf(b, axiom, q(f(a))).\n");
  EXPECT_FALSE(unifiable_dual(lit(p, "p(X)"), lit(p, "~p(f(X))")));
  EXPECT_TRUE(can_connect(lit(p, "p(X)"), lit(p, "~p(f(X))")));
}

TEST(StartClauses, Policies) {
  auto p = parse_problem_file(kData + "/chain.p");
  EXPECT_EQ(choose_start_clauses(p.clauses(), StartPolicy::Declared),
            std::vector<std::uint32_t>({0}));
  EXPECT_EQ(choose_start_clauses(p.clauses(), StartPolicy::All),
            std::vector<std::uint32_t>({0, 1, 2}));
  EXPECT_EQ(choose_start_clauses(p.clauses(), StartPolicy::Positive),
            std::vector<std::uint32_t>({0}));
  EXPECT_EQ(p.start_clauses(), std::vector<std::uint32_t>({0}));
  EXPECT_TRUE(p.is_start(0));
  EXPECT_FALSE(p.is_start(1));
}

TEST(Copies, RenameIntoDisjointRanges) {
  auto p = parse_problem_file(kData + "/two_clause.p");
  VariableSpace space;
  const auto b1 = space.base(0, 1, p.clause(0).num_vars);
  const auto b2 = space.base(0, 2, p.clause(0).num_vars);
  const auto b3 = space.base(1, 1, p.clause(1).num_vars);
  EXPECT_EQ(b2, b1 + 2);
  EXPECT_EQ(b3, b2 + 2);
  EXPECT_EQ(space.base(0, 2, 2), b2);
  auto c = rename_copy(p.clause(0), 0, 2, b2);
  std::vector<VarId> vars;
  for (const auto& l : c.literals) l.collect_variables(vars);
  for (VarId v : vars) EXPECT_TRUE(v == b2 || v == b2 + 1);
  EXPECT_EQ(copy_var_name(p.clause(1), 1, 2, 0), "Z_1_2");
}
