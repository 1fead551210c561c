#include <gtest/gtest.h>

#include "conmat/avatar.hpp"
#include "conmat/prover.hpp"
#include "conmat/tableau.hpp"

using namespace conmat;

namespace {

const std::string kData = CONMAT_TEST_DATA;

Problem load(const std::string& name) { return parse_problem_file(kData + "/" + name); }

}  // namespace

TEST(Tableau, ProvesTheSmallTheorems) {
  for (const char* f : {"two_clause.p", "chain.p", "instance_chain.p", "split.p"}) {
    auto p = load(f);
    auto r = prove_tableau(p, TableauOptions{});
    ASSERT_EQ(r.status, SearchResult::Status::Proof) << f;
    EXPECT_TRUE(connections_span(p, r.matrix->copies, r.matrix->connections)) << f;
  }
}

TEST(Tableau, TwoClauseProofHasThreeCopies) {
  auto p = load("two_clause.p");
  auto r = prove_tableau(p, TableauOptions{});
  ASSERT_EQ(r.status, SearchResult::Status::Proof);
  EXPECT_EQ(r.matrix->copies.size(), 3u);
  EXPECT_EQ(r.matrix->connections.size(), 4u);
}

TEST(Tableau, RefutesWithoutCut) {
  EXPECT_EQ(prove_tableau(load("unit.p"), TableauOptions{}).status, SearchResult::Status::NonTheorem);
  EXPECT_EQ(prove_tableau(load("distinct_constants.p"), TableauOptions{}).status,
            SearchResult::Status::NonTheorem);
}

TEST(Tableau, DepthLimitIsUnknownNotNonTheorem) {
  // p(a), ~p(X) | p(f(X)) has no refutation and infinitely many extensions.
  auto p = parse_problem("cnf(a, negated_conjecture, p(a)).\ncnf(b, axiom, (~p(X) | p(f(X)))).\n");
  TableauOptions o;
  o.max_depth = 3;
  EXPECT_EQ(prove_tableau(p, o).status, SearchResult::Status::Exhausted);
}

TEST(Avatar, SplitProblemNeedsTwoSubproofs) {
  auto p = load("split.p");
  auto r = prove_avatar(p, AvatarOptions{});
  ASSERT_EQ(r.status, SearchResult::Status::Proof);
  ASSERT_EQ(r.subproofs.size(), 2u);
  bool q_branch = false;
  for (const auto& m : r.subproofs)
    for (const auto& c : m.connections) {
      const auto& a = m.copies[c.copy_a];
      const auto& b = m.copies[c.copy_b];
      // q(a) of c2 connected to ~q(X) of c3.
      q_branch = q_branch || (a.clause == 1 && c.lit_a == 1 && b.clause == 2) ||
                 (b.clause == 1 && c.lit_b == 1 && a.clause == 2);
    }
  EXPECT_TRUE(q_branch);
}

TEST(Avatar, NonTheoremStaysNonTheorem) {
  EXPECT_EQ(prove_avatar(load("unit.p"), AvatarOptions{}).status, SearchResult::Status::NonTheorem);
  auto p = parse_problem("cnf(a, axiom, (p(X) | q(Y))).\ncnf(b, axiom, ~p(a)).\n");
  EXPECT_EQ(prove_avatar(p, AvatarOptions{}).status, SearchResult::Status::NonTheorem);
}

TEST(Avatar, SplitsNonGroundComponents) {
  auto p = parse_problem(
      "cnf(a, axiom, (p(X) | q(Y))).\ncnf(b, axiom, ~p(a)).\ncnf(c, axiom, ~q(b)).\n");
  auto r = prove_avatar(p, AvatarOptions{});
  ASSERT_EQ(r.status, SearchResult::Status::Proof);
  EXPECT_GE(r.subproofs.size(), 2u);
}

TEST(Prover, AllModesAgreeOnTheCorpus) {
  struct Case {
    const char* file;
    Verdict verdict;
  };
  for (const Case& c : {Case{"two_clause.p", Verdict::Theorem}, Case{"chain.p", Verdict::Theorem},
                        Case{"instance_chain.p", Verdict::Theorem}, Case{"split.p", Verdict::Theorem},
                        Case{"unit.p", Verdict::NonTheorem},
                        Case{"distinct_constants.p", Verdict::NonTheorem}}) {
    auto p = load(c.file);
    for (Mode m : {Mode::Tableau, Mode::Matrix, Mode::Core, Mode::Avatar}) {
      ProverConfig config;
      config.mode = m;
      config.timeout_seconds = 10;
      auto r = prove(p, config);
      EXPECT_EQ(r.verdict, c.verdict) << c.file << " " << mode_name(m) << " " << r.reason;
      if (r.verdict == Verdict::Theorem) {
        ASSERT_TRUE(r.proof);
        EXPECT_TRUE(check_proof(*r.proof, p)) << c.file << " " << mode_name(m);
        // The printed document reads back to an accepted proof.
        EXPECT_TRUE(check_proof(parse_document(print_document(*r.proof)), p));
      }
    }
  }
}

TEST(Prover, ExitCodes) {
  EXPECT_EQ(exit_code(Verdict::Theorem), 0);
  EXPECT_EQ(exit_code(Verdict::NonTheorem), 1);
  EXPECT_EQ(exit_code(Verdict::Unknown), 2);
  EXPECT_EQ(parse_mode("matrix"), Mode::Matrix);
  EXPECT_FALSE(parse_mode("resolution"));
}

TEST(Prover, TimeoutGivesUnknown) {
  // Satisfiable with an infinite Herbrand universe: no mode can decide it.
  auto p = parse_problem("cnf(a, negated_conjecture, p(a)).\ncnf(b, axiom, (~p(X) | p(f(X)))).\n");
  ProverConfig config;
  config.mode = Mode::Core;
  config.timeout_seconds = 0.2;
  EXPECT_EQ(prove(p, config).verdict, Verdict::Unknown);
}

TEST(Prover, StatisticsAreRecorded) {
  auto p = load("chain.p");
  ProverConfig config;
  auto r = prove(p, config);
  ASSERT_TRUE(r.proof);
  bool has_solves = false;
  for (const auto& [k, v] : r.proof->stats) has_solves = has_solves || k == "solves";
  EXPECT_TRUE(has_solves);
  EXPECT_FALSE(r.proof->multiplicities.empty());
}
