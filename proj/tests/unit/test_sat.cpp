#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "conmat/sat.hpp"

using namespace conmat::sat;

namespace {

// Brute force over all assignments of n variables.
bool brute_force_sat(std::uint32_t n, const std::vector<ClauseLits>& clauses,
                     const std::vector<Lit>& assumptions = {}) {
  for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
    auto val = [&](Lit l) { return (((bits >> l.var().index) & 1u) != 0) != l.negative(); };
    bool ok = std::all_of(assumptions.begin(), assumptions.end(), val);
    for (const auto& c : clauses) {
      if (!ok) break;
      ok = std::any_of(c.begin(), c.end(), val);
    }
    if (ok) return true;
  }
  return false;
}

bool satisfies(const Model& m, const std::vector<ClauseLits>& clauses) {
  for (const auto& c : clauses)
    if (std::none_of(c.begin(), c.end(), [&](Lit l) { return m.value(l); })) return false;
  return true;
}

std::uint64_t count_models(Solver& s, const std::vector<Var>& vars) {
  std::uint64_t n = 0;
  for (;;) {
    auto r = s.solve();
    if (!is_sat(r)) return n;
    ++n;
    const auto& m = std::get<Sat>(r).model;
    ClauseLits block;
    for (Var v : vars) block.push_back(m.value(v) ? neg(v) : pos(v));
    s.add_clause(block);
  }
}

}  // namespace

TEST(SatSolver, FreshVariablesAreDense) {
  Solver s;
  EXPECT_EQ(s.new_var().index, 0u);
  const Var b = s.new_var();
  EXPECT_EQ(b.index, 1u);
  for (int i = 0; i < 8; ++i) s.new_var();
  EXPECT_EQ(s.num_vars(), 10u);
}

TEST(SatSolver, SimpleUnsat) {
  Solver s;
  const Var x = s.new_var(), y = s.new_var();
  s.add_clause({pos(x), pos(y)});
  s.add_clause({neg(x)});
  s.add_clause({neg(y)});
  EXPECT_TRUE(is_unsat(s.solve()));
}

TEST(SatSolver, UnitClauseForcesModel) {
  Solver s;
  const Var x = s.new_var();
  s.add_clause({pos(x)});
  auto r = s.solve();
  ASSERT_TRUE(is_sat(r));
  EXPECT_TRUE(std::get<Sat>(r).model.value(x));
}

TEST(SatSolver, EmptyClauseGivesEmptyCore) {
  Solver s;
  const Var x = s.new_var();
  s.add_clause(ClauseLits{});
  auto r = s.solve({pos(x)});
  ASSERT_TRUE(is_unsat(r));
  EXPECT_TRUE(std::get<Unsat>(r).core.empty());
}

TEST(SatSolver, CoreIsSubsetOfAssumptions) {
  Solver s;
  const Var a = s.new_var(), b = s.new_var(), x = s.new_var(), c = s.new_var();
  s.add_clause({neg(a), pos(x)});
  s.add_clause({neg(b), neg(x)});
  auto r = s.solve({pos(c), pos(a), pos(b)});
  ASSERT_TRUE(is_unsat(r));
  const auto& core = std::get<Unsat>(r).core;
  for (Lit l : core) EXPECT_TRUE(l == pos(a) || l == pos(b)) << to_string(l);
  EXPECT_TRUE(is_unsat(s.solve(core)));
  EXPECT_TRUE(is_sat(s.solve({pos(a)})));
}

namespace {

class BlockOnAssign : public Propagator {
 public:
  explicit BlockOnAssign(Var x) : x_(x) {}
  std::vector<ClauseLits> on_assign(Lit l) override {
    if (l == pos(x_)) return {{neg(x_)}};
    return {};
  }
  std::vector<ClauseLits> on_model(const AssignmentView&) override { return {}; }

 private:
  Var x_;
};

class BlockEveryModel : public Propagator {
 public:
  explicit BlockEveryModel(std::vector<Var> vars) : vars_(std::move(vars)) {}
  std::vector<ClauseLits> on_assign(Lit) override { return {}; }
  std::vector<ClauseLits> on_model(const AssignmentView& m) override {
    ++models;
    ClauseLits block;
    for (Var v : vars_) block.push_back(m.value(v) ? neg(v) : pos(v));
    return {block};
  }
  int models = 0;

 private:
  std::vector<Var> vars_;
};

}  // namespace

TEST(SatSolver, PropagatorClauseIsRespected) {
  Solver s;
  const Var x = s.new_var(), y = s.new_var();
  s.add_clause({pos(x), pos(y)});
  s.observe(x);
  BlockOnAssign p(x);
  s.set_propagator(&p);
  auto r = s.solve({pos(x)});
  EXPECT_TRUE(is_unsat(r));
  r = s.solve();
  ASSERT_TRUE(is_sat(r));
  EXPECT_FALSE(std::get<Sat>(r).model.value(x));
  EXPECT_TRUE(std::get<Sat>(r).model.value(y));
}

TEST(SatSolver, BlockingEveryModelEndsUnsat) {
  Solver s;
  std::vector<Var> vars;
  for (int i = 0; i < 4; ++i) vars.push_back(s.new_var());
  BlockEveryModel p(vars);
  s.set_propagator(&p);
  EXPECT_TRUE(is_unsat(s.solve()));
  EXPECT_EQ(p.models, 16);
}

TEST(SatSolver, ExhaustiveAgreementOnThreeVariables) {
  // Every set of up to three clauses over three variables.
  std::vector<ClauseLits> all;
  for (int code = 1; code < 27; ++code) {
    ClauseLits c;
    int rest = code;
    for (std::uint32_t v = 0; v < 3; ++v, rest /= 3) {
      if (rest % 3 == 1) c.push_back(pos(Var{v}));
      if (rest % 3 == 2) c.push_back(neg(Var{v}));
    }
    all.push_back(c);
  }
  int checked = 0;
  for (std::size_t i = 0; i < all.size(); ++i)
    for (std::size_t j = i; j < all.size(); ++j)
      for (std::size_t k = j; k < all.size(); ++k) {
        std::vector<ClauseLits> cs{all[i], all[j], all[k]};
        Solver s;
        for (int v = 0; v < 3; ++v) s.new_var();
        for (auto c : cs) s.add_clause(c);
        auto r = s.solve();
        ASSERT_EQ(is_sat(r), brute_force_sat(3, cs));
        if (is_sat(r)) ASSERT_TRUE(satisfies(std::get<Sat>(r).model, cs));
        ++checked;
      }
  EXPECT_EQ(checked, 3276);
}

TEST(SatSolver, RandomInstancesAgreeWithBruteForce) {
  std::mt19937 rng(7);
  for (int round = 0; round < 300; ++round) {
    const std::uint32_t n = 4 + rng() % 9;
    const std::size_t m = n * 3 + rng() % (2 * n);
    std::vector<ClauseLits> cs;
    for (std::size_t i = 0; i < m; ++i) {
      ClauseLits c;
      for (int k = 0; k < 3; ++k) c.push_back(Lit(Var{static_cast<std::uint32_t>(rng() % n)}, rng() % 2));
      cs.push_back(c);
    }
    std::vector<Lit> assumptions;
    for (int k = 0; k < 2; ++k) assumptions.push_back(Lit(Var{static_cast<std::uint32_t>(rng() % n)}, rng() % 2));
    Solver s;
    for (std::uint32_t v = 0; v < n; ++v) s.new_var();
    for (auto c : cs) s.add_clause(c);
    auto r = s.solve(assumptions);
    ASSERT_EQ(is_sat(r), brute_force_sat(n, cs, assumptions)) << "round " << round;
    if (is_sat(r)) {
      const auto& model = std::get<Sat>(r).model;
      ASSERT_TRUE(satisfies(model, cs));
      for (Lit a : assumptions) ASSERT_TRUE(model.value(a));
    } else if (s.okay()) {
      const auto core = std::get<Unsat>(r).core;
      for (Lit l : core)
        ASSERT_NE(std::find(assumptions.begin(), assumptions.end(), l), assumptions.end());
      ASSERT_TRUE(is_unsat(s.solve(core)));
    }
  }
}

TEST(SatSolver, RepeatableOutcomes) {
  std::mt19937 rng(11);
  for (int round = 0; round < 50; ++round) {
    std::vector<ClauseLits> cs;
    for (int i = 0; i < 40; ++i) {
      ClauseLits c;
      for (int k = 0; k < 3; ++k) c.push_back(Lit(Var{static_cast<std::uint32_t>(rng() % 10u)}, rng() % 2));
      cs.push_back(c);
    }
    auto run = [&] {
      Solver s;
      for (int v = 0; v < 10; ++v) s.new_var();
      for (auto c : cs) s.add_clause(c);
      return s.solve().index();
    };
    EXPECT_EQ(run(), run());
  }
}

TEST(Cardinality, ExactlyCounts) {
  auto models = [](std::uint32_t n, std::uint32_t d) {
    Solver s;
    std::vector<Var> vars;
    for (std::uint32_t i = 0; i < n; ++i) vars.push_back(s.new_var());
    cardinality_exactly(s, vars, d);
    return count_models(s, vars);
  };
  EXPECT_EQ(models(2, 1), 2u);
  EXPECT_EQ(models(3, 3), 1u);
  EXPECT_EQ(models(4, 2), 6u);
  EXPECT_EQ(models(5, 0), 1u);
  EXPECT_EQ(models(6, 3), 20u);
  EXPECT_EQ(models(7, 2), 21u);
  EXPECT_EQ(models(2, 3), 0u);
}

TEST(Cardinality, AllForcedWhenCountEqualsSize) {
  Solver s;
  std::vector<Var> vars{s.new_var(), s.new_var(), s.new_var()};
  cardinality_exactly(s, vars, 3);
  auto r = s.solve();
  ASSERT_TRUE(is_sat(r));
  for (Var v : vars) EXPECT_TRUE(std::get<Sat>(r).model.value(v));
}

TEST(SatSolver, DimacsDump) {
  Solver s;
  const Var x = s.new_var(), y = s.new_var();
  s.add_clause({pos(x), neg(y)});
  s.add_clause({pos(y)});
  std::ostringstream out;
  s.write_dimacs(out);
  EXPECT_EQ(out.str().rfind("p cnf 2 ", 0), 0u);
  EXPECT_NE(out.str().find("1 -2 0"), std::string::npos);
}
