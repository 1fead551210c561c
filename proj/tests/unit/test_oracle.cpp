#include <gtest/gtest.h>

#include "conmat/oracle.hpp"

using namespace conmat;

namespace {
const std::string kData = CONMAT_TEST_DATA;
}

TEST(Oracle, FindsSmallestSpanningMatrix) {
  auto p = parse_problem_file(kData + "/two_clause.p");
  auto r = oracle_prove(p, 4);
  ASSERT_TRUE(r.theorem);
  EXPECT_EQ(r.size, 3u);
  EXPECT_EQ(r.counts, std::vector<std::uint32_t>({2, 1}));
  EXPECT_FALSE(oracle_prove(p, 2).theorem);
}

TEST(Oracle, ChainNeedsTwoCopies) {
  auto p = parse_problem_file(kData + "/chain.p");
  auto r = oracle_prove(p, 3);
  ASSERT_TRUE(r.theorem);
  EXPECT_EQ(r.size, 2u);
}

TEST(Oracle, NonTheoremsHaveNoMatrix) {
  EXPECT_FALSE(oracle_prove(parse_problem_file(kData + "/unit.p"), 4).theorem);
  EXPECT_FALSE(oracle_prove(parse_problem_file(kData + "/distinct_constants.p"), 4).theorem);
}

TEST(Herbrand, DecidesGroundInstances) {
  EXPECT_EQ(herbrand_unsat(parse_problem_file(kData + "/chain.p")), std::nullopt);  // not EPR
  EXPECT_EQ(herbrand_unsat(parse_problem_file(kData + "/instance_chain.p")), true);
  EXPECT_EQ(herbrand_unsat(parse_problem_file(kData + "/split.p")), true);
  EXPECT_EQ(herbrand_unsat(parse_problem_file(kData + "/unit.p")), false);
  EXPECT_EQ(herbrand_unsat(parse_problem_file(kData + "/distinct_constants.p")), false);
  // No constants: a fresh one stands in.
  EXPECT_EQ(herbrand_unsat(parse_problem("cnf(a, axiom, p(X)).\ncnf(b, axiom, ~p(Y)).\n")), true);
}

TEST(Herbrand, AgreesWithTheOracleOnTheorems) {
  const auto profile = *generator_profile("epr");
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    auto p = generate_random_problem(seed, profile);
    if (oracle_prove(p, 4).theorem) EXPECT_EQ(herbrand_unsat(p), true) << to_tptp(p);
  }
}

TEST(Generator, IsDeterministic) {
  const auto profile = *generator_profile("epr");
  EXPECT_EQ(generate_problem_text(5, profile), generate_problem_text(5, profile));
  EXPECT_NE(generate_problem_text(5, profile), generate_problem_text(6, profile));
  EXPECT_EQ(to_tptp(generate_random_problem(9, profile)), to_tptp(generate_random_problem(9, profile)));
}

TEST(Generator, ProfilesRespectTheirShape) {
  for (const char* name : {"epr", "epr-medium", "fo"}) {
    const auto profile = generator_profile(name);
    ASSERT_TRUE(profile) << name;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
      auto p = generate_random_problem(seed, *profile);
      EXPECT_GE(p.size(), 1u);
      EXPECT_LE(p.size(), profile->max_clauses);
      for (const auto& c : p.clauses()) {
        EXPECT_LE(c.literals.size(), profile->max_literals);
        EXPECT_LE(c.num_vars, profile->max_vars);
      }
      if (!profile->functions) EXPECT_TRUE(p.is_epr());
    }
  }
  EXPECT_FALSE(generator_profile("nope"));
}

TEST(Generator, EprProfileHasEnoughTheorems) {
  const auto profile = *generator_profile("epr");
  int theorems = 0;
  for (std::uint64_t seed = 0; seed < 200; ++seed)
    theorems += herbrand_unsat(generate_random_problem(seed, profile)).value_or(false);
  EXPECT_GE(theorems, 60);
}
