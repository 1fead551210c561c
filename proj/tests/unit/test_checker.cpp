#include <gtest/gtest.h>

#include "../support/mutations.hpp"
#include "conmat/oracle.hpp"
#include "conmat/prover.hpp"

using namespace conmat;

namespace {

const std::string kData = CONMAT_TEST_DATA;

struct Sample {
  Problem problem;
  ProofDocument doc;
};

std::vector<Sample> corpus() {
  std::vector<Sample> out;
  for (const char* f : {"two_clause.p", "chain.p", "instance_chain.p", "split.p"}) {
    for (Mode m : {Mode::Tableau, Mode::Matrix, Mode::Core, Mode::Avatar}) {
      auto p = parse_problem_file(kData + "/" + f);
      ProverConfig config;
      config.mode = m;
      auto r = prove(p, config);
      if (r.proof) out.push_back({std::move(p), std::move(*r.proof)});
    }
  }
  return out;
}

}  // namespace

TEST(Checker, AcceptsProverOutput) {
  for (const auto& s : corpus()) EXPECT_TRUE(check_proof(s.doc, s.problem)) << print_document(s.doc);
}

TEST(Checker, RejectsEveryMutation) {
  std::mt19937_64 rng(11);
  const auto samples = corpus();
  ASSERT_FALSE(samples.empty());
  for (auto m : corrupt::all_mutations()) {
    int applied = 0;
    for (const auto& s : samples) {
      for (int round = 0; round < 4; ++round) {
        auto bad = corrupt::mutate(s.doc, s.problem, m, rng);
        if (!bad) continue;
        ++applied;
        EXPECT_FALSE(check_proof(*bad, s.problem))
            << corrupt::mutation_name(m) << "\n" << print_document(*bad);
      }
    }
    EXPECT_GT(applied, 0) << corrupt::mutation_name(m);
  }
}

TEST(Checker, RejectsAProofForAnotherProblem) {
  auto p = parse_problem_file(kData + "/chain.p");
  auto q = parse_problem_file(kData + "/instance_chain.p");
  auto r = prove(p, ProverConfig{});
  ASSERT_TRUE(r.proof);
  auto result = check_proof(*r.proof, q);
  EXPECT_FALSE(result);
  EXPECT_NE(result.reason.find("different problem"), std::string::npos);
}

TEST(Checker, RejectsInactiveLiteralsOutsideSplitting) {
  auto p = parse_problem_file(kData + "/chain.p");
  auto r = prove(p, ProverConfig{});
  ASSERT_TRUE(r.proof);
  auto doc = *r.proof;
  doc.subproofs[0].inactive.push_back({0, 0});
  EXPECT_FALSE(check_proof(doc, p));
}

TEST(Checker, RejectsAnUncoveredSplit) {
  auto p = parse_problem_file(kData + "/split.p");
  ProverConfig config;
  config.mode = Mode::Avatar;
  auto r = prove(p, config);
  ASSERT_TRUE(r.proof);
  ASSERT_EQ(r.proof->subproofs.size(), 2u);
  auto doc = *r.proof;
  doc.subproofs.pop_back();
  EXPECT_FALSE(check_proof(doc, p));
}

TEST(Document, RoundTrips) {
  auto p = parse_problem_file(kData + "/two_clause.p");
  auto r = prove(p, ProverConfig{});
  ASSERT_TRUE(r.proof);
  const auto text = print_document(*r.proof);
  EXPECT_EQ(print_document(parse_document(text)), text);
}

TEST(Document, RejectsGarbage) {
  EXPECT_THROW(parse_document("not a proof\n"), DocumentError);
  EXPECT_THROW(parse_document("conmat-proof 1\nconnect 0.x 1.0\n"), DocumentError);
}

TEST(Checker, GeneratedTheoremsSurviveMutation) {
  std::mt19937_64 rng(3);
  const auto profile = *generator_profile("epr");
  int proofs = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    auto p = generate_random_problem(seed, profile);
    auto r = prove(p, ProverConfig{});
    if (!r.proof) continue;
    ++proofs;
    ASSERT_TRUE(check_proof(*r.proof, p));
    for (auto m : corrupt::all_mutations())
      if (auto bad = corrupt::mutate(*r.proof, p, m, rng))
        EXPECT_FALSE(check_proof(*bad, p)) << corrupt::mutation_name(m) << "\n"
                                           << to_tptp(p) << print_document(*bad);
  }
  EXPECT_GT(proofs, 5);
}
