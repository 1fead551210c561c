#pragma once

// Reference procedures for differential testing. They share only the
// problem model with the prover: no SAT solver, no theory, no encoders.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conmat/problem.hpp"

namespace conmat {

struct OracleResult {
  bool theorem = false;
  /// Copies in the first spanning matrix found (multisets are tried by
  /// increasing size).
  std::uint32_t size = 0;
  std::vector<std::uint32_t> counts;  // copies per clause
  std::uint64_t matrices = 0;         // multisets examined
};

/// Exhaustive search over multisets of at most d_max clause copies that
/// contain a start clause, with backtracking rigid unification over the
/// connections of open paths.
OracleResult oracle_prove(const Problem& problem, std::uint32_t d_max);

/// Ground satisfiability of the Herbrand instances of an EPR problem (a
/// fresh constant stands in for an empty universe). True means
/// unsatisfiable. Nullopt when the problem is not EPR or grounding exceeds
/// `max_ground_clauses`.
std::optional<bool> herbrand_unsat(const Problem& problem,
                                   std::uint64_t max_ground_clauses = 200000);

struct GeneratorProfile {
  std::string name;
  std::uint32_t min_clauses = 4;
  std::uint32_t max_clauses = 6;
  std::uint32_t max_literals = 3;
  std::uint32_t max_vars = 2;
  std::uint32_t constants = 2;
  bool functions = false;
};

/// Known profiles: "epr" (default), "epr-medium", "fo".
std::optional<GeneratorProfile> generator_profile(std::string_view name);

/// TPTP text of a random problem; a deterministic function of the seed.
std::string generate_problem_text(std::uint64_t seed, const GeneratorProfile& profile);
Problem generate_random_problem(std::uint64_t seed, const GeneratorProfile& profile);

}  // namespace conmat
