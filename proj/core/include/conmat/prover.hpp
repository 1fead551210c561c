#pragma once

// Top-level proof search: dispatches to one of the encodings, turns the
// result into a proof document and verifies it before reporting Theorem.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "conmat/matrix.hpp"
#include "conmat/problem.hpp"
#include "conmat/proof.hpp"
#include "conmat/refinements.hpp"

namespace conmat {

enum class Mode : std::uint8_t { Tableau, Matrix, Core, Avatar };

std::optional<Mode> parse_mode(std::string_view text);
std::string_view mode_name(Mode m);
std::string_view start_policy_name(StartPolicy p);

enum class Verdict : std::uint8_t { Theorem, NonTheorem, Unknown };

std::string_view verdict_name(Verdict v);
/// Process exit status for a verdict: 0, 1 or 2.
int exit_code(Verdict v);

struct ProverConfig {
  Mode mode = Mode::Core;
  StartPolicy start = StartPolicy::Ladder;
  Refinements refinements;
  std::uint32_t max_depth = 12;
  std::optional<double> timeout_seconds;
  std::optional<std::uint64_t> max_solves;
  std::optional<std::uint64_t> max_iterations;
  /// Core mode multiplicity policy; OnlyClause exists for experiments.
  CoreOptions::Policy policy = CoreOptions::Policy::Fair;
  std::uint32_t only_clause = 0;
};

struct ProverResult {
  Verdict verdict = Verdict::Unknown;
  std::string reason;
  std::optional<ProofDocument> proof;
  SearchStats stats;
  std::vector<std::uint32_t> multiplicities;
  double seconds = 0;
};

ProverResult prove(const Problem& problem, const ProverConfig& config);

}  // namespace conmat
