#pragma once

// Splitting mode: clauses are split into variable-disjoint components, each
// guarded by a propositional variable. An outer solver picks the active
// components; the inner matrix search refutes the active part and the
// components it used are blocked. Clause instances whose sigma-image splits
// are added as new clauses before the next inner run.

#include <cstdint>
#include <string>
#include <vector>

#include "conmat/matrix.hpp"
#include "conmat/problem.hpp"
#include "conmat/proof.hpp"

namespace conmat {

struct AvatarOptions {
  Refinements refinements;
  Limits limits;
  std::uint32_t max_instances = 32;
};

struct AvatarResult {
  SearchResult::Status status = SearchResult::Status::Unknown;
  std::string reason;
  /// Input clauses followed by the recorded instances; sub-proofs refer to
  /// clause indices of this problem.
  Problem extended;
  std::vector<InstanceClause> instances;
  std::vector<Matrix> subproofs;
  SearchStats stats;
  std::uint64_t component_models = 0;
};

AvatarResult prove_avatar(const Problem& problem, const AvatarOptions& options);

}  // namespace conmat
