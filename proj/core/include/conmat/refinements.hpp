#pragma once

// Search-space reductions shared by the matrix encodings.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "conmat/problem.hpp"
#include "conmat/sat.hpp"
#include "conmat/theory.hpp"

namespace conmat {

struct Refinements {
  bool copy_order = true;         // S^{k+1} -> S^k
  bool substitution_order = true; // ordered variable tuples across copies
  bool instance_symmetry = true;  // instance symmetry and within-matrix subsumption
  bool epr_caps = true;           // multiplicity caps on EPR input
  bool finite_domain = true;      // Herbrand-universe reasoning on EPR input
};

/// Total order on input clauses: start clauses first, then input order.
class ClauseOrder {
 public:
  explicit ClauseOrder(const Problem& problem);
  bool less(std::uint32_t c, std::uint32_t d) const { return rank_[c] < rank_[d]; }
  std::uint32_t rank(std::uint32_t c) const { return rank_[c]; }

 private:
  std::vector<std::uint32_t> rank_;
};

/// Clauses S^{k+1} -> S^k for consecutive selectors of one clause.
std::vector<sat::ClauseLits> copy_ordering_clauses(const std::vector<sat::Var>& selectors);

/// Finest partition of a clause's literals into variable-disjoint blocks,
/// each listed by literal index in ascending order.
std::vector<std::vector<std::uint32_t>> split_components(const Clause& clause);

/// Copy cap c^v on EPR input (c = max(1, #constants)); nullopt otherwise or
/// when caps are disabled. Saturates instead of overflowing.
std::optional<std::uint32_t> epr_cap(const Problem& problem, std::uint32_t clause,
                                     bool enabled = true);

/// A selected clause copy as seen at model time.
struct SelectedCopy {
  std::uint32_t clause = 0;
  std::uint32_t k = 1;
  VarId base = 0;
  sat::Var selector;
};

struct SymmetryBlock {
  enum class Kind : std::uint8_t { Instance, Subsumption };
  Kind kind = Kind::Instance;
  sat::ClauseLits clause;
};

/// Finds a renaming-free instance match rho(C) = sigma(D) between input
/// clause C and a selected copy of D with C < D, or a pair of selected copies
/// where one sigma-image is a subset of the other. `next_selector(C)` gives
/// the first unselected selector of C, if any.
std::optional<SymmetryBlock> check_instance_symmetry(
    const UnificationTheory& theory, const std::vector<SelectedCopy>& selected,
    const ClauseOrder& order,
    const std::function<std::optional<sat::Var>(std::uint32_t)>& next_selector);

/// True iff some rho maps the literals of `pattern` one-to-one onto
/// `target` (as sets). Variables of `target` are treated as constants.
bool instance_of(const std::vector<Literal>& pattern, const std::vector<Literal>& target);

}  // namespace conmat
