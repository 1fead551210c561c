#pragma once

// Corruption operators for proof documents, shared by the checker tests and
// the acceptance runner. Each returns nullopt when the document offers
// nothing to corrupt.

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "conmat/problem.hpp"
#include "conmat/proof.hpp"
#include "conmat/refinements.hpp"

namespace conmat::corrupt {

enum class Mutation { DropConnection, AlterBinding, ChangeCopy, RemoveStartClause, FlipPolarity };

inline const std::vector<Mutation>& all_mutations() {
  static const std::vector<Mutation> all{Mutation::DropConnection, Mutation::AlterBinding,
                                         Mutation::ChangeCopy, Mutation::RemoveStartClause,
                                         Mutation::FlipPolarity};
  return all;
}

inline const char* mutation_name(Mutation m) {
  switch (m) {
    case Mutation::DropConnection: return "drop-connection";
    case Mutation::AlterBinding: return "alter-binding";
    case Mutation::ChangeCopy: return "change-copy";
    case Mutation::RemoveStartClause: return "remove-start-clause";
    case Mutation::FlipPolarity: return "flip-polarity";
  }
  return "?";
}

namespace detail {

template <class T>
std::size_t pick(std::mt19937_64& rng, const std::vector<T>& v) {
  return std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng);
}

// A term that prints differently from `term`: a constant of the problem, or
// the term wrapped in a unary function when one exists.
inline std::optional<std::string> other_term(const Problem& p, const std::string& term) {
  const auto& symbols = p.symbols();
  for (SymbolId c : p.constants()) {
    const auto& name = symbols.function_symbol(c).name;
    if (name != term) return name;
  }
  for (SymbolId f = 0; f < symbols.num_functions(); ++f)
    if (symbols.function_symbol(f).arity == 1)
      return symbols.function_symbol(f).name + "(" + term + ")";
  return std::nullopt;
}

inline std::string flip(const std::string& lit) {
  return lit.rfind('~', 0) == 0 ? lit.substr(1) : "~" + lit;
}

}  // namespace detail

inline std::optional<ProofDocument> mutate(const ProofDocument& doc, const Problem& problem,
                                           Mutation m, std::mt19937_64& rng) {
  if (doc.subproofs.empty()) return std::nullopt;
  ProofDocument out = doc;
  auto& sp = out.subproofs[detail::pick(rng, out.subproofs)];
  switch (m) {
    case Mutation::DropConnection: {
      if (sp.connections.empty()) return std::nullopt;
      sp.connections.erase(sp.connections.begin() + detail::pick(rng, sp.connections));
      return out;
    }
    case Mutation::AlterBinding: {
      if (sp.bindings.empty()) return std::nullopt;
      auto& b = sp.bindings[detail::pick(rng, sp.bindings)];
      auto t = detail::other_term(problem, b.term);
      if (!t) return std::nullopt;
      b.term = *t;
      return out;
    }
    case Mutation::ChangeCopy: {
      auto& c = sp.copies[detail::pick(rng, sp.copies)];
      const Clause* from = nullptr;
      for (const auto& clause : problem.clauses())
        if (clause.name == c.clause) from = &clause;
      for (const auto& clause : problem.clauses()) {
        // A variant would still be a valid copy; pick a clause that differs.
        const bool variant = from && instance_of(from->literals, clause.literals) &&
                             instance_of(clause.literals, from->literals);
        if (clause.name != c.clause && !variant) {
          c.clause = clause.name;
          return out;
        }
      }
      return std::nullopt;
    }
    case Mutation::RemoveStartClause: {
      std::vector<std::string> starts;
      for (auto s : problem.start_clauses()) starts.push_back(problem.clause(s).name);
      std::vector<ProofDocument::Copy> kept;
      std::vector<std::uint32_t> removed;
      for (const auto& c : sp.copies) {
        if (std::find(starts.begin(), starts.end(), c.clause) != starts.end()) removed.push_back(c.id);
        else kept.push_back(c);
      }
      if (removed.empty() || kept.empty()) return std::nullopt;
      auto gone = [&](std::uint32_t id) {
        return std::find(removed.begin(), removed.end(), id) != removed.end();
      };
      sp.copies = kept;
      std::erase_if(sp.connections, [&](const auto& c) { return gone(c.a.copy) || gone(c.b.copy); });
      std::erase_if(sp.inactive, [&](const auto& p) { return gone(p.copy); });
      return out;
    }
    case Mutation::FlipPolarity: {
      auto& c = sp.copies[detail::pick(rng, sp.copies)];
      auto& lit = c.literals[detail::pick(rng, c.literals)];
      lit = detail::flip(lit);
      return out;
    }
  }
  return std::nullopt;
}

}  // namespace conmat::corrupt
