#pragma once

// Rigid unification theory for connection atoms.
//
// Terms are shared with the input Problem and paired with a variable base:
// a variable with local index i inside a BoundTerm denotes the copy-scoped
// variable base + i. Every binding is recorded on a trail together with the
// atom that caused it and the older bindings it was derived from, which is
// what conflict explanations are built from.

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "conmat/problem.hpp"
#include "conmat/sat.hpp"

namespace conmat {

struct BoundTerm {
  const Term* term = nullptr;
  VarId base = 0;

  /// The unbound copy-scoped variable `v`.
  static BoundTerm variable(VarId v);
  bool is_variable() const { return term->is_variable(); }
  VarId var() const { return base + term->id; }
};

enum class Order : std::uint8_t { Less, Greater, Equal, Incomparable };

/// Atom ids whose joint truth caused a failure. The conflict clause is the
/// disjunction of their negations.
struct Explanation {
  std::vector<sat::Var> atoms;
  sat::ClauseLits clause() const;
};

class Substitution {
 public:
  struct Mark {
    std::size_t trail = 0;
    std::size_t justifications = 0;
  };
  /// Trail positions of bindings consulted by an operation.
  using Touched = std::vector<std::uint32_t>;

  Mark mark() const { return Mark{trail_.size(), justifications_.size()}; }
  void retract_to(Mark m);

  /// Unifies every pair simultaneously. On failure nothing is bound and
  /// `touched` lists the pre-existing bindings the failure depends on.
  bool unify(const std::vector<std::pair<BoundTerm, BoundTerm>>& pairs,
             sat::Var reason, Touched* touched = nullptr);
  bool unify(BoundTerm a, BoundTerm b, sat::Var reason, Touched* touched = nullptr) {
    return unify({{a, b}}, reason, touched);
  }

  BoundTerm deref(BoundTerm t, Touched* touched = nullptr) const;
  bool is_bound(VarId v) const { return v < bound_.size() && bound_[v].has_value(); }
  std::size_t num_bindings() const { return trail_.size(); }

  /// Fully dereferenced term over copy-scoped variable ids.
  Term resolve(BoundTerm t, Touched* touched = nullptr) const;
  bool identical(BoundTerm a, BoundTerm b, Touched* touched = nullptr) const;
  /// Lexicographic path-free ordering by symbol precedence; unbound
  /// variables make a comparison Incomparable unless syntactically equal.
  Order compare(BoundTerm a, BoundTerm b, const SymbolTable& symbols,
                Touched* touched = nullptr) const;

  /// Atoms responsible for the given bindings, closed under derivation.
  std::vector<sat::Var> explain(const Touched& touched) const;

  /// Copy-scoped variables currently bound, in trail order.
  std::vector<VarId> bound_variables() const;

 private:
  struct Entry {
    VarId var;
    std::uint32_t justification;
  };
  struct Justification {
    sat::Var atom;
    std::vector<std::uint32_t> parents;  // trail positions
  };

  bool occurs(VarId v, BoundTerm t, Touched* touched) const;
  void bind(VarId v, BoundTerm t, std::uint32_t justification);

  std::vector<std::optional<BoundTerm>> bound_;
  std::vector<std::uint32_t> position_;
  std::vector<Entry> trail_;
  std::vector<Justification> justifications_;
};

/// A literal position inside a clause copy.
struct Occurrence {
  std::uint32_t clause = 0;
  std::uint32_t literal = 0;
  VarId base = 0;
};

/// The variable tuple of a clause copy, left to right.
struct TupleRef {
  std::uint32_t clause = 0;
  VarId base = 0;
};

struct DomainConstraint {
  enum class Kind : std::uint8_t { NotEqual, Less };
  Kind kind = Kind::NotEqual;
  BoundTerm lhs;
  BoundTerm rhs;
  sat::Var atom;
};

/// Detects variables whose disequality and ordering constraints exclude every
/// element of a finite universe of constants (given in precedence order).
std::optional<Explanation> finite_domain_check(
    const Substitution& sigma, const std::vector<DomainConstraint>& constraints,
    const std::vector<SymbolId>& universe);

class UnificationTheory {
 public:
  enum class AtomKind : std::uint8_t { Connect, DistinctTuple, OrderTuple };

  struct Mark {
    Substitution::Mark sigma;
    std::size_t distinct = 0;
    std::size_t order = 0;
  };

  struct Stats {
    std::uint64_t unifications = 0;
    std::uint64_t conflicts = 0;
    std::uint64_t order_conflicts = 0;
    std::uint64_t distinct_conflicts = 0;
    std::uint64_t domain_conflicts = 0;
  };

  explicit UnificationTheory(const Problem& problem) : problem_(&problem) {}

  void register_connect(sat::Var atom, Occurrence a, Occurrence b);
  void register_distinct(sat::Var atom, TupleRef a, TupleRef b);
  /// Enforces that the tuple of `lower` is not greater than or equal to the
  /// tuple of `upper`.
  void register_order(sat::Var atom, TupleRef lower, TupleRef upper);

  bool is_atom(sat::Var v) const { return atoms_.count(v.index) != 0; }
  std::optional<AtomKind> kind(sat::Var v) const;

  /// Asserts an atom. On conflict the theory state is unchanged.
  std::optional<Explanation> assert_atom(sat::Var atom, bool value);

  Mark mark() const;
  void retract_to(Mark m);

  /// Model-time check of every active constraint, plus finite-domain
  /// reasoning when `finite_domain` is set.
  std::optional<Explanation> final_check(bool finite_domain);

  const Substitution& substitution() const { return sigma_; }
  const Problem& problem() const { return *problem_; }
  const Stats& stats() const { return stats_; }

  /// Atoms that determine the current instance of a clause copy.
  std::vector<sat::Var> explain_copy(TupleRef copy) const;
  Literal resolve_literal(Occurrence occ) const;

 private:
  struct Atom {
    AtomKind kind;
    Occurrence a;
    Occurrence b;
    TupleRef ta;
    TupleRef tb;
  };

  std::optional<Explanation> check_tuple(sat::Var var, const Atom& atom) const;
  std::vector<DomainConstraint> domain_constraints() const;

  const Problem* problem_;
  Substitution sigma_;
  std::unordered_map<std::uint32_t, Atom> atoms_;
  std::vector<sat::Var> active_distinct_;
  std::vector<sat::Var> active_order_;
  Stats stats_;
};

}  // namespace conmat
