#pragma once

// First-order clausal data model: terms, literals, clauses, clause copies and
// the potential-connection relation between literal positions.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace conmat {

using SymbolId = std::uint32_t;
using VarId = std::uint32_t;

struct Term {
  enum class Kind : std::uint8_t { Variable, Application };

  Kind kind = Kind::Variable;
  std::uint32_t id = 0;  // variable index or function symbol
  std::vector<Term> args;

  static Term variable(VarId v) { return Term{Kind::Variable, v, {}}; }
  static Term application(SymbolId f, std::vector<Term> args = {}) {
    return Term{Kind::Application, f, std::move(args)};
  }

  bool is_variable() const { return kind == Kind::Variable; }
  bool is_ground() const;
  bool contains_variable(VarId v) const;
  void collect_variables(std::vector<VarId>& out) const;

  friend bool operator==(const Term&, const Term&) = default;
};

struct Literal {
  bool positive = true;
  SymbolId predicate = 0;
  std::vector<Term> args;

  bool is_ground() const;
  void collect_variables(std::vector<VarId>& out) const;
  Literal negated() const {
    Literal l = *this;
    l.positive = !l.positive;
    return l;
  }

  friend bool operator==(const Literal&, const Literal&) = default;
};

enum class Role : std::uint8_t { Axiom, Hypothesis, NegatedConjecture };

std::string_view role_name(Role r);

/// An input clause. Variables are numbered 0..num_vars-1 in order of first
/// occurrence, left to right.
struct Clause {
  std::string name;
  Role role = Role::Axiom;
  std::vector<Literal> literals;
  std::uint32_t num_vars = 0;
  std::vector<std::string> var_names;

  bool is_ground() const { return num_vars == 0; }
  bool all_positive() const;
};

/// The k-th copy (k >= 1) of an input clause with variables renamed into a
/// copy-scoped id range [var_base, var_base + num_vars).
struct ClauseCopy {
  std::uint32_t clause = 0;
  std::uint32_t copy = 1;
  VarId var_base = 0;
  std::vector<Literal> literals;
};

struct Symbol {
  std::string name;
  std::uint32_t arity = 0;
};

class SymbolTable {
 public:
  /// Interns a function symbol, throwing ParseError-compatible
  /// std::invalid_argument on an arity clash.
  SymbolId function(std::string_view name, std::uint32_t arity);
  SymbolId predicate(std::string_view name, std::uint32_t arity);

  std::optional<SymbolId> find_function(std::string_view name) const;
  std::optional<SymbolId> find_predicate(std::string_view name) const;

  const Symbol& function_symbol(SymbolId id) const { return functions_.at(id); }
  const Symbol& predicate_symbol(SymbolId id) const { return predicates_.at(id); }
  std::size_t num_functions() const { return functions_.size(); }
  std::size_t num_predicates() const { return predicates_.size(); }

  /// Precedence for term ordering: order of first appearance.
  bool precedes(SymbolId f, SymbolId g) const { return f < g; }

 private:
  std::vector<Symbol> functions_;
  std::vector<Symbol> predicates_;
  std::unordered_map<std::string, SymbolId> function_ids_;
  std::unordered_map<std::string, SymbolId> predicate_ids_;
};

enum class StartPolicy : std::uint8_t { Ladder, Declared, Positive, All };

std::optional<StartPolicy> parse_start_policy(std::string_view text);

/// Position of a literal inside an input clause.
struct LiteralRef {
  std::uint32_t clause = 0;
  std::uint32_t literal = 0;
  friend bool operator==(const LiteralRef&, const LiteralRef&) = default;
  friend auto operator<=>(const LiteralRef&, const LiteralRef&) = default;
};

class Problem {
 public:
  Problem() = default;
  Problem(std::vector<Clause> clauses, SymbolTable symbols,
          StartPolicy policy = StartPolicy::Ladder);

  const std::vector<Clause>& clauses() const { return clauses_; }
  const Clause& clause(std::uint32_t i) const { return clauses_.at(i); }
  std::size_t size() const { return clauses_.size(); }
  const SymbolTable& symbols() const { return symbols_; }

  const std::vector<std::uint32_t>& start_clauses() const { return start_; }
  bool is_start(std::uint32_t clause) const;
  void set_start_clauses(std::vector<std::uint32_t> start);

  /// True iff every function symbol is a constant.
  bool is_epr() const { return epr_; }
  /// Constants of the Herbrand universe, in precedence order.
  const std::vector<SymbolId>& constants() const { return constants_; }
  std::size_t total_literals() const;

  /// Precomputed potential-connection partners of a literal position.
  const std::vector<LiteralRef>& partners(LiteralRef l) const;
  bool connectable(LiteralRef a, LiteralRef b) const;

  /// Stable content hash of the canonical printed form.
  std::uint64_t hash() const;

 private:
  std::vector<Clause> clauses_;
  SymbolTable symbols_;
  std::vector<std::uint32_t> start_;
  bool epr_ = true;
  std::vector<SymbolId> constants_;
  std::vector<std::size_t> literal_offset_;
  std::vector<std::vector<LiteralRef>> partners_;
};

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, std::size_t line, std::size_t column);
  std::size_t line;
  std::size_t column;
};

/// Parses the TPTP CNF subset. Tautologies are removed; clauses are kept in
/// input order.
Problem parse_problem(std::string_view text,
                      StartPolicy policy = StartPolicy::Ladder);
Problem parse_problem_file(const std::string& path,
                           StartPolicy policy = StartPolicy::Ladder);

/// Parses a single term or literal against an existing symbol table; variable
/// names are resolved through `vars` (new names are appended).
Term parse_term(std::string_view text, const SymbolTable& symbols,
                std::vector<std::string>& vars);
Literal parse_literal(std::string_view text, const SymbolTable& symbols,
                      std::vector<std::string>& vars);

ClauseCopy rename_copy(const Clause& clause, std::uint32_t clause_index,
                       std::uint32_t k, VarId var_base);

/// Variable id ranges for clause copies, allocated on demand and contiguous.
class VariableSpace {
 public:
  VarId base(std::uint32_t clause, std::uint32_t copy, std::uint32_t num_vars);
  std::optional<VarId> find(std::uint32_t clause, std::uint32_t copy) const;
  VarId size() const { return next_; }

 private:
  std::unordered_map<std::uint64_t, VarId> bases_;
  VarId next_ = 0;
};

/// Potential connection: opposite polarity, same predicate, and the atoms
/// unify once the two occurrences are renamed apart.
bool can_connect(const Literal& l, const Literal& k);
/// Same test without renaming apart (both literals share one variable space).
bool unifiable_dual(const Literal& l, const Literal& k);

std::vector<std::uint32_t> choose_start_clauses(
    const std::vector<Clause>& clauses, StartPolicy policy);

/// Name of local variable `local` in copy k of clause `clause_index`, e.g.
/// "Z_1_2" for Z in copy 2 of clause 1.
std::string copy_var_name(const Clause& clause, std::uint32_t clause_index,
                          std::uint32_t k, std::uint32_t local);

// Printing. Variables print as var_names[id] when given, else as "V<id>".
std::string to_string(const Term& t, const SymbolTable& symbols,
                      const std::vector<std::string>* var_names = nullptr);
std::string to_string(const Literal& l, const SymbolTable& symbols,
                      const std::vector<std::string>* var_names = nullptr);
std::string to_string(const Clause& c, const SymbolTable& symbols);
std::string to_tptp(const Problem& p);

}  // namespace conmat
