#pragma once

// Incremental CDCL solver with assumptions, unsat cores and user propagation.
//
// A Propagator is notified of assignments to observed variables once unit
// propagation reaches a fixpoint, and may answer with new clauses (over fresh
// variables too). Clauses that are unit or conflicting under the current
// trail are integrated by backjumping. on_model runs on every total
// assignment; the solver only returns Sat once on_model accepts.

#include <chrono>
#include <cstdint>
#include <deque>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace conmat::sat {

struct Var {
  std::uint32_t index = 0;
  friend bool operator==(Var, Var) = default;
  friend auto operator<=>(Var, Var) = default;
};

class Lit {
 public:
  constexpr Lit() = default;
  constexpr Lit(Var v, bool negative = false)
      : code_(2 * v.index + (negative ? 1u : 0u)) {}

  static constexpr Lit from_code(std::uint32_t c) {
    Lit l;
    l.code_ = c;
    return l;
  }

  constexpr Var var() const { return Var{code_ >> 1}; }
  constexpr bool negative() const { return code_ & 1u; }
  constexpr std::uint32_t code() const { return code_; }
  constexpr Lit operator~() const { return from_code(code_ ^ 1u); }

  friend constexpr bool operator==(Lit, Lit) = default;
  friend constexpr auto operator<=>(Lit, Lit) = default;

 private:
  std::uint32_t code_ = 0;
};

inline Lit pos(Var v) { return Lit(v, false); }
inline Lit neg(Var v) { return Lit(v, true); }

std::string to_string(Lit l);

using ClauseLits = std::vector<Lit>;

enum class Value : std::int8_t { False = -1, Unassigned = 0, True = 1 };

class Model {
 public:
  Model() = default;
  explicit Model(std::vector<bool> values) : values_(std::move(values)) {}
  bool value(Var v) const { return values_.at(v.index); }
  bool value(Lit l) const { return value(l.var()) != l.negative(); }
  std::size_t size() const { return values_.size(); }

 private:
  std::vector<bool> values_;
};

struct Sat {
  Model model;
};
struct Unsat {
  std::vector<Lit> core;  // subset of the assumptions
};
struct Unknown {
  std::string reason;
};
using SolveOutcome = std::variant<Sat, Unsat, Unknown>;

inline bool is_sat(const SolveOutcome& o) { return std::holds_alternative<Sat>(o); }
inline bool is_unsat(const SolveOutcome& o) { return std::holds_alternative<Unsat>(o); }
inline bool is_unknown(const SolveOutcome& o) { return std::holds_alternative<Unknown>(o); }

class Solver;

/// Read access to the solver's current total assignment inside on_model.
class AssignmentView {
 public:
  explicit AssignmentView(const Solver& s) : solver_(&s) {}
  bool value(Var v) const;
  bool value(Lit l) const;

 private:
  const Solver* solver_;
};

class Propagator {
 public:
  virtual ~Propagator() = default;

  /// `lit` became true; return clauses to add (possibly empty).
  virtual std::vector<ClauseLits> on_assign(Lit lit) = 0;
  /// A decision level was opened.
  virtual void on_new_level() {}
  /// The trail was cut back to `level`; undo everything notified above it.
  virtual void on_backtrack(std::uint32_t level) { (void)level; }
  /// Total assignment reached. Empty result accepts the model.
  virtual std::vector<ClauseLits> on_model(const AssignmentView& model) = 0;
};

struct Budget {
  std::optional<std::uint64_t> max_conflicts;
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

struct SolverStats {
  std::uint64_t solves = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t restarts = 0;
  std::uint64_t external_clauses = 0;
  std::uint64_t model_checks = 0;
};

class Solver {
 public:
  Solver();
  ~Solver();
  Solver(const Solver&) = delete;
  Solver& operator=(const Solver&) = delete;

  Var new_var();
  std::uint32_t num_vars() const { return static_cast<std::uint32_t>(assigns_.size()); }

  /// Adds a permanent clause. May be called between solves, or from inside a
  /// Propagator callback through the clauses it returns (not directly).
  void add_clause(ClauseLits lits);
  void add_clause(std::initializer_list<Lit> lits) { add_clause(ClauseLits(lits)); }

  /// Notify the propagator whenever `v` is assigned.
  void observe(Var v);

  void set_propagator(Propagator* p) { propagator_ = p; }
  void set_budget(Budget b) { budget_ = b; }

  SolveOutcome solve(const std::vector<Lit>& assumptions = {});

  /// False once the clause set is unconditionally unsatisfiable.
  bool okay() const { return ok_; }

  Value value(Var v) const { return assigns_.at(v.index); }
  Value value(Lit l) const;
  std::uint32_t decision_level() const { return static_cast<std::uint32_t>(trail_lim_.size()); }

  const SolverStats& stats() const { return stats_; }
  std::size_t num_clauses() const;

  /// DIMACS dump of the original and externally added clauses.
  void write_dimacs(std::ostream& out) const;

 private:
  friend class AssignmentView;

  using CRef = std::uint32_t;
  static constexpr CRef kNoReason = UINT32_MAX;

  struct ClauseData {
    std::vector<Lit> lits;
    double activity = 0;
    bool learnt = false;
    bool deleted = false;
  };
  struct Watcher {
    CRef cref;
    Lit blocker;
  };

  Value lit_value(Lit l) const;
  std::uint32_t level(Var v) const { return level_[v.index]; }
  void enqueue(Lit l, CRef reason);
  CRef propagate();
  void new_decision_level();
  void cancel_until(std::uint32_t level);
  void analyze(CRef conflict, std::vector<Lit>& learnt, std::uint32_t& bt_level);
  std::vector<Lit> analyze_final(Lit p);
  CRef attach_new(std::vector<Lit> lits, bool learnt);
  void attach(CRef c);
  std::optional<CRef> integrate_external(std::vector<Lit> lits);
  void notify_propagator();
  bool budget_exhausted() const;
  void reduce_learnts();
  void bump_var(Var v);
  void bump_clause(ClauseData& c);
  void decay();
  std::optional<Lit> pick_branch();

  // Activity heap over unassigned variables.
  void heap_insert(Var v);
  void heap_up(std::size_t i);
  void heap_down(std::size_t i);
  std::optional<Var> heap_pop();
  bool heap_less(std::uint32_t a, std::uint32_t b) const {
    return activity_[a] > activity_[b];
  }

  std::vector<ClauseData> clauses_;
  std::vector<CRef> learnts_;
  std::vector<std::vector<Watcher>> watches_;  // indexed by Lit code
  std::vector<Value> assigns_;
  std::vector<std::uint32_t> level_;
  std::vector<CRef> reason_;
  std::vector<bool> phase_;
  std::vector<bool> observed_;
  std::vector<double> activity_;
  std::vector<char> seen_;
  std::vector<std::uint32_t> heap_;
  std::vector<std::int64_t> heap_pos_;
  std::vector<Lit> trail_;
  std::vector<std::uint32_t> trail_lim_;
  std::vector<Lit> assumptions_;
  std::size_t qhead_ = 0;
  std::size_t notified_ = 0;
  std::deque<std::vector<Lit>> external_;  // callback clauses awaiting integration
  double var_inc_ = 1.0;
  double clause_inc_ = 1.0;
  double max_learnts_ = 0;
  bool ok_ = true;
  Propagator* propagator_ = nullptr;
  Budget budget_;
  SolverStats stats_;
};

/// Adds clauses restricting exactly `count` of `vars` to be true, using a
/// sequential counter with auxiliary register variables.
void cardinality_exactly(Solver& solver, const std::vector<Var>& vars,
                         std::uint32_t count);

}  // namespace conmat::sat
