#pragma once

// Matrix encodings: selectors S_C^k, lazily created connection variables,
// full connectivity per selected literal, a ground spanning check at model
// time and open-path blocking. Depth mode fixes exactly d selected copies;
// core mode bounds copies by multiplicities and grows them from unsat cores.

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "conmat/problem.hpp"
#include "conmat/proof.hpp"
#include "conmat/refinements.hpp"
#include "conmat/sat.hpp"
#include "conmat/theory.hpp"

namespace conmat {

/// Per input clause, per literal: whether the literal is active. An empty
/// table (or an empty row) means every literal is active.
using ActiveTable = std::vector<std::vector<bool>>;

struct Limits {
  std::optional<std::chrono::steady_clock::time_point> deadline;
  std::optional<std::uint64_t> max_solves;
  std::optional<std::uint64_t> max_iterations;

  bool expired() const {
    return deadline && std::chrono::steady_clock::now() >= *deadline;
  }
};

/// Variable counts of one encoder instance, for the polynomial size bounds.
struct RunRecord {
  std::uint32_t depth = 0;  // largest number of copies of any clause
  std::uint64_t selectors = 0;
  std::uint64_t connections = 0;
  std::uint64_t sat_vars = 0;
};

struct SearchStats {
  std::uint64_t solves = 0;
  std::uint64_t conflicts = 0;
  std::uint64_t decisions = 0;
  std::uint64_t propagations = 0;
  std::uint64_t models = 0;
  std::uint64_t theory_conflicts = 0;
  std::uint64_t open_path_blocks = 0;
  std::uint64_t symmetry_blocks = 0;
  std::uint64_t iterations = 0;
  std::uint64_t cores = 0;
  std::vector<RunRecord> runs;

  void absorb(const sat::SolverStats& s);
  void add(const SearchStats& other);
};

/// A clause copy identified by input clause and copy index.
struct CopyKey {
  std::uint32_t clause = 0;
  std::uint32_t k = 1;
  friend bool operator==(const CopyKey&, const CopyKey&) = default;
  friend auto operator<=>(const CopyKey&, const CopyKey&) = default;
};

/// An open path recorded independently of any solver instance, so it can be
/// re-expanded after the copy set grows.
struct PathBlock {
  std::vector<CopyKey> selected;
  struct Step {
    CopyKey copy;
    std::uint32_t literal = 0;
  };
  std::vector<Step> path;
};

/// Ground spanning test of the current sigma-instance of `copies`, over
/// active literals only. Unbound variables act as distinct constants.
/// Returns the literal index chosen per copy for some open path, or nullopt
/// when every path is closed.
std::optional<std::vector<std::uint32_t>> spanning_check(const UnificationTheory& theory,
                                                         const std::vector<MatrixCopy>& copies);

/// True when every path through the active literals of `copies` contains
/// both ends of some connection.
bool connections_span(const Problem& problem, const std::vector<MatrixCopy>& copies,
                      const std::vector<MatrixConnection>& connections);

/// Decodes an accepted configuration into a proof: drops copies the rest can
/// do without, keeps a minimal spanning set of sigma-dual connections and
/// records the resolved bindings. Outside splitting mode every literal keeps
/// at least one connection.
Matrix extract_matrix(const UnificationTheory& theory, std::vector<MatrixCopy> copies,
                      bool splitting);

struct EncoderConfig {
  enum class Mode : std::uint8_t { Depth, Core };
  Mode mode = Mode::Core;
  /// Depth mode: copies per clause and the exact number of selected copies.
  std::uint32_t depth = 1;
  /// Core mode: copies per clause; the last copy of a guarded clause is
  /// forbidden by a cap assumption.
  std::vector<std::uint32_t> copies;
  std::vector<bool> guarded;
  Refinements refinements;
  ActiveTable active;
};

class MatrixEncoder : public sat::Propagator {
 public:
  MatrixEncoder(const Problem& problem, EncoderConfig config);
  ~MatrixEncoder() override;
  MatrixEncoder(const MatrixEncoder&) = delete;
  MatrixEncoder& operator=(const MatrixEncoder&) = delete;

  std::uint32_t copies(std::uint32_t clause) const;
  sat::Var selector(std::uint32_t clause, std::uint32_t k) const;
  VarId base(std::uint32_t clause, std::uint32_t k) const;
  /// Connection variable between two literal positions, created on demand.
  /// Nullopt for pairs that can never be connected.
  std::optional<sat::Var> connection(CopyKey a, std::uint32_t lit_a, CopyKey b,
                                     std::uint32_t lit_b);

  /// Cap assumptions, one per guarded clause.
  std::vector<sat::Lit> assumptions() const;
  /// Clause whose cap assumption is `lit`, if any.
  std::optional<std::uint32_t> capped_clause(sat::Lit lit) const;

  /// Adds the blocking clause for an open path: the selected copies imply a
  /// connection on the path or, in core mode, a connection from a path
  /// literal into a copy outside the selection.
  void block_open_path(const PathBlock& block);
  const std::vector<PathBlock>& path_blocks() const { return blocks_; }

  sat::SolveOutcome solve(const std::vector<sat::Lit>& extra_assumptions = {},
                          sat::Budget budget = {});

  /// The accepted matrix of the last Sat outcome.
  const std::optional<Matrix>& proof() const { return proof_; }

  sat::Solver& solver() { return solver_; }
  const UnificationTheory& theory() const { return theory_; }
  const SearchStats& stats() const { return stats_; }
  RunRecord record() const;
  std::uint64_t num_selectors() const { return selector_count_; }
  std::uint64_t num_connections() const { return conn_keys_.size(); }

  // Propagator interface.
  std::vector<sat::ClauseLits> on_assign(sat::Lit lit) override;
  void on_new_level() override;
  void on_backtrack(std::uint32_t level) override;
  std::vector<sat::ClauseLits> on_model(const sat::AssignmentView& model) override;

 private:
  struct CopyInfo {
    CopyKey key;
    VarId base = 0;
    sat::Var selector;
    bool emitted = false;
  };

  bool is_active(std::uint32_t clause, std::uint32_t literal) const;
  std::uint32_t copy_index(CopyKey key) const;
  void emit(sat::ClauseLits clause);
  sat::ClauseLits connectivity_clause(std::uint32_t copy, std::uint32_t literal);
  sat::ClauseLits path_clause(const PathBlock& block);
  std::vector<std::uint32_t> selected_copies(const sat::AssignmentView& model) const;
  Matrix snapshot(const std::vector<std::uint32_t>& selected) const;

  const Problem* problem_;
  EncoderConfig config_;
  ClauseOrder order_;
  sat::Solver solver_;
  UnificationTheory theory_;

  std::vector<CopyInfo> copies_;
  std::vector<std::uint32_t> first_copy_;  // index of copy 1 per clause
  std::vector<std::uint32_t> num_copies_;
  std::unordered_map<std::uint32_t, std::uint32_t> copy_of_selector_;
  std::unordered_map<std::uint32_t, std::uint32_t> clause_of_cap_;
  std::map<std::pair<std::uint64_t, std::uint64_t>, sat::Var> conn_keys_;
  std::uint64_t selector_count_ = 0;

  std::vector<UnificationTheory::Mark> marks_;
  bool in_callback_ = false;
  std::vector<sat::ClauseLits> pending_;
  std::vector<PathBlock> blocks_;
  std::optional<Matrix> proof_;
  SearchStats stats_;
};

struct SearchResult {
  enum class Status : std::uint8_t { Proof, NonTheorem, Exhausted, Unknown };
  Status status = Status::Unknown;
  std::optional<Matrix> matrix;
  std::string reason;
  SearchStats stats;
  /// Final multiplicities (core mode) or copies per clause (depth mode).
  std::vector<std::uint32_t> multiplicities;
};

struct MatrixOptions {
  std::uint32_t max_depth = 12;
  Refinements refinements;
  Limits limits;
};

/// Depth-mode search: d = 1, 2, ... up to max_depth. On EPR input with caps
/// enabled, exhausting every depth up to the sum of caps is a NonTheorem.
SearchResult prove_matrix(const Problem& problem, const MatrixOptions& options);

/// Runs depth-mode search at one fixed depth.
SearchResult prove_matrix_at(const Problem& problem, std::uint32_t depth,
                             const Refinements& refinements, const Limits& limits);

struct CoreOptions {
  enum class Policy : std::uint8_t { Fair, OnlyClause };
  Policy policy = Policy::Fair;
  std::uint32_t only_clause = 0;  // for Policy::OnlyClause
  Refinements refinements;
  Limits limits;
  ActiveTable active;
  /// Starting multiplicities; default 1 for start clauses and 0 otherwise.
  std::vector<std::uint32_t> initial;
  /// Open paths learned earlier; re-expanded in every iteration.
  std::vector<PathBlock> blocks;
};

struct CoreResult : SearchResult {
  std::vector<PathBlock> blocks;
};

/// Core-guided search: solve under cap assumptions, grow the multiplicity of
/// every clause in the core, stop on a proof or on an empty core.
CoreResult prove_with_cores(const Problem& problem, const CoreOptions& options);

}  // namespace conmat
