#pragma once

// Connection tableau encoding. A node variable <L;U> states that literal L,
// on a branch whose ancestor literals are U, is part of the tableau and must
// be closed by extension into a fresh clause copy or by reduction against an
// ancestor. Copies are created per (parent node, clause) when first needed.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "conmat/matrix.hpp"
#include "conmat/problem.hpp"
#include "conmat/sat.hpp"
#include "conmat/theory.hpp"

namespace conmat {

class TableauEncoder : public sat::Propagator {
 public:
  struct Node {
    std::uint32_t copy = 0;
    std::uint32_t literal = 0;
    friend auto operator<=>(const Node&, const Node&) = default;
  };
  struct Copy {
    std::uint32_t clause = 0;
    VarId base = 0;
    std::vector<Node> path;  // ancestors, root first
    std::vector<sat::Var> nodes;
  };

  TableauEncoder(const Problem& problem, std::uint32_t depth_limit);
  ~TableauEncoder() override;
  TableauEncoder(const TableauEncoder&) = delete;
  TableauEncoder& operator=(const TableauEncoder&) = delete;

  sat::SolveOutcome solve(sat::Budget budget = {});

  /// Some node at the depth limit had extension candidates.
  bool cut() const { return cut_; }
  const std::optional<Matrix>& proof() const { return proof_; }
  const std::vector<Copy>& copies() const { return copies_; }
  sat::Var node(Node n) const { return copies_.at(n.copy).nodes.at(n.literal); }
  const SearchStats& stats() const { return stats_; }

  std::vector<sat::ClauseLits> on_assign(sat::Lit lit) override;
  void on_new_level() override;
  void on_backtrack(std::uint32_t level) override;
  std::vector<sat::ClauseLits> on_model(const sat::AssignmentView& model) override;

 private:
  std::uint32_t make_copy(std::uint32_t clause, std::vector<Node> path);
  std::uint32_t child_copy(Node parent, std::uint32_t clause);
  sat::Var connection(Node a, Node b);
  sat::ClauseLits node_clause(Node n);

  const Problem* problem_;
  std::uint32_t limit_;
  sat::Solver solver_;
  UnificationTheory theory_;
  VarId next_base_ = 0;

  std::vector<Copy> copies_;
  std::map<std::pair<Node, std::uint32_t>, std::uint32_t> children_;
  std::map<std::uint32_t, Node> node_of_var_;
  std::map<std::pair<Node, Node>, sat::Var> connections_;
  struct Extension {
    sat::Var var;
    std::uint32_t child = 0;
    std::uint32_t entry = 0;  // literal of the child connected to the parent
  };
  std::map<Node, std::vector<Extension>> extensions_;
  std::vector<std::pair<std::uint32_t, sat::Var>> roots_;  // copy, start variable
  std::vector<bool> emitted_;  // by node variable index

  std::vector<UnificationTheory::Mark> marks_;
  std::vector<sat::ClauseLits> pending_;
  bool in_callback_ = false;
  bool cut_ = false;
  std::optional<Matrix> proof_;
  SearchStats stats_;
};

struct TableauOptions {
  std::uint32_t max_depth = 8;
  Limits limits;
};

/// Iterative deepening on the branch length, starting at 1. NonTheorem when
/// a depth is refuted without any extension being cut off.
SearchResult prove_tableau(const Problem& problem, const TableauOptions& options);

}  // namespace conmat
