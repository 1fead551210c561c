#pragma once

// Proof objects and their independent verification.
//
// A Matrix is what the encoders decode from an accepted model. A
// ProofDocument is its self-contained textual form; check_proof verifies a
// document against the input problem without any encoder code.
//
// Document grammar, one record per line ('#' starts a comment line):
//
//   conmat-proof 1
//   problem <hex hash>
//   mode <tableau|matrix|core|avatar>
//   start <ladder|declared|positive|all>
//   instance <name> <parent-clause> <lit> | ... | <lit>
//   mu <clause-name> <n>
//   stat <key> <value>
//   subproof
//   copy <id> <clause-name> <k> <lit> | ... | <lit>
//   bind <Var> <term>
//   connect <copy>.<lit> <copy>.<lit>
//   inactive <copy>.<lit>
//
// Records before the first `subproof` line that belong to a sub-proof open
// an implicit one. Copy ids are local to their sub-proof.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "conmat/problem.hpp"

namespace conmat {

struct MatrixCopy {
  std::uint32_t clause = 0;
  std::uint32_t k = 1;
  VarId base = 0;
  /// Per literal; empty means every literal is active.
  std::vector<bool> active;

  bool is_active(std::uint32_t literal) const {
    return active.empty() || active[literal];
  }
};

struct MatrixConnection {
  std::uint32_t copy_a = 0;
  std::uint32_t lit_a = 0;
  std::uint32_t copy_b = 0;
  std::uint32_t lit_b = 0;
  friend bool operator==(const MatrixConnection&, const MatrixConnection&) = default;
};

/// A matrix proof over copy-scoped variables.
struct Matrix {
  std::vector<MatrixCopy> copies;
  std::vector<MatrixConnection> connections;
  /// Fully resolved bindings of copy-scoped variables.
  std::vector<std::pair<VarId, Term>> bindings;

  /// Applies the bindings to literal `literal` of copy `copy`.
  Literal instance(const Problem& problem, std::uint32_t copy, std::uint32_t literal) const;
};

/// A clause instance introduced by splitting, recorded against its parent.
struct InstanceClause {
  std::uint32_t parent = 0;
  Clause clause;
};

struct ProofDocument {
  struct Copy {
    std::uint32_t id = 0;
    std::string clause;
    std::uint32_t k = 1;
    std::vector<std::string> literals;
  };
  struct Binding {
    std::string var;
    std::string term;
  };
  struct Position {
    std::uint32_t copy = 0;
    std::uint32_t literal = 0;
    friend bool operator==(const Position&, const Position&) = default;
  };
  struct Connection {
    Position a;
    Position b;
  };
  struct Instance {
    std::string name;
    std::string parent;
    std::vector<std::string> literals;
  };
  struct SubProof {
    std::vector<Copy> copies;
    std::vector<Binding> bindings;
    std::vector<Connection> connections;
    std::vector<Position> inactive;
  };

  std::uint64_t problem_hash = 0;
  std::string mode = "core";
  std::string start = "ladder";
  std::vector<Instance> instances;
  std::vector<std::pair<std::string, std::uint32_t>> multiplicities;
  std::vector<std::pair<std::string, std::string>> stats;
  std::vector<SubProof> subproofs;
};

/// Renders a matrix whose copies refer to clauses of `problem`.
ProofDocument::SubProof describe_matrix(const Problem& problem, const Matrix& matrix);

std::string print_document(const ProofDocument& doc);

struct DocumentError : std::runtime_error {
  DocumentError(const std::string& what, std::size_t line);
  std::size_t line;
};

ProofDocument parse_document(std::string_view text);
ProofDocument parse_document_file(const std::string& path);

struct CheckResult {
  bool accepted = false;
  std::string reason;
  explicit operator bool() const { return accepted; }

  static CheckResult accept() { return {true, {}}; }
  static CheckResult reject(std::string why) { return {false, std::move(why)}; }
};

/// Verifies a document against the input problem. Uses only the problem
/// model; no search code is involved.
CheckResult check_proof(const ProofDocument& doc, const Problem& problem);

}  // namespace conmat
