#include "conmat/prover.hpp"

#include <algorithm>
#include <chrono>

#include "conmat/avatar.hpp"
#include "conmat/tableau.hpp"

namespace conmat {

std::optional<Mode> parse_mode(std::string_view text) {
  if (text == "tableau") return Mode::Tableau;
  if (text == "matrix") return Mode::Matrix;
  if (text == "core") return Mode::Core;
  if (text == "avatar") return Mode::Avatar;
  return std::nullopt;
}

std::string_view mode_name(Mode m) {
  switch (m) {
    case Mode::Tableau: return "tableau";
    case Mode::Matrix: return "matrix";
    case Mode::Core: return "core";
    case Mode::Avatar: return "avatar";
  }
  return "core";
}

std::string_view start_policy_name(StartPolicy p) {
  switch (p) {
    case StartPolicy::Ladder: return "ladder";
    case StartPolicy::Declared: return "declared";
    case StartPolicy::Positive: return "positive";
    case StartPolicy::All: return "all";
  }
  return "ladder";
}

std::string_view verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Theorem: return "Theorem";
    case Verdict::NonTheorem: return "NonTheorem";
    case Verdict::Unknown: return "Unknown";
  }
  return "Unknown";
}

int exit_code(Verdict v) {
  switch (v) {
    case Verdict::Theorem: return 0;
    case Verdict::NonTheorem: return 1;
    case Verdict::Unknown: return 2;
  }
  return 2;
}

namespace {

void add_stats(ProofDocument& doc, const Problem& problem, const SearchStats& s, double seconds) {
  auto put = [&](const char* key, auto value) { doc.stats.emplace_back(key, std::to_string(value)); };
  put("solves", s.solves);
  put("conflicts", s.conflicts);
  put("decisions", s.decisions);
  put("models", s.models);
  put("theory_conflicts", s.theory_conflicts);
  put("open_path_blocks", s.open_path_blocks);
  put("symmetry_blocks", s.symmetry_blocks);
  put("iterations", s.iterations);
  put("cores", s.cores);
  put("clauses", problem.size());
  put("literals", problem.total_literals());
  std::uint64_t depth = 0, selectors = 0, connections = 0;
  for (const auto& r : s.runs) {
    depth = std::max<std::uint64_t>(depth, r.depth);
    selectors = std::max(selectors, r.selectors);
    connections = std::max(connections, r.connections);
  }
  put("runs", s.runs.size());
  put("max_depth", depth);
  put("max_selectors", selectors);
  put("max_connections", connections);
  doc.stats.emplace_back("seconds", std::to_string(seconds));
}

}  // namespace

ProverResult prove(const Problem& problem, const ProverConfig& config) {
  const auto t0 = std::chrono::steady_clock::now();
  Limits limits;
  if (config.timeout_seconds)
    limits.deadline = t0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                               std::chrono::duration<double>(*config.timeout_seconds));
  limits.max_solves = config.max_solves;
  limits.max_iterations = config.max_iterations;

  ProverResult out;
  ProofDocument doc;
  doc.problem_hash = problem.hash();
  doc.mode = std::string(mode_name(config.mode));
  doc.start = std::string(start_policy_name(config.start));

  SearchResult::Status status = SearchResult::Status::Unknown;
  std::string reason;
  switch (config.mode) {
    case Mode::Tableau: {
      TableauOptions o;
      o.max_depth = config.max_depth;
      o.limits = limits;
      auto r = prove_tableau(problem, o);
      status = r.status;
      reason = r.reason;
      out.stats = r.stats;
      if (r.matrix) doc.subproofs.push_back(describe_matrix(problem, *r.matrix));
      break;
    }
    case Mode::Matrix: {
      MatrixOptions o;
      o.max_depth = config.max_depth;
      o.refinements = config.refinements;
      o.limits = limits;
      auto r = prove_matrix(problem, o);
      status = r.status;
      reason = r.reason;
      out.stats = r.stats;
      out.multiplicities = r.multiplicities;
      if (r.matrix) doc.subproofs.push_back(describe_matrix(problem, *r.matrix));
      break;
    }
    case Mode::Core: {
      CoreOptions o;
      o.policy = config.policy;
      o.only_clause = config.only_clause;
      o.refinements = config.refinements;
      o.limits = limits;
      auto r = prove_with_cores(problem, o);
      status = r.status;
      reason = r.reason;
      out.stats = r.stats;
      out.multiplicities = r.multiplicities;
      for (std::uint32_t c = 0; c < r.multiplicities.size(); ++c)
        doc.multiplicities.emplace_back(problem.clause(c).name, r.multiplicities[c]);
      if (r.matrix) doc.subproofs.push_back(describe_matrix(problem, *r.matrix));
      break;
    }
    case Mode::Avatar: {
      AvatarOptions o;
      o.refinements = config.refinements;
      o.limits = limits;
      auto r = prove_avatar(problem, o);
      status = r.status;
      reason = r.reason;
      out.stats = r.stats;
      for (const auto& inst : r.instances) {
        ProofDocument::Instance rec;
        rec.name = inst.clause.name;
        rec.parent = r.extended.clause(inst.parent).name;
        for (const auto& l : inst.clause.literals)
          rec.literals.push_back(to_string(l, problem.symbols(), &inst.clause.var_names));
        doc.instances.push_back(std::move(rec));
      }
      for (const auto& m : r.subproofs) doc.subproofs.push_back(describe_matrix(r.extended, m));
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  switch (status) {
    case SearchResult::Status::Proof: {
      add_stats(doc, problem, out.stats, out.seconds);
      auto check = check_proof(doc, problem);
      if (!check) {
        out.verdict = Verdict::Unknown;
        out.reason = "proof rejected by the checker: " + check.reason;
      } else {
        out.verdict = Verdict::Theorem;
      }
      out.proof = std::move(doc);
      break;
    }
    case SearchResult::Status::NonTheorem:
      out.verdict = Verdict::NonTheorem;
      out.reason = reason;
      break;
    case SearchResult::Status::Exhausted:
    case SearchResult::Status::Unknown:
      out.verdict = Verdict::Unknown;
      out.reason = reason.empty() ? "no verdict" : reason;
      break;
  }
  return out;
}

}  // namespace conmat
