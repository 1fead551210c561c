#include "conmat/tableau.hpp"

#include <algorithm>

namespace conmat {

TableauEncoder::TableauEncoder(const Problem& problem, std::uint32_t depth_limit)
    : problem_(&problem), limit_(depth_limit), theory_(problem) {
  solver_.set_propagator(this);
  sat::ClauseLits some;
  for (std::uint32_t s : problem.start_clauses()) {
    const auto root = make_copy(s, {});
    const auto a = solver_.new_var();
    for (auto v : copies_[root].nodes) solver_.add_clause({sat::neg(a), sat::pos(v)});
    some.push_back(sat::pos(a));
    roots_.emplace_back(root, a);
  }
  solver_.add_clause(some);
}

TableauEncoder::~TableauEncoder() { solver_.set_propagator(nullptr); }

std::uint32_t TableauEncoder::make_copy(std::uint32_t clause, std::vector<Node> path) {
  const auto id = static_cast<std::uint32_t>(copies_.size());
  Copy c;
  c.clause = clause;
  c.base = next_base_;
  next_base_ += problem_->clause(clause).num_vars;
  c.path = std::move(path);
  for (std::uint32_t l = 0; l < problem_->clause(clause).literals.size(); ++l) {
    const auto v = solver_.new_var();
    solver_.observe(v);
    node_of_var_[v.index] = Node{id, l};
    c.nodes.push_back(v);
  }
  copies_.push_back(std::move(c));
  return id;
}

std::uint32_t TableauEncoder::child_copy(Node parent, std::uint32_t clause) {
  const auto key = std::make_pair(parent, clause);
  if (auto it = children_.find(key); it != children_.end()) return it->second;
  auto path = copies_[parent.copy].path;
  path.push_back(parent);
  const auto id = make_copy(clause, std::move(path));
  children_.emplace(key, id);
  return id;
}

sat::Var TableauEncoder::connection(Node a, Node b) {
  auto key = std::minmax(a, b);
  if (auto it = connections_.find(key); it != connections_.end()) return it->second;
  const auto v = solver_.new_var();
  solver_.observe(v);
  connections_.emplace(key, v);
  const auto& ca = copies_[a.copy];
  const auto& cb = copies_[b.copy];
  theory_.register_connect(v, Occurrence{ca.clause, a.literal, ca.base},
                           Occurrence{cb.clause, b.literal, cb.base});
  return v;
}

sat::ClauseLits TableauEncoder::node_clause(Node n) {
  const std::uint32_t clause = copies_[n.copy].clause;
  const auto path = copies_[n.copy].path;
  const LiteralRef ref{clause, n.literal};
  sat::ClauseLits out{sat::neg(node(n))};
  const auto& partners = problem_->partners(ref);
  if (path.size() < limit_) {
    for (const LiteralRef& p : partners) {
      const auto child = child_copy(n, p.clause);
      const auto e = solver_.new_var();
      pending_.push_back({sat::neg(e), sat::pos(connection(n, Node{child, p.literal}))});
      for (std::uint32_t k = 0; k < copies_[child].nodes.size(); ++k)
        if (k != p.literal) pending_.push_back({sat::neg(e), sat::pos(copies_[child].nodes[k])});
      extensions_[n].push_back(Extension{e, child, p.literal});
      out.push_back(sat::pos(e));
    }
  } else if (!partners.empty()) {
    cut_ = true;
  }
  for (const Node& anc : path)
    if (problem_->connectable(ref, LiteralRef{copies_[anc.copy].clause, anc.literal}))
      out.push_back(sat::pos(connection(n, anc)));
  return out;
}

std::vector<sat::ClauseLits> TableauEncoder::on_assign(sat::Lit lit) {
  pending_.clear();
  in_callback_ = true;
  const auto v = lit.var();
  if (!lit.negative()) {
    if (auto it = node_of_var_.find(v.index); it != node_of_var_.end()) {
      if (emitted_.size() <= v.index) emitted_.resize(v.index + 1, false);
      if (!emitted_[v.index]) {
        emitted_[v.index] = true;
        auto clause = node_clause(it->second);
        pending_.push_back(std::move(clause));
      }
    } else if (theory_.is_atom(v)) {
      if (auto e = theory_.assert_atom(v, true)) {
        ++stats_.theory_conflicts;
        pending_.push_back(e->clause());
      }
    }
  }
  in_callback_ = false;
  return std::move(pending_);
}

void TableauEncoder::on_new_level() { marks_.push_back(theory_.mark()); }

void TableauEncoder::on_backtrack(std::uint32_t level) {
  if (level >= marks_.size()) return;
  theory_.retract_to(marks_[level]);
  marks_.resize(level);
}

std::vector<sat::ClauseLits> TableauEncoder::on_model(const sat::AssignmentView& model) {
  ++stats_.models;
  if (auto e = theory_.final_check(false)) {
    ++stats_.theory_conflicts;
    return {e->clause()};
  }
  // Walk the closed tableau from a selected root.
  std::vector<std::pair<std::uint32_t, std::optional<std::uint32_t>>> todo;
  for (const auto& [copy, var] : roots_)
    if (model.value(var)) {
      todo.emplace_back(copy, std::nullopt);
      break;
    }
  std::vector<std::uint32_t> reached;
  while (!todo.empty()) {
    auto [copy, entry] = todo.back();
    todo.pop_back();
    reached.push_back(copy);
    for (std::uint32_t l = 0; l < copies_[copy].nodes.size(); ++l) {
      if (entry && *entry == l) continue;
      auto it = extensions_.find(Node{copy, l});
      if (it == extensions_.end()) continue;
      for (const auto& ext : it->second)
        if (model.value(ext.var)) {
          todo.emplace_back(ext.child, ext.entry);
          break;
        }
    }
  }
  std::sort(reached.begin(), reached.end());
  std::vector<std::uint32_t> count(problem_->size(), 0);
  std::vector<MatrixCopy> matrix;
  for (auto id : reached) {
    MatrixCopy m;
    m.clause = copies_[id].clause;
    m.k = ++count[m.clause];
    m.base = copies_[id].base;
    m.active.assign(copies_[id].nodes.size(), true);
    matrix.push_back(std::move(m));
  }
  proof_ = extract_matrix(theory_, std::move(matrix), false);
  return {};
}

sat::SolveOutcome TableauEncoder::solve(sat::Budget budget) {
  solver_.set_budget(budget);
  proof_.reset();
  const auto before = solver_.stats();
  auto outcome = solver_.solve();
  const auto& after = solver_.stats();
  stats_.solves += after.solves - before.solves;
  stats_.conflicts += after.conflicts - before.conflicts;
  stats_.decisions += after.decisions - before.decisions;
  stats_.propagations += after.propagations - before.propagations;
  return outcome;
}

SearchResult prove_tableau(const Problem& problem, const TableauOptions& options) {
  SearchResult result;
  for (std::uint32_t d = 1; d <= options.max_depth; ++d) {
    if (options.limits.expired()) {
      result.status = SearchResult::Status::Unknown;
      result.reason = "timeout";
      return result;
    }
    TableauEncoder encoder(problem, d);
    sat::Budget budget;
    budget.deadline = options.limits.deadline;
    auto outcome = encoder.solve(budget);
    result.stats.add(encoder.stats());
    ++result.stats.iterations;
    if (sat::is_sat(outcome)) {
      result.status = SearchResult::Status::Proof;
      result.matrix = encoder.proof();
      return result;
    }
    if (sat::is_unknown(outcome)) {
      result.status = SearchResult::Status::Unknown;
      result.reason = std::get<sat::Unknown>(outcome).reason;
      return result;
    }
    if (!encoder.cut()) {
      result.status = SearchResult::Status::NonTheorem;
      result.reason = "refuted without reaching the depth limit";
      return result;
    }
  }
  result.status = SearchResult::Status::Exhausted;
  result.reason = "depth limit";
  return result;
}

}  // namespace conmat
