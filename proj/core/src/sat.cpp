#include "conmat/sat.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <ostream>

namespace conmat::sat {

std::string to_string(Lit l) {
  return (l.negative() ? "-" : "") + std::to_string(l.var().index + 1);
}

bool AssignmentView::value(Var v) const {
  return solver_->assigns_.at(v.index) == Value::True;
}

bool AssignmentView::value(Lit l) const { return value(l.var()) != l.negative(); }

namespace {

double luby(double y, int x) {
  int size = 1, seq = 0;
  for (; size < x + 1; ++seq) size = 2 * size + 1;
  while (size - 1 != x) {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

}  // namespace

Solver::Solver() = default;
Solver::~Solver() = default;

Var Solver::new_var() {
  const Var v{num_vars()};
  assigns_.push_back(Value::Unassigned);
  level_.push_back(0);
  reason_.push_back(kNoReason);
  phase_.push_back(true);
  observed_.push_back(false);
  activity_.push_back(0.0);
  seen_.push_back(0);
  heap_pos_.push_back(-1);
  watches_.emplace_back();
  watches_.emplace_back();
  heap_insert(v);
  return v;
}

void Solver::observe(Var v) { observed_.at(v.index) = true; }

Value Solver::lit_value(Lit l) const {
  const Value a = assigns_[l.var().index];
  if (a == Value::Unassigned) return a;
  return ((a == Value::True) != l.negative()) ? Value::True : Value::False;
}

Value Solver::value(Lit l) const { return lit_value(l); }

std::size_t Solver::num_clauses() const {
  return static_cast<std::size_t>(std::count_if(
      clauses_.begin(), clauses_.end(),
      [](const ClauseData& c) { return !c.learnt && !c.deleted; }));
}

void Solver::enqueue(Lit l, CRef reason) {
  const auto v = l.var().index;
  assert(assigns_[v] == Value::Unassigned);
  assigns_[v] = l.negative() ? Value::False : Value::True;
  level_[v] = decision_level();
  reason_[v] = reason;
  trail_.push_back(l);
}

Solver::CRef Solver::attach_new(std::vector<Lit> lits, bool learnt) {
  const auto cref = static_cast<CRef>(clauses_.size());
  clauses_.push_back(ClauseData{std::move(lits), 0.0, learnt, false});
  if (learnt) {
    learnts_.push_back(cref);
    bump_clause(clauses_.back());
  }
  attach(cref);
  return cref;
}

void Solver::attach(CRef c) {
  const auto& lits = clauses_[c].lits;
  assert(lits.size() >= 2);
  watches_[lits[0].code()].push_back(Watcher{c, lits[1]});
  watches_[lits[1].code()].push_back(Watcher{c, lits[0]});
}

void Solver::add_clause(ClauseLits lits) {
  if (!ok_) return;
  cancel_until(0);
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == ~lits[i]) return;  // tautology
    const Value v = lit_value(lits[i]);
    if (v == Value::True) return;
    if (v == Value::Unassigned) kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    ok_ = false;
  } else if (kept.size() == 1) {
    enqueue(kept[0], kNoReason);
    if (propagate() != kNoReason) ok_ = false;
  } else {
    attach_new(std::move(kept), false);
  }
}

Solver::CRef Solver::propagate() {
  CRef conflict = kNoReason;
  while (qhead_ < trail_.size()) {
    const Lit p = trail_[qhead_++];
    const Lit false_lit = ~p;
    auto& ws = watches_[false_lit.code()];
    std::size_t i = 0, j = 0;
    ++stats_.propagations;
    while (i < ws.size()) {
      const Watcher w = ws[i];
      if (clauses_[w.cref].deleted) {
        ++i;
        continue;
      }
      if (lit_value(w.blocker) == Value::True) {
        ws[j++] = ws[i++];
        continue;
      }
      auto& c = clauses_[w.cref].lits;
      if (c[0] == false_lit) std::swap(c[0], c[1]);
      ++i;
      const Lit first = c[0];
      const Watcher nw{w.cref, first};
      if (first != w.blocker && lit_value(first) == Value::True) {
        ws[j++] = nw;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.size(); ++k) {
        if (lit_value(c[k]) != Value::False) {
          std::swap(c[1], c[k]);
          watches_[c[1].code()].push_back(nw);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      ws[j++] = nw;
      if (lit_value(first) == Value::False) {
        conflict = w.cref;
        qhead_ = trail_.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      } else {
        enqueue(first, w.cref);
      }
    }
    ws.resize(j);
    if (conflict != kNoReason) break;
  }
  return conflict;
}

void Solver::new_decision_level() {
  trail_lim_.push_back(static_cast<std::uint32_t>(trail_.size()));
  if (propagator_) propagator_->on_new_level();
}

void Solver::cancel_until(std::uint32_t lvl) {
  if (decision_level() <= lvl) return;
  for (std::size_t c = trail_.size(); c-- > trail_lim_[lvl];) {
    const Var v = trail_[c].var();
    assigns_[v.index] = Value::Unassigned;
    reason_[v.index] = kNoReason;
    phase_[v.index] = trail_[c].negative();
    heap_insert(v);
  }
  trail_.resize(trail_lim_[lvl]);
  trail_lim_.resize(lvl);
  qhead_ = trail_.size();
  notified_ = std::min(notified_, trail_.size());
  if (propagator_) propagator_->on_backtrack(lvl);
}

void Solver::analyze(CRef conflict, std::vector<Lit>& learnt,
                     std::uint32_t& bt_level) {
  learnt.clear();
  learnt.emplace_back();
  int path = 0;
  std::optional<Lit> p;
  std::size_t index = trail_.size();
  CRef confl = conflict;
  do {
    assert(confl != kNoReason);
    ClauseData& c = clauses_[confl];
    if (c.learnt) bump_clause(c);
    for (const Lit q : c.lits) {
      if (p && q.var() == p->var()) continue;
      const auto v = q.var().index;
      if (!seen_[v] && level_[v] > 0) {
        seen_[v] = 1;
        bump_var(q.var());
        if (level_[v] >= decision_level())
          ++path;
        else
          learnt.push_back(q);
      }
    }
    while (!seen_[trail_[--index].var().index]) {
    }
    p = trail_[index];
    confl = reason_[p->var().index];
    seen_[p->var().index] = 0;
    --path;
  } while (path > 0);
  learnt[0] = ~*p;

  // Local minimisation: drop literals implied by others in the clause.
  std::vector<Lit> kept{learnt[0]};
  for (std::size_t i = 1; i < learnt.size(); ++i) {
    const auto v = learnt[i].var().index;
    const CRef r = reason_[v];
    bool redundant = r != kNoReason;
    if (redundant) {
      for (const Lit q : clauses_[r].lits) {
        if (q.var().index == v) continue;
        if (!seen_[q.var().index] && level_[q.var().index] > 0) {
          redundant = false;
          break;
        }
      }
    }
    if (!redundant) kept.push_back(learnt[i]);
  }
  for (std::size_t i = 1; i < learnt.size(); ++i) seen_[learnt[i].var().index] = 0;
  learnt = std::move(kept);

  bt_level = 0;
  if (learnt.size() > 1) {
    std::size_t max_i = 1;
    for (std::size_t i = 2; i < learnt.size(); ++i)
      if (level_[learnt[i].var().index] > level_[learnt[max_i].var().index]) max_i = i;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = level_[learnt[1].var().index];
  }
}

std::vector<Lit> Solver::analyze_final(Lit p) {
  std::vector<Lit> core{p};
  if (decision_level() == 0) return core;
  seen_[p.var().index] = 1;
  for (std::size_t i = trail_.size(); i-- > trail_lim_[0];) {
    const auto v = trail_[i].var().index;
    if (!seen_[v]) continue;
    if (reason_[v] == kNoReason) {
      if (trail_[i] != p) core.push_back(trail_[i]);
    } else {
      for (const Lit q : clauses_[reason_[v]].lits)
        if (q.var().index != v && level_[q.var().index] > 0) seen_[q.var().index] = 1;
    }
    seen_[v] = 0;
  }
  seen_[p.var().index] = 0;
  return core;
}

std::optional<Solver::CRef> Solver::integrate_external(std::vector<Lit> lits) {
  ++stats_.external_clauses;
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  std::vector<Lit> kept;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i + 1 < lits.size() && lits[i + 1] == ~lits[i]) return std::nullopt;
    const Value v = lit_value(lits[i]);
    const bool root = level_[lits[i].var().index] == 0;
    if (v == Value::True && root) return std::nullopt;
    if (v == Value::False && root) continue;
    kept.push_back(lits[i]);
  }
  if (kept.empty()) {
    ok_ = false;
    return std::nullopt;
  }
  if (kept.size() == 1) {
    cancel_until(0);
    if (lit_value(kept[0]) == Value::Unassigned) enqueue(kept[0], kNoReason);
    return std::nullopt;
  }

  auto rank = [&](Lit l) -> std::pair<int, std::int64_t> {
    switch (lit_value(l)) {
      case Value::True: return {0, level_[l.var().index]};
      case Value::Unassigned: return {1, 0};
      case Value::False: return {2, -static_cast<std::int64_t>(level_[l.var().index])};
    }
    return {3, 0};
  };
  std::stable_sort(kept.begin(), kept.end(),
                   [&](Lit a, Lit b) { return rank(a) < rank(b); });
  const CRef cref = attach_new(std::move(kept), false);
  const auto& c = clauses_[cref].lits;
  const Value v0 = lit_value(c[0]);
  const Value v1 = lit_value(c[1]);
  if (v1 != Value::False) return std::nullopt;

  const std::uint32_t l1 = level_[c[1].var().index];
  if (v0 == Value::True) {
    if (level_[c[0].var().index] > l1) {
      cancel_until(l1);
      enqueue(c[0], cref);
    }
    return std::nullopt;
  }
  if (v0 == Value::Unassigned) {
    cancel_until(l1);
    enqueue(c[0], cref);
    return std::nullopt;
  }
  const std::uint32_t l0 = level_[c[0].var().index];
  if (l1 < l0) {
    cancel_until(l1);
    enqueue(c[0], cref);
    return std::nullopt;
  }
  cancel_until(l0);
  return cref;
}

bool Solver::budget_exhausted() const {
  if (budget_.deadline && std::chrono::steady_clock::now() > *budget_.deadline)
    return true;
  return false;
}

void Solver::bump_var(Var v) {
  if ((activity_[v.index] += var_inc_) > 1e100) {
    for (double& a : activity_) a *= 1e-100;
    var_inc_ *= 1e-100;
  }
  if (heap_pos_[v.index] >= 0) heap_up(static_cast<std::size_t>(heap_pos_[v.index]));
}

void Solver::bump_clause(ClauseData& c) {
  if ((c.activity += clause_inc_) > 1e20) {
    for (CRef r : learnts_) clauses_[r].activity *= 1e-20;
    clause_inc_ *= 1e-20;
  }
}

void Solver::decay() {
  var_inc_ /= 0.95;
  clause_inc_ /= 0.999;
}

void Solver::reduce_learnts() {
  std::sort(learnts_.begin(), learnts_.end(), [&](CRef a, CRef b) {
    return clauses_[a].activity < clauses_[b].activity;
  });
  std::vector<CRef> keep;
  const std::size_t half = learnts_.size() / 2;
  for (std::size_t i = 0; i < learnts_.size(); ++i) {
    ClauseData& c = clauses_[learnts_[i]];
    const Lit first = c.lits[0];
    const bool locked = lit_value(first) == Value::True &&
                        reason_[first.var().index] == learnts_[i];
    if (i < half && c.lits.size() > 2 && !locked) {
      c.deleted = true;
      c.lits.clear();
      c.lits.shrink_to_fit();
    } else {
      keep.push_back(learnts_[i]);
    }
  }
  learnts_ = std::move(keep);
  for (auto& ws : watches_)
    ws.erase(std::remove_if(ws.begin(), ws.end(),
                            [&](const Watcher& w) { return clauses_[w.cref].deleted; }),
             ws.end());
  max_learnts_ *= 1.1;
}

void Solver::heap_insert(Var v) {
  if (heap_pos_[v.index] >= 0) return;
  heap_pos_[v.index] = static_cast<std::int64_t>(heap_.size());
  heap_.push_back(v.index);
  heap_up(heap_.size() - 1);
}

void Solver::heap_up(std::size_t i) {
  const std::uint32_t x = heap_[i];
  while (i > 0) {
    const std::size_t parent = (i - 1) / 2;
    if (!heap_less(x, heap_[parent])) break;
    heap_[i] = heap_[parent];
    heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
    i = parent;
  }
  heap_[i] = x;
  heap_pos_[x] = static_cast<std::int64_t>(i);
}

void Solver::heap_down(std::size_t i) {
  const std::uint32_t x = heap_[i];
  for (;;) {
    std::size_t child = 2 * i + 1;
    if (child >= heap_.size()) break;
    if (child + 1 < heap_.size() && heap_less(heap_[child + 1], heap_[child])) ++child;
    if (!heap_less(heap_[child], x)) break;
    heap_[i] = heap_[child];
    heap_pos_[heap_[i]] = static_cast<std::int64_t>(i);
    i = child;
  }
  heap_[i] = x;
  heap_pos_[x] = static_cast<std::int64_t>(i);
}

std::optional<Var> Solver::heap_pop() {
  if (heap_.empty()) return std::nullopt;
  const std::uint32_t top = heap_[0];
  heap_[0] = heap_.back();
  heap_pos_[heap_[0]] = 0;
  heap_.pop_back();
  heap_pos_[top] = -1;
  if (!heap_.empty()) heap_down(0);
  return Var{top};
}

std::optional<Lit> Solver::pick_branch() {
  while (auto v = heap_pop()) {
    if (assigns_[v->index] == Value::Unassigned) return Lit(*v, phase_[v->index]);
  }
  return std::nullopt;
}

void Solver::notify_propagator() {
  while (notified_ < trail_.size()) {
    const Lit l = trail_[notified_++];
    if (!observed_[l.var().index]) continue;
    auto clauses = propagator_->on_assign(l);
    if (clauses.empty()) continue;
    for (auto& c : clauses) external_.push_back(std::move(c));
    return;
  }
}

SolveOutcome Solver::solve(const std::vector<Lit>& assumptions) {
  ++stats_.solves;
  assumptions_ = assumptions;
  cancel_until(0);
  if (!ok_) return Unsat{};
  for (Lit a : assumptions_)
    if (a.var().index >= num_vars()) return Unknown{"assumption over unknown variable"};
  if (max_learnts_ == 0)
    max_learnts_ = std::max<double>(2000.0, static_cast<double>(num_clauses()) / 3.0);

  const std::uint64_t start_conflicts = stats_.conflicts;
  std::uint64_t restart_conflicts = 0;
  double restart_limit = 100 * luby(2, static_cast<int>(stats_.restarts));
  std::vector<Lit> learnt;

  // Analyses a conflict and backjumps; false when the clause set is refuted.
  auto handle_conflict = [&](CRef confl) -> bool {
    ++stats_.conflicts;
    ++restart_conflicts;
    if (decision_level() == 0) {
      ok_ = false;
      return false;
    }
    std::uint32_t bt = 0;
    analyze(confl, learnt, bt);
    cancel_until(bt);
    if (learnt.size() == 1) {
      enqueue(learnt[0], kNoReason);
    } else {
      const CRef c = attach_new(learnt, true);
      enqueue(clauses_[c].lits[0], c);
    }
    decay();
    return true;
  };

  auto out_of_budget = [&]() {
    if (budget_.max_conflicts && stats_.conflicts - start_conflicts > *budget_.max_conflicts)
      return true;
    return budget_exhausted();
  };

  std::uint64_t steps = 0;
  for (;;) {
    if ((++steps & 255) == 0 && out_of_budget()) {
      cancel_until(0);
      return Unknown{"budget exhausted"};
    }
    const CRef confl = propagate();
    if (confl != kNoReason) {
      if (!handle_conflict(confl)) return Unsat{};
      if (out_of_budget()) {
        cancel_until(0);
        return Unknown{"budget exhausted"};
      }
      continue;
    }

    if (!external_.empty()) {
      auto c = std::move(external_.front());
      external_.pop_front();
      auto conflict = integrate_external(std::move(c));
      if (!ok_) return Unsat{};
      if (conflict && !handle_conflict(*conflict)) return Unsat{};
      continue;
    }

    if (propagator_ && notified_ < trail_.size()) {
      notify_propagator();
      continue;
    }

    if (restart_conflicts >= restart_limit) {
      ++stats_.restarts;
      restart_conflicts = 0;
      restart_limit = 100 * luby(2, static_cast<int>(stats_.restarts));
      cancel_until(0);
      continue;
    }
    if (static_cast<double>(learnts_.size()) >= max_learnts_ + trail_.size()) reduce_learnts();

    std::optional<Lit> next;
    while (decision_level() < assumptions_.size()) {
      const Lit a = assumptions_[decision_level()];
      const Value v = lit_value(a);
      if (v == Value::True) {
        new_decision_level();
      } else if (v == Value::False) {
        auto core = analyze_final(a);
        cancel_until(0);
        return Unsat{std::move(core)};
      } else {
        next = a;
        break;
      }
    }
    if (!next) {
      next = pick_branch();
      if (!next) {
        if (propagator_) {
          ++stats_.model_checks;
          auto clauses = propagator_->on_model(AssignmentView(*this));
          if (!clauses.empty()) {
            for (auto& c : clauses) external_.push_back(std::move(c));
            continue;
          }
        }
        std::vector<bool> values(num_vars());
        for (std::uint32_t i = 0; i < num_vars(); ++i)
          values[i] = assigns_[i] == Value::True;
        cancel_until(0);
        return Sat{Model(std::move(values))};
      }
      ++stats_.decisions;
    }
    new_decision_level();
    enqueue(*next, kNoReason);
  }
}

void Solver::write_dimacs(std::ostream& out) const {
  std::size_t units = 0;
  for (Lit l : trail_)
    if (level_[l.var().index] == 0) ++units;
  out << "p cnf " << num_vars() << ' ' << (num_clauses() + units) << '\n';
  for (Lit l : trail_)
    if (level_[l.var().index] == 0) out << to_string(l) << " 0\n";
  for (const auto& c : clauses_) {
    if (c.learnt || c.deleted) continue;
    for (Lit l : c.lits) out << to_string(l) << ' ';
    out << "0\n";
  }
}

void cardinality_exactly(Solver& solver, const std::vector<Var>& vars,
                         std::uint32_t count) {
  const std::size_t n = vars.size();
  if (count > n) {
    solver.add_clause(ClauseLits{});
    return;
  }
  if (count == 0) {
    for (Var v : vars) solver.add_clause({neg(v)});
    return;
  }
  if (count == n) {
    for (Var v : vars) solver.add_clause({pos(v)});
    return;
  }
  // reg[i][j-1] <=> at least j of vars[0..i] are true, for j <= min(i+1, count+1).
  const std::uint32_t width = count + 1;
  std::vector<std::vector<Var>> reg(n);
  auto at = [&](std::size_t i, std::uint32_t j) -> std::optional<Var> {
    if (j == 0 || j > i + 1 || j > width) return std::nullopt;
    return reg[i][j - 1];
  };
  for (std::size_t i = 0; i < n; ++i) {
    const auto limit = static_cast<std::uint32_t>(std::min<std::size_t>(i + 1, width));
    for (std::uint32_t j = 1; j <= limit; ++j) reg[i].push_back(solver.new_var());
    const Lit x = pos(vars[i]);
    for (std::uint32_t j = 1; j <= limit; ++j) {
      const Lit r = pos(*at(i, j));
      const auto prev_same = i > 0 ? at(i - 1, j) : std::nullopt;
      const auto prev_less = i > 0 ? at(i - 1, j - 1) : std::nullopt;
      const bool prev_less_true = j == 1;  // "at least 0" holds trivially
      if (prev_same) solver.add_clause({neg(*prev_same), r});
      if (prev_less_true)
        solver.add_clause({~x, r});
      else if (prev_less)
        solver.add_clause({~x, neg(*prev_less), r});
      // r -> prev_same | x, and r -> prev_same | prev_less
      ClauseLits a{~r, x};
      if (prev_same) a.push_back(pos(*prev_same));
      solver.add_clause(a);
      if (!prev_less_true) {
        ClauseLits b{~r};
        if (prev_same) b.push_back(pos(*prev_same));
        if (prev_less) b.push_back(pos(*prev_less));
        solver.add_clause(b);
      }
    }
  }
  solver.add_clause({pos(*at(n - 1, count))});
  if (auto over = at(n - 1, count + 1)) solver.add_clause({neg(*over)});
}

}  // namespace conmat::sat
