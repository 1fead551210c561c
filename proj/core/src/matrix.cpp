#include "conmat/matrix.hpp"

#include <algorithm>
#include <set>
#include <stdexcept>

namespace conmat {

void SearchStats::absorb(const sat::SolverStats& s) {
  solves += s.solves;
  conflicts += s.conflicts;
  decisions += s.decisions;
  propagations += s.propagations;
}

void SearchStats::add(const SearchStats& o) {
  solves += o.solves;
  conflicts += o.conflicts;
  decisions += o.decisions;
  propagations += o.propagations;
  models += o.models;
  theory_conflicts += o.theory_conflicts;
  open_path_blocks += o.open_path_blocks;
  symmetry_blocks += o.symmetry_blocks;
  iterations += o.iterations;
  cores += o.cores;
  runs.insert(runs.end(), o.runs.begin(), o.runs.end());
}

namespace {

sat::SolverStats delta(const sat::SolverStats& after, const sat::SolverStats& before) {
  sat::SolverStats d;
  d.solves = after.solves - before.solves;
  d.conflicts = after.conflicts - before.conflicts;
  d.decisions = after.decisions - before.decisions;
  d.propagations = after.propagations - before.propagations;
  return d;
}

bool dual(const Literal& a, const Literal& b) {
  return a.positive != b.positive && a.predicate == b.predicate && a.args == b.args;
}

std::uint64_t slot(std::uint32_t copy, std::uint32_t literal) {
  return (static_cast<std::uint64_t>(copy) << 32) | literal;
}

}  // namespace

std::optional<std::vector<std::uint32_t>> spanning_check(const UnificationTheory& theory,
                                                         const std::vector<MatrixCopy>& copies) {
  const Problem& problem = theory.problem();
  sat::Solver solver;
  std::map<std::string, sat::Var> atoms;
  std::vector<std::vector<std::pair<std::uint32_t, sat::Lit>>> lits(copies.size());
  for (std::size_t i = 0; i < copies.size(); ++i) {
    const auto& copy = copies[i];
    const auto n = static_cast<std::uint32_t>(problem.clause(copy.clause).literals.size());
    sat::ClauseLits clause;
    for (std::uint32_t l = 0; l < n; ++l) {
      if (!copy.is_active(l)) continue;
      Literal g = theory.resolve_literal(Occurrence{copy.clause, l, copy.base});
      const bool positive = g.positive;
      g.positive = true;
      auto key = to_string(g, problem.symbols());
      auto it = atoms.find(key);
      if (it == atoms.end()) it = atoms.emplace(std::move(key), solver.new_var()).first;
      const sat::Lit lit(it->second, !positive);
      lits[i].emplace_back(l, lit);
      clause.push_back(lit);
    }
    solver.add_clause(clause);
  }
  auto outcome = solver.solve();
  if (!sat::is_sat(outcome)) return std::nullopt;
  const auto& model = std::get<sat::Sat>(outcome).model;
  std::vector<std::uint32_t> path(copies.size());
  for (std::size_t i = 0; i < copies.size(); ++i)
    for (const auto& [l, lit] : lits[i])
      if (model.value(lit)) path[i] = l;
  return path;
}

bool connections_span(const Problem& problem, const std::vector<MatrixCopy>& copies,
                      const std::vector<MatrixConnection>& connections) {
  sat::Solver solver;
  std::map<std::uint64_t, sat::Var> vars;
  auto var = [&](std::uint32_t copy, std::uint32_t literal) {
    auto it = vars.find(slot(copy, literal));
    if (it == vars.end()) it = vars.emplace(slot(copy, literal), solver.new_var()).first;
    return it->second;
  };
  for (std::uint32_t i = 0; i < copies.size(); ++i) {
    sat::ClauseLits clause;
    const auto n = static_cast<std::uint32_t>(problem.clause(copies[i].clause).literals.size());
    for (std::uint32_t l = 0; l < n; ++l)
      if (copies[i].is_active(l)) clause.push_back(sat::pos(var(i, l)));
    solver.add_clause(clause);
  }
  for (const auto& c : connections)
    solver.add_clause({sat::neg(var(c.copy_a, c.lit_a)), sat::neg(var(c.copy_b, c.lit_b))});
  return sat::is_unsat(solver.solve());
}

MatrixEncoder::MatrixEncoder(const Problem& problem, EncoderConfig config)
    : problem_(&problem), config_(std::move(config)), order_(problem), theory_(problem) {
  solver_.set_propagator(this);
  const auto n = static_cast<std::uint32_t>(problem.size());
  num_copies_.resize(n);
  first_copy_.resize(n);
  VariableSpace space;
  for (std::uint32_t c = 0; c < n; ++c) {
    num_copies_[c] = config_.mode == EncoderConfig::Mode::Depth ? config_.depth
                                                                 : config_.copies.at(c);
    first_copy_[c] = static_cast<std::uint32_t>(copies_.size());
    for (std::uint32_t k = 1; k <= num_copies_[c]; ++k) {
      CopyInfo info;
      info.key = CopyKey{c, k};
      info.base = space.base(c, k, problem.clause(c).num_vars);
      info.selector = solver_.new_var();
      solver_.observe(info.selector);
      copy_of_selector_[info.selector.index] = static_cast<std::uint32_t>(copies_.size());
      copies_.push_back(info);
    }
  }
  selector_count_ = copies_.size();

  sat::ClauseLits start;
  for (std::uint32_t s : problem.start_clauses())
    if (num_copies_[s] > 0) start.push_back(sat::pos(selector(s, 1)));
  solver_.add_clause(start);

  for (std::uint32_t c = 0; c < n; ++c) {
    std::vector<sat::Var> sels;
    for (std::uint32_t k = 1; k <= num_copies_[c]; ++k) sels.push_back(selector(c, k));
    if (config_.refinements.copy_order)
      for (auto& clause : copy_ordering_clauses(sels)) solver_.add_clause(clause);

    const auto& clause = problem.clause(c);
    for (std::uint32_t i = 1; i <= num_copies_[c]; ++i) {
      for (std::uint32_t j = i + 1; j <= num_copies_[c]; ++j) {
        const auto si = sat::neg(selector(c, i));
        const auto sj = sat::neg(selector(c, j));
        if (clause.is_ground()) {
          solver_.add_clause({si, sj});
          continue;
        }
        const TupleRef ti{c, base(c, i)};
        const TupleRef tj{c, base(c, j)};
        const sat::Var distinct = solver_.new_var();
        solver_.observe(distinct);
        theory_.register_distinct(distinct, ti, tj);
        solver_.add_clause({si, sj, sat::pos(distinct)});
        if (config_.refinements.substitution_order) {
          const sat::Var ordered = solver_.new_var();
          solver_.observe(ordered);
          theory_.register_order(ordered, ti, tj);
          solver_.add_clause({si, sj, sat::pos(ordered)});
        }
      }
    }
  }

  if (config_.mode == EncoderConfig::Mode::Depth) {
    std::vector<sat::Var> all;
    for (const auto& info : copies_) all.push_back(info.selector);
    sat::cardinality_exactly(solver_, all, config_.depth);
  } else {
    for (std::uint32_t c = 0; c < n; ++c)
      if (num_copies_[c] > 0 && c < config_.guarded.size() && config_.guarded[c])
        clause_of_cap_[selector(c, num_copies_[c]).index] = c;
  }
}

MatrixEncoder::~MatrixEncoder() { solver_.set_propagator(nullptr); }

std::uint32_t MatrixEncoder::copies(std::uint32_t clause) const { return num_copies_.at(clause); }

std::uint32_t MatrixEncoder::copy_index(CopyKey key) const {
  if (key.k < 1 || key.k > num_copies_.at(key.clause))
    throw std::out_of_range("no such clause copy");
  return first_copy_[key.clause] + key.k - 1;
}

sat::Var MatrixEncoder::selector(std::uint32_t clause, std::uint32_t k) const {
  return copies_[copy_index(CopyKey{clause, k})].selector;
}

VarId MatrixEncoder::base(std::uint32_t clause, std::uint32_t k) const {
  return copies_[copy_index(CopyKey{clause, k})].base;
}

bool MatrixEncoder::is_active(std::uint32_t clause, std::uint32_t literal) const {
  if (config_.active.empty() || config_.active[clause].empty()) return true;
  return config_.active[clause][literal];
}

void MatrixEncoder::emit(sat::ClauseLits clause) {
  if (in_callback_) pending_.push_back(std::move(clause));
  else solver_.add_clause(std::move(clause));
}

std::optional<sat::Var> MatrixEncoder::connection(CopyKey a, std::uint32_t lit_a, CopyKey b,
                                                  std::uint32_t lit_b) {
  if (a == b) return std::nullopt;
  if (!problem_->connectable(LiteralRef{a.clause, lit_a}, LiteralRef{b.clause, lit_b}))
    return std::nullopt;
  const auto ia = copy_index(a);
  const auto ib = copy_index(b);
  auto key = std::make_pair(slot(ia, lit_a), slot(ib, lit_b));
  if (key.first > key.second) std::swap(key.first, key.second);
  if (auto it = conn_keys_.find(key); it != conn_keys_.end()) return it->second;

  const sat::Var v = solver_.new_var();
  solver_.observe(v);
  conn_keys_.emplace(key, v);
  theory_.register_connect(v, Occurrence{a.clause, lit_a, copies_[ia].base},
                           Occurrence{b.clause, lit_b, copies_[ib].base});
  emit({sat::neg(v), sat::pos(copies_[ia].selector)});
  emit({sat::neg(v), sat::pos(copies_[ib].selector)});
  return v;
}

std::vector<sat::Lit> MatrixEncoder::assumptions() const {
  std::vector<std::pair<std::uint32_t, sat::Lit>> caps;
  for (const auto& [sel, clause] : clause_of_cap_)
    caps.emplace_back(clause, sat::neg(sat::Var{sel}));
  std::sort(caps.begin(), caps.end());
  std::vector<sat::Lit> out;
  for (const auto& c : caps) out.push_back(c.second);
  return out;
}

std::optional<std::uint32_t> MatrixEncoder::capped_clause(sat::Lit lit) const {
  if (!lit.negative()) return std::nullopt;
  auto it = clause_of_cap_.find(lit.var().index);
  if (it == clause_of_cap_.end()) return std::nullopt;
  return it->second;
}

sat::ClauseLits MatrixEncoder::connectivity_clause(std::uint32_t copy, std::uint32_t literal) {
  const CopyKey key = copies_[copy].key;
  sat::ClauseLits out{sat::neg(copies_[copy].selector)};
  for (const LiteralRef& p : problem_->partners(LiteralRef{key.clause, literal})) {
    for (std::uint32_t k = 1; k <= num_copies_[p.clause]; ++k) {
      const CopyKey other{p.clause, k};
      if (other == key) continue;
      if (!is_active(p.clause, p.literal)) {
        out.push_back(sat::pos(selector(p.clause, k)));
        continue;
      }
      if (auto v = connection(key, literal, other, p.literal)) out.push_back(sat::pos(*v));
    }
    // A partner clause below its cap could still grow: the guarded top
    // selector stands for the copies beyond it, so the cap reaches the core.
    if (config_.mode == EncoderConfig::Mode::Core && num_copies_[p.clause] > 0) {
      const sat::Var top = selector(p.clause, num_copies_[p.clause]);
      if (clause_of_cap_.count(top.index)) out.push_back(sat::pos(top));
    }
  }
  return out;
}

sat::ClauseLits MatrixEncoder::path_clause(const PathBlock& block) {
  sat::ClauseLits out;
  std::set<CopyKey> selected(block.selected.begin(), block.selected.end());
  for (const auto& key : block.selected) out.push_back(sat::neg(selector(key.clause, key.k)));
  for (std::size_t i = 0; i < block.path.size(); ++i)
    for (std::size_t j = i + 1; j < block.path.size(); ++j)
      if (auto v = connection(block.path[i].copy, block.path[i].literal, block.path[j].copy,
                              block.path[j].literal))
        out.push_back(sat::pos(*v));
  if (config_.mode == EncoderConfig::Mode::Core) {
    for (const auto& step : block.path) {
      for (const LiteralRef& p :
           problem_->partners(LiteralRef{step.copy.clause, step.literal})) {
        if (!is_active(p.clause, p.literal)) continue;
        for (std::uint32_t k = 1; k <= num_copies_[p.clause]; ++k) {
          if (selected.count(CopyKey{p.clause, k})) continue;
          if (auto v = connection(step.copy, step.literal, CopyKey{p.clause, k}, p.literal))
            out.push_back(sat::pos(*v));
        }
      }
    }
  }
  return out;
}

void MatrixEncoder::block_open_path(const PathBlock& block) {
  blocks_.push_back(block);
  // A block over copies this encoder lacks is satisfied by their absence.
  for (const auto& key : block.selected)
    if (key.k > num_copies_[key.clause]) return;
  emit(path_clause(block));
}

sat::SolveOutcome MatrixEncoder::solve(const std::vector<sat::Lit>& extra, sat::Budget budget) {
  solver_.set_budget(budget);
  const auto before = solver_.stats();
  proof_.reset();
  auto outcome = solver_.solve(extra);
  stats_.absorb(delta(solver_.stats(), before));
  return outcome;
}

RunRecord MatrixEncoder::record() const {
  RunRecord r;
  for (auto n : num_copies_) r.depth = std::max(r.depth, n);
  r.selectors = selector_count_;
  r.connections = conn_keys_.size();
  r.sat_vars = solver_.num_vars();
  return r;
}

std::vector<sat::ClauseLits> MatrixEncoder::on_assign(sat::Lit lit) {
  in_callback_ = true;
  pending_.clear();
  const sat::Var v = lit.var();
  if (auto it = copy_of_selector_.find(v.index); it != copy_of_selector_.end()) {
    auto& info = copies_[it->second];
    if (!lit.negative() && !info.emitted) {
      info.emitted = true;
      const auto n = static_cast<std::uint32_t>(problem_->clause(info.key.clause).literals.size());
      for (std::uint32_t l = 0; l < n; ++l) {
        if (!is_active(info.key.clause, l)) continue;
        auto clause = connectivity_clause(it->second, l);
        pending_.push_back(std::move(clause));
      }
    }
  } else if (!lit.negative() && theory_.is_atom(v)) {
    if (auto e = theory_.assert_atom(v, true)) {
      ++stats_.theory_conflicts;
      pending_.push_back(e->clause());
    }
  }
  in_callback_ = false;
  return std::move(pending_);
}

void MatrixEncoder::on_new_level() { marks_.push_back(theory_.mark()); }

void MatrixEncoder::on_backtrack(std::uint32_t level) {
  if (level >= marks_.size()) return;
  theory_.retract_to(marks_[level]);
  marks_.resize(level);
}

std::vector<std::uint32_t> MatrixEncoder::selected_copies(const sat::AssignmentView& model) const {
  std::vector<std::uint32_t> out;
  for (std::uint32_t i = 0; i < copies_.size(); ++i)
    if (model.value(copies_[i].selector)) out.push_back(i);
  return out;
}

namespace {

// Sigma-dual pairs between active literals of different copies. Fills
// `touched` with every literal position that has a partner.
std::vector<MatrixConnection> dual_pairs(const std::vector<MatrixCopy>& copies,
                                         const std::vector<std::vector<Literal>>& lits,
                                         std::set<std::uint64_t>* touched = nullptr) {
  std::vector<MatrixConnection> out;
  for (std::uint32_t a = 0; a < copies.size(); ++a)
    for (std::uint32_t b = a + 1; b < copies.size(); ++b)
      for (std::uint32_t la = 0; la < lits[a].size(); ++la)
        for (std::uint32_t lb = 0; lb < lits[b].size(); ++lb)
          if (copies[a].is_active(la) && copies[b].is_active(lb) &&
              dual(lits[a][la], lits[b][lb])) {
            out.push_back(MatrixConnection{a, la, b, lb});
            if (touched) {
              touched->insert(slot(a, la));
              touched->insert(slot(b, lb));
            }
          }
  return out;
}

bool all_touched(const std::vector<std::vector<Literal>>& lits,
                 const std::set<std::uint64_t>& touched) {
  for (std::uint32_t i = 0; i < lits.size(); ++i)
    for (std::uint32_t l = 0; l < lits[i].size(); ++l)
      if (!touched.count(slot(i, l))) return false;
  return true;
}

}  // namespace

Matrix extract_matrix(const UnificationTheory& theory, std::vector<MatrixCopy> copies,
                      bool splitting) {
  const Problem& problem = theory.problem();
  auto instances = [&](const std::vector<MatrixCopy>& cs) {
    std::vector<std::vector<Literal>> lits(cs.size());
    for (std::size_t i = 0; i < cs.size(); ++i) {
      const auto n = static_cast<std::uint32_t>(problem.clause(cs[i].clause).literals.size());
      for (std::uint32_t l = 0; l < n; ++l)
        lits[i].push_back(theory.resolve_literal(Occurrence{cs[i].clause, l, cs[i].base}));
    }
    return lits;
  };

  // Drop copies while the rest keeps a start clause, spans with all dual
  // pairs and (outside splitting) leaves no literal without a partner.
  for (std::size_t i = copies.size(); i-- > 0;) {
    auto rest = copies;
    rest.erase(rest.begin() + static_cast<std::ptrdiff_t>(i));
    if (std::none_of(rest.begin(), rest.end(),
                     [&](const MatrixCopy& c) { return problem.is_start(c.clause); }))
      continue;
    const auto lits = instances(rest);
    std::set<std::uint64_t> touched;
    const auto conns = dual_pairs(rest, lits, &touched);
    if (!splitting && !all_touched(lits, touched)) continue;
    if (connections_span(problem, rest, conns)) copies = std::move(rest);
  }

  // Minimal spanning connection set.
  const auto lits = instances(copies);
  auto all = dual_pairs(copies, lits);
  for (std::size_t i = all.size(); i-- > 0;) {
    auto trial = all;
    trial.erase(trial.begin() + static_cast<std::ptrdiff_t>(i));
    if (!splitting) {
      std::set<std::uint64_t> touched;
      for (const auto& c : trial) {
        touched.insert(slot(c.copy_a, c.lit_a));
        touched.insert(slot(c.copy_b, c.lit_b));
      }
      if (!all_touched(lits, touched)) continue;
    }
    if (connections_span(problem, copies, trial)) all = std::move(trial);
  }

  Matrix m;
  m.connections = std::move(all);
  const auto& sigma = theory.substitution();
  for (const auto& copy : copies)
    for (std::uint32_t i = 0; i < problem.clause(copy.clause).num_vars; ++i)
      if (sigma.is_bound(copy.base + i))
        m.bindings.emplace_back(copy.base + i, sigma.resolve(BoundTerm::variable(copy.base + i)));
  for (auto& copy : copies)
    if (std::all_of(copy.active.begin(), copy.active.end(), [](bool b) { return b; }))
      copy.active.clear();
  m.copies = std::move(copies);
  return m;
}

Matrix MatrixEncoder::snapshot(const std::vector<std::uint32_t>& selected) const {
  std::vector<MatrixCopy> copies;
  for (auto idx : selected) {
    const auto& info = copies_[idx];
    MatrixCopy copy;
    copy.clause = info.key.clause;
    copy.k = info.key.k;
    copy.base = info.base;
    const auto n = problem_->clause(copy.clause).literals.size();
    copy.active.resize(n);
    for (std::uint32_t l = 0; l < n; ++l) copy.active[l] = is_active(copy.clause, l);
    copies.push_back(std::move(copy));
  }
  return extract_matrix(theory_, std::move(copies), !config_.active.empty());
}

std::vector<sat::ClauseLits> MatrixEncoder::on_model(const sat::AssignmentView& model) {
  in_callback_ = true;
  pending_.clear();
  ++stats_.models;
  auto finish = [&]() {
    in_callback_ = false;
    return std::move(pending_);
  };

  const bool domain = config_.refinements.finite_domain && problem_->is_epr();
  if (auto e = theory_.final_check(domain)) {
    ++stats_.theory_conflicts;
    pending_.push_back(e->clause());
    return finish();
  }

  const auto selected = selected_copies(model);

  // Every active literal of a selected copy is connected.
  std::set<std::uint64_t> covered;
  for (const auto& [key, v] : conn_keys_) {
    if (!model.value(v)) continue;
    covered.insert(key.first);
    covered.insert(key.second);
  }
  for (auto idx : selected) {
    const auto& info = copies_[idx];
    const auto n = static_cast<std::uint32_t>(problem_->clause(info.key.clause).literals.size());
    for (std::uint32_t l = 0; l < n; ++l) {
      if (!is_active(info.key.clause, l) || covered.count(slot(idx, l))) continue;
      bool ok = false;
      for (const LiteralRef& p : problem_->partners(LiteralRef{info.key.clause, l})) {
        if (is_active(p.clause, p.literal)) continue;
        for (std::uint32_t k = 1; k <= num_copies_[p.clause] && !ok; ++k)
          ok = CopyKey{p.clause, k} != info.key && model.value(selector(p.clause, k));
      }
      if (!ok) { auto dbg = connectivity_clause(idx, l); std::string s; for (auto x : dbg) s += sat::to_string(x) + "=" + std::to_string(model.value(x.var())) + " "; throw std::logic_error("accepted model is not fully connected " + std::to_string(info.key.clause) + "/" + std::to_string(info.key.k) + " lit " + std::to_string(l) + ": " + s); }
    }
  }

  if (config_.refinements.instance_symmetry && config_.active.empty()) {
    std::vector<SelectedCopy> sel;
    for (auto idx : selected)
      sel.push_back(SelectedCopy{copies_[idx].key.clause, copies_[idx].key.k, copies_[idx].base,
                                 copies_[idx].selector});
    auto next = [&](std::uint32_t c) -> std::optional<sat::Var> {
      for (std::uint32_t k = 1; k <= num_copies_[c]; ++k)
        if (!model.value(selector(c, k))) return selector(c, k);
      return std::nullopt;
    };
    if (auto block = check_instance_symmetry(theory_, sel, order_, next)) {
      ++stats_.symmetry_blocks;
      pending_.push_back(std::move(block->clause));
      return finish();
    }
  }

  std::vector<MatrixCopy> matrix;
  for (auto idx : selected) {
    MatrixCopy copy;
    copy.clause = copies_[idx].key.clause;
    copy.k = copies_[idx].key.k;
    copy.base = copies_[idx].base;
    const auto n = problem_->clause(copy.clause).literals.size();
    copy.active.resize(n);
    for (std::uint32_t l = 0; l < n; ++l) copy.active[l] = is_active(copy.clause, l);
    matrix.push_back(std::move(copy));
  }
  if (auto path = spanning_check(theory_, matrix)) {
    PathBlock block;
    for (std::size_t i = 0; i < selected.size(); ++i) {
      block.selected.push_back(copies_[selected[i]].key);
      block.path.push_back(PathBlock::Step{copies_[selected[i]].key, (*path)[i]});
    }
    ++stats_.open_path_blocks;
    blocks_.push_back(block);
    pending_.push_back(path_clause(block));
    return finish();
  }

  proof_ = snapshot(selected);
  return finish();
}

namespace {

sat::Budget budget_of(const Limits& limits) {
  sat::Budget b;
  b.deadline = limits.deadline;
  return b;
}

SearchResult from_outcome(const sat::SolveOutcome& outcome, MatrixEncoder& encoder) {
  SearchResult r;
  r.stats = encoder.stats();
  r.stats.runs.push_back(encoder.record());
  if (sat::is_sat(outcome)) {
    r.status = SearchResult::Status::Proof;
    r.matrix = encoder.proof();
  } else if (sat::is_unsat(outcome)) {
    r.status = SearchResult::Status::Exhausted;
  } else {
    r.status = SearchResult::Status::Unknown;
    r.reason = std::get<sat::Unknown>(outcome).reason;
  }
  return r;
}

}  // namespace

SearchResult prove_matrix_at(const Problem& problem, std::uint32_t depth,
                             const Refinements& refinements, const Limits& limits) {
  EncoderConfig config;
  config.mode = EncoderConfig::Mode::Depth;
  config.depth = depth;
  config.refinements = refinements;
  MatrixEncoder encoder(problem, config);
  auto outcome = encoder.solve({}, budget_of(limits));
  auto r = from_outcome(outcome, encoder);
  r.multiplicities.assign(problem.size(), depth);
  return r;
}

SearchResult prove_matrix(const Problem& problem, const MatrixOptions& options) {
  SearchResult total;
  std::optional<std::uint64_t> cap_sum;
  if (options.refinements.epr_caps && problem.is_epr()) {
    cap_sum = 0;
    for (std::uint32_t c = 0; c < problem.size(); ++c)
      *cap_sum += *epr_cap(problem, c, true);
  }
  for (std::uint32_t d = 1; d <= options.max_depth; ++d) {
    if (options.limits.expired()) {
      total.status = SearchResult::Status::Unknown;
      total.reason = "timeout";
      return total;
    }
    if (options.limits.max_solves && total.stats.solves >= *options.limits.max_solves) {
      total.status = SearchResult::Status::Unknown;
      total.reason = "solve limit";
      return total;
    }
    auto r = prove_matrix_at(problem, d, options.refinements, options.limits);
    total.stats.add(r.stats);
    ++total.stats.iterations;
    total.multiplicities = r.multiplicities;
    if (r.status != SearchResult::Status::Exhausted) {
      total.status = r.status;
      total.matrix = std::move(r.matrix);
      total.reason = r.reason;
      return total;
    }
    if (cap_sum && d >= *cap_sum) {
      total.status = SearchResult::Status::NonTheorem;
      total.reason = "every depth up to the EPR bound is exhausted";
      return total;
    }
  }
  total.status = SearchResult::Status::Exhausted;
  total.reason = "depth limit";
  return total;
}

CoreResult prove_with_cores(const Problem& problem, const CoreOptions& options) {
  CoreResult result;
  const auto n = static_cast<std::uint32_t>(problem.size());
  std::vector<std::uint32_t> mu = options.initial;
  if (mu.empty()) {
    mu.resize(n, 0);
    for (std::uint32_t s : problem.start_clauses()) mu[s] = 1;
  }
  std::vector<std::optional<std::uint32_t>> caps(n);
  for (std::uint32_t c = 0; c < n; ++c) {
    caps[c] = epr_cap(problem, c, options.refinements.epr_caps);
    if (caps[c]) mu[c] = std::min(mu[c], *caps[c]);
  }
  result.blocks = options.blocks;

  auto stop = [&](SearchResult::Status status, std::string reason) {
    result.status = status;
    result.reason = std::move(reason);
    result.multiplicities = mu;
    return result;
  };

  for (std::uint64_t iter = 0;; ++iter) {
    if (options.limits.max_iterations && iter >= *options.limits.max_iterations)
      return stop(SearchResult::Status::Unknown, "iteration limit");
    if (options.limits.expired()) return stop(SearchResult::Status::Unknown, "timeout");
    if (options.limits.max_solves && result.stats.solves >= *options.limits.max_solves)
      return stop(SearchResult::Status::Unknown, "solve limit");

    EncoderConfig config;
    config.mode = EncoderConfig::Mode::Core;
    config.refinements = options.refinements;
    config.active = options.active;
    config.copies.resize(n);
    config.guarded.resize(n);
    for (std::uint32_t c = 0; c < n; ++c) {
      const bool at_cap = caps[c] && mu[c] >= *caps[c];
      config.copies[c] = at_cap ? *caps[c] : mu[c] + 1;
      config.guarded[c] = !at_cap;
    }
    MatrixEncoder encoder(problem, config);
    for (const auto& block : result.blocks) encoder.block_open_path(block);
    auto outcome = encoder.solve(encoder.assumptions(), budget_of(options.limits));
    auto r = from_outcome(outcome, encoder);
    result.stats.add(r.stats);
    ++result.stats.iterations;
    result.blocks = encoder.path_blocks();

    if (sat::is_sat(outcome)) {
      result.matrix = std::move(r.matrix);
      return stop(SearchResult::Status::Proof, {});
    }
    if (sat::is_unknown(outcome)) return stop(SearchResult::Status::Unknown, r.reason);

    const auto& core = std::get<sat::Unsat>(outcome).core;
    if (core.empty()) return stop(SearchResult::Status::NonTheorem, "empty core");
    ++result.stats.cores;
    std::vector<bool> grow(n, false);
    for (sat::Lit lit : core)
      if (auto c = encoder.capped_clause(lit)) grow[*c] = true;
    if (options.policy == CoreOptions::Policy::OnlyClause) {
      std::fill(grow.begin(), grow.end(), false);
      grow.at(options.only_clause) = true;
    }
    for (std::uint32_t c = 0; c < n; ++c) {
      if (!grow[c]) continue;
      if (caps[c] && mu[c] >= *caps[c]) continue;
      ++mu[c];
    }
  }
}

}  // namespace conmat
