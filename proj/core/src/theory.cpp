#include "conmat/theory.hpp"

#include <algorithm>
#include <cassert>
#include <functional>

namespace conmat {

namespace {
const Term kLocalZero = Term::variable(0);
}  // namespace

BoundTerm BoundTerm::variable(VarId v) { return BoundTerm{&kLocalZero, v}; }

sat::ClauseLits Explanation::clause() const {
  sat::ClauseLits out;
  out.reserve(atoms.size());
  for (sat::Var v : atoms) out.push_back(sat::neg(v));
  return out;
}

// ---------------------------------------------------------------------------
// Substitution

BoundTerm Substitution::deref(BoundTerm t, Touched* touched) const {
  while (t.is_variable()) {
    const VarId v = t.var();
    if (v >= bound_.size() || !bound_[v]) return BoundTerm::variable(v);
    if (touched) touched->push_back(position_[v]);
    t = *bound_[v];
  }
  return t;
}

bool Substitution::occurs(VarId v, BoundTerm t, Touched* touched) const {
  t = deref(t, touched);
  if (t.is_variable()) return t.var() == v;
  for (const Term& arg : t.term->args)
    if (occurs(v, BoundTerm{&arg, t.base}, touched)) return true;
  return false;
}

void Substitution::bind(VarId v, BoundTerm t, std::uint32_t justification) {
  if (v >= bound_.size()) {
    bound_.resize(v + 1);
    position_.resize(v + 1, 0);
  }
  bound_[v] = t;
  position_[v] = static_cast<std::uint32_t>(trail_.size());
  trail_.push_back(Entry{v, justification});
}

void Substitution::retract_to(Mark m) {
  assert(m.trail <= trail_.size());
  while (trail_.size() > m.trail) {
    bound_[trail_.back().var].reset();
    trail_.pop_back();
  }
  justifications_.resize(m.justifications);
}

bool Substitution::unify(const std::vector<std::pair<BoundTerm, BoundTerm>>& pairs,
                         sat::Var reason, Touched* touched) {
  const Mark start = mark();
  const auto just = static_cast<std::uint32_t>(justifications_.size());
  Touched local;
  std::vector<std::pair<BoundTerm, BoundTerm>> todo(pairs.rbegin(), pairs.rend());
  bool ok = true;
  while (ok && !todo.empty()) {
    auto [a, b] = todo.back();
    todo.pop_back();
    a = deref(a, &local);
    b = deref(b, &local);
    if (a.is_variable() && b.is_variable()) {
      if (a.var() != b.var()) bind(std::max(a.var(), b.var()),
                                   a.var() > b.var() ? b : a, just);
      continue;
    }
    if (a.is_variable() || b.is_variable()) {
      const BoundTerm var = a.is_variable() ? a : b;
      const BoundTerm other = a.is_variable() ? b : a;
      if (occurs(var.var(), other, &local)) {
        ok = false;
        break;
      }
      bind(var.var(), other, just);
      continue;
    }
    if (a.term->id != b.term->id || a.term->args.size() != b.term->args.size()) {
      ok = false;
      break;
    }
    for (std::size_t i = a.term->args.size(); i-- > 0;)
      todo.emplace_back(BoundTerm{&a.term->args[i], a.base},
                        BoundTerm{&b.term->args[i], b.base});
  }

  // Only bindings that predate this call can be parents.
  Touched parents;
  for (auto p : local)
    if (p < start.trail) parents.push_back(p);
  std::sort(parents.begin(), parents.end());
  parents.erase(std::unique(parents.begin(), parents.end()), parents.end());

  if (!ok) {
    retract_to(start);
    if (touched) touched->insert(touched->end(), parents.begin(), parents.end());
    return false;
  }
  if (trail_.size() > start.trail)
    justifications_.push_back(Justification{reason, std::move(parents)});
  return true;
}

Term Substitution::resolve(BoundTerm t, Touched* touched) const {
  t = deref(t, touched);
  if (t.is_variable()) return Term::variable(t.var());
  Term out = Term::application(t.term->id);
  out.args.reserve(t.term->args.size());
  for (const Term& arg : t.term->args)
    out.args.push_back(resolve(BoundTerm{&arg, t.base}, touched));
  return out;
}

bool Substitution::identical(BoundTerm a, BoundTerm b, Touched* touched) const {
  a = deref(a, touched);
  b = deref(b, touched);
  if (a.is_variable() || b.is_variable())
    return a.is_variable() && b.is_variable() && a.var() == b.var();
  if (a.term->id != b.term->id) return false;
  for (std::size_t i = 0; i < a.term->args.size(); ++i)
    if (!identical(BoundTerm{&a.term->args[i], a.base},
                   BoundTerm{&b.term->args[i], b.base}, touched))
      return false;
  return true;
}

Order Substitution::compare(BoundTerm a, BoundTerm b, const SymbolTable& symbols,
                            Touched* touched) const {
  a = deref(a, touched);
  b = deref(b, touched);
  if (a.is_variable() || b.is_variable()) {
    if (a.is_variable() && b.is_variable() && a.var() == b.var()) return Order::Equal;
    return Order::Incomparable;
  }
  if (a.term->id != b.term->id)
    return symbols.precedes(a.term->id, b.term->id) ? Order::Less : Order::Greater;
  for (std::size_t i = 0; i < a.term->args.size(); ++i) {
    const Order r = compare(BoundTerm{&a.term->args[i], a.base},
                            BoundTerm{&b.term->args[i], b.base}, symbols, touched);
    if (r != Order::Equal) return r;
  }
  return Order::Equal;
}

std::vector<sat::Var> Substitution::explain(const Touched& touched) const {
  std::vector<char> done(justifications_.size(), 0);
  std::vector<std::uint32_t> stack;
  for (auto p : touched)
    if (p < trail_.size()) stack.push_back(trail_[p].justification);
  std::vector<sat::Var> atoms;
  while (!stack.empty()) {
    const auto j = stack.back();
    stack.pop_back();
    if (j >= done.size() || done[j]) continue;
    done[j] = 1;
    atoms.push_back(justifications_[j].atom);
    for (auto p : justifications_[j].parents)
      if (p < trail_.size()) stack.push_back(trail_[p].justification);
  }
  std::sort(atoms.begin(), atoms.end());
  atoms.erase(std::unique(atoms.begin(), atoms.end()), atoms.end());
  return atoms;
}

std::vector<VarId> Substitution::bound_variables() const {
  std::vector<VarId> out;
  out.reserve(trail_.size());
  for (const Entry& e : trail_) out.push_back(e.var);
  return out;
}

// ---------------------------------------------------------------------------
// Finite domains

std::optional<Explanation> finite_domain_check(
    const Substitution& sigma, const std::vector<DomainConstraint>& constraints,
    const std::vector<SymbolId>& universe) {
  const std::size_t size = std::max<std::size_t>(1, universe.size());
  Substitution::Touched touched;
  std::unordered_map<VarId, std::vector<bool>> domains;
  auto domain = [&](VarId v) -> std::vector<bool>& {
    auto it = domains.find(v);
    if (it == domains.end()) it = domains.emplace(v, std::vector<bool>(size, true)).first;
    return it->second;
  };
  auto rank = [&](const BoundTerm& t) -> std::optional<std::size_t> {
    if (!t.term->args.empty()) return std::nullopt;
    auto it = std::find(universe.begin(), universe.end(), t.term->id);
    if (it == universe.end()) return std::nullopt;
    return static_cast<std::size_t>(it - universe.begin());
  };
  auto fail = [&]() {
    Explanation e;
    for (const auto& c : constraints) e.atoms.push_back(c.atom);
    auto deps = sigma.explain(touched);
    e.atoms.insert(e.atoms.end(), deps.begin(), deps.end());
    std::sort(e.atoms.begin(), e.atoms.end());
    e.atoms.erase(std::unique(e.atoms.begin(), e.atoms.end()), e.atoms.end());
    return e;
  };

  struct Edge {
    VarId lower, upper;
  };
  std::vector<Edge> less_edges;
  std::vector<Edge> neq_edges;
  for (const auto& c : constraints) {
    const BoundTerm l = sigma.deref(c.lhs, &touched);
    const BoundTerm r = sigma.deref(c.rhs, &touched);
    const bool lv = l.is_variable(), rv = r.is_variable();
    if (!lv && !rv) {
      const auto lr = rank(l), rr = rank(r);
      if (!lr || !rr) continue;
      if (c.kind == DomainConstraint::Kind::NotEqual ? *lr == *rr : *lr >= *rr)
        return fail();
      continue;
    }
    if (lv && rv) {
      if (l.var() == r.var()) return fail();
      (c.kind == DomainConstraint::Kind::Less ? less_edges : neq_edges)
          .push_back(Edge{l.var(), r.var()});
      domain(l.var());
      domain(r.var());
      continue;
    }
    const VarId v = lv ? l.var() : r.var();
    const auto k = rank(lv ? r : l);
    auto& d = domain(v);
    if (!k) continue;
    if (c.kind == DomainConstraint::Kind::NotEqual) {
      d[*k] = false;
    } else if (lv) {  // v < constant
      for (std::size_t i = *k; i < size; ++i) d[i] = false;
    } else {  // constant < v
      for (std::size_t i = 0; i <= *k; ++i) d[i] = false;
    }
  }

  auto lowest = [](const std::vector<bool>& d) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < d.size(); ++i)
      if (d[i]) return i;
    return std::nullopt;
  };
  auto highest = [](const std::vector<bool>& d) -> std::optional<std::size_t> {
    for (std::size_t i = d.size(); i-- > 0;)
      if (d[i]) return i;
    return std::nullopt;
  };

  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& [v, d] : domains)
      if (!lowest(d)) return fail();
    for (const Edge& e : less_edges) {
      auto& lo = domains.at(e.lower);
      auto& hi = domains.at(e.upper);
      const std::size_t min_lower = *lowest(lo);
      for (std::size_t i = 0; i <= min_lower; ++i)
        if (hi[i]) hi[i] = false, changed = true;
      if (!lowest(hi)) return fail();
      const std::size_t max_upper = *highest(hi);
      for (std::size_t i = max_upper; i < size; ++i)
        if (lo[i]) lo[i] = false, changed = true;
      if (!lowest(lo)) return fail();
    }
    for (const Edge& e : neq_edges) {
      auto& a = domains.at(e.lower);
      auto& b = domains.at(e.upper);
      const auto la = lowest(a), lb = lowest(b);
      if (la == highest(a) && lb == highest(b) && la == lb) return fail();
      if (la == highest(a) && b[*la]) b[*la] = false, changed = true;
      if (lb == highest(b) && a[*lb]) a[*lb] = false, changed = true;
    }
  }

  // Propagation misses pigeonhole conflicts; search for a labelling, giving
  // up (no conflict) after a fixed number of nodes.
  std::vector<VarId> vars;
  for (const auto& entry : domains) vars.push_back(entry.first);
  std::sort(vars.begin(), vars.end());
  std::unordered_map<VarId, std::size_t> value;
  std::uint64_t nodes = 0;
  constexpr std::uint64_t kNodeLimit = 100000;
  auto consistent = [&](VarId v) {
    const std::size_t x = value.at(v);
    for (const Edge& e : neq_edges) {
      const VarId o = e.lower == v ? e.upper : e.upper == v ? e.lower : v;
      if (o != v && value.count(o) && value.at(o) == x) return false;
    }
    for (const Edge& e : less_edges) {
      if (e.lower == v && value.count(e.upper) && !(x < value.at(e.upper))) return false;
      if (e.upper == v && value.count(e.lower) && !(value.at(e.lower) < x)) return false;
    }
    return true;
  };
  std::function<std::optional<bool>(std::size_t)> label = [&](std::size_t i) -> std::optional<bool> {
    if (i == vars.size()) return true;
    if (++nodes > kNodeLimit) return std::nullopt;
    const auto& d = domains.at(vars[i]);
    for (std::size_t x = 0; x < size; ++x) {
      if (!d[x]) continue;
      value[vars[i]] = x;
      if (consistent(vars[i])) {
        auto r = label(i + 1);
        if (!r || *r) return r;
      }
      value.erase(vars[i]);
    }
    return false;
  };
  if (label(0) == false) return fail();
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// UnificationTheory

void UnificationTheory::register_connect(sat::Var atom, Occurrence a, Occurrence b) {
  atoms_[atom.index] = Atom{AtomKind::Connect, a, b, {}, {}};
}

void UnificationTheory::register_distinct(sat::Var atom, TupleRef a, TupleRef b) {
  atoms_[atom.index] = Atom{AtomKind::DistinctTuple, {}, {}, a, b};
}

void UnificationTheory::register_order(sat::Var atom, TupleRef lower, TupleRef upper) {
  atoms_[atom.index] = Atom{AtomKind::OrderTuple, {}, {}, lower, upper};
}

std::optional<UnificationTheory::AtomKind> UnificationTheory::kind(sat::Var v) const {
  auto it = atoms_.find(v.index);
  if (it == atoms_.end()) return std::nullopt;
  return it->second.kind;
}

UnificationTheory::Mark UnificationTheory::mark() const {
  return Mark{sigma_.mark(), active_distinct_.size(), active_order_.size()};
}

void UnificationTheory::retract_to(Mark m) {
  sigma_.retract_to(m.sigma);
  active_distinct_.resize(m.distinct);
  active_order_.resize(m.order);
}

std::optional<Explanation> UnificationTheory::check_tuple(sat::Var var,
                                                          const Atom& atom) const {
  const std::uint32_t n = problem_->clause(atom.ta.clause).num_vars;
  Substitution::Touched touched;
  bool conflict = false;
  if (atom.kind == AtomKind::DistinctTuple) {
    conflict = true;
    for (std::uint32_t i = 0; i < n && conflict; ++i)
      conflict = sigma_.identical(BoundTerm::variable(atom.ta.base + i),
                                  BoundTerm::variable(atom.tb.base + i), &touched);
  } else {
    Order result = Order::Equal;
    for (std::uint32_t i = 0; i < n && result == Order::Equal; ++i)
      result = sigma_.compare(BoundTerm::variable(atom.ta.base + i),
                              BoundTerm::variable(atom.tb.base + i),
                              problem_->symbols(), &touched);
    conflict = result == Order::Greater || result == Order::Equal;
  }
  if (!conflict) return std::nullopt;
  Explanation e{sigma_.explain(touched)};
  e.atoms.push_back(var);
  std::sort(e.atoms.begin(), e.atoms.end());
  e.atoms.erase(std::unique(e.atoms.begin(), e.atoms.end()), e.atoms.end());
  return e;
}

std::optional<Explanation> UnificationTheory::assert_atom(sat::Var var, bool value) {
  auto it = atoms_.find(var.index);
  if (it == atoms_.end() || !value) return std::nullopt;
  const Atom& atom = it->second;

  if (atom.kind == AtomKind::Connect) {
    const Mark before = mark();
    const Literal& l = problem_->clause(atom.a.clause).literals[atom.a.literal];
    const Literal& k = problem_->clause(atom.b.clause).literals[atom.b.literal];
    std::vector<std::pair<BoundTerm, BoundTerm>> pairs;
    if (l.predicate != k.predicate || l.positive == k.positive ||
        l.args.size() != k.args.size()) {
      ++stats_.conflicts;
      return Explanation{{var}};
    }
    for (std::size_t i = 0; i < l.args.size(); ++i)
      pairs.emplace_back(BoundTerm{&l.args[i], atom.a.base},
                         BoundTerm{&k.args[i], atom.b.base});
    ++stats_.unifications;
    Substitution::Touched touched;
    if (!sigma_.unify(pairs, var, &touched)) {
      ++stats_.conflicts;
      Explanation e{sigma_.explain(touched)};
      e.atoms.push_back(var);
      std::sort(e.atoms.begin(), e.atoms.end());
      e.atoms.erase(std::unique(e.atoms.begin(), e.atoms.end()), e.atoms.end());
      return e;
    }
    // New bindings may decide tuple constraints.
    for (const auto& list : {&active_distinct_, &active_order_}) {
      for (sat::Var other : *list) {
        if (auto e = check_tuple(other, atoms_.at(other.index))) {
          ++stats_.conflicts;
          (atoms_.at(other.index).kind == AtomKind::DistinctTuple
               ? stats_.distinct_conflicts
               : stats_.order_conflicts)++;
          e->atoms.push_back(var);
          std::sort(e->atoms.begin(), e->atoms.end());
          e->atoms.erase(std::unique(e->atoms.begin(), e->atoms.end()), e->atoms.end());
          retract_to(before);
          return e;
        }
      }
    }
    return std::nullopt;
  }

  if (auto e = check_tuple(var, atom)) {
    ++stats_.conflicts;
    (atom.kind == AtomKind::DistinctTuple ? stats_.distinct_conflicts
                                          : stats_.order_conflicts)++;
    return e;
  }
  (atom.kind == AtomKind::DistinctTuple ? active_distinct_ : active_order_).push_back(var);
  return std::nullopt;
}

std::vector<DomainConstraint> UnificationTheory::domain_constraints() const {
  std::vector<DomainConstraint> out;
  for (sat::Var v : active_distinct_) {
    const Atom& atom = atoms_.at(v.index);
    const std::uint32_t n = problem_->clause(atom.ta.clause).num_vars;
    std::optional<std::uint32_t> differing;
    bool several = false;
    for (std::uint32_t i = 0; i < n; ++i) {
      if (sigma_.identical(BoundTerm::variable(atom.ta.base + i),
                           BoundTerm::variable(atom.tb.base + i)))
        continue;
      if (differing) several = true;
      differing = i;
    }
    if (differing && !several)
      out.push_back(DomainConstraint{DomainConstraint::Kind::NotEqual,
                                     BoundTerm::variable(atom.ta.base + *differing),
                                     BoundTerm::variable(atom.tb.base + *differing), v});
  }
  for (sat::Var v : active_order_) {
    const Atom& atom = atoms_.at(v.index);
    const std::uint32_t n = problem_->clause(atom.ta.clause).num_vars;
    for (std::uint32_t i = 0; i < n; ++i) {
      const BoundTerm a = BoundTerm::variable(atom.ta.base + i);
      const BoundTerm b = BoundTerm::variable(atom.tb.base + i);
      const Order r = sigma_.compare(a, b, problem_->symbols());
      if (r == Order::Equal) continue;
      if (r == Order::Incomparable)
        out.push_back(DomainConstraint{DomainConstraint::Kind::Less, a, b, v});
      break;
    }
  }
  return out;
}

std::optional<Explanation> UnificationTheory::final_check(bool finite_domain) {
  for (const auto& list : {&active_distinct_, &active_order_}) {
    for (sat::Var v : *list) {
      if (auto e = check_tuple(v, atoms_.at(v.index))) {
        ++stats_.conflicts;
        return e;
      }
    }
  }
  if (!finite_domain) return std::nullopt;
  auto constraints = domain_constraints();
  if (constraints.empty()) return std::nullopt;
  auto result = finite_domain_check(sigma_, constraints, problem_->constants());
  if (!result) return std::nullopt;
  ++stats_.conflicts;
  ++stats_.domain_conflicts;
  // Shrink to a minimal conflicting subset so the learned clause stays short.
  for (std::size_t i = constraints.size(); i-- > 0;) {
    auto without = constraints;
    without.erase(without.begin() + static_cast<std::ptrdiff_t>(i));
    if (auto smaller = finite_domain_check(sigma_, without, problem_->constants())) {
      constraints = std::move(without);
      result = std::move(smaller);
    }
  }
  // Each constraint also rests on the bindings that made its tuple prefix
  // identical.
  Substitution::Touched touched;
  for (const auto& c : constraints) {
    const Atom& atom = atoms_.at(c.atom.index);
    for (std::uint32_t i = 0; i < problem_->clause(atom.ta.clause).num_vars; ++i) {
      sigma_.resolve(BoundTerm::variable(atom.ta.base + i), &touched);
      sigma_.resolve(BoundTerm::variable(atom.tb.base + i), &touched);
    }
  }
  auto deps = sigma_.explain(touched);
  result->atoms.insert(result->atoms.end(), deps.begin(), deps.end());
  std::sort(result->atoms.begin(), result->atoms.end());
  result->atoms.erase(std::unique(result->atoms.begin(), result->atoms.end()),
                      result->atoms.end());
  return result;
}

std::vector<sat::Var> UnificationTheory::explain_copy(TupleRef copy) const {
  Substitution::Touched touched;
  for (std::uint32_t i = 0; i < problem_->clause(copy.clause).num_vars; ++i)
    sigma_.resolve(BoundTerm::variable(copy.base + i), &touched);
  return sigma_.explain(touched);
}

Literal UnificationTheory::resolve_literal(Occurrence occ) const {
  const Literal& l = problem_->clause(occ.clause).literals[occ.literal];
  Literal out{l.positive, l.predicate, {}};
  for (const Term& t : l.args) out.args.push_back(sigma_.resolve(BoundTerm{&t, occ.base}));
  return out;
}

}  // namespace conmat
