#include "conmat/oracle.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <sstream>

namespace conmat {

namespace {

// Rigid substitution over copy-scoped variables with an undo trail.
class Bindings {
 public:
  explicit Bindings(std::size_t vars) : value_(vars) {}

  const Term& walk(const Term& t) const {
    const Term* cur = &t;
    while (cur->is_variable() && value_[cur->id]) cur = &*value_[cur->id];
    return *cur;
  }

  Term apply(const Term& t) const {
    const Term& w = walk(t);
    if (w.is_variable()) return w;
    Term out = Term::application(w.id);
    for (const auto& a : w.args) out.args.push_back(apply(a));
    return out;
  }

  Literal apply(const Literal& l) const {
    Literal out = l;
    for (auto& a : out.args) a = apply(a);
    return out;
  }

  bool occurs(VarId v, const Term& t) const {
    const Term& w = walk(t);
    if (w.is_variable()) return w.id == v;
    return std::any_of(w.args.begin(), w.args.end(), [&](const Term& a) { return occurs(v, a); });
  }

  bool unify(const Term& a, const Term& b) {
    const Term& x = walk(a);
    const Term& y = walk(b);
    if (x.is_variable() && y.is_variable() && x.id == y.id) return true;
    if (x.is_variable()) return bind(x.id, y);
    if (y.is_variable()) return bind(y.id, x);
    if (x.id != y.id || x.args.size() != y.args.size()) return false;
    for (std::size_t i = 0; i < x.args.size(); ++i)
      if (!unify(x.args[i], y.args[i])) return false;
    return true;
  }

  std::size_t mark() const { return trail_.size(); }
  void undo(std::size_t m) {
    while (trail_.size() > m) {
      value_[trail_.back()].reset();
      trail_.pop_back();
    }
  }

 private:
  bool bind(VarId v, const Term& t) {
    if (occurs(v, t)) return false;
    value_[v] = t;
    trail_.push_back(v);
    return true;
  }

  std::vector<std::optional<Term>> value_;
  std::vector<VarId> trail_;
};

struct Search {
  std::vector<std::vector<Literal>> copies;
  Bindings sigma;

  // First path (one literal per copy) without a complementary pair under
  // the current bindings; empty optional when every path is closed.
  std::optional<std::vector<std::uint32_t>> open_path() const {
    std::vector<std::vector<Literal>> ground(copies.size());
    for (std::size_t i = 0; i < copies.size(); ++i)
      for (const auto& l : copies[i]) ground[i].push_back(sigma.apply(l));
    std::vector<std::uint32_t> path;
    std::function<bool(std::size_t)> go = [&](std::size_t i) {
      if (i == copies.size()) return true;
      for (std::uint32_t l = 0; l < ground[i].size(); ++l) {
        const Literal& cand = ground[i][l];
        bool clash = false;
        for (std::size_t j = 0; j < path.size() && !clash; ++j) {
          const Literal& o = ground[j][path[j]];
          clash = o.positive != cand.positive && o.predicate == cand.predicate && o.args == cand.args;
        }
        if (clash) continue;
        path.push_back(l);
        if (go(i + 1)) return true;
        path.pop_back();
      }
      return false;
    };
    if (go(0)) return path;
    return std::nullopt;
  }

  bool solve() {
    auto path = open_path();
    if (!path) return true;
    for (std::size_t i = 0; i < path->size(); ++i) {
      for (std::size_t j = i + 1; j < path->size(); ++j) {
        const Literal& a = copies[i][(*path)[i]];
        const Literal& b = copies[j][(*path)[j]];
        if (a.positive == b.positive || a.predicate != b.predicate) continue;
        const auto m = sigma.mark();
        bool ok = true;
        for (std::size_t k = 0; ok && k < a.args.size(); ++k) ok = sigma.unify(a.args[k], b.args[k]);
        if (ok && solve()) return true;
        sigma.undo(m);
      }
    }
    return false;
  }
};

bool spans(const Problem& problem, const std::vector<std::uint32_t>& counts) {
  std::vector<std::vector<Literal>> copies;
  VarId next = 0;
  for (std::uint32_t c = 0; c < counts.size(); ++c)
    for (std::uint32_t k = 1; k <= counts[c]; ++k) {
      copies.push_back(rename_copy(problem.clause(c), c, k, next).literals);
      next += problem.clause(c).num_vars;
    }
  Search s{std::move(copies), Bindings(next)};
  return s.solve();
}

}  // namespace

OracleResult oracle_prove(const Problem& problem, std::uint32_t d_max) {
  OracleResult result;
  const auto n = static_cast<std::uint32_t>(problem.size());
  std::vector<std::uint32_t> counts(n, 0);
  for (std::uint32_t size = 1; size <= d_max; ++size) {
    std::function<bool(std::uint32_t, std::uint32_t)> go = [&](std::uint32_t c, std::uint32_t left) {
      if (c == n) {
        if (left != 0) return false;
        bool start = false;
        for (std::uint32_t s : problem.start_clauses()) start = start || counts[s] > 0;
        if (!start) return false;
        ++result.matrices;
        return spans(problem, counts);
      }
      for (std::uint32_t k = 0; k <= left; ++k) {
        counts[c] = k;
        if (go(c + 1, left - k)) return true;
      }
      counts[c] = 0;
      return false;
    };
    if (go(0, size)) {
      result.theorem = true;
      result.size = size;
      result.counts = counts;
      return result;
    }
  }
  return result;
}

namespace {

Term substitute(const Term& t, const std::vector<Term>& values) {
  if (t.is_variable()) return values[t.id];
  Term out = Term::application(t.id);
  for (const auto& a : t.args) out.args.push_back(substitute(a, values));
  return out;
}

// Plain DPLL with unit propagation over integer literals.
bool dpll_sat(std::vector<std::vector<int>> clauses, std::vector<int>& assign) {
  for (;;) {
    bool changed = false;
    for (const auto& c : clauses) {
      int unassigned = 0, last = 0;
      bool sat = false;
      for (int l : c) {
        const int v = assign[std::abs(l)];
        if (v == 0) {
          ++unassigned;
          last = l;
        } else if ((v > 0) == (l > 0)) {
          sat = true;
          break;
        }
      }
      if (sat) continue;
      if (unassigned == 0) return false;
      if (unassigned == 1) {
        assign[std::abs(last)] = last > 0 ? 1 : -1;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (std::size_t v = 1; v < assign.size(); ++v) {
    if (assign[v] != 0) continue;
    for (int value : {-1, 1}) {
      auto trial = assign;
      trial[v] = value;
      if (dpll_sat(clauses, trial)) {
        assign = std::move(trial);
        return true;
      }
    }
    return false;
  }
  return true;
}

}  // namespace

std::optional<bool> herbrand_unsat(const Problem& problem, std::uint64_t max_ground_clauses) {
  if (!problem.is_epr()) return std::nullopt;
  std::vector<Term> universe;
  for (SymbolId c : problem.constants()) universe.push_back(Term::application(c));
  if (universe.empty()) universe.push_back(Term::application(0xFFFFFFFFu));

  std::map<std::string, int> atoms;
  std::vector<std::vector<int>> ground;
  for (const Clause& clause : problem.clauses()) {
    std::uint64_t count = 1;
    for (std::uint32_t i = 0; i < clause.num_vars; ++i) count *= universe.size();
    if (ground.size() + count > max_ground_clauses) return std::nullopt;
    std::vector<std::uint32_t> digits(clause.num_vars, 0);
    for (std::uint64_t g = 0; g < count; ++g) {
      std::vector<Term> values;
      for (auto d : digits) values.push_back(universe[d]);
      std::vector<int> lits;
      for (const Literal& l : clause.literals) {
        std::ostringstream key;
        key << l.predicate;
        for (const auto& a : l.args) key << ' ' << substitute(a, values).id;
        auto it = atoms.emplace(key.str(), static_cast<int>(atoms.size()) + 1).first;
        lits.push_back(l.positive ? it->second : -it->second);
      }
      ground.push_back(std::move(lits));
      for (std::size_t i = 0; i < digits.size(); ++i) {
        if (++digits[i] < universe.size()) break;
        digits[i] = 0;
      }
    }
  }
  std::vector<int> assign(atoms.size() + 1, 0);
  return !dpll_sat(std::move(ground), assign);
}

std::optional<GeneratorProfile> generator_profile(std::string_view name) {
  GeneratorProfile p;
  p.name = std::string(name);
  if (name == "epr") return p;
  if (name == "epr-medium") {
    p.min_clauses = 4;
    p.max_clauses = 7;
    p.max_literals = 3;
    p.max_vars = 2;
    p.constants = 3;
    return p;
  }
  if (name == "fo") {
    p.functions = true;
    p.constants = 1;
    return p;
  }
  return std::nullopt;
}

std::string generate_problem_text(std::uint64_t seed, const GeneratorProfile& profile) {
  std::mt19937_64 rng(seed);
  auto pick = [&](std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(rng);
  };
  struct Pred {
    const char* name;
    std::uint32_t arity;
  };
  static const Pred preds[] = {{"p", 1}, {"q", 1}, {"r", 2}};
  static const char* const vars[] = {"X", "Y", "Z"};
  auto term = [&](auto&& self, int depth) -> std::string {
    const auto roll = pick(0, 9);
    if (profile.functions && depth < 2 && roll < 2) return "f(" + self(self, depth + 1) + ")";
    if (roll < 5 && profile.max_vars > 0) return vars[pick(0, std::min(profile.max_vars, 3u) - 1)];
    return std::string(1, static_cast<char>('a' + pick(0, std::max(profile.constants, 1u) - 1)));
  };
  std::ostringstream out;
  const auto n = pick(profile.min_clauses, profile.max_clauses);
  for (std::uint32_t c = 0; c < n; ++c) {
    // Short clauses keep the theorem rate up.
    const auto lits = pick(0, 9) < 5 ? 1u : pick(std::min(2u, profile.max_literals), profile.max_literals);
    out << "cnf(c" << c << ", axiom, (";
    for (std::uint32_t l = 0; l < lits; ++l) {
      const Pred& p = preds[pick(0, 9) < 2 ? 2 : pick(0, 1)];
      if (l) out << " | ";
      if (pick(0, 1)) out << '~';
      out << p.name << '(';
      for (std::uint32_t a = 0; a < p.arity; ++a) out << (a ? "," : "") << term(term, 0);
      out << ')';
    }
    out << ")).\n";
  }
  return out.str();
}

Problem generate_random_problem(std::uint64_t seed, const GeneratorProfile& profile) {
  for (std::uint64_t attempt = 0;; ++attempt) {
    try {
      return parse_problem(generate_problem_text(seed * 7919 + attempt, profile));
    } catch (const ParseError&) {
      // Every clause was a tautology; draw again.
    }
  }
}

}  // namespace conmat
