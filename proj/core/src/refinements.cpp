#include "conmat/refinements.hpp"

#include <algorithm>
#include <numeric>

namespace conmat {

ClauseOrder::ClauseOrder(const Problem& problem) : rank_(problem.size()) {
  std::vector<std::uint32_t> order(problem.size());
  std::iota(order.begin(), order.end(), 0u);
  std::stable_partition(order.begin(), order.end(),
                        [&](std::uint32_t c) { return problem.is_start(c); });
  for (std::uint32_t r = 0; r < order.size(); ++r) rank_[order[r]] = r;
}

std::vector<sat::ClauseLits> copy_ordering_clauses(const std::vector<sat::Var>& selectors) {
  std::vector<sat::ClauseLits> out;
  for (std::size_t k = 1; k < selectors.size(); ++k)
    out.push_back({sat::neg(selectors[k]), sat::pos(selectors[k - 1])});
  return out;
}

std::vector<std::vector<std::uint32_t>> split_components(const Clause& clause) {
  const auto n = static_cast<std::uint32_t>(clause.literals.size());
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::vector<std::optional<std::uint32_t>> owner(clause.num_vars);
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<VarId> vars;
    clause.literals[i].collect_variables(vars);
    for (VarId v : vars) {
      if (!owner[v]) owner[v] = i;
      else parent[find(i)] = find(*owner[v]);
    }
  }
  std::vector<std::vector<std::uint32_t>> out;
  std::vector<std::optional<std::size_t>> slot(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto root = find(i);
    if (!slot[root]) {
      slot[root] = out.size();
      out.emplace_back();
    }
    out[*slot[root]].push_back(i);
  }
  return out;
}

std::optional<std::uint32_t> epr_cap(const Problem& problem, std::uint32_t clause,
                                     bool enabled) {
  if (!enabled || !problem.is_epr()) return std::nullopt;
  const std::uint64_t c = std::max<std::size_t>(1, problem.constants().size());
  std::uint64_t cap = 1;
  for (std::uint32_t i = 0; i < problem.clause(clause).num_vars; ++i) {
    cap *= c;
    if (cap > 1'000'000) return 1'000'000;
  }
  return static_cast<std::uint32_t>(cap);
}

namespace {

bool match_term(const Term& p, const Term& t, std::vector<std::optional<Term>>& rho) {
  if (p.is_variable()) {
    if (p.id >= rho.size()) rho.resize(p.id + 1);
    if (rho[p.id]) return *rho[p.id] == t;
    rho[p.id] = t;
    return true;
  }
  if (t.is_variable() || p.id != t.id || p.args.size() != t.args.size()) return false;
  for (std::size_t i = 0; i < p.args.size(); ++i)
    if (!match_term(p.args[i], t.args[i], rho)) return false;
  return true;
}

bool match_literal(const Literal& p, const Literal& t, std::vector<std::optional<Term>>& rho) {
  if (p.positive != t.positive || p.predicate != t.predicate) return false;
  for (std::size_t i = 0; i < p.args.size(); ++i)
    if (!match_term(p.args[i], t.args[i], rho)) return false;
  return true;
}

bool assign(const std::vector<Literal>& pattern, const std::vector<Literal>& target,
            std::size_t i, std::vector<int>& hits, std::vector<std::optional<Term>>& rho) {
  if (i == pattern.size())
    return std::all_of(hits.begin(), hits.end(), [](int h) { return h > 0; });
  for (std::size_t j = 0; j < target.size(); ++j) {
    auto saved = rho;
    if (!match_literal(pattern[i], target[j], rho)) {
      rho = std::move(saved);
      continue;
    }
    ++hits[j];
    if (assign(pattern, target, i + 1, hits, rho)) return true;
    --hits[j];
    rho = std::move(saved);
  }
  return false;
}

std::vector<Literal> unique_literals(std::vector<Literal> lits) {
  std::vector<Literal> out;
  for (auto& l : lits)
    if (std::find(out.begin(), out.end(), l) == out.end()) out.push_back(std::move(l));
  return out;
}

}  // namespace

bool instance_of(const std::vector<Literal>& pattern, const std::vector<Literal>& target) {
  const auto set = unique_literals(target);
  if (pattern.size() < set.size()) return false;
  std::vector<int> hits(set.size(), 0);
  std::vector<std::optional<Term>> rho;
  return assign(pattern, set, 0, hits, rho);
}

std::optional<SymmetryBlock> check_instance_symmetry(
    const UnificationTheory& theory, const std::vector<SelectedCopy>& selected,
    const ClauseOrder& order,
    const std::function<std::optional<sat::Var>(std::uint32_t)>& next_selector) {
  const Problem& problem = theory.problem();
  std::vector<std::vector<Literal>> images;
  images.reserve(selected.size());
  for (const auto& s : selected) {
    std::vector<Literal> lits;
    const auto n = static_cast<std::uint32_t>(problem.clause(s.clause).literals.size());
    for (std::uint32_t l = 0; l < n; ++l)
      lits.push_back(theory.resolve_literal(Occurrence{s.clause, l, s.base}));
    images.push_back(unique_literals(std::move(lits)));
  }
  auto deps = [&](const SelectedCopy& s) {
    return theory.explain_copy(TupleRef{s.clause, s.base});
  };

  // Instance symmetry against smaller input clauses.
  for (std::size_t i = 0; i < selected.size(); ++i) {
    const auto& d = selected[i];
    for (std::uint32_t c = 0; c < problem.size(); ++c) {
      if (c == d.clause || !order.less(c, d.clause)) continue;
      if (!instance_of(problem.clause(c).literals, images[i])) continue;
      const auto next = next_selector(c);
      if (!next) continue;
      SymmetryBlock block{SymmetryBlock::Kind::Instance, {sat::neg(d.selector), sat::pos(*next)}};
      for (sat::Var a : deps(d)) block.clause.push_back(sat::neg(a));
      return block;
    }
  }

  // Within-matrix subsumption: drop the larger copy unless it is the start.
  auto subset = [](const std::vector<Literal>& a, const std::vector<Literal>& b) {
    return std::all_of(a.begin(), a.end(), [&](const Literal& l) {
      return std::find(b.begin(), b.end(), l) != b.end();
    });
  };
  for (std::size_t i = 0; i < selected.size(); ++i) {
    for (std::size_t j = 0; j < selected.size(); ++j) {
      if (i == j) continue;
      const auto& small = selected[i];
      const auto& large = selected[j];
      if (problem.is_start(large.clause) && large.k == 1) continue;
      if (!subset(images[i], images[j])) continue;
      SymmetryBlock block{SymmetryBlock::Kind::Subsumption,
                          {sat::neg(small.selector), sat::neg(large.selector)}};
      for (sat::Var a : deps(small)) block.clause.push_back(sat::neg(a));
      for (sat::Var a : deps(large)) block.clause.push_back(sat::neg(a));
      return block;
    }
  }
  return std::nullopt;
}

}  // namespace conmat
