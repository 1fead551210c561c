#include "conmat/avatar.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "conmat/refinements.hpp"

namespace conmat {

namespace {

using Component = std::pair<std::uint32_t, std::uint32_t>;  // clause, component

std::vector<std::uint32_t> component_of(const Clause& clause) {
  std::vector<std::uint32_t> out(clause.literals.size());
  const auto parts = split_components(clause);
  for (std::uint32_t i = 0; i < parts.size(); ++i)
    for (auto l : parts[i]) out[l] = i;
  return out;
}

bool tautology(const std::vector<Literal>& lits) {
  for (std::size_t i = 0; i < lits.size(); ++i)
    for (std::size_t j = i + 1; j < lits.size(); ++j)
      if (lits[i].negated() == lits[j]) return true;
  return false;
}

void renumber(Term& t, std::map<VarId, VarId>& ids) {
  if (t.is_variable()) {
    auto it = ids.emplace(t.id, static_cast<VarId>(ids.size())).first;
    t.id = it->second;
    return;
  }
  for (auto& a : t.args) renumber(a, ids);
}

}  // namespace

AvatarResult prove_avatar(const Problem& problem, const AvatarOptions& options) {
  AvatarResult result;
  std::vector<Clause> clauses = problem.clauses();
  const auto starts = problem.start_clauses();
  std::vector<std::vector<Component>> blocked;
  std::set<std::string> recorded;
  std::vector<std::uint32_t> mu;

  Refinements inner = options.refinements;
  inner.instance_symmetry = false;

  std::vector<std::vector<std::uint32_t>> components;
  bool rebuild = true;
  for (;;) {
    if (options.limits.expired()) {
      result.status = SearchResult::Status::Unknown;
      result.reason = "timeout";
      return result;
    }
    if (rebuild) {
      result.extended = Problem(clauses, problem.symbols(), StartPolicy::All);
      result.extended.set_start_clauses(starts);
      components.clear();
      for (const auto& c : clauses) components.push_back(component_of(c));
      rebuild = false;
    }
    const Problem& ext = result.extended;
    const auto n = static_cast<std::uint32_t>(ext.size());

    // Outer model over component variables.
    sat::Solver outer;
    std::map<Component, sat::Var> alpha;
    for (std::uint32_t c = 0; c < n; ++c) {
      sat::ClauseLits some;
      const auto count = 1 + *std::max_element(components[c].begin(), components[c].end());
      for (std::uint32_t i = 0; i < count; ++i) {
        const auto v = outer.new_var();
        alpha.emplace(Component{c, i}, v);
        some.push_back(sat::pos(v));
      }
      outer.add_clause(some);
    }
    for (const auto& used : blocked) {
      sat::ClauseLits clause;
      for (const auto& comp : used) clause.push_back(sat::neg(alpha.at(comp)));
      outer.add_clause(clause);
    }
    auto choice = outer.solve();
    if (sat::is_unsat(choice)) {
      result.status = SearchResult::Status::Proof;
      return result;
    }
    ++result.component_models;
    const auto& model = std::get<sat::Sat>(choice).model;

    CoreOptions co;
    co.refinements = inner;
    co.limits = options.limits;
    co.active.resize(n);
    for (std::uint32_t c = 0; c < n; ++c) {
      co.active[c].resize(components[c].size());
      for (std::uint32_t l = 0; l < components[c].size(); ++l)
        co.active[c][l] = model.value(alpha.at(Component{c, components[c][l]}));
    }
    if (!mu.empty()) {
      co.initial = mu;
      co.initial.resize(n, 0);
    }
    auto r = prove_with_cores(ext, co);
    result.stats.add(r.stats);
    mu = r.multiplicities;

    if (r.status == SearchResult::Status::NonTheorem) {
      result.status = SearchResult::Status::NonTheorem;
      result.reason = r.reason;
      return result;
    }
    if (r.status != SearchResult::Status::Proof) {
      result.status = SearchResult::Status::Unknown;
      result.reason = r.reason.empty() ? "inner search gave no verdict" : r.reason;
      return result;
    }

    const Matrix& m = *r.matrix;
    std::set<Component> used;
    for (const auto& copy : m.copies)
      for (std::uint32_t l = 0; l < components[copy.clause].size(); ++l)
        if (copy.is_active(l)) used.insert(Component{copy.clause, components[copy.clause][l]});
    blocked.emplace_back(used.begin(), used.end());
    result.subproofs.push_back(m);

    // Record copies whose instance now splits.
    for (std::uint32_t i = 0; i < m.copies.size(); ++i) {
      if (result.instances.size() >= options.max_instances) break;
      const auto parent = m.copies[i].clause;
      const Clause& pc = ext.clause(parent);
      if (pc.literals.size() < 2 || split_components(pc).size() > 1) continue;
      Clause inst;
      std::map<VarId, VarId> ids;
      for (std::uint32_t l = 0; l < pc.literals.size(); ++l) {
        Literal lit = m.instance(ext, i, l);
        for (auto& a : lit.args) renumber(a, ids);
        inst.literals.push_back(std::move(lit));
      }
      inst.num_vars = static_cast<std::uint32_t>(ids.size());
      for (std::uint32_t v = 0; v < inst.num_vars; ++v) inst.var_names.push_back("V" + std::to_string(v));
      if (tautology(inst.literals) || split_components(inst).size() < 2) continue;
      auto key = to_string(inst, ext.symbols());
      if (!recorded.insert(key).second) continue;
      inst.name = pc.name + "_inst" + std::to_string(result.instances.size());
      inst.role = Role::Axiom;
      result.instances.push_back(InstanceClause{parent, inst});
      clauses.push_back(std::move(inst));
      rebuild = true;
    }
  }
}

}  // namespace conmat
