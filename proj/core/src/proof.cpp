#include "conmat/proof.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <unordered_map>

namespace conmat {

namespace {

Term substitute(const Term& t, const std::vector<std::optional<Term>>& map, VarId shift) {
  if (t.is_variable()) {
    const VarId v = t.id + shift;
    if (v < map.size() && map[v]) return *map[v];
    return Term::variable(v);
  }
  Term out = Term::application(t.id);
  out.args.reserve(t.args.size());
  for (const Term& a : t.args) out.args.push_back(substitute(a, map, shift));
  return out;
}

}  // namespace

Literal Matrix::instance(const Problem& problem, std::uint32_t copy,
                         std::uint32_t literal) const {
  std::vector<std::optional<Term>> map;
  for (const auto& [v, t] : bindings) {
    if (v >= map.size()) map.resize(v + 1);
    map[v] = t;
  }
  const MatrixCopy& c = copies.at(copy);
  const Literal& l = problem.clause(c.clause).literals.at(literal);
  Literal out{l.positive, l.predicate, {}};
  for (const Term& t : l.args) out.args.push_back(substitute(t, map, c.base));
  return out;
}

ProofDocument::SubProof describe_matrix(const Problem& problem, const Matrix& matrix) {
  std::vector<std::string> names;
  auto name_range = [&](const MatrixCopy& c) {
    const Clause& clause = problem.clause(c.clause);
    if (names.size() < c.base + clause.num_vars) names.resize(c.base + clause.num_vars);
    for (std::uint32_t i = 0; i < clause.num_vars; ++i)
      names[c.base + i] = copy_var_name(clause, c.clause, c.k, i);
  };
  for (const auto& c : matrix.copies) name_range(c);

  ProofDocument::SubProof out;
  std::set<VarId> owned;
  for (std::uint32_t i = 0; i < matrix.copies.size(); ++i) {
    const MatrixCopy& c = matrix.copies[i];
    const Clause& clause = problem.clause(c.clause);
    ProofDocument::Copy copy{i, clause.name, c.k, {}};
    for (const Literal& l : rename_copy(clause, c.clause, c.k, c.base).literals)
      copy.literals.push_back(to_string(l, problem.symbols(), &names));
    for (std::uint32_t v = 0; v < clause.num_vars; ++v) owned.insert(c.base + v);
    for (std::uint32_t l = 0; l < clause.literals.size(); ++l)
      if (!c.is_active(l)) out.inactive.push_back({i, l});
    out.copies.push_back(std::move(copy));
  }
  for (const auto& [v, t] : matrix.bindings) {
    if (!owned.count(v)) continue;
    out.bindings.push_back({names[v], to_string(t, problem.symbols(), &names)});
  }
  for (const auto& c : matrix.connections)
    out.connections.push_back({{c.copy_a, c.lit_a}, {c.copy_b, c.lit_b}});
  return out;
}

// ---------------------------------------------------------------------------
// Printing and parsing

namespace {

std::string join_literals(const std::vector<std::string>& lits) {
  std::string out;
  for (std::size_t i = 0; i < lits.size(); ++i) {
    if (i) out += " | ";
    out += lits[i];
  }
  return out;
}

std::string position(const ProofDocument::Position& p) {
  return std::to_string(p.copy) + "." + std::to_string(p.literal);
}

}  // namespace

std::string print_document(const ProofDocument& doc) {
  std::ostringstream os;
  os << "conmat-proof 1\n";
  os << "problem " << std::hex << doc.problem_hash << std::dec << '\n';
  os << "mode " << doc.mode << '\n';
  os << "start " << doc.start << '\n';
  for (const auto& inst : doc.instances)
    os << "instance " << inst.name << ' ' << inst.parent << ' '
       << join_literals(inst.literals) << '\n';
  for (const auto& [name, mu] : doc.multiplicities) os << "mu " << name << ' ' << mu << '\n';
  for (const auto& sp : doc.subproofs) {
    os << "subproof\n";
    for (const auto& c : sp.copies)
      os << "copy " << c.id << ' ' << c.clause << ' ' << c.k << ' '
         << join_literals(c.literals) << '\n';
    for (const auto& b : sp.bindings) os << "bind " << b.var << ' ' << b.term << '\n';
    for (const auto& c : sp.connections)
      os << "connect " << position(c.a) << ' ' << position(c.b) << '\n';
    for (const auto& p : sp.inactive) os << "inactive " << position(p) << '\n';
  }
  for (const auto& [key, value] : doc.stats) os << "stat " << key << ' ' << value << '\n';
  return os.str();
}

DocumentError::DocumentError(const std::string& what, std::size_t l)
    : std::runtime_error("proof line " + std::to_string(l) + ": " + what), line(l) {}

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

// Splits off the first whitespace-delimited word.
std::string next_word(std::string_view& rest) {
  const auto b = rest.find_first_not_of(" \t");
  if (b == std::string_view::npos) {
    rest = {};
    return {};
  }
  rest.remove_prefix(b);
  const auto e = rest.find_first_of(" \t");
  std::string word(rest.substr(0, e));
  rest = e == std::string_view::npos ? std::string_view{} : rest.substr(e);
  return word;
}

std::vector<std::string> split_literals(std::string_view text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (;;) {
    const auto bar = text.find('|', start);
    out.push_back(trim(text.substr(start, bar == std::string_view::npos ? text.npos
                                                                        : bar - start)));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

std::uint32_t to_u32(const std::string& s, std::size_t line) {
  if (s.empty() || !std::all_of(s.begin(), s.end(), ::isdigit))
    throw DocumentError("expected a number, got '" + s + "'", line);
  return static_cast<std::uint32_t>(std::stoul(s));
}

ProofDocument::Position to_position(const std::string& s, std::size_t line) {
  const auto dot = s.find('.');
  if (dot == std::string::npos) throw DocumentError("expected <copy>.<lit>", line);
  return {to_u32(s.substr(0, dot), line), to_u32(s.substr(dot + 1), line)};
}

}  // namespace

ProofDocument parse_document(std::string_view text) {
  ProofDocument doc;
  std::size_t line_no = 0;
  bool header = false;
  auto current = [&]() -> ProofDocument::SubProof& {
    if (doc.subproofs.empty()) doc.subproofs.emplace_back();
    return doc.subproofs.back();
  };
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    std::string_view rest = line;
    const std::string key = next_word(rest);
    if (!header) {
      if (key != "conmat-proof" || trim(rest) != "1")
        throw DocumentError("missing 'conmat-proof 1' header", line_no);
      header = true;
      continue;
    }
    if (key == "problem") {
      const std::string h = trim(rest);
      try {
        doc.problem_hash = std::stoull(h, nullptr, 16);
      } catch (const std::exception&) {
        throw DocumentError("bad problem hash", line_no);
      }
    } else if (key == "mode") {
      doc.mode = trim(rest);
    } else if (key == "start") {
      doc.start = trim(rest);
    } else if (key == "instance") {
      ProofDocument::Instance inst;
      inst.name = next_word(rest);
      inst.parent = next_word(rest);
      inst.literals = split_literals(rest);
      doc.instances.push_back(std::move(inst));
    } else if (key == "mu") {
      const std::string name = next_word(rest);
      doc.multiplicities.emplace_back(name, to_u32(trim(rest), line_no));
    } else if (key == "stat") {
      const std::string name = next_word(rest);
      doc.stats.emplace_back(name, trim(rest));
    } else if (key == "subproof") {
      doc.subproofs.emplace_back();
    } else if (key == "copy") {
      ProofDocument::Copy c;
      c.id = to_u32(next_word(rest), line_no);
      c.clause = next_word(rest);
      c.k = to_u32(next_word(rest), line_no);
      c.literals = split_literals(rest);
      current().copies.push_back(std::move(c));
    } else if (key == "bind") {
      ProofDocument::Binding b;
      b.var = next_word(rest);
      b.term = trim(rest);
      if (b.var.empty() || b.term.empty()) throw DocumentError("incomplete binding", line_no);
      current().bindings.push_back(std::move(b));
    } else if (key == "connect") {
      const auto a = to_position(next_word(rest), line_no);
      const auto b = to_position(next_word(rest), line_no);
      current().connections.push_back({a, b});
    } else if (key == "inactive") {
      current().inactive.push_back(to_position(next_word(rest), line_no));
    } else {
      throw DocumentError("unknown record '" + key + "'", line_no);
    }
  }
  if (!header) throw DocumentError("empty proof document", line_no);
  return doc;
}

ProofDocument parse_document_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_document(buf.str());
}

// ---------------------------------------------------------------------------
// Checking

namespace {

// Small DPLL over clauses of signed 1-based integers.
class Dpll {
 public:
  explicit Dpll(int vars) : value_(vars + 1, 0) {}
  void add(std::vector<int> c) { clauses_.push_back(std::move(c)); }
  bool satisfiable() { return search(); }

 private:
  bool search() {
    std::vector<int> assigned;
    auto undo = [&] {
      for (int v : assigned) value_[v] = 0;
    };
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& c : clauses_) {
        int unassigned = 0, last = 0;
        bool sat = false;
        for (int l : c) {
          const int v = value_[std::abs(l)];
          if (v == 0) ++unassigned, last = l;
          else if ((v > 0) == (l > 0)) sat = true;
        }
        if (sat) continue;
        if (unassigned == 0) {
          undo();
          return false;
        }
        if (unassigned == 1) {
          value_[std::abs(last)] = last > 0 ? 1 : -1;
          assigned.push_back(std::abs(last));
          changed = true;
        }
      }
    }
    int branch = 0;
    for (std::size_t v = 1; v < value_.size() && !branch; ++v)
      if (value_[v] == 0) branch = static_cast<int>(v);
    if (!branch) return true;
    for (int sign : {1, -1}) {
      value_[branch] = sign;
      if (search()) return true;
    }
    value_[branch] = 0;
    undo();
    return false;
  }

  std::vector<int> value_;
  std::vector<std::vector<int>> clauses_;
};

bool match(const Term& pattern, const Term& t, std::vector<std::optional<Term>>& theta) {
  if (pattern.is_variable()) {
    if (pattern.id >= theta.size()) theta.resize(pattern.id + 1);
    if (theta[pattern.id]) return *theta[pattern.id] == t;
    theta[pattern.id] = t;
    return true;
  }
  if (t.is_variable() || t.id != pattern.id || t.args.size() != pattern.args.size())
    return false;
  for (std::size_t i = 0; i < t.args.size(); ++i)
    if (!match(pattern.args[i], t.args[i], theta)) return false;
  return true;
}

// Checks that `lits` is `clause` with its variables renamed injectively;
// fills clause-local -> document variable map.
bool is_renaming(const Term& c, const Term& d, std::vector<std::optional<VarId>>& map,
                 std::map<VarId, VarId>& inverse) {
  if (c.is_variable()) {
    if (!d.is_variable()) return false;
    if (c.id >= map.size()) map.resize(c.id + 1);
    if (map[c.id]) return *map[c.id] == d.id;
    if (inverse.count(d.id)) return false;
    map[c.id] = d.id;
    inverse[d.id] = c.id;
    return true;
  }
  if (d.is_variable() || c.id != d.id || c.args.size() != d.args.size()) return false;
  for (std::size_t i = 0; i < c.args.size(); ++i)
    if (!is_renaming(c.args[i], d.args[i], map, inverse)) return false;
  return true;
}

bool occurs_any(const Term& t, const std::set<VarId>& vars) {
  if (t.is_variable()) return vars.count(t.id) != 0;
  return std::any_of(t.args.begin(), t.args.end(),
                     [&](const Term& a) { return occurs_any(a, vars); });
}

Term apply_bindings(const Term& t, const std::map<VarId, Term>& sigma) {
  if (t.is_variable()) {
    auto it = sigma.find(t.id);
    return it == sigma.end() ? t : it->second;
  }
  Term out = Term::application(t.id);
  for (const Term& a : t.args) out.args.push_back(apply_bindings(a, sigma));
  return out;
}

// Variable-disjoint components of a clause, as a component index per literal.
std::vector<std::uint32_t> literal_components(const Clause& clause) {
  const std::size_t n = clause.literals.size();
  std::vector<std::uint32_t> parent(n);
  for (std::uint32_t i = 0; i < n; ++i) parent[i] = i;
  std::function<std::uint32_t(std::uint32_t)> find = [&](std::uint32_t i) {
    return parent[i] == i ? i : parent[i] = find(parent[i]);
  };
  std::map<VarId, std::uint32_t> first;
  for (std::uint32_t i = 0; i < n; ++i) {
    std::vector<VarId> vars;
    clause.literals[i].collect_variables(vars);
    for (VarId v : vars) {
      auto [it, fresh] = first.emplace(v, i);
      if (!fresh) parent[find(i)] = find(it->second);
    }
  }
  std::map<std::uint32_t, std::uint32_t> ids;
  std::vector<std::uint32_t> out(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    auto [it, fresh] = ids.emplace(find(i), static_cast<std::uint32_t>(ids.size()));
    out[i] = it->second;
  }
  return out;
}

struct ClauseInfo {
  const Clause* clause;
  std::uint32_t index;  // position in the (extended) clause list
  bool start;
  std::uint32_t alpha_base;  // first component variable (1-based DPLL ids)
  std::vector<std::uint32_t> components;
};

struct SubProofResult {
  CheckResult result;
  std::set<std::uint32_t> used;  // DPLL component variables of active parts
};

SubProofResult check_subproof(const ProofDocument::SubProof& sp, const Problem& problem,
                              const std::map<std::string, ClauseInfo>& clauses,
                              bool avatar) {
  auto reject = [](std::string why) { return SubProofResult{CheckResult::reject(std::move(why)), {}}; };
  const SymbolTable& symbols = problem.symbols();
  std::vector<std::string> vars;

  // (a) copies are renamings of their clauses, renamed apart.
  struct Copy {
    const ClauseInfo* info;
    std::vector<Literal> literals;
    std::vector<bool> active;
  };
  std::vector<Copy> copies;
  std::map<std::uint32_t, std::uint32_t> index_of;
  std::set<std::pair<std::string, std::uint32_t>> seen;
  std::map<VarId, std::uint32_t> owner;
  for (const auto& c : sp.copies) {
    auto it = clauses.find(c.clause);
    if (it == clauses.end()) return reject("copy " + std::to_string(c.id) + " names unknown clause " + c.clause);
    if (c.k == 0) return reject("copy index must be positive");
    if (!seen.emplace(c.clause, c.k).second)
      return reject("duplicate copy " + c.clause + " " + std::to_string(c.k));
    if (!index_of.emplace(c.id, static_cast<std::uint32_t>(copies.size())).second)
      return reject("duplicate copy id " + std::to_string(c.id));
    const Clause& clause = *it->second.clause;
    if (c.literals.size() != clause.literals.size())
      return reject("copy " + std::to_string(c.id) + " has the wrong number of literals");
    Copy copy{&it->second, {}, std::vector<bool>(clause.literals.size(), true)};
    std::vector<std::optional<VarId>> map;
    std::map<VarId, VarId> inverse;
    for (std::size_t i = 0; i < c.literals.size(); ++i) {
      Literal l;
      try {
        l = parse_literal(c.literals[i], symbols, vars);
      } catch (const std::exception& e) {
        return reject("copy " + std::to_string(c.id) + ": " + e.what());
      }
      const Literal& orig = clause.literals[i];
      bool ok = l.positive == orig.positive && l.predicate == orig.predicate &&
                l.args.size() == orig.args.size();
      for (std::size_t a = 0; ok && a < l.args.size(); ++a)
        ok = is_renaming(orig.args[a], l.args[a], map, inverse);
      if (!ok)
        return reject("copy " + std::to_string(c.id) + " is not a renaming of " + c.clause);
      copy.literals.push_back(std::move(l));
    }
    for (const auto& [doc_var, local] : inverse) {
      if (vars[doc_var] != copy_var_name(clause, it->second.index, c.k, local))
        return reject("copy " + std::to_string(c.id) + " uses variable " + vars[doc_var] +
                      " that belongs to another copy");
      auto [o, fresh] = owner.emplace(doc_var, c.id);
      if (!fresh && o->second != c.id)
        return reject("copies " + std::to_string(o->second) + " and " + std::to_string(c.id) +
                      " share variable " + vars[doc_var]);
    }
    copies.push_back(std::move(copy));
  }
  if (copies.empty()) return reject("empty matrix");

  // (b) a start clause is present.
  if (std::none_of(copies.begin(), copies.end(), [](const Copy& c) { return c.info->start; }))
    return reject("no start clause in the matrix");

  // Bindings: single-valued, idempotent, over known symbols.
  std::map<VarId, Term> sigma;
  for (const auto& b : sp.bindings) {
    Term v, t;
    try {
      v = parse_term(b.var, symbols, vars);
      t = parse_term(b.term, symbols, vars);
    } catch (const std::exception& e) {
      return reject(std::string("binding: ") + e.what());
    }
    if (!v.is_variable()) return reject("binding of non-variable " + b.var);
    if (!sigma.emplace(v.id, t).second) return reject("variable " + b.var + " bound twice");
  }
  std::set<VarId> bound;
  for (const auto& [v, t] : sigma) bound.insert(v);
  for (const auto& [v, t] : sigma)
    if (occurs_any(t, bound)) return reject("bindings are not idempotent at " + vars[v]);

  auto locate = [&](const ProofDocument::Position& p) -> std::optional<std::pair<std::uint32_t, std::uint32_t>> {
    auto it = index_of.find(p.copy);
    if (it == index_of.end() || p.literal >= copies[it->second].literals.size()) return std::nullopt;
    return std::make_pair(it->second, p.literal);
  };

  for (const auto& p : sp.inactive) {
    auto at = locate(p);
    if (!at) return reject("inactive position out of range");
    copies[at->first].active[at->second] = false;
  }
  if (!avatar && !sp.inactive.empty()) return reject("inactive literals outside splitting mode");

  // (c) connections are dual and equal under the bindings.
  std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, std::pair<std::uint32_t, std::uint32_t>>> conns;
  for (const auto& c : sp.connections) {
    auto a = locate(c.a), b = locate(c.b);
    if (!a || !b) return reject("connection position out of range");
    if (a->first == b->first) return reject("connection within one copy");
    const Literal& la = copies[a->first].literals[a->second];
    const Literal& lb = copies[b->first].literals[b->second];
    bool dual = la.positive != lb.positive && la.predicate == lb.predicate &&
                la.args.size() == lb.args.size();
    for (std::size_t i = 0; dual && i < la.args.size(); ++i)
      dual = apply_bindings(la.args[i], sigma) == apply_bindings(lb.args[i], sigma);
    if (!dual)
      return reject("connection " + position(c.a) + " " + position(c.b) +
                    " is not dual under the bindings");
    conns.push_back({*a, *b});
  }

  // Full connectivity, or consistent components when splitting.
  std::set<std::uint32_t> used;
  if (!avatar) {
    std::set<std::pair<std::uint32_t, std::uint32_t>> touched;
    for (const auto& [a, b] : conns) touched.insert(a), touched.insert(b);
    for (std::uint32_t c = 0; c < copies.size(); ++c)
      for (std::uint32_t l = 0; l < copies[c].literals.size(); ++l)
        if (!touched.count({c, l}))
          return reject("literal " + std::to_string(sp.copies[c].id) + "." + std::to_string(l) +
                        " has no connection");
  } else {
    for (const auto& copy : copies) {
      const auto& comp = copy.info->components;
      std::map<std::uint32_t, bool> state;
      bool any = false;
      for (std::uint32_t l = 0; l < copy.literals.size(); ++l) {
        auto [it, fresh] = state.emplace(comp[l], copy.active[l]);
        if (!fresh && it->second != copy.active[l])
          return reject("inactive literals split a component of " + copy.info->clause->name);
        any = any || copy.active[l];
      }
      if (!any) return reject("copy of " + copy.info->clause->name + " has no active literal");
      for (const auto& [component, active] : state)
        if (active) used.insert(copy.info->alpha_base + component);
    }
  }

  // (d) no open path through active literals.
  std::set<std::pair<std::pair<std::uint32_t, std::uint32_t>, std::pair<std::uint32_t, std::uint32_t>>> closed;
  for (auto [a, b] : conns) {
    if (b < a) std::swap(a, b);
    closed.insert({a, b});
  }
  std::vector<std::vector<std::uint32_t>> choices(copies.size());
  for (std::uint32_t c = 0; c < copies.size(); ++c)
    for (std::uint32_t l = 0; l < copies[c].literals.size(); ++l)
      if (copies[c].active[l]) choices[c].push_back(l);

  bool open = false;
  if (copies.size() <= 6) {
    std::vector<std::uint32_t> pick(copies.size());
    std::function<bool(std::uint32_t)> walk = [&](std::uint32_t c) -> bool {
      if (c == copies.size()) return true;
      for (std::uint32_t l : choices[c]) {
        bool ok = true;
        for (std::uint32_t p = 0; ok && p < c; ++p)
          ok = !closed.count({{p, pick[p]}, {c, l}});
        if (!ok) continue;
        pick[c] = l;
        if (walk(c + 1)) return true;
      }
      return false;
    };
    open = walk(0);
  } else {
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> var;
    for (std::uint32_t c = 0; c < copies.size(); ++c)
      for (std::uint32_t l : choices[c]) var.emplace(std::make_pair(c, l), static_cast<int>(var.size()) + 1);
    Dpll dpll(static_cast<int>(var.size()));
    for (std::uint32_t c = 0; c < copies.size(); ++c) {
      std::vector<int> at_least;
      for (std::uint32_t l : choices[c]) at_least.push_back(var.at({c, l}));
      dpll.add(at_least);
    }
    for (const auto& [a, b] : closed)
      if (var.count(a) && var.count(b)) dpll.add({-var.at(a), -var.at(b)});
    open = dpll.satisfiable();
  }
  if (open) return reject("the connections leave an open path");
  return SubProofResult{CheckResult::accept(), std::move(used)};
}

}  // namespace

CheckResult check_proof(const ProofDocument& doc, const Problem& problem) {
  if (doc.problem_hash != problem.hash())
    return CheckResult::reject("proof is for a different problem");
  static const std::set<std::string> modes{"tableau", "matrix", "core", "avatar"};
  if (!modes.count(doc.mode)) return CheckResult::reject("unknown mode " + doc.mode);
  const bool avatar = doc.mode == "avatar";
  const auto policy = parse_start_policy(doc.start);
  if (!policy) return CheckResult::reject("unknown start policy " + doc.start);
  const auto starts = choose_start_clauses(problem.clauses(), *policy);

  std::map<std::string, ClauseInfo> clauses;
  std::uint32_t alpha = 1;
  for (std::uint32_t i = 0; i < problem.size(); ++i) {
    const Clause& c = problem.clause(i);
    ClauseInfo info{&c, i, std::find(starts.begin(), starts.end(), i) != starts.end(), alpha,
                    literal_components(c)};
    alpha += 1 + *std::max_element(info.components.begin(), info.components.end());
    clauses.emplace(c.name, std::move(info));
  }

  // Instances must be genuine instances of their parents.
  std::vector<Clause> instances;
  instances.reserve(doc.instances.size());
  if (!avatar && !doc.instances.empty())
    return CheckResult::reject("instance clauses outside splitting mode");
  for (const auto& inst : doc.instances) {
    auto parent = clauses.find(inst.parent);
    if (parent == clauses.end() || clauses.count(inst.name))
      return CheckResult::reject("bad instance record " + inst.name);
    const Clause& p = *parent->second.clause;
    Clause clause;
    clause.name = inst.name;
    if (inst.literals.size() != p.literals.size())
      return CheckResult::reject("instance " + inst.name + " has the wrong length");
    std::vector<std::optional<Term>> theta;
    for (std::size_t i = 0; i < inst.literals.size(); ++i) {
      try {
        clause.literals.push_back(parse_literal(inst.literals[i], problem.symbols(), clause.var_names));
      } catch (const std::exception& e) {
        return CheckResult::reject("instance " + inst.name + ": " + e.what());
      }
      const Literal& l = clause.literals.back();
      const Literal& q = p.literals[i];
      bool ok = l.positive == q.positive && l.predicate == q.predicate &&
                l.args.size() == q.args.size();
      for (std::size_t a = 0; ok && a < l.args.size(); ++a) ok = match(q.args[a], l.args[a], theta);
      if (!ok) return CheckResult::reject("instance " + inst.name + " is not an instance of " + p.name);
    }
    clause.num_vars = static_cast<std::uint32_t>(clause.var_names.size());
    instances.push_back(std::move(clause));
  }
  for (std::uint32_t i = 0; i < instances.size(); ++i) {
    const Clause& c = instances[i];
    ClauseInfo info{&c, static_cast<std::uint32_t>(problem.size()) + i, false, alpha,
                    literal_components(c)};
    alpha += 1 + *std::max_element(info.components.begin(), info.components.end());
    clauses.emplace(c.name, std::move(info));
  }

  if (doc.subproofs.empty()) return CheckResult::reject("no matrix in the proof");
  if (!avatar && doc.subproofs.size() != 1)
    return CheckResult::reject("several matrices outside splitting mode");

  std::vector<std::set<std::uint32_t>> used;
  for (std::size_t i = 0; i < doc.subproofs.size(); ++i) {
    auto r = check_subproof(doc.subproofs[i], problem, clauses, avatar);
    if (!r.result) {
      if (doc.subproofs.size() > 1) r.result.reason = "sub-proof " + std::to_string(i) + ": " + r.result.reason;
      return r.result;
    }
    used.push_back(std::move(r.used));
  }
  if (!avatar) return CheckResult::accept();

  // Every choice of components is refuted by some sub-proof.
  Dpll dpll(static_cast<int>(alpha - 1));
  for (const auto& [name, info] : clauses) {
    (void)name;
    std::vector<int> some;
    const auto n = 1 + *std::max_element(info.components.begin(), info.components.end());
    for (std::uint32_t c = 0; c < n; ++c) some.push_back(static_cast<int>(info.alpha_base + c));
    dpll.add(some);
  }
  for (const auto& u : used) {
    std::vector<int> block;
    for (auto v : u) block.push_back(-static_cast<int>(v));
    dpll.add(block);
  }
  if (dpll.satisfiable()) return CheckResult::reject("the sub-proofs do not cover every split");
  return CheckResult::accept();
}

}  // namespace conmat
