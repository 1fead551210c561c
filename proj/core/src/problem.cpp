#include "conmat/problem.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace conmat {

bool Term::is_ground() const {
  if (is_variable()) return false;
  return std::all_of(args.begin(), args.end(),
                     [](const Term& t) { return t.is_ground(); });
}

bool Term::contains_variable(VarId v) const {
  if (is_variable()) return id == v;
  return std::any_of(args.begin(), args.end(),
                     [v](const Term& t) { return t.contains_variable(v); });
}

void Term::collect_variables(std::vector<VarId>& out) const {
  if (is_variable()) {
    if (std::find(out.begin(), out.end(), id) == out.end()) out.push_back(id);
    return;
  }
  for (const Term& t : args) t.collect_variables(out);
}

bool Literal::is_ground() const {
  return std::all_of(args.begin(), args.end(),
                     [](const Term& t) { return t.is_ground(); });
}

void Literal::collect_variables(std::vector<VarId>& out) const {
  for (const Term& t : args) t.collect_variables(out);
}

std::string_view role_name(Role r) {
  switch (r) {
    case Role::Axiom: return "axiom";
    case Role::Hypothesis: return "hypothesis";
    case Role::NegatedConjecture: return "negated_conjecture";
  }
  return "axiom";
}

bool Clause::all_positive() const {
  return std::all_of(literals.begin(), literals.end(),
                     [](const Literal& l) { return l.positive; });
}

// ---------------------------------------------------------------------------
// SymbolTable

namespace {

SymbolId intern(std::vector<Symbol>& table,
                std::unordered_map<std::string, SymbolId>& ids,
                std::string_view name, std::uint32_t arity, const char* kind) {
  auto it = ids.find(std::string(name));
  if (it != ids.end()) {
    if (table[it->second].arity != arity) {
      throw std::invalid_argument(std::string(kind) + " '" + std::string(name) +
                                  "' used with arity " + std::to_string(arity) +
                                  " and " +
                                  std::to_string(table[it->second].arity));
    }
    return it->second;
  }
  const auto id = static_cast<SymbolId>(table.size());
  table.push_back(Symbol{std::string(name), arity});
  ids.emplace(std::string(name), id);
  return id;
}

}  // namespace

SymbolId SymbolTable::function(std::string_view name, std::uint32_t arity) {
  return intern(functions_, function_ids_, name, arity, "function");
}

SymbolId SymbolTable::predicate(std::string_view name, std::uint32_t arity) {
  return intern(predicates_, predicate_ids_, name, arity, "predicate");
}

std::optional<SymbolId> SymbolTable::find_function(std::string_view name) const {
  auto it = function_ids_.find(std::string(name));
  if (it == function_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<SymbolId> SymbolTable::find_predicate(std::string_view name) const {
  auto it = predicate_ids_.find(std::string(name));
  if (it == predicate_ids_.end()) return std::nullopt;
  return it->second;
}

std::optional<StartPolicy> parse_start_policy(std::string_view text) {
  if (text == "ladder" || text == "auto") return StartPolicy::Ladder;
  if (text == "declared" || text == "conjecture") return StartPolicy::Declared;
  if (text == "positive") return StartPolicy::Positive;
  if (text == "all") return StartPolicy::All;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Unification over a single shared variable space. Only used for the static
// potential-connection relation, where terms are tiny.

namespace {

using Bindings = std::unordered_map<VarId, const Term*>;

const Term* walk(const Term* t, const Bindings& b) {
  while (t->is_variable()) {
    auto it = b.find(t->id);
    if (it == b.end()) break;
    t = it->second;
  }
  return t;
}

bool occurs(VarId v, const Term* t, const Bindings& b) {
  t = walk(t, b);
  if (t->is_variable()) return t->id == v;
  return std::any_of(t->args.begin(), t->args.end(),
                     [&](const Term& s) { return occurs(v, &s, b); });
}

bool unify_into(const Term* a, const Term* c, Bindings& b) {
  std::vector<std::pair<const Term*, const Term*>> todo{{a, c}};
  while (!todo.empty()) {
    auto [x, y] = todo.back();
    todo.pop_back();
    x = walk(x, b);
    y = walk(y, b);
    if (x->is_variable() && y->is_variable() && x->id == y->id) continue;
    if (x->is_variable()) {
      if (occurs(x->id, y, b)) return false;
      b[x->id] = y;
    } else if (y->is_variable()) {
      if (occurs(y->id, x, b)) return false;
      b[y->id] = x;
    } else {
      if (x->id != y->id || x->args.size() != y->args.size()) return false;
      for (std::size_t i = 0; i < x->args.size(); ++i)
        todo.emplace_back(&x->args[i], &y->args[i]);
    }
  }
  return true;
}

Term shift_vars(const Term& t, VarId offset) {
  if (t.is_variable()) return Term::variable(t.id + offset);
  Term r = Term::application(t.id);
  r.args.reserve(t.args.size());
  for (const Term& s : t.args) r.args.push_back(shift_vars(s, offset));
  return r;
}

VarId max_var_plus_one(const Literal& l) {
  std::vector<VarId> vs;
  l.collect_variables(vs);
  VarId m = 0;
  for (VarId v : vs) m = std::max(m, v + 1);
  return m;
}

}  // namespace

bool unifiable_dual(const Literal& l, const Literal& k) {
  if (l.positive == k.positive || l.predicate != k.predicate ||
      l.args.size() != k.args.size())
    return false;
  Bindings b;
  for (std::size_t i = 0; i < l.args.size(); ++i)
    if (!unify_into(&l.args[i], &k.args[i], b)) return false;
  return true;
}

bool can_connect(const Literal& l, const Literal& k) {
  if (l.positive == k.positive || l.predicate != k.predicate) return false;
  const VarId offset = max_var_plus_one(l);
  Literal renamed = k;
  for (Term& t : renamed.args) t = shift_vars(t, offset);
  return unifiable_dual(l, renamed);
}

// ---------------------------------------------------------------------------
// Copies

ClauseCopy rename_copy(const Clause& clause, std::uint32_t clause_index,
                       std::uint32_t k, VarId var_base) {
  ClauseCopy copy{clause_index, k, var_base, {}};
  copy.literals.reserve(clause.literals.size());
  for (const Literal& l : clause.literals) {
    Literal r = l;
    for (Term& t : r.args) t = shift_vars(t, var_base);
    copy.literals.push_back(std::move(r));
  }
  return copy;
}

VarId VariableSpace::base(std::uint32_t clause, std::uint32_t copy,
                          std::uint32_t num_vars) {
  const std::uint64_t key = (std::uint64_t{clause} << 32) | copy;
  auto [it, inserted] = bases_.emplace(key, next_);
  if (inserted) next_ += num_vars;
  return it->second;
}

std::optional<VarId> VariableSpace::find(std::uint32_t clause,
                                         std::uint32_t copy) const {
  auto it = bases_.find((std::uint64_t{clause} << 32) | copy);
  if (it == bases_.end()) return std::nullopt;
  return it->second;
}

std::string copy_var_name(const Clause& clause, std::uint32_t clause_index,
                          std::uint32_t k, std::uint32_t local) {
  std::string base = local < clause.var_names.size()
                         ? clause.var_names[local]
                         : "X" + std::to_string(local);
  return base + "_" + std::to_string(clause_index) + "_" + std::to_string(k);
}

// ---------------------------------------------------------------------------
// Start clauses and the Problem

std::vector<std::uint32_t> choose_start_clauses(
    const std::vector<Clause>& clauses, StartPolicy policy) {
  std::vector<std::uint32_t> declared, positive, all;
  for (std::uint32_t i = 0; i < clauses.size(); ++i) {
    all.push_back(i);
    if (clauses[i].role == Role::NegatedConjecture) declared.push_back(i);
    if (clauses[i].all_positive()) positive.push_back(i);
  }
  switch (policy) {
    case StartPolicy::Ladder:
      if (!declared.empty()) return declared;
      if (!positive.empty()) return positive;
      return all;
    case StartPolicy::Declared:
      return declared.empty() ? all : declared;
    case StartPolicy::Positive:
      return positive.empty() ? all : positive;
    case StartPolicy::All:
      return all;
  }
  return all;
}

Problem::Problem(std::vector<Clause> clauses, SymbolTable symbols,
                 StartPolicy policy)
    : clauses_(std::move(clauses)), symbols_(std::move(symbols)) {
  start_ = choose_start_clauses(clauses_, policy);
  for (SymbolId f = 0; f < symbols_.num_functions(); ++f) {
    if (symbols_.function_symbol(f).arity == 0)
      constants_.push_back(f);
    else
      epr_ = false;
  }

  literal_offset_.reserve(clauses_.size());
  std::size_t total = 0;
  for (const Clause& c : clauses_) {
    literal_offset_.push_back(total);
    total += c.literals.size();
  }
  partners_.assign(total, {});
  for (std::uint32_t ci = 0; ci < clauses_.size(); ++ci) {
    for (std::uint32_t li = 0; li < clauses_[ci].literals.size(); ++li) {
      auto& out = partners_[literal_offset_[ci] + li];
      for (std::uint32_t dj = 0; dj < clauses_.size(); ++dj)
        for (std::uint32_t kj = 0; kj < clauses_[dj].literals.size(); ++kj)
          if (can_connect(clauses_[ci].literals[li], clauses_[dj].literals[kj]))
            out.push_back(LiteralRef{dj, kj});
    }
  }
}

bool Problem::is_start(std::uint32_t clause) const {
  return std::find(start_.begin(), start_.end(), clause) != start_.end();
}

void Problem::set_start_clauses(std::vector<std::uint32_t> start) {
  if (start.empty()) throw std::invalid_argument("start clause set is empty");
  for (auto c : start)
    if (c >= clauses_.size())
      throw std::invalid_argument("start clause index out of range");
  std::sort(start.begin(), start.end());
  start.erase(std::unique(start.begin(), start.end()), start.end());
  start_ = std::move(start);
}

std::size_t Problem::total_literals() const {
  std::size_t n = 0;
  for (const Clause& c : clauses_) n += c.literals.size();
  return n;
}

const std::vector<LiteralRef>& Problem::partners(LiteralRef l) const {
  return partners_.at(literal_offset_.at(l.clause) + l.literal);
}

bool Problem::connectable(LiteralRef a, LiteralRef b) const {
  const auto& p = partners(a);
  return std::find(p.begin(), p.end(), b) != p.end();
}

std::uint64_t Problem::hash() const {
  const std::string text = to_tptp(*this);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ULL;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Printing

std::string to_string(const Term& t, const SymbolTable& symbols,
                      const std::vector<std::string>* var_names) {
  if (t.is_variable()) {
    if (var_names && t.id < var_names->size()) return (*var_names)[t.id];
    return "V" + std::to_string(t.id);
  }
  std::string out = symbols.function_symbol(t.id).name;
  if (!t.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < t.args.size(); ++i) {
      if (i) out += ',';
      out += to_string(t.args[i], symbols, var_names);
    }
    out += ')';
  }
  return out;
}

std::string to_string(const Literal& l, const SymbolTable& symbols,
                      const std::vector<std::string>* var_names) {
  std::string out = l.positive ? "" : "~";
  out += symbols.predicate_symbol(l.predicate).name;
  if (!l.args.empty()) {
    out += '(';
    for (std::size_t i = 0; i < l.args.size(); ++i) {
      if (i) out += ',';
      out += to_string(l.args[i], symbols, var_names);
    }
    out += ')';
  }
  return out;
}

std::string to_string(const Clause& c, const SymbolTable& symbols) {
  std::string out;
  for (std::size_t i = 0; i < c.literals.size(); ++i) {
    if (i) out += " | ";
    out += to_string(c.literals[i], symbols, &c.var_names);
  }
  return out;
}

std::string to_tptp(const Problem& p) {
  std::ostringstream os;
  for (const Clause& c : p.clauses())
    os << "cnf(" << c.name << ", " << role_name(c.role) << ", ("
       << to_string(c, p.symbols()) << ")).\n";
  return os.str();
}

// ---------------------------------------------------------------------------
// Parsing

ParseError::ParseError(const std::string& what, std::size_t l, std::size_t c)
    : std::runtime_error("line " + std::to_string(l) + ", column " +
                         std::to_string(c) + ": " + what),
      line(l),
      column(c) {}

namespace {

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) {}

  void skip_space() {
    while (pos_ < text_.size()) {
      const char ch = text_[pos_];
      if (ch == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (ch == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '*') {
        advance();
        advance();
        while (pos_ + 1 < text_.size() &&
               !(text_[pos_] == '*' && text_[pos_ + 1] == '/'))
          advance();
        if (pos_ + 1 >= text_.size()) fail("unterminated comment");
        advance();
        advance();
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        advance();
      } else {
        break;
      }
    }
  }

  bool at_end() {
    skip_space();
    return pos_ >= text_.size();
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char ch) {
    if (peek() != ch) return false;
    advance();
    return true;
  }

  void expect(char ch) {
    if (!accept(ch)) {
      const char got = peek();
      fail(std::string("expected '") + ch + "' but found " +
           (got ? std::string("'") + got + "'" : std::string("end of input")));
    }
  }

  std::string identifier() {
    skip_space();
    const std::size_t start = pos_;
    if (pos_ < text_.size() && text_[pos_] == '\'') {
      advance();
      while (pos_ < text_.size() && text_[pos_] != '\'') advance();
      if (pos_ >= text_.size()) fail("unterminated quoted name");
      advance();
      return std::string(text_.substr(start, pos_ - start));
    }
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
            text_[pos_] == '_'))
      advance();
    if (start == pos_) fail("expected identifier");
    return std::string(text_.substr(start, pos_ - start));
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError(what, line_, column_);
  }

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

bool is_variable_name(const std::string& s) {
  return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

// Symbol resolution for the two parsing contexts: building a fresh table,
// or resolving against a fixed one.
struct SymbolSink {
  SymbolTable* mutable_table = nullptr;
  const SymbolTable* fixed_table = nullptr;

  SymbolId function(Lexer& lex, const std::string& name, std::uint32_t arity) {
    try {
      if (mutable_table) return mutable_table->function(name, arity);
    } catch (const std::invalid_argument& e) {
      lex.fail(e.what());
    }
    auto id = fixed_table->find_function(name);
    if (!id) lex.fail("unknown function symbol '" + name + "'");
    if (fixed_table->function_symbol(*id).arity != arity)
      lex.fail("arity mismatch for '" + name + "'");
    return *id;
  }

  SymbolId predicate(Lexer& lex, const std::string& name, std::uint32_t arity) {
    try {
      if (mutable_table) return mutable_table->predicate(name, arity);
    } catch (const std::invalid_argument& e) {
      lex.fail(e.what());
    }
    auto id = fixed_table->find_predicate(name);
    if (!id) lex.fail("unknown predicate symbol '" + name + "'");
    if (fixed_table->predicate_symbol(*id).arity != arity)
      lex.fail("arity mismatch for '" + name + "'");
    return *id;
  }
};

Term parse_term_at(Lexer& lex, SymbolSink& sink, std::vector<std::string>& vars) {
  const std::string name = lex.identifier();
  if (is_variable_name(name)) {
    auto it = std::find(vars.begin(), vars.end(), name);
    if (it != vars.end())
      return Term::variable(static_cast<VarId>(it - vars.begin()));
    vars.push_back(name);
    return Term::variable(static_cast<VarId>(vars.size() - 1));
  }
  std::vector<Term> args;
  if (lex.accept('(')) {
    do {
      args.push_back(parse_term_at(lex, sink, vars));
    } while (lex.accept(','));
    lex.expect(')');
  }
  const auto arity = static_cast<std::uint32_t>(args.size());
  return Term::application(sink.function(lex, name, arity), std::move(args));
}

Literal parse_literal_at(Lexer& lex, SymbolSink& sink,
                         std::vector<std::string>& vars) {
  Literal lit;
  lit.positive = !lex.accept('~');
  const std::string name = lex.identifier();
  if (is_variable_name(name)) {
    if (lex.peek() == '=' || lex.peek() == '!')
      lex.fail("equality is not supported; axiomatize it as a predicate");
    lex.fail("expected predicate, found variable '" + name + "'");
  }
  if (lex.accept('(')) {
    do {
      lit.args.push_back(parse_term_at(lex, sink, vars));
    } while (lex.accept(','));
    lex.expect(')');
  }
  const char next = lex.peek();
  if (next == '=' || next == '!')
    lex.fail("equality is not supported; axiomatize it as a predicate");
  lit.predicate =
      sink.predicate(lex, name, static_cast<std::uint32_t>(lit.args.size()));
  return lit;
}

bool is_tautology(const std::vector<Literal>& lits) {
  for (std::size_t i = 0; i < lits.size(); ++i)
    for (std::size_t j = i + 1; j < lits.size(); ++j)
      if (lits[i].positive != lits[j].positive &&
          lits[i].predicate == lits[j].predicate && lits[i].args == lits[j].args)
        return true;
  return false;
}

// Renumbers variables by first occurrence after duplicate removal.
void normalise(Clause& c, const std::vector<std::string>& names) {
  std::vector<Literal> unique;
  for (Literal& l : c.literals)
    if (std::find(unique.begin(), unique.end(), l) == unique.end())
      unique.push_back(std::move(l));
  c.literals = std::move(unique);

  std::vector<VarId> order;
  for (const Literal& l : c.literals) l.collect_variables(order);
  std::vector<VarId> remap(names.size(), 0);
  for (std::size_t i = 0; i < order.size(); ++i)
    remap[order[i]] = static_cast<VarId>(i);
  auto apply = [&](auto& self, Term& t) -> void {
    if (t.is_variable()) {
      t.id = remap[t.id];
      return;
    }
    for (Term& s : t.args) self(self, s);
  };
  for (Literal& l : c.literals)
    for (Term& t : l.args) apply(apply, t);
  c.num_vars = static_cast<std::uint32_t>(order.size());
  c.var_names.clear();
  for (VarId v : order) c.var_names.push_back(names[v]);
}

}  // namespace

Problem parse_problem(std::string_view text, StartPolicy policy) {
  Lexer lex(text);
  SymbolTable symbols;
  SymbolSink sink{&symbols, nullptr};
  std::vector<Clause> clauses;
  bool any = false;

  while (!lex.at_end()) {
    const std::string kw = lex.identifier();
    if (kw != "cnf") lex.fail("expected 'cnf', found '" + kw + "'");
    lex.expect('(');
    Clause clause;
    clause.name = lex.identifier();
    lex.expect(',');
    const std::size_t role_line = lex.line(), role_col = lex.column();
    const std::string role = lex.identifier();
    if (role == "axiom") clause.role = Role::Axiom;
    else if (role == "hypothesis") clause.role = Role::Hypothesis;
    else if (role == "negated_conjecture") clause.role = Role::NegatedConjecture;
    else throw ParseError("unsupported role '" + role + "'", role_line, role_col);
    lex.expect(',');

    std::vector<std::string> names;
    int parens = 0;
    while (lex.accept('(')) ++parens;
    do {
      clause.literals.push_back(parse_literal_at(lex, sink, names));
    } while (lex.accept('|'));
    for (; parens > 0; --parens) lex.expect(')');
    lex.expect(')');
    lex.expect('.');
    any = true;

    normalise(clause, names);
    if (!is_tautology(clause.literals)) clauses.push_back(std::move(clause));
  }
  if (!any) throw ParseError("empty problem", lex.line(), lex.column());
  if (clauses.empty())
    throw ParseError("every clause is a tautology", lex.line(), lex.column());
  return Problem(std::move(clauses), std::move(symbols), policy);
}

Problem parse_problem_file(const std::string& path, StartPolicy policy) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), policy);
}

Term parse_term(std::string_view text, const SymbolTable& symbols,
                std::vector<std::string>& vars) {
  Lexer lex(text);
  SymbolSink sink{nullptr, &symbols};
  Term t = parse_term_at(lex, sink, vars);
  if (!lex.at_end()) lex.fail("trailing input after term");
  return t;
}

Literal parse_literal(std::string_view text, const SymbolTable& symbols,
                      std::vector<std::string>& vars) {
  Lexer lex(text);
  SymbolSink sink{nullptr, &symbols};
  Literal l = parse_literal_at(lex, sink, vars);
  if (!lex.at_end()) lex.fail("trailing input after literal");
  return l;
}

}  // namespace conmat
