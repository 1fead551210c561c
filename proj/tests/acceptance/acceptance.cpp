// Prints one PASS/FAIL line per acceptance criterion. Exit status is the
// number of unexpected results; `--expect-fail N` marks criterion N as a
// known failure (it still prints FAIL, and passing it counts as unexpected).

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "../support/mutations.hpp"
#include "conmat/avatar.hpp"
#include "conmat/matrix.hpp"
#include "conmat/oracle.hpp"
#include "conmat/prover.hpp"

using namespace conmat;

namespace {

const std::string kData = CONMAT_TEST_DATA;
constexpr std::uint64_t kSeeds = 200;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Problem load(const std::string& name) { return parse_problem_file(kData + "/" + name); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ProverResult run(const Problem& p, Mode mode, double timeout = 10,
                 Refinements refinements = {}) {
  ProverConfig config;
  config.mode = mode;
  config.timeout_seconds = timeout;
  config.refinements = refinements;
  return prove(p, config);
}

std::vector<Problem> generated() {
  std::vector<Problem> out;
  const auto profile = *generator_profile("epr");
  for (std::uint64_t seed = 0; seed < kSeeds; ++seed)
    out.push_back(generate_random_problem(seed, profile));
  return out;
}

std::vector<Problem> corpus() {
  std::vector<Problem> out;
  for (const char* f : {"two_clause.p", "chain.p", "instance_chain.p", "split.p", "unit.p",
                        "distinct_constants.p"})
    out.push_back(load(f));
  for (auto& p : generated()) out.push_back(std::move(p));
  return out;
}

// Two-clause problem in matrix mode: three copies, four connections.
Outcome two_clause_matrix() {
  auto p = load("two_clause.p");
  const auto t0 = std::chrono::steady_clock::now();
  auto r = run(p, Mode::Matrix);
  const double secs = seconds_since(t0);
  if (r.verdict != Verdict::Theorem || !r.proof) return {false, "no proof: " + r.reason};
  const auto& sp = r.proof->subproofs.at(0);
  const auto pos = std::count_if(sp.copies.begin(), sp.copies.end(),
                                 [](const auto& c) { return c.clause == "pos"; });
  const auto neg = std::count_if(sp.copies.begin(), sp.copies.end(),
                                 [](const auto& c) { return c.clause == "neg"; });
  const bool accepted = static_cast<bool>(check_proof(*r.proof, p));
  char buf[160];
  std::snprintf(buf, sizeof buf, "%ld positive, %ld negative copies, %zu connections, %s, %.3fs",
                static_cast<long>(pos), static_cast<long>(neg), sp.connections.size(),
                accepted ? "accepted" : "rejected", secs);
  return {pos == 1 && neg == 2 && sp.connections.size() == 4 && accepted && secs < 1.0, buf};
}

// Seeded unfinished matrix: the open path, its blocking clause, and the
// spanning model found afterwards.
Outcome open_path_block() {
  auto p = load("two_clause.p");
  const std::uint32_t neg = 0, pos = 1;
  UnificationTheory t(p);
  t.register_connect(sat::Var{1}, {neg, 0, 0}, {pos, 0, 4});
  t.register_connect(sat::Var{2}, {neg, 1, 0}, {pos, 0, 4});
  t.register_connect(sat::Var{3}, {neg, 0, 2}, {pos, 0, 4});
  t.register_connect(sat::Var{4}, {neg, 1, 2}, {pos, 1, 4});
  for (std::uint32_t v = 1; v <= 4; ++v)
    if (t.assert_atom(sat::Var{v}, true)) return {false, "seeded connections conflict"};
  auto path = spanning_check(t, {{pos, 1, 4, {}}, {neg, 1, 0, {}}, {neg, 2, 2, {}}});
  if (!path || *path != std::vector<std::uint32_t>({1, 1, 0}))
    return {false, "spanning_check did not return {p(f(z1)), ~p(f(y1)), ~p(x2)}"};

  EncoderConfig config;
  config.mode = EncoderConfig::Mode::Depth;
  config.depth = 3;
  config.refinements.instance_symmetry = false;
  MatrixEncoder enc(p, config);
  const CopyKey n1{neg, 1}, n2{neg, 2}, p1{pos, 1};
  std::vector<sat::Var> forced{*enc.connection(n1, 0, p1, 0), *enc.connection(n1, 1, p1, 0),
                               *enc.connection(n2, 0, p1, 0), *enc.connection(n2, 1, p1, 1)};
  std::vector<sat::Lit> selectors{sat::pos(enc.selector(neg, 1)), sat::pos(enc.selector(neg, 2)),
                                  sat::pos(enc.selector(pos, 1))};
  auto assumptions = selectors;
  for (auto [a, la] : {std::pair{n1, 0u}, {n1, 1u}, {n2, 0u}, {n2, 1u}})
    for (std::uint32_t lb : {0u, 1u})
      if (auto v = enc.connection(a, la, p1, lb)) {
        const bool on = std::find(forced.begin(), forced.end(), *v) != forced.end();
        assumptions.push_back(on ? sat::pos(*v) : sat::neg(*v));
      }
  enc.solve(assumptions);
  if (enc.path_blocks().size() != 1) return {false, "the seeded model was not blocked once"};
  std::set<std::pair<CopyKey, std::uint32_t>> blocked;
  for (const auto& s : enc.path_blocks()[0].path) blocked.emplace(s.copy, s.literal);
  if (blocked != std::set<std::pair<CopyKey, std::uint32_t>>{{p1, 1}, {n1, 1}, {n2, 0}})
    return {false, "blocked path differs from the open path"};
  auto again = enc.solve(selectors);
  if (!sat::is_sat(again) || !enc.proof()) return {false, "re-solve found no model"};
  const bool spans = connections_span(p, enc.proof()->copies, enc.proof()->connections);
  return {spans, spans ? "open path blocked, re-solve spans" : "re-solve model does not span"};
}

// Chain: fair growth proves it; growing only d never does.
Outcome fairness() {
  auto p = load("chain.p");
  auto fair = run(p, Mode::Core);
  CoreOptions unfair;
  unfair.policy = CoreOptions::Policy::OnlyClause;
  unfair.only_clause = 1;
  unfair.limits.max_iterations = 10;
  unfair.limits.deadline = std::chrono::steady_clock::now() + std::chrono::seconds(60);
  auto r = prove_with_cores(p, unfair);
  const bool ok = fair.verdict == Verdict::Theorem && r.status != SearchResult::Status::Proof &&
                  r.stats.iterations >= 10;
  return {ok, "fair: " + std::string(verdict_name(fair.verdict)) + ", unfair: " +
                  std::to_string(r.stats.iterations) + " iterations, " +
                  (r.status == SearchResult::Status::Proof ? "proof" : "no proof")};
}

// Instance symmetry on: the proof still uses c, e and f.
Outcome instance_symmetry() {
  auto p = load("instance_chain.p");
  Refinements on;
  on.instance_symmetry = true;
  auto r = run(p, Mode::Core, 10, on);
  if (!r.proof) return {false, "no proof: " + r.reason};
  std::set<std::string> used;
  for (const auto& c : r.proof->subproofs.at(0).copies) used.insert(c.clause);
  const bool accepted = static_cast<bool>(check_proof(*r.proof, p));
  std::string names;
  for (const auto& n : used) names += n + " ";
  return {used == std::set<std::string>{"c", "e", "f"} && accepted,
          "clauses " + names + (accepted ? "accepted" : "rejected")};
}

// Splitting: sub-proofs cover both components; the q(a) branch connects into c2.
Outcome splitting() {
  auto p = load("split.p");
  auto r = prove_avatar(p, AvatarOptions{});
  if (r.status != SearchResult::Status::Proof) return {false, "no proof: " + r.reason};
  bool p_side = false, q_side = false;
  for (const auto& m : r.subproofs)
    for (const auto& c : m.connections)
      for (auto [x, lx, y] : {std::tuple{c.copy_a, c.lit_a, c.copy_b}, {c.copy_b, c.lit_b, c.copy_a}}) {
        if (m.copies[x].clause != 1) continue;
        if (lx == 0) p_side = true;
        if (lx == 1 && m.copies[y].clause == 2) q_side = true;
      }
  auto doc = run(p, Mode::Avatar);
  const bool accepted = doc.proof && check_proof(*doc.proof, p);
  return {p_side && q_side && accepted,
          std::to_string(r.subproofs.size()) + " sub-proofs, ~p(a) branch " +
              (p_side ? "closed" : "open") + ", q(a) branch " + (q_side ? "closed" : "open") +
              (accepted ? ", accepted" : ", rejected")};
}

// EPR non-theorems decided within 10 s each.
Outcome epr_decision() {
  const auto profile = *generator_profile("epr");
  int tested = 0, decided = 0;
  double worst = 0;
  for (std::uint64_t seed = 0; tested < 50 && seed < 10000; ++seed) {
    auto p = generate_random_problem(seed, profile);
    if (herbrand_unsat(p) != false) continue;
    ++tested;
    const auto t0 = std::chrono::steady_clock::now();
    auto r = run(p, Mode::Core, 10);
    const double secs = seconds_since(t0);
    worst = std::max(worst, secs);
    if (r.verdict == Verdict::NonTheorem && secs < 10) ++decided;
  }
  char buf[120];
  std::snprintf(buf, sizeof buf, "%d/%d NonTheorem, slowest %.3fs", decided, tested, worst);
  return {tested == 50 && decided == 50, buf};
}

// Core-mode verdicts against the ground Herbrand oracle.
Outcome differential() {
  int agree = 0, theorems = 0, total = 0;
  std::string first;
  std::uint64_t seed = 0;
  for (const auto& p : generated()) {
    ++total;
    const auto oracle = herbrand_unsat(p);
    auto r = run(p, Mode::Core, 10);
    const bool expected = oracle.value_or(false);
    theorems += expected;
    const bool same = oracle && (expected ? r.verdict == Verdict::Theorem
                                          : r.verdict == Verdict::NonTheorem);
    // Every oracle theorem of small size is also found by the matrix enumeration.
    if (same && expected && r.proof && !check_proof(*r.proof, p)) {
      if (first.empty()) first = " (seed " + std::to_string(seed) + ": proof rejected)";
    } else if (same) {
      ++agree;
    } else if (first.empty()) {
      first = " (first disagreement: seed " + std::to_string(seed) + ")";
    }
    ++seed;
  }
  return {agree == total, std::to_string(total - agree) + " disagreements over " +
                              std::to_string(total) + " problems, " + std::to_string(theorems) +
                              " theorems" + first};
}

// Refinement toggles never change a verdict; all three together cut conflicts.
Outcome refinement_stability() {
  const auto problems = corpus();
  int changed = 0, theorems = 0, reduced = 0;
  std::uint64_t on_total = 0, off_total = 0;
  for (const auto& p : problems) {
    Refinements all_on, all_off;
    all_off.copy_order = all_off.substitution_order = all_off.instance_symmetry = false;
    auto base = run(p, Mode::Core, 10, all_on);
    auto off = run(p, Mode::Core, 10, all_off);
    changed += off.verdict != base.verdict;
    for (int which = 0; which < 3; ++which) {
      Refinements r;
      (which == 0 ? r.copy_order : which == 1 ? r.substitution_order : r.instance_symmetry) = false;
      changed += run(p, Mode::Core, 10, r).verdict != base.verdict;
    }
    if (base.verdict == Verdict::Theorem) {
      ++theorems;
      reduced += base.stats.conflicts < off.stats.conflicts;
      on_total += base.stats.conflicts;
      off_total += off.stats.conflicts;
    }
  }
  const double share = theorems ? static_cast<double>(reduced) / theorems : 0;
  char buf[200];
  std::snprintf(buf, sizeof buf,
                "%d verdict changes; fewer conflicts on %d/%d theorems (%.0f%%), total %llu vs %llu",
                changed, reduced, theorems, 100 * share,
                static_cast<unsigned long long>(on_total),
                static_cast<unsigned long long>(off_total));
  return {changed == 0 && share >= 0.6, buf};
}

// Encoder size bounds on every recorded run.
Outcome size_bounds() {
  int runs = 0, violations = 0;
  for (const auto& p : corpus()) {
    const std::uint64_t c = p.size(), l = p.total_literals();
    for (Mode m : {Mode::Matrix, Mode::Core}) {
      auto r = run(p, m, 2);
      for (const auto& rec : r.stats.runs) {
        ++runs;
        const std::uint64_t d = rec.depth;
        if (rec.selectors > d * c || rec.connections > (d * l) * (d * l)) ++violations;
      }
    }
  }
  return {violations == 0 && runs > 0,
          std::to_string(violations) + " violations over " + std::to_string(runs) + " runs"};
}

// Every corrupted proof document is rejected.
Outcome mutation_suite() {
  struct Sample {
    Problem problem;
    ProofDocument doc;
  };
  std::vector<Sample> samples;
  for (const auto& p : corpus())
    for (Mode m : {Mode::Tableau, Mode::Matrix, Mode::Core, Mode::Avatar}) {
      auto r = run(p, m, 2);
      if (r.proof) samples.push_back({p, *r.proof});
    }
  std::mt19937_64 rng(2024);
  std::string detail;
  bool ok = !samples.empty();
  for (auto m : corrupt::all_mutations()) {
    int applied = 0, rejected = 0;
    for (const auto& s : samples)
      if (auto bad = corrupt::mutate(s.doc, s.problem, m, rng)) {
        ++applied;
        rejected += !check_proof(*bad, s.problem);
      }
    ok = ok && applied > 0 && rejected == applied;
    detail += std::string(corrupt::mutation_name(m)) + " " + std::to_string(rejected) + "/" +
              std::to_string(applied) + " ";
  }
  return {ok, detail + "rejected"};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<std::size_t> expected_failures;
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--expect-fail") expected_failures.insert(std::stoul(argv[++i]));

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"two-clause matrix proof", two_clause_matrix},
      {"open path blocking", open_path_block},
      {"fair multiplicity growth", fairness},
      {"instance symmetry keeps the c-e-f proof", instance_symmetry},
      {"splitting covers both components", splitting},
      {"EPR non-theorems decided", epr_decision},
      {"differential against the Herbrand oracle", differential},
      {"refinement stability", refinement_stability},
      {"encoding size bounds", size_bounds},
      {"checker mutation suite", mutation_suite},
  };
  int unexpected = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const bool known = expected_failures.count(i + 1) != 0;
    unexpected += o.pass == known;
    std::printf("criterion %zu: %s - %s: %s%s [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str(),
                known ? (o.pass ? " (expected to fail)" : " (known failure)") : "",
                seconds_since(t0));
    std::fflush(stdout);
  }
  return unexpected;
}
