#include <CLI11.hpp>

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "conmat/matrix.hpp"
#include "conmat/oracle.hpp"
#include "conmat/problem.hpp"
#include "conmat/proof.hpp"
#include "conmat/prover.hpp"

namespace {

constexpr int kInputError = 3;

struct ProveArgs {
  std::string file;
  std::string mode = "core";
  std::string start = "ladder";
  std::uint32_t max_depth = 12;
  std::optional<double> timeout;
  std::string proof_out;
  std::string dimacs_out;
  bool stats = false;
  bool no_copy_order = false;
  bool no_subst_order = false;
  bool no_instance_sym = false;
  bool avatar = false;
  std::string epr_caps = "auto";
};

int run_prove(const ProveArgs& args) {
  const auto mode = args.avatar ? std::optional(conmat::Mode::Avatar) : conmat::parse_mode(args.mode);
  const auto start = conmat::parse_start_policy(args.start);
  if (!mode || !start) {
    std::cerr << "error: unknown " << (!mode ? "mode " + args.mode : "start policy " + args.start)
              << '\n';
    return kInputError;
  }
  conmat::Problem problem;
  try {
    problem = conmat::parse_problem_file(args.file, *start);
  } catch (const conmat::ParseError& e) {
    std::cerr << args.file << ':' << e.line << ':' << e.column << ": " << e.what() << '\n';
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }

  conmat::ProverConfig config;
  config.mode = *mode;
  config.start = *start;
  config.max_depth = args.max_depth;
  config.timeout_seconds = args.timeout;
  config.refinements.copy_order = !args.no_copy_order;
  config.refinements.substitution_order = !args.no_subst_order;
  config.refinements.instance_symmetry = !args.no_instance_sym;
  config.refinements.epr_caps = args.epr_caps == "auto";

  if (!args.dimacs_out.empty()) {
    // Static part of the depth-mode encoding; lazily generated clauses are not included.
    conmat::EncoderConfig ec;
    ec.mode = conmat::EncoderConfig::Mode::Depth;
    ec.depth = args.max_depth;
    ec.refinements = config.refinements;
    conmat::MatrixEncoder encoder(problem, ec);
    std::ofstream out(args.dimacs_out);
    if (!out) {
      std::cerr << "error: cannot write " << args.dimacs_out << '\n';
      return kInputError;
    }
    encoder.solver().write_dimacs(out);
  }

  const auto result = conmat::prove(problem, config);
  std::cout << "% SZS status "
            << (result.verdict == conmat::Verdict::Theorem      ? "Unsatisfiable"
                : result.verdict == conmat::Verdict::NonTheorem ? "Satisfiable"
                                                                : "GaveUp")
            << '\n';
  std::cout << "verdict: " << conmat::verdict_name(result.verdict);
  if (!result.reason.empty()) std::cout << " (" << result.reason << ')';
  std::cout << '\n';

  if (result.proof) {
    const auto text = conmat::print_document(*result.proof);
    if (args.proof_out.empty() || args.proof_out == "-") {
      std::cout << text;
    } else {
      std::ofstream out(args.proof_out);
      if (!out) {
        std::cerr << "error: cannot write " << args.proof_out << '\n';
        return kInputError;
      }
      out << text;
    }
  }

  if (args.stats) {
    const auto& s = result.stats;
    std::cout << "stats: solves=" << s.solves << " conflicts=" << s.conflicts
              << " decisions=" << s.decisions << " models=" << s.models
              << " theory_conflicts=" << s.theory_conflicts
              << " open_path_blocks=" << s.open_path_blocks
              << " symmetry_blocks=" << s.symmetry_blocks << " iterations=" << s.iterations
              << " cores=" << s.cores << " seconds=" << result.seconds << '\n';
    if (!result.multiplicities.empty()) {
      std::cout << "multiplicities:";
      for (std::uint32_t c = 0; c < result.multiplicities.size(); ++c)
        std::cout << ' ' << problem.clause(c).name << '=' << result.multiplicities[c];
      std::cout << '\n';
    }
  }
  return conmat::exit_code(result.verdict);
}

int run_check(const std::string& proof_path, const std::string& file) {
  conmat::Problem problem;
  conmat::ProofDocument doc;
  try {
    problem = conmat::parse_problem_file(file);
    doc = conmat::parse_document_file(proof_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  if (auto policy = conmat::parse_start_policy(doc.start); policy && *policy != conmat::StartPolicy::Ladder) {
    try {
      problem = conmat::parse_problem_file(file, *policy);
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return kInputError;
    }
  }
  const auto result = conmat::check_proof(doc, problem);
  if (result) {
    std::cout << "accepted\n";
    return 0;
  }
  std::cout << "rejected: " << result.reason << '\n';
  return 1;
}

int run_oracle(const std::string& file, std::uint32_t d_max) {
  conmat::Problem problem;
  try {
    problem = conmat::parse_problem_file(file);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  const auto r = conmat::oracle_prove(problem, d_max);
  if (r.theorem) {
    std::cout << "theorem: spanning matrix with " << r.size << " copies:";
    for (std::uint32_t c = 0; c < r.counts.size(); ++c)
      if (r.counts[c]) std::cout << ' ' << problem.clause(c).name << 'x' << r.counts[c];
    std::cout << '\n';
  } else {
    std::cout << "no spanning matrix with at most " << d_max << " copies (" << r.matrices
              << " tried)\n";
  }
  const auto h = conmat::herbrand_unsat(problem);
  if (h) std::cout << "herbrand: " << (*h ? "unsatisfiable" : "satisfiable") << '\n';
  if (r.theorem) return 0;
  return h && !*h ? 1 : 2;
}

int run_gen(std::uint64_t seed, const std::string& profile_name) {
  const auto profile = conmat::generator_profile(profile_name);
  if (!profile) {
    std::cerr << "error: unknown profile " << profile_name << '\n';
    return kInputError;
  }
  std::cout << conmat::to_tptp(conmat::generate_random_problem(seed, *profile));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Connection-method theorem prover over SAT"};
  app.require_subcommand(1);

  ProveArgs prove_args;
  auto* prove = app.add_subcommand("prove", "Search for a proof of a TPTP CNF problem");
  prove->add_option("file", prove_args.file, "Problem file")->required();
  prove->add_option("--mode", prove_args.mode, "tableau|matrix|core|avatar")
      ->check(CLI::IsMember({"tableau", "matrix", "core", "avatar"}));
  prove->add_option("--start", prove_args.start, "ladder|declared|positive|all");
  prove->add_option("--max-depth", prove_args.max_depth, "Depth limit for tableau and matrix modes");
  prove->add_option("--timeout", prove_args.timeout, "Wall-clock limit in seconds");
  prove->add_option("--proof-out", prove_args.proof_out, "Write the proof document here (- for stdout)");
  prove->add_option("--dimacs", prove_args.dimacs_out,
                    "Write the static depth-mode clauses at --max-depth in DIMACS form");
  prove->add_flag("--stats", prove_args.stats, "Print search statistics");
  prove->add_flag("--no-copy-order", prove_args.no_copy_order,
                  "Allow copies of a clause to be selected in any order");
  prove->add_flag("--no-subst-order", prove_args.no_subst_order,
                  "Disable substitution ordering constraints");
  prove->add_flag("--no-instance-sym", prove_args.no_instance_sym,
                  "Disable instance symmetry blocking");
  prove->add_flag("--avatar", prove_args.avatar, "Same as --mode avatar");
  prove->add_option("--epr-caps", prove_args.epr_caps, "auto|off")
      ->check(CLI::IsMember({"auto", "off"}));

  std::string proof_path, check_file;
  auto* check = app.add_subcommand("check", "Verify a proof document against a problem");
  check->add_option("proof", proof_path, "Proof document")->required();
  check->add_option("file", check_file, "Problem file")->required();

  std::string oracle_file;
  std::uint32_t d_max = 4;
  auto* oracle = app.add_subcommand("oracle", "Exhaustive reference search (small problems only)");
  oracle->add_option("file", oracle_file, "Problem file")->required();
  oracle->add_option("--d-max", d_max, "Largest matrix size to enumerate");

  std::uint64_t seed = 0;
  std::string profile = "epr";
  auto* gen = app.add_subcommand("gen", "Print a random problem");
  gen->add_option("--seed", seed, "Generator seed");
  gen->add_option("--profile", profile, "epr|epr-medium|fo");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kInputError;
  }

  try {
    if (*prove) return run_prove(prove_args);
    if (*check) return run_check(proof_path, check_file);
    if (*oracle) return run_oracle(oracle_file, d_max);
    if (*gen) return run_gen(seed, profile);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kInputError;
  }
  return kInputError;
}
