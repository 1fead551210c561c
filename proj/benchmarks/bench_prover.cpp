#include <benchmark/benchmark.h>

#include <string>

#include "conmat/matrix.hpp"
#include "conmat/oracle.hpp"
#include "conmat/prover.hpp"

using namespace conmat;

namespace {

const std::string kData = CONMAT_BENCH_DATA;
const char* const kFiles[] = {"unit.p", "two_clause.p", "chain.p",
                              "split.p", "distinct_constants.p", "instance_chain.p"};

void BM_Prove(benchmark::State& state, Mode mode) {
  const std::string file = kFiles[state.range(0)];
  auto problem = parse_problem_file(kData + "/" + file);
  ProverConfig cfg;
  cfg.mode = mode;
  cfg.timeout_seconds = 10;
  state.SetLabel(file);
  for (auto _ : state) {
    auto r = prove(problem, cfg);
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK_CAPTURE(BM_Prove, tableau, Mode::Tableau)->DenseRange(0, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Prove, matrix, Mode::Matrix)->DenseRange(0, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Prove, core, Mode::Core)->DenseRange(0, 5)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Prove, avatar, Mode::Avatar)->DenseRange(0, 5)->Unit(benchmark::kMicrosecond);

// Static depth-mode encoding of two_clause.p followed by one solve.
void BM_EncodeDepth(benchmark::State& state) {
  auto problem = parse_problem_file(kData + "/two_clause.p");
  EncoderConfig cfg;
  cfg.mode = EncoderConfig::Mode::Depth;
  cfg.depth = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    MatrixEncoder enc(problem, cfg);
    auto r = enc.solve();
    benchmark::DoNotOptimize(r);
    state.counters["selectors"] = static_cast<double>(enc.num_selectors());
    state.counters["connections"] = static_cast<double>(enc.num_connections());
  }
}
BENCHMARK(BM_EncodeDepth)->DenseRange(1, 6)->Unit(benchmark::kMicrosecond);

void BM_CoreRandomEpr(benchmark::State& state) {
  auto profile = *generator_profile("epr");
  std::vector<Problem> problems;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    problems.push_back(generate_random_problem(seed, profile));
  ProverConfig cfg;
  cfg.timeout_seconds = 5;
  for (auto _ : state)
    for (const auto& p : problems) {
      auto r = prove(p, cfg);
      benchmark::DoNotOptimize(r);
    }
}
BENCHMARK(BM_CoreRandomEpr)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
