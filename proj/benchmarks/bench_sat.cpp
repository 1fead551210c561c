#include <benchmark/benchmark.h>

#include "conmat/sat.hpp"

using namespace conmat;

namespace {

// n+1 pigeons in n holes.
void BM_Pigeonhole(benchmark::State& state) {
  const auto holes = static_cast<std::uint32_t>(state.range(0));
  const std::uint32_t pigeons = holes + 1;
  for (auto _ : state) {
    sat::Solver s;
    std::vector<std::vector<sat::Var>> x(pigeons, std::vector<sat::Var>(holes));
    for (auto& row : x)
      for (auto& v : row) v = s.new_var();
    for (auto& row : x) {
      sat::ClauseLits c;
      for (auto v : row) c.push_back(sat::pos(v));
      s.add_clause(std::move(c));
    }
    for (std::uint32_t h = 0; h < holes; ++h)
      for (std::uint32_t i = 0; i < pigeons; ++i)
        for (std::uint32_t j = i + 1; j < pigeons; ++j)
          s.add_clause({sat::neg(x[i][h]), sat::neg(x[j][h])});
    auto r = s.solve();
    if (!sat::is_unsat(r)) state.SkipWithError("pigeonhole reported satisfiable");
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_Pigeonhole)->DenseRange(4, 7)->Unit(benchmark::kMillisecond);

void BM_CardinalityExactly(benchmark::State& state) {
  const auto n = static_cast<std::uint32_t>(state.range(0));
  for (auto _ : state) {
    sat::Solver s;
    std::vector<sat::Var> vars;
    for (std::uint32_t i = 0; i < n; ++i) vars.push_back(s.new_var());
    sat::cardinality_exactly(s, vars, n / 2);
    auto r = s.solve();
    benchmark::DoNotOptimize(r);
  }
}
BENCHMARK(BM_CardinalityExactly)->RangeMultiplier(2)->Range(8, 128);

}  // namespace
