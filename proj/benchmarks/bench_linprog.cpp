#include <benchmark/benchmark.h>

#include "codesign/linprog.hpp"
#include "codesign/util.hpp"

namespace {

// Chain-structured LP shaped like a discretised optimal-control problem:
// stage variables coupled by equality rows, boxed inputs, linear stage cost.
codesign::LpProblem chain_lp(int stages) {
  using codesign::kLpInf;
  codesign::LpProblem lp;
  const codesign::SeededRng rng(17);
  std::vector<int> state(stages + 1);
  std::vector<int> input(stages);
  for (int k = 0; k <= stages; ++k) state[k] = lp.add_variable(0.0, 10.0, 0.0);
  for (int k = 0; k < stages; ++k)
    input[k] = lp.add_variable(0.0, 2.0, 0.05 + 0.3 * rng.uniform(k));
  lp.var_lo[state[0]] = lp.var_up[state[0]] = 5.0;
  for (int k = 0; k < stages; ++k) {
    lp.add_row({state[k + 1], state[k], input[k]}, {1.0, -0.97, -0.5}, 0.0, 0.0);
    lp.add_row({input[k], state[k]}, {1.0, 0.05}, -kLpInf, 2.2);
  }
  lp.var_lo[state[stages]] = 6.0;
  return lp;
}

void BM_SolveChainLp(benchmark::State& state) {
  const auto lp = chain_lp(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto sol = codesign::solve_lp(lp);
    benchmark::DoNotOptimize(sol.objective);
  }
}

void BM_SolveChainLpWarm(benchmark::State& state) {
  const auto lp = chain_lp(static_cast<int>(state.range(0)));
  codesign::LpWarmStart warm;
  codesign::solve_lp(lp, codesign::kLpFeasTol, &warm);
  for (auto _ : state) {
    auto sol = codesign::solve_lp(lp, codesign::kLpFeasTol, &warm);
    benchmark::DoNotOptimize(sol.objective);
  }
}

}  // namespace

BENCHMARK(BM_SolveChainLp)->Arg(24)->Arg(96)->Arg(288);
BENCHMARK(BM_SolveChainLpWarm)->Arg(96)->Arg(288);

BENCHMARK_MAIN();
