#include <benchmark/benchmark.h>

#include "codesign/clusterer.hpp"
#include "codesign/util.hpp"

namespace {

using namespace codesign;

std::vector<std::vector<double>> random_points(std::size_t m) {
  const SeededRng rng(5);
  std::vector<std::vector<double>> points;
  points.reserve(m);
  for (std::size_t i = 0; i < m; ++i)
    points.push_back({120.0 * rng.symmetric(3 * i), 60.0 * rng.uniform(3 * i + 1),
                      90.0 * rng.uniform(3 * i + 2)});
  return points;
}

void BM_KMedoids(benchmark::State& state) {
  const auto points = random_points(static_cast<std::size_t>(state.range(0)));
  const auto k = static_cast<std::size_t>(state.range(1));
  for (auto _ : state) {
    auto assignment = kmedoids(points, k, 7);
    benchmark::DoNotOptimize(assignment.total);
  }
}

}  // namespace

// m = 574 x k = 50 mirrors the week-per-year scale this pipeline clusters at.
BENCHMARK(BM_KMedoids)->Args({128, 8})->Args({574, 50})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
