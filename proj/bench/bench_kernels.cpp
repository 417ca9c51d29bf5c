#include <benchmark/benchmark.h>

#include <random>

#include "ipbt/io.hpp"
#include "ipbt/lp.hpp"
#include "ipbt/rsw.hpp"

namespace {

using namespace ipbt;

detail::Tableau random_tableau(int rows, int cols) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<int> num(-9, 9), den(1, 7);
  detail::Tableau t;
  t.rows = rows;
  t.cols = cols;
  t.a.resize(static_cast<std::size_t>(rows + 1) * (cols + 1));
  for (auto& v : t.a) v = Rational(num(rng), den(rng));
  t.at(0, 0) = Rational(3, 2);
  return t;
}

template <void (*Pivot)(detail::Tableau&, int, int)>
void BM_Pivot(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto base = random_tableau(n, 2 * n);
  for (auto _ : state) {
    state.PauseTiming();
    auto t = base;
    state.ResumeTiming();
    Pivot(t, 0, 0);
    benchmark::DoNotOptimize(t.a.data());
  }
  state.SetItemsProcessed(state.iterations() * (n + 1) * (2 * n + 1));
}

BENCHMARK(BM_Pivot<detail::pivot_serial>)->Name("pivot_serial")->Arg(50)->Arg(200)->Arg(400);
BENCHMARK(BM_Pivot<detail::pivot_parallel>)->Name("pivot_parallel")->Arg(50)->Arg(200)->Arg(400);

void BM_RswExample3(benchmark::State& state) {
  const auto env = io::load_environment(std::string(IPBT_DATA_DIR) + "/example3.json");
  RswOptions options;
  options.lp.kernel = state.range(0) ? PivotKernel::Parallel : PivotKernel::Serial;
  for (auto _ : state) benchmark::DoNotOptimize(solve_rsw(env, options).objective);
}

BENCHMARK(BM_RswExample3)->Name("rsw_example3")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
