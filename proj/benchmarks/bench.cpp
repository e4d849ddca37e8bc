#include <benchmark/benchmark.h>

#include "openbook/dirichlet.hpp"
#include "openbook/excess.hpp"
#include "openbook/lab.hpp"

using namespace obl;

static void BM_SampleOpenBook(benchmark::State& state) {
  const OpenBook book = OpenBook::planar(2, 1, {0.0, 2.0}, {1, 1});
  for (auto _ : state) benchmark::DoNotOptimize(sample_open_book(book, 1.0, static_cast<int>(state.range(0)), 1));
}
BENCHMARK(BM_SampleOpenBook)->Arg(2000)->Arg(20000);

static void BM_Wasserstein2(benchmark::State& state) {
  const OpenBook a = OpenBook::planar(2, 1, {0.0, 2.0}, {1, 1});
  const OpenBook b = OpenBook::planar(2, 1, {0.1, 2.1}, {1, 1});
  const int n = static_cast<int>(state.range(0));
  const DiscreteCurrent ta = sample_open_book(a, 1.0, n, 1);
  const DiscreteCurrent tb = sample_open_book(b, 1.0, n, 2);
  DiscreteMeasure mb = tb.measure;
  const double scale = ta.measure.total_mass() / mb.total_mass();
  for (auto& w : mb.weights) w *= scale;
  for (auto _ : state) benchmark::DoNotOptimize(wasserstein2(ta.measure, mb).cost);
}
BENCHMARK(BM_Wasserstein2)->Arg(100)->Arg(400)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_StrongExcess(benchmark::State& state) {
  const GraphFixture f = harmonic_graph_fixture(1, 0.05);
  const DiscreteCurrent t = sample_graph_over_book(f.book, f.sheets, 1.0, static_cast<int>(state.range(0)), 3);
  ConeSampling cs;
  cs.noise_floor = false;
  const Vec p(3, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(strong_excess(t, f.book, p, 1.0, BumpFunction{1.0}, cs).value);
}
BENCHMARK(BM_StrongExcess)->Arg(300)->Arg(900)->Unit(benchmark::kMillisecond);

static void BM_SolveDirichlet(benchmark::State& state) {
  auto grid = std::make_shared<const HalfBallGrid>(2, 1.0 / static_cast<double>(state.range(0)));
  const BoundaryData data = [](CSpan x, MSpan o) { o[0] = std::sin(3 * std::atan2(x[1], x[0])); };
  for (auto _ : state) benchmark::DoNotOptimize(solve_dirichlet(grid, {data}, {1}, 1).values.size());
}
BENCHMARK(BM_SolveDirichlet)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Frequency(benchmark::State& state) {
  auto grid = std::make_shared<const HalfBallGrid>(2, 1.0 / 64);
  const QFunction u = branch_fixture(grid);
  const Vec c{0.0, 0.0};
  for (auto _ : state) benchmark::DoNotOptimize(frequency(u, c, {0.25, 0.5, 0.75, 1.0}).frequency);
}
BENCHMARK(BM_Frequency)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
