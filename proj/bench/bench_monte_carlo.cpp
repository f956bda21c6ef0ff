// Serial reference vs OpenMP kernel on the replicate loops the tools run.

#include <benchmark/benchmark.h>

#include "crwvar/hf_forecast.hpp"
#include "crwvar/parallel.hpp"
#include "crwvar/simulate.hpp"

namespace {

using namespace crwvar;

template <Exec E>
void BM_CrwTerminal(benchmark::State& state) {
  const SignChainParams params(0.75);
  const auto steps = static_cast<std::size_t>(state.range(0));
  constexpr std::size_t reps = 2000;
  for (auto _ : state) {
    auto out = map_replicates(reps, [&](std::size_t k) { return crw_terminal(params, steps, RngStream(1, k)); }, E);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * reps * steps));
}

template <Exec E>
void BM_RenewalForecast(benchmark::State& state) {
  std::vector<JointDraw> draws;
  RngStream g(2, 0);
  for (int i = 0; i < 2000; ++i) draws.push_back({1e-4 * g.exponential(1.0), g.exponential(30.0)});
  std::array<std::vector<JointDraw>, 4> buckets{draws, draws, draws, draws};
  const ConditionalEmpirical model(std::move(buckets));
  ForecastOptions opts;
  opts.exec = E;
  const auto sims = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) {
    auto inc = forecast_increments(model, SignChainParams(0.3), 1, 300.0, sims, RngStream(3, 0), opts);
    benchmark::DoNotOptimize(inc.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * sims));
}

}  // namespace

BENCHMARK(BM_CrwTerminal<Exec::serial>)->Arg(200)->Arg(10'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_CrwTerminal<Exec::parallel>)->Arg(200)->Arg(10'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenewalForecast<Exec::serial>)->Arg(10'000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RenewalForecast<Exec::parallel>)->Arg(10'000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
