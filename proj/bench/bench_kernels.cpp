// Serial reference kernels against their OpenMP versions.

#include <benchmark/benchmark.h>

#include <algorithm>
#include <vector>

#include "ucrl/envs.hpp"
#include "ucrl/plan_sweep.hpp"

using namespace ucrl;
using namespace ucrl::plan;

namespace {

struct Fixture {
  BoundsTable bounds;
  std::vector<double> u;
  std::vector<State> order;
  std::vector<char> support;
  std::vector<double> q;

  explicit Fixture(std::size_t S) {
    envs::GarnetSpec g;
    g.n_states = S;
    g.n_actions = 4;
    g.seed = 1;
    bounds = BoundsTable::exact(envs::garnet_model(g), BoundsForm::kIntervals);
    for (auto& c : bounds.trans) c = {std::max(0.0, c.lo - 0.01), std::min(1.0, c.hi + 0.03)};
    Rng rng(2);
    u.resize(S);
    for (double& v : u) v = 10.0 * uniform01(rng);
    const double lo = *std::min_element(u.begin(), u.end());
    for (double& v : u) v -= lo;
    order.resize(S);
    kernel::sort_desc(u, order);
    support.assign(S * 4 * S, 1);
    q.resize(S * 4);
  }

  kernel::SweepInput input(kernel::Backup b) const { return {&bounds, u, order, b, support}; }
};

template <bool Parallel>
void BM_Sweep(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)));
  const auto in = fx.input(kernel::Backup::kIntervals);
  for (auto _ : state) {
    if constexpr (Parallel)
      kernel::sweep_parallel(in, fx.q);
    else
      kernel::sweep_serial(in, fx.q);
    benchmark::DoNotOptimize(fx.q.data());
  }
}

template <bool Parallel>
void BM_RefreshSupports(benchmark::State& state) {
  Fixture fx(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel)
      kernel::refresh_supports_parallel(fx.bounds, fx.u, fx.order, 0.01, false, fx.support);
    else
      kernel::refresh_supports_serial(fx.bounds, fx.u, fx.order, 0.01, false, fx.support);
    benchmark::DoNotOptimize(fx.support.data());
  }
}

template <Exec E>
void BM_HittingTimes(benchmark::State& state) {
  const auto m = envs::riverswim_model(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(all_hitting_times(m, E));
}

}  // namespace

BENCHMARK(BM_Sweep<false>)->Arg(50)->Arg(200)->Arg(500);
BENCHMARK(BM_Sweep<true>)->Arg(50)->Arg(200)->Arg(500);
BENCHMARK(BM_RefreshSupports<false>)->Arg(50)->Arg(200);
BENCHMARK(BM_RefreshSupports<true>)->Arg(50)->Arg(200);
BENCHMARK(BM_HittingTimes<Exec::kSerial>)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HittingTimes<Exec::kParallel>)->Arg(20)->Arg(40)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
