// Serial reference kernels against their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include <random>

#include "dynkin/closedform.hpp"
#include "dynkin/montecarlo.hpp"
#include "dynkin/solver.hpp"

using namespace dynkin;

namespace {

struct DriverData {
  std::vector<double> l, u, v, out;
  explicit DriverData(std::size_t n) : l(n), u(n), v(n), out(n) {
    std::mt19937_64 gen(7);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
      l[i] = U(gen);
      u[i] = U(gen);
      v[i] = U(gen);
    }
  }
};

template <bool Parallel>
void BM_Driver(benchmark::State& state) {
  DriverData d(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if (Parallel)
      driverParallel(ConstraintMode::Independent, 1.0, d.l, d.u, d.v, d.out);
    else
      driverSerial(ConstraintMode::Independent, 1.0, d.l, d.u, d.v, d.out);
    benchmark::DoNotOptimize(d.out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_Simulate(benchmark::State& state) {
  const auto sol = closedform::buildSolution(1.0, 1.0, 9.0);
  const GameSpec game = closedform::exampleGame(sol, ConstraintMode::Common);
  const mc::HittingStrategy sup{mc::Player::Sup, IntervalUnion({{-1.0, 1.0}})};
  const mc::HittingStrategy inf{
      mc::Player::Inf,
      IntervalUnion({{-sol.xStar, -1.0, true, false}, {1.0, sol.xStar, false, true}})};
  const auto n = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) {
    const auto est = Parallel ? mc::simulateGame(game, 0.0, sup, inf, n, 20.0, 1)
                              : mc::simulateGameSerial(game, 0.0, sup, inf, n, 20.0, 1);
    benchmark::DoNotOptimize(est.mean);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_Driver<false>)->Arg(16001)->Arg(160001);
BENCHMARK(BM_Driver<true>)->Arg(16001)->Arg(160001);
BENCHMARK(BM_Simulate<false>)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Simulate<true>)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
