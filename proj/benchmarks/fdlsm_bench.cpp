#include <benchmark/benchmark.h>

#include <cmath>
#include <memory>
#include <random>
#include <vector>

#include "fdlsm/ansatz.hpp"
#include "fdlsm/market_models.hpp"
#include "fdlsm/pde1d.hpp"
#include "fdlsm/pricer.hpp"
#include "fdlsm/regression.hpp"
#include "fdlsm/spline.hpp"

using namespace fdlsm;

namespace {

BlackScholesModel basket(std::size_t d) {
  BlackScholesModel m;
  m.rate = 0.0396;
  m.vols.assign(d, 0.3);
  m.dividends.assign(d, 0.0);
  m.correlation = 0.5;
  return m;
}

const TimeGrid kGrid = TimeGrid::make(5.0, 1.0 / 12.0, 1.0 / 52.0);

}  // namespace

static void BM_GeneratePaths(benchmark::State& state) {
  const auto m = basket(static_cast<std::size_t>(state.range(0)));
  const std::size_t n = 1u << 12;
  for (auto _ : state) benchmark::DoNotOptimize(generate_paths(m, kGrid, n, Stage::Pricing, {0, n}));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * n));
}
BENCHMARK(BM_GeneratePaths)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond);

static void BM_PdeBermudanPut(benchmark::State& state) {
  const auto spec = product_pde_spec(
      BermudanSpec{OptionType::Put, 1.0}, 0.0396, [](double, double) { return 0.3; },
      [](double, double) { return 0.0; }, kGrid);
  PdeGridOptions o;
  o.nodes = static_cast<std::size_t>(state.range(0));
  const auto grid = PdeGrid::make(spec, o);
  for (auto _ : state) benchmark::DoNotOptimize(solve_backward(spec, grid).value_at(1.0));
}
BENCHMARK(BM_PdeBermudanPut)->Arg(201)->Arg(401)->Arg(801)->Unit(benchmark::kMillisecond);

static void BM_RegressionFit(benchmark::State& state) {
  const std::size_t n = 1u << 13;
  std::mt19937_64 rng(7);
  std::lognormal_distribution<double> ln(0.0, 0.3);
  std::vector<double> x(n), f(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = ln(rng);
    f[i] = std::max(1.0 - x[i], 0.0);
    y[i] = f[i] + 0.01 * (ln(rng) - 1.0);
  }
  const BasisSet basis{state.range(1) ? Scheme::FDLSM : Scheme::LSM, static_cast<int>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(fit(basis, RegressionData{x, {}, f}, y, 1));
}
BENCHMARK(BM_RegressionFit)->Args({4, 0})->Args({4, 1})->Args({11, 0})->Unit(benchmark::kMicrosecond);

static void BM_SplineEvaluate(benchmark::State& state) {
  std::vector<double> kx, ky;
  for (int i = 0; i < 401; ++i) {
    kx.push_back(std::exp(-2.0 + 0.01 * i));
    ky.push_back(std::max(1.0 - kx.back(), 0.0));
  }
  const CubicSpline s(kx, ky);
  double x = 0.5, acc = 0.0;
  for (auto _ : state) {
    acc += s(x);
    x = x > 2.0 ? 0.5 : x + 0.001;
  }
  benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_SplineEvaluate);

static void BM_FdLsmPolicyAndPrice(benchmark::State& state) {
  const auto m = basket(4);
  const Product p = BermudanSpec{OptionType::Put, 1.0};
  const std::size_t nr = 1u << 12, np = 1u << 13;
  const StreamLayout layout{0, np};
  const PathSet pricing = generate_paths(m, kGrid, np, Stage::Pricing, layout);
  const PathSet regression = generate_paths(m, kGrid, nr, Stage::Regression, layout);
  auto ansatz = std::make_shared<const AnsatzSet>(build_ansatz(m, p, kGrid));
  ObservedPaths obs_r = observe(p, m, kGrid, regression), obs_p = observe(p, m, kGrid, pricing);
  attach_ansatz(obs_r, *ansatz);
  attach_ansatz(obs_p, *ansatz);
  for (auto _ : state) {
    const auto policy = regress_policy(p, m.rate, obs_r, BasisSet{Scheme::FDLSM, 4}, ansatz);
    benchmark::DoNotOptimize(price(p, m.rate, obs_p, policy).pv);
  }
}
BENCHMARK(BM_FdLsmPolicyAndPrice)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
