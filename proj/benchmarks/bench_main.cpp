#include <benchmark/benchmark.h>

#include <random>

#include "mcdt/bayes.hpp"
#include "mcdt/critical_values.hpp"
#include "mcdt/gaussian.hpp"
#include "mcdt/procedures.hpp"
#include "mcdt/risk.hpp"

using namespace mcdt;

static void BM_SampleOneFactor(benchmark::State& state) {
  const IntraclassCov cov(static_cast<std::size_t>(state.range(0)), 1.0, 0.5);
  const std::vector<double> mu(cov.k(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_mvn(cov, mu, 100'000, 1, 1));
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_SampleOneFactor)->Arg(2)->Arg(5)->Arg(10);

static void BM_SampleCholesky(benchmark::State& state) {
  const IntraclassCov cov(static_cast<std::size_t>(state.range(0)), 1.0, -0.05);
  const std::vector<double> mu(cov.k(), 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(sample_mvn(cov, mu, 100'000, 1, 1));
  state.SetItemsProcessed(state.iterations() * 100'000);
}
BENCHMARK(BM_SampleCholesky)->Arg(2)->Arg(5)->Arg(10);

static void BM_Decide(benchmark::State& state) {
  const auto kind = static_cast<ProcedureKind>(state.range(0));
  const auto c = make_critical_values({1.6449, 1.9545, 2.1212, 2.2340, 2.3187}, Provenance::StepDown);
  const auto proc = make_procedure(kind, c);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> n(1.5, 1.0);
  std::vector<std::vector<double>> zs(4096, std::vector<double>(5));
  for (auto& z : zs)
    for (auto& x : z) x = n(rng);
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(proc(zs[i++ & 4095]));
}
BENCHMARK(BM_Decide)
    ->Arg(static_cast<int>(ProcedureKind::SingleStep))
    ->Arg(static_cast<int>(ProcedureKind::StepDown))
    ->Arg(static_cast<int>(ProcedureKind::StepUp));

static void BM_StepDownConstants(benchmark::State& state) {
  ProblemSpec s;
  s.k = 5;
  s.rho = 0.5;
  SolverOptions o;
  o.mc.reps = static_cast<std::size_t>(state.range(0));
  o.mc.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(step_down_constants(s, o));
}
BENCHMARK(BM_StepDownConstants)->Arg(100'000)->Unit(benchmark::kMillisecond);

static void BM_OriginRiskTable(benchmark::State& state) {
  ProblemSpec s;
  s.k = 5;
  const auto c = make_critical_values({1.6449, 1.9545, 2.1212, 2.2340, 2.3187}, Provenance::StepDown);
  const auto proc = make_procedure(ProcedureKind::StepDown, c);
  McConfig mc;
  mc.reps = 100'000;
  mc.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(origin_risk_table(proc, s, mc));
}
BENCHMARK(BM_OriginRiskTable)->Unit(benchmark::kMillisecond);

static void BM_LimitNumerators(benchmark::State& state) {
  const auto k = static_cast<std::size_t>(state.range(0));
  std::vector<double> vals;
  for (std::size_t j = 0; j < k; ++j) vals.push_back(1.6 + 0.15 * static_cast<double>(j));
  PriorSequenceSpec seq;
  seq.n = 4;
  seq.c = make_critical_values(vals, Provenance::StepDown);
  std::vector<double> z(k, 2.0);
  for (std::size_t j = 0; j < k; ++j) z[j] += 0.1 * static_cast<double>(j);
  for (auto _ : state) benchmark::DoNotOptimize(stepdown_limit_log_numerators(z, seq));
}
BENCHMARK(BM_LimitNumerators)->Arg(3)->Arg(5)->Arg(8);

BENCHMARK_MAIN();
