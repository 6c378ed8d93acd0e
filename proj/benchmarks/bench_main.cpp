#include <benchmark/benchmark.h>

#include "irsmec/compute_alloc.hpp"
#include "irsmec/conic.hpp"
#include "irsmec/mud.hpp"
#include "irsmec/orchestrator.hpp"
#include "irsmec/reflect.hpp"

namespace {

using namespace irsmec;

void BM_ConicSoc(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  conic::ConicProblem p(n);
  p.set_objective(-Eigen::VectorXd::LinSpaced(n, 1.0, 2.0));
  p.add_soc({Eigen::MatrixXd::Identity(n, n), Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 1.0});
  for (auto _ : state) benchmark::DoNotOptimize(conic::solve(p));
}
BENCHMARK(BM_ConicSoc)->Arg(8)->Arg(40);

void BM_ConicSdp(benchmark::State& state) {
  const int m = static_cast<int>(state.range(0));
  // max sum of off-diagonals of a unit-diagonal PSD matrix, written as one LMI per entry pair.
  const int nv = m * (m - 1) / 2;
  conic::ConicProblem p(nv);
  p.set_objective(-Eigen::VectorXd::Ones(nv));
  conic::LmiConstraint lmi;
  lmi.constant = Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Eigen::MatrixXd f = Eigen::MatrixXd::Zero(m, m);
      f(i, j) = f(j, i) = 1.0;
      lmi.coefficients.push_back(f);
    }
  }
  p.add_lmi(lmi);
  for (auto _ : state) benchmark::DoNotOptimize(conic::solve(p));
}
BENCHMARK(BM_ConicSdp)->Arg(4)->Arg(8);

void BM_Allocate(benchmark::State& state) {
  ScenarioConfig cfg = default_scenario();
  const std::vector<double> rates{8e5, 2e6};
  for (auto _ : state) benchmark::DoNotOptimize(allocate(rates, cfg));
}
BENCHMARK(BM_Allocate);

void BM_OptimizeMud(benchmark::State& state) {
  const ScenarioConfig cfg = default_scenario();
  const ChannelSet ch = synthesize(cfg, 1);
  const PhaseVector theta = PhaseVector::zeros(cfg.reflect_dim());
  const MudMatrix w = mrc_detectors(effective_channels(ch, theta));
  const ComputePlan plan = allocate(rates(w, ch, theta, cfg), cfg);
  for (auto _ : state) benchmark::DoNotOptimize(optimize_mud(ch, theta, plan, cfg));
}
BENCHMARK(BM_OptimizeMud)->Unit(benchmark::kMillisecond);

void BM_RunBcd(benchmark::State& state) {
  const ScenarioConfig cfg = default_scenario();
  const ChannelSet ch = synthesize(cfg, 1);
  const auto scheme = static_cast<ReflectScheme>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_bcd(ch, cfg, scheme));
  state.SetLabel(to_string(scheme));
}
BENCHMARK(BM_RunBcd)
    ->Arg(static_cast<int>(ReflectScheme::None))
    ->Arg(static_cast<int>(ReflectScheme::Sca))
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
