#include <benchmark/benchmark.h>

#include "dwkb/asymptotics.hpp"
#include "dwkb/harness.hpp"
#include "dwkb/specfun.hpp"

namespace {

std::shared_ptr<const dwkb::SpectralProblem> reference_problem() {
  static auto problem = std::make_shared<dwkb::SpectralProblem>(
      dwkb::compile_potential("1/z + 0.3*z"), dwkb::Complex(0.0), dwkb::Strip{0.35, 0.35});
  return problem;
}

void BM_GammaComplex(benchmark::State& state) {
  dwkb::Complex z(3.7, 2.1);
  for (auto _ : state) benchmark::DoNotOptimize(dwkb::specfun::gamma(z));
}
BENCHMARK(BM_GammaComplex);

void BM_MomentumValue(benchmark::State& state) {
  auto problem = reference_problem();
  auto branch = dwkb::MomentumBranch::at(problem, dwkb::Complex(-0.25, 0.0));
  dwkb::Complex z(0.1, 0.12);
  for (auto _ : state) {
    auto b = dwkb::MomentumBranch::at(problem, dwkb::Complex(-0.25, 0.0));
    benchmark::DoNotOptimize(b.value(z));
  }
  benchmark::DoNotOptimize(branch.value(z));
}
BENCHMARK(BM_MomentumValue);

void BM_RegularizedAction(benchmark::State& state) {
  auto problem = reference_problem();
  auto branch = dwkb::MomentumBranch::at(problem, dwkb::Complex(-0.25, 0.0));
  dwkb::Complex z(0.1, 0.12);
  for (auto _ : state)
    benchmark::DoNotOptimize(dwkb::regularized_action(branch, z));
}
BENCHMARK(BM_RegularizedAction);

void BM_PropagateLine(benchmark::State& state) {
  auto problem = reference_problem();
  dwkb::AsymptoticModel model(problem, 0.005);
  dwkb::Complex z(0.2, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(model.psi_recursion(z).value.log_abs());
}
BENCHMARK(BM_PropagateLine);

void BM_PsiUniform(benchmark::State& state) {
  auto problem = reference_problem();
  dwkb::AsymptoticModel model(problem, 0.005);
  dwkb::Complex z(0.2, 0.1);
  for (auto _ : state) benchmark::DoNotOptimize(model.psi_uniform(z).log_abs());
}
BENCHMARK(BM_PsiUniform);

}  // namespace

BENCHMARK_MAIN();
