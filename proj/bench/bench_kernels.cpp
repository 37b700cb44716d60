// Serial reference drivers versus their OpenMP counterparts.
#include <benchmark/benchmark.h>

#include "aprfm/assemble.hpp"
#include "aprfm/reference.hpp"
#include "oracles.hpp"

using namespace aprfm;

namespace {

struct Ex4Setup {
  problems::ProblemSpec spec = problems::catalog(problems::ProblemId::ex4, 1e-3);
  oracle::Models models = oracle::make_models(spec, 32, 32, {1, 1}, 1);
  quadrature::AngularRule rule = quadrature::angular_rule(2, 16);
  collocation::CollocationSet colloc = collocation::make_collocation(spec, {24, 24}, 32);
};

const Ex4Setup& setup() {
  static const Ex4Setup s;
  return s;
}

void BM_AssembleAprfm(benchmark::State& state) {
  const auto& s = setup();
  assemble::AssemblyOptions opt;
  opt.execution = state.range(0) == 0 ? Execution::serial : Execution::parallel;
  for (auto _ : state) {
    auto sys = assemble::assemble_aprfm(s.spec, s.models.rho, s.models.g, s.colloc, s.rule, opt);
    benchmark::DoNotOptimize(sys.A.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.colloc.n_interior()));
}

void BM_EvaluateF(benchmark::State& state) {
  const auto& s = setup();
  Eigen::VectorXd c = Eigen::VectorXd::Ones(
      static_cast<Eigen::Index>(s.models.rho.num_columns() + s.models.g.num_columns()));
  const reference::Approximation approx{&s.spec, &s.models.rho, &s.models.g, c};
  const auto grid = collocation::evaluation_grid(s.spec, {32, 32}, 32);
  const auto exec = state.range(0) == 0 ? Execution::serial : Execution::parallel;
  for (auto _ : state) {
    auto f = reference::evaluate_f(approx, grid, exec);
    benchmark::DoNotOptimize(f.values.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.size()));
}

}  // namespace

BENCHMARK(BM_AssembleAprfm)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_EvaluateF)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
