#include <benchmark/benchmark.h>

#include "cglwaves/elliptic.hpp"
#include "cglwaves/laurent.hpp"
#include "cglwaves/solution.hpp"
#include "cglwaves/subequation.hpp"
#include "cglwaves/verify.hpp"

using namespace cglwaves;

namespace {

void BM_PeriodsFromInvariants(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(periods_from_invariants(cplx(-72.0), cplx(76.0)));
}
BENCHMARK(BM_PeriodsFromInvariants);

void BM_EvalWp(benchmark::State& state) {
  EllipticInvariants inv = periods_from_invariants(cplx(-72.0), cplx(76.0));
  cplx z(0.31, 0.17);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_wp(inv, z));
    z += cplx(1e-3, 0.0);
  }
}
BENCHMARK(BM_EvalWp);

void BM_EvalSigma(benchmark::State& state) {
  EllipticInvariants inv = periods_from_invariants(cplx(-72.0), cplx(76.0));
  for (auto _ : state) benchmark::DoNotOptimize(eval_sigma(inv, cplx(0.31, 0.17)));
}
BENCHMARK(BM_EvalSigma);

void BM_StatePoint(benchmark::State& state) {
  EllipticSolution sol(make_slice(1.0, 1.0, 2.0));
  for (auto _ : state) benchmark::DoNotOptimize(state_point(sol, cplx(0.2, 0.4)));
}
BENCHMARK(BM_StatePoint);

// Arguments: number of terms, working digits.
void BM_PoleFamily(benchmark::State& state) {
  MpParams p = make_slice(1.0, 1.0, 2.0).mp_params();
  CglParams d = p.to_double();
  LeadingBehavior lead = leading_orders(d, Equation::CGL5).front();
  int terms = static_cast<int>(state.range(0));
  unsigned digits = static_cast<unsigned>(state.range(1));
  for (auto _ : state) benchmark::DoNotOptimize(expand_pole_family(p, lead, terms, digits));
}
BENCHMARK(BM_PoleFamily)->Args({32, 60})->Args({64, 60})->Args({100, 80})->Unit(benchmark::kMillisecond);

void BM_FitSubequation(benchmark::State& state) {
  MpParams p = make_slice(1.0, 1.0, 2.0).mp_params();
  int m = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(fit_subequation(p, Equation::CGL5, m, 60));
}
BENCHMARK(BM_FitSubequation)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

void BM_VerifySlice(benchmark::State& state) {
  EllipticSliceParams slice = make_slice(1.0, 1.0, 2.0);
  for (auto _ : state) benchmark::DoNotOptimize(verify_slice(slice, 100, 7));
}
BENCHMARK(BM_VerifySlice)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
