#include <benchmark/benchmark.h>

#include <cmath>

#include "relfrac/angular.hpp"
#include "relfrac/diagnostics.hpp"
#include "relfrac/extension.hpp"
#include "relfrac/halfdisk.hpp"
#include "relfrac/specfun.hpp"
#include "relfrac/spectral_field.hpp"

using namespace relfrac;

namespace {

SpectralField gaussian(int n) {
  return SpectralField::from_function(1, 40.0, n, [](const double* x) { return std::exp(-x[0] * x[0]); });
}

void BM_apply_symbol(benchmark::State& st) {
  const SpectralField u = gaussian(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(apply_symbol(u, 0.5, 1.0));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_apply_symbol)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

void BM_apply_kernel_pv(benchmark::State& st) {
  const SpectralField u = gaussian(static_cast<int>(st.range(0)));
  const double cutoff = default_pv_cutoff(u);
  for (auto _ : st) benchmark::DoNotOptimize(apply_kernel_pv(u, 0.5, 1.0, cutoff));
  st.SetComplexityN(st.range(0));
}
BENCHMARK(BM_apply_kernel_pv)->RangeMultiplier(2)->Range(128, 512)->Unit(benchmark::kMillisecond)->Complexity();

void BM_bessel_k(benchmark::State& st) {
  double r = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(bessel_k(0.75, r));
    r = r < 20.0 ? r * 1.01 : 0.1;
  }
}
BENCHMARK(BM_bessel_k);

void BM_angular_ground_state(benchmark::State& st) {
  Params p;
  p.N = 1;
  p.s = 0.25;
  p.potential = PotentialSpec::two_point(0.1, 0.1);
  const SolveOptions opt{static_cast<int>(st.range(0)), true};
  for (auto _ : st) benchmark::DoNotOptimize(mu1(p, opt).mu1);
}
BENCHMARK(BM_angular_ground_state)->RangeMultiplier(2)->Range(512, 4096)->Unit(benchmark::kMillisecond);

void BM_halfdisk_solve(benchmark::State& st) {
  Params p;
  p.N = 1;
  p.s = 0.25;
  p.potential = PotentialSpec::two_point(0.1, 0.1);
  const int n = static_cast<int>(st.range(0));
  const PolarGrid g = make_polar_grid(p.s, 0.0, 1.0, 1e-3, n, n);
  BoundaryData bc;
  bc.outer = [](double) { return 1.0; };
  bc.inner.data = [](double) { return 0.0; };
  for (auto _ : st) benchmark::DoNotOptimize(solve_halfdisk(p, g, bc).residual_norm);
}
BENCHMARK(BM_halfdisk_solve)->Arg(128)->Arg(256)->Unit(benchmark::kMillisecond);

void BM_separable_trace(benchmark::State& st) {
  Params p;
  p.N = 1;
  p.s = 0.5;
  p.m = 1.0;
  const SeparableSolution w = make_separable(mu1(p).eigenpair, SeparableSolution::Radial::modified_bessel, 1.0, 1.0);
  std::vector<double> r;
  for (int i = 0; i < 31; ++i) r.push_back(1e-3 * std::pow(1e3, i / 30.0));
  for (auto _ : st) benchmark::DoNotOptimize(frequency_trace(w, p, r).gamma_fit);
}
BENCHMARK(BM_separable_trace)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
