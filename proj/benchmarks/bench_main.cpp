#include <benchmark/benchmark.h>

#include <random>

#include "fadforge/campaigns.hpp"
#include "fadforge/fad.hpp"
#include "fadforge/material.hpp"
#include "fadforge/meshgen.hpp"

using namespace fadforge;

namespace {

MaterialParams bench_material() {
  MaterialParams p;
  p.E = 200000.0;
  p.nu = 0.3;
  p.sigma_y0 = 800.0;
  p.n = 0.1;
  p.Gc = 40.0;
  p.ell = 0.6;
  return p;
}

void BM_StressUpdateElastic(benchmark::State& state) {
  const auto p = bench_material();
  PointState st;
  SymTensor2 eps{5e-4, 1e-3, 0.0, 3e-4};
  for (auto _ : state) benchmark::DoNotOptimize(stress_update(eps, st, p));
}
BENCHMARK(BM_StressUpdateElastic);

void BM_StressUpdateReturnMapping(benchmark::State& state) {
  const auto p = bench_material();
  PointState st;
  st.phi = 0.2;
  SymTensor2 eps{2e-3, 8e-3, 0.0, 3e-3};
  for (auto _ : state) benchmark::DoNotOptimize(stress_update(eps, st, p));
}
BENCHMARK(BM_StressUpdateReturnMapping);

void BM_FalOption1(benchmark::State& state) {
  double lr = 0.0;
  for (auto _ : state) {
    lr += 1e-6;
    benchmark::DoNotOptimize(fal_option1(lr, 200000.0, 800.0));
  }
}
BENCHMARK(BM_FalOption1);

void BM_SafetyFactor(benchmark::State& state) {
  const auto fal = build_fal(FalOption::opt1, 200000.0, 800.0, 1.2);
  for (auto _ : state)
    benchmark::DoNotOptimize(safety_factor({0.4, 0.3, "", 0.0}, fal));
}
BENCHMARK(BM_SafetyFactor);

void BM_Homogeneous1D(benchmark::State& state) {
  auto p = bench_material();
  p.ell = length_scale_for_ductility(1.5, p);
  for (auto _ : state) benchmark::DoNotOptimize(homogeneous_1d_response(p));
}
BENCHMARK(BM_Homogeneous1D);

void BM_SentAssembly(benchmark::State& state) {
  auto p = bench_material();
  p.ell = length_scale_for_ductility(1.5, p);
  SentRefinement r;
  r.h_fine = p.ell / 4.0;
  Mesh mesh = generate_sent_mesh(5.0, 50.0, 1.5, r);
  SolverConfig cfg;
  Simulation sim(mesh, p, cfg);
  sim.add_dirichlet(mesh.nset("bottom"), 1, 0.0);
  sim.add_dirichlet(mesh.nset("bottom"), 0, 0.0);
  sim.add_dirichlet(mesh.nset("top"), 1, 0.02, true);
  sim.add_dirichlet(mesh.nset("top"), 0, 0.0);
  for (auto _ : state) benchmark::DoNotOptimize(sim.solve_displacement(0.2));
  state.SetItemsProcessed(state.iterations() * mesh.n_elems());
}
BENCHMARK(BM_SentAssembly)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
