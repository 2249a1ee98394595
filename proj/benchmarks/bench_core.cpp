// Microbenchmarks for the hot paths of a reconstruction iteration: the
// difference stencils, the projector pair, the objective gradient and one
// full solution-operator step.

#include <benchmark/benchmark.h>

#include <map>

#include "petrec/grid_ops.hpp"
#include "petrec/objective.hpp"
#include "petrec/simulator.hpp"
#include "petrec/solvers.hpp"

using namespace petrec;

namespace {

struct BenchCase {
  AcquisitionResult acq;
  Image init;
  Vec p;
};

// One simulated scan per grid size, shared across benchmarks so setup cost
// is paid once per process.
const BenchCase& case_for(int side) {
  static std::map<int, BenchCase> cache;
  auto it = cache.find(side);
  if (it == cache.end()) {
    const ScanGeometry geom =
        side == 64 ? ScanGeometry::desk_scale() : ScanGeometry::scaled_to(side);
    PhantomSpec spec = PhantomSpec::desk_spheres();
    spec.radii_px = {2.0, 3.0, 4.0};
    NoiseProtocol noise;
    noise.total_counts = 6.8e6 * (side / 256.0) * (side / 256.0);
    noise.scatter_fraction = 0.25;
    noise.random_fraction = 0.25;
    noise.seed = 97;
    BenchCase c;
    c.acq = simulate_acquisition(make_uniform_phantom(spec, side), geom, noise, 6.59, 0.096);
    c.init = initial_image(c.acq.g, c.acq.gamma, c.acq.attenuation, geom);
    c.p = Vec::Constant(c.init.v.size(), 1e-4);
    it = cache.emplace(side, std::move(c)).first;
  }
  return it->second;
}

ReconProblem problem_for(const BenchCase& c) {
  return ReconProblem{PoissonData(*c.acq.system, c.acq.g, c.acq.gamma),
                      RegWeights{0.2, 0.05}, SmoothingParams{1e-3}};
}

void bm_first_diff(benchmark::State& state) {
  const Image img = case_for(static_cast<int>(state.range(0))).init;
  for (auto _ : state) benchmark::DoNotOptimize(apply_first_diff(img));
  state.SetItemsProcessed(state.iterations() * img.d());
}

void bm_second_diff(benchmark::State& state) {
  const Image img = case_for(static_cast<int>(state.range(0))).init;
  for (auto _ : state) benchmark::DoNotOptimize(apply_second_diff(img));
  state.SetItemsProcessed(state.iterations() * img.d());
}

void bm_first_diff_adjoint(benchmark::State& state) {
  const Image img = case_for(static_cast<int>(state.range(0))).init;
  const FirstOrderField u = apply_first_diff(img);
  for (auto _ : state) benchmark::DoNotOptimize(apply_first_diff_adjoint(u));
  state.SetItemsProcessed(state.iterations() * img.d());
}

void bm_project_forward(benchmark::State& state) {
  const BenchCase& c = case_for(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(c.acq.system->apply(c.init.v));
}

void bm_project_adjoint(benchmark::State& state) {
  const BenchCase& c = case_for(static_cast<int>(state.range(0)));
  const Vec y = c.acq.system->apply(c.init.v);
  for (auto _ : state) benchmark::DoNotOptimize(c.acq.system->apply_adjoint(y));
}

void bm_objective_grad(benchmark::State& state) {
  const BenchCase& c = case_for(static_cast<int>(state.range(0)));
  const ReconProblem prob = problem_for(c);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        objective_grad(c.init, prob.data, prob.weights, prob.smoothing));
}

void bm_solution_operator(benchmark::State& state) {
  const BenchCase& c = case_for(static_cast<int>(state.range(0)));
  const ReconProblem prob = problem_for(c);
  for (auto _ : state) benchmark::DoNotOptimize(t_operator(c.init, c.p, prob));
}

void bm_group_shrinkage(benchmark::State& state) {
  const Image img = case_for(static_cast<int>(state.range(0))).init;
  const FirstOrderField u = apply_first_diff(img);
  for (auto _ : state) benchmark::DoNotOptimize(prox_group_l2(u, 0.5));
  state.SetItemsProcessed(state.iterations() * img.d());
}

}  // namespace

BENCHMARK(bm_first_diff)->Arg(64)->Arg(128);
BENCHMARK(bm_second_diff)->Arg(64)->Arg(128);
BENCHMARK(bm_first_diff_adjoint)->Arg(64)->Arg(128);
BENCHMARK(bm_project_forward)->Arg(64)->Arg(128);
BENCHMARK(bm_project_adjoint)->Arg(64)->Arg(128);
BENCHMARK(bm_objective_grad)->Arg(64)->Arg(128);
BENCHMARK(bm_solution_operator)->Arg(64)->Arg(128);
BENCHMARK(bm_group_shrinkage)->Arg(64)->Arg(128);

BENCHMARK_MAIN();
