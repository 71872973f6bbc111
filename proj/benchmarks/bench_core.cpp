#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "subtv/experiments.hpp"
#include "subtv/mittag_leffler.hpp"

namespace {

using namespace subtv;

double sin2pi(double t) { return std::sin(2.0 * M_PI * t); }

void BM_AssembleStiffness2D(benchmark::State& state) {
  const Mesh mesh = build_unit_square_mesh(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(assemble_stiffness(mesh));
  }
}
BENCHMARK(BM_AssembleStiffness2D)->Arg(20)->Arg(40)->Arg(80);

void BM_DirectSolve1D(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Mesh mesh = build_interval_mesh(n);
  const ForwardOperator op(mesh, TimeGrid(1.0, n), 0.5, sin2pi);
  NodalField f(mesh.node_count());
  for (Index i = 0; i < mesh.node_count(); ++i) f[i] = std::sin(M_PI * mesh.nodes[i][0]);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.forward_final(f));
  }
}
BENCHMARK(BM_DirectSolve1D)->Arg(40)->Arg(160)->Arg(640);

void BM_DirectSolve2D(benchmark::State& state) {
  const Mesh mesh = build_unit_square_mesh(static_cast<int>(state.range(0)));
  const ForwardOperator op(mesh, TimeGrid(1.0, 50), 0.9, [](double) { return 1.0; });
  const NodalField f = source_preset("example4", mesh);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.forward_final(f));
  }
}
BENCHMARK(BM_DirectSolve2D)->Arg(20)->Arg(40);

void BM_AdjointFinal2D(benchmark::State& state) {
  const Mesh mesh = build_unit_square_mesh(static_cast<int>(state.range(0)));
  const ForwardOperator op(mesh, TimeGrid(1.0, 50), 0.9, [](double) { return 1.0; });
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  NodalField r(mesh.node_count());
  for (Index i = 0; i < mesh.node_count(); ++i) r[i] = unit(rng);
  for (auto _ : state) {
    benchmark::DoNotOptimize(op.adjoint_final(r));
  }
}
BENCHMARK(BM_AdjointFinal2D)->Arg(20)->Arg(40);

void BM_MittagLefflerSeries(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(mittag_leffler(0.9, 0.9, -3.0));
  }
}
BENCHMARK(BM_MittagLefflerSeries);

void BM_MittagLefflerIntegral(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(mittag_leffler(0.9, 1.9, -40.0));
  }
}
BENCHMARK(BM_MittagLefflerIntegral);

void BM_PdIterate1D(benchmark::State& state) {
  const Mesh mesh = build_interval_mesh(40);
  const ForwardOperator op(mesh, TimeGrid(1.0, 50), 0.9, sin2pi);
  const NodalField truth = source_preset("example1", mesh);
  const auto [g_delta, delta] = add_noise(op.mass(), op.forward_final(truth), 0.005, 1);
  PDParams params;
  params.beta = 1e-8;
  params.gamma = 1e-8;
  params.delta = delta;
  params.force = true;
  PDState pd = make_initial_state(op, params, NodalField::Zero(mesh.node_count()),
                                  ElementVectorField::Constant(mesh.element_count(), 2, 0.5),
                                  g_delta);
  for (auto _ : state) {
    pd_iterate(pd, params, op, g_delta);
    benchmark::DoNotOptimize(pd.f_curr);
  }
}
BENCHMARK(BM_PdIterate1D);

}  // namespace

BENCHMARK_MAIN();
