#include <benchmark/benchmark.h>

#include "robin/assembly.hpp"
#include "robin/certify.hpp"
#include "robin/forward.hpp"
#include "robin/reconstruct.hpp"

using namespace robin;

namespace {

struct Setup {
  Geometry geometry;
  Mesh mesh;
  AssembledSystem sys;
};

const Setup& setup(int n, int m, int refinement) {
  static Setup s = [&] {
    Setup out;
    GeometryConfig c;
    c.n = n;
    c.m = m;
    out.geometry = build_geometry(c);
    out.mesh = generate_mesh(out.geometry, refinement);
    out.sys = assemble(out.mesh, out.geometry);
    return out;
  }();
  return s;
}

Exec policy(const benchmark::State& state) { return state.range(0) ? Exec::parallel : Exec::serial; }

void BM_Assemble(benchmark::State& state) {
  const Setup& s = setup(20, 30, 2);
  for (auto _ : state) benchmark::DoNotOptimize(assemble(s.mesh, s.geometry, Conductivity{}, policy(state)));
}

void BM_MultiRhsSolve(benchmark::State& state) {
  const Setup& s = setup(20, 30, 2);
  const SpdFactor f(system_matrix(s.sys, Vector::Constant(20, 2.0)));
  for (auto _ : state) benchmark::DoNotOptimize(f.solve(s.sys.P, policy(state)));
}

void BM_ProbeTable(benchmark::State& state) {
  const Setup& s = setup(20, 30, 2);
  for (auto _ : state) benchmark::DoNotOptimize(criterion_lambda(s.sys, 1.0, 3.0, 1.0, policy(state)));
}

void BM_AdmissibleGrid(benchmark::State& state) {
  static const AssembledSystem sys = [] {
    GeometryConfig c;
    const Geometry g = build_geometry(c);
    return assemble(generate_mesh(g, 2), g);
  }();
  const Matrix target = measure(sys, Vector::Constant(2, 2.0));
  for (auto _ : state) benchmark::DoNotOptimize(admissible_set_sample(sys, target, 0.0, 1.0, 3.0, 21, policy(state)));
}

}  // namespace

// Argument 0 runs the serial reference, 1 the OpenMP kernel.
BENCHMARK(BM_Assemble)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultiRhsSolve)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ProbeTable)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AdmissibleGrid)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
