#include <benchmark/benchmark.h>

#include "levtrap/recoil.hpp"
#include "levtrap/thermal.hpp"

using namespace levtrap;

namespace {

AngularSpectrum beam(BeamFamily f) {
  BeamSpec b;
  b.family = f;
  return focus(b);
}

MieTable sphere(double kR) { return mie_coefficients(SizeParameter::from_kR(kR, 1550e-9), silicon().refractive_index); }

}  // namespace

static void BM_MieCoefficients(benchmark::State& state) {
  const double x = state.range(0) / 10.0;
  for (auto _ : state) benchmark::DoNotOptimize(mie_coefficients(SizeParameter::from_kR(x, 1550e-9), cplx(3.48, 1e-3)));
}
BENCHMARK(BM_MieCoefficients)->Arg(5)->Arg(20)->Arg(100)->Arg(200);

static void BM_Focus(benchmark::State& state) {
  BeamSpec b;
  b.family = BeamFamily::radial;
  for (auto _ : state) benchmark::DoNotOptimize(focus(b));
}
BENCHMARK(BM_Focus)->Unit(benchmark::kMillisecond);

static void BM_FocalField(benchmark::State& state) {
  const AngularSpectrum s = beam(BeamFamily::gaussian_linear_x);
  for (auto _ : state) benchmark::DoNotOptimize(focal_field(s, {0.2e-6, 0.1e-6, 0.3e-6}));
}
BENCHMARK(BM_FocalField);

static void BM_Force(benchmark::State& state) {
  const ForceEngine eng(beam(BeamFamily::azimuthal), sphere(state.range(0) / 100.0));
  for (auto _ : state) benchmark::DoNotOptimize(eng.force({0.05e-6, 0.0, -0.4e-6}));
}
BENCHMARK(BM_Force)->Arg(10)->Arg(136)->Arg(220)->Unit(benchmark::kMicrosecond);

static void BM_TrapReport(benchmark::State& state) {
  const AngularSpectrum s = beam(BeamFamily::radial);
  const MieTable t = sphere(0.6);
  for (auto _ : state) benchmark::DoNotOptimize(trap_report(s, t, silicon(), {}));
}
BENCHMARK(BM_TrapReport)->Unit(benchmark::kMillisecond);

static void BM_MieRecoil(benchmark::State& state) {
  const AngularSpectrum s = beam(BeamFamily::radial);
  const MieTable t = sphere(0.6);
  const double mass = mass_of(t.x.radius, 2200.0);
  for (auto _ : state) benchmark::DoNotOptimize(mie_recoil(s, t, {0, 0, 0.1e-6}, mass, {1e5, 1e5, 1e5}));
}
BENCHMARK(BM_MieRecoil)->Unit(benchmark::kMillisecond);

static void BM_BlackbodyExchange(benchmark::State& state) {
  const NkTable nk = load_nk(resolve_data_path(silicon().nk_table_path));
  for (auto _ : state) benchmark::DoNotOptimize(BlackbodyExchange(nk, 200e-9));
}
BENCHMARK(BM_BlackbodyExchange)->Unit(benchmark::kMillisecond);

static void BM_SolveTemperature(benchmark::State& state) {
  const NkTable nk = load_nk(resolve_data_path(silicon().nk_table_path));
  const BlackbodyExchange bb(nk, 200e-9);
  for (auto _ : state) benchmark::DoNotOptimize(solve_temperature(1e-9, bb));
}
BENCHMARK(BM_SolveTemperature)->Unit(benchmark::kMicrosecond);
BENCHMARK_MAIN();
