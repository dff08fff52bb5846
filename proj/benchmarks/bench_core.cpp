#include <benchmark/benchmark.h>

#include "mts/analysis.hpp"

using namespace mts;

#ifndef MTS_DATA_DIR
#define MTS_DATA_DIR "."
#endif

namespace {

SurfaceDef sphere() {
  return parse_surface_file(std::string(MTS_DATA_DIR) + "/sphere.surf");
}

void EvalJet(benchmark::State& state) {
  const SurfaceDef s = sphere();
  const int degree = static_cast<int>(state.range(0));
  double u = 0.3;
  for (auto _ : state) {
    auto f = eval_jet(s, u, 0.4, degree);
    benchmark::DoNotOptimize(f.x.value());
    u += 1e-6;
  }
}
BENCHMARK(EvalJet)->Arg(1)->Arg(2)->Arg(4);

void FirstFundamental(benchmark::State& state) {
  const SurfaceDef s = sphere();
  double u = 0.3;
  for (auto _ : state) {
    MetricJet m = first_fundamental(s, u, 0.4, 2);
    benchmark::DoNotOptimize(m.lambda.value());
    u += 1e-6;
  }
}
BENCHMARK(FirstFundamental);

void TraceLocus(benchmark::State& state) {
  const SurfaceDef s = sphere();
  TraceOptions opt;
  opt.h = s.diag() / static_cast<double>(state.range(0));
  for (auto _ : state) {
    LocusCurve c = trace_locus(s, {0.0, M_PI / 4}, opt);
    benchmark::DoNotOptimize(c.samples.size());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(TraceLocus)->Arg(128)->Arg(256)->Arg(512)->Complexity();

void InvariantSamplePoint(benchmark::State& state) {
  const SurfaceDef s = sphere();
  LocusCurve c = trace_locus(s, {0.0, M_PI / 4});
  NullField nf = null_field(s, c);
  size_t i = 8;
  for (auto _ : state) {
    Kappas k = kappa_LNG(s, c, nf, c.samples[i].t);
    benchmark::DoNotOptimize(k.kG);
    i = (i + 1) % (c.size() - 16) + 8;
  }
}
BENCHMARK(InvariantSamplePoint);

void AdaptedChartBuild(benchmark::State& state) {
  const SurfaceDef s = sphere();
  LocusCurve c = trace_locus(s, {0.0, M_PI / 4});
  NullField nf = null_field(s, c);
  for (auto _ : state) {
    AdaptedChart chart = AdaptedChart::build(s, c, nf, c.samples[40].t, 11, true);
    benchmark::DoNotOptimize(chart.khat0());
  }
}
BENCHMARK(AdaptedChartBuild);

}  // namespace

BENCHMARK_MAIN();
