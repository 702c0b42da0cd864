#include <benchmark/benchmark.h>

#include "aslip/analysis.hpp"

using namespace aslip;

namespace {

// SSP-shaped QP: CLF row with relaxation plus one hard force barrier.
static void BM_QpSolveSsp(benchmark::State& state) {
  QpProblem p;
  p.n = 2;
  p.ineqs.push_back({{150.0, -1.0, 0.0}, 800.0, AffineIneq::Label::CLF});
  p.ineqs.push_back({{-95.0, 0.0, 0.0}, 3200.0, AffineIneq::Label::CBF_s});
  for (auto _ : state) {
    const QpSolution s = qp_solve(p);
    benchmark::DoNotOptimize(s.x);
  }
}
BENCHMARK(BM_QpSolveSsp);

// DSP-shaped QP: three variables, three rows.
static void BM_QpSolveDsp(benchmark::State& state) {
  QpProblem p;
  p.n = 3;
  p.ineqs.push_back({{120.0, 35.0, -1.0}, 250.0, AffineIneq::Label::CLF});
  p.ineqs.push_back({{-100.0, 0.0, 0.0}, 4000.0, AffineIneq::Label::CBF_s1});
  p.ineqs.push_back({{0.0, -100.0, 0.0}, 300.0, AffineIneq::Label::CBF_s2});
  for (auto _ : state) {
    const QpSolution s = qp_solve(p);
    benchmark::DoNotOptimize(s.x);
  }
}
BENCHMARK(BM_QpSolveDsp);

static void BM_StanceDynamics(benchmark::State& state) {
  ModelParams mp;
  HybridState st;
  st.phase.tag = PhaseTag::SSP;
  st.phase.legs[0] = {0.0, 0.0, 1.0, 0.05, 0.0};
  st.phase.legs[1] = {0.0, 0.0, 0.8, 0.0, -0.2};
  st.mass = {0.1, 0.96, 0.5, -0.05};
  const std::array<double, 2> taus{3.0, -1.0};
  for (auto _ : state) {
    const StateDeriv d = continuous_dynamics(mp, st, taus);
    benchmark::DoNotOptimize(d.zddot);
  }
}
BENCHMARK(BM_StanceDynamics);

static void BM_TerrainQuery(benchmark::State& state) {
  TerrainProfile terrain(
      {{TerrainSegment::Kind::Flat, 0.0, 0.0, 12.0},
       {TerrainSegment::Kind::Slope, 0.14, 0.0, 8.0},
       {TerrainSegment::Kind::Sine, 0.06, 4.0, 12.0}},
      0.05, 7, 0.4, 0.0);
  double x = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(terrain.height_at(x));
    benchmark::DoNotOptimize(terrain.smoothed_height_at(x));
    x += 0.37;
    if (x > 31.0) x = 0.5;
  }
}
BENCHMARK(BM_TerrainQuery);

// Full simulated walking at 1 kHz control / 4 kHz physics, cost per second
// of simulated time.
static void BM_SimulatedWalkingSecond(benchmark::State& state) {
  ScenarioConfig cfg;
  cfg.terrain_segments = {{TerrainSegment::Kind::Flat, 0.0, 0.0, 40.0}};
  cfg.duration = 1.0;
  for (auto _ : state) {
    const TrajectoryLog log = run(cfg);
    benchmark::DoNotOptimize(log.ticks.size());
  }
}
BENCHMARK(BM_SimulatedWalkingSecond)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
