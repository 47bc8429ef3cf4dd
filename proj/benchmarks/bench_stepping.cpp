#include <benchmark/benchmark.h>

#include <filesystem>
#include <vector>

#include "vt25d/config.hpp"
#include "vt25d/pipeline.hpp"
#include "vt25d/solver.hpp"

using namespace vt25;

namespace {

constexpr std::int64_t kSteps = 2000;

struct Setup {
  SimDomain domain;
  BoundaryField boundary;
  double dt;
  std::vector<double> excitation;
  Probe mic;

  static const Setup& get() {
    static const Setup s = [] {
      RunConfig c;
      c.area_function = std::filesystem::path(VT25D_DATA_DIR) / "uniform_r8mm.txt";
      SimDomain d = build_domain(c, load_area_function(c.area_function));
      const double dt = c.time_step();
      BoundaryField b = make_boundary(d);
      const Probe mic = microphone_probe(d, c.mic_offset);
      std::vector<double> u = make_pulse(dt, c.pulse).resized(kSteps).samples;
      return Setup{std::move(d), std::move(b), dt, std::move(u), mic};
    }();
    return s;
  }
};

void step_loop(benchmark::State& state, Kernel kernel) {
  const Setup& s = Setup::get();
  const Stepper stepper(s.domain, s.boundary, s.dt, kernel);
  const int workers = static_cast<int>(state.range(0));
  const Probe probes[] = {s.mic};
  for (auto _ : state) {
    FieldState f = FieldState::zeros(s.domain.grid());
    const ProbeRecords r = advance(stepper, f, kSteps, s.excitation, probes, workers);
    benchmark::DoNotOptimize(r.series[0].back());
  }
  const auto cells = static_cast<double>(s.domain.grid().nx) * s.domain.grid().ny;
  state.counters["steps/s"] =
      benchmark::Counter(static_cast<double>(kSteps), benchmark::Counter::kIsIterationInvariantRate);
  state.counters["cells/s"] =
      benchmark::Counter(kSteps * cells, benchmark::Counter::kIsIterationInvariantRate);
}

void BM_Plain2D(benchmark::State& state) { step_loop(state, Kernel::Plain2D); }
void BM_Depth25D(benchmark::State& state) { step_loop(state, Kernel::Depth25D); }

}  // namespace

BENCHMARK(BM_Plain2D)->Arg(1)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_Depth25D)->Arg(1)->Arg(2)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
