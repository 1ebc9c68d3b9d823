#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "swh/forcing.hpp"
#include "swh/integrator.hpp"
#include "swh/operators.hpp"
#include "swh/transforms.hpp"

using namespace swh;

namespace {

DomainSpec domain(int modes) { return DomainSpec::interval(std::numbers::pi, modes); }

void BM_RoundTrip(benchmark::State& state) {
  const auto d = domain(int(state.range(0)));
  const SpectralField u = random_smooth_field(d, 1, 1.0);
  benchmark::DoNotOptimize(to_coeff(to_grid(u, 2), d, 2));  // FFTW planning
  for (auto _ : state) {
    SpectralField back = to_coeff(to_grid(u, 2), d, 2);
    benchmark::DoNotOptimize(back);
  }
}
BENCHMARK(BM_RoundTrip)->RangeMultiplier(4)->Range(32, 2048);

void BM_RoundTrip2D(benchmark::State& state) {
  const int n = int(state.range(0));
  const auto d = DomainSpec::rectangle(std::numbers::pi, std::numbers::pi, n, n);
  const SpectralField u = random_smooth_field(d, 1, 1.0);
  benchmark::DoNotOptimize(to_coeff(to_grid(u, 2), d, 2));  // FFTW planning
  for (auto _ : state) {
    SpectralField back = to_coeff(to_grid(u, 2), d, 2);
    benchmark::DoNotOptimize(back);
  }
}
BENCHMARK(BM_RoundTrip2D)->RangeMultiplier(2)->Range(16, 128);

void BM_NonlinearF(benchmark::State& state) {
  const auto d = domain(int(state.range(0)));
  const SpectralField u = random_smooth_field(d, 2, 1.0);
  benchmark::DoNotOptimize(nonlinear_f(u, 0.5, 0.05));
  for (auto _ : state) {
    SpectralField f = nonlinear_f(u, 0.5, 0.05);
    benchmark::DoNotOptimize(f);
  }
}
BENCHMARK(BM_NonlinearF)->RangeMultiplier(4)->Range(32, 2048);

void BM_StepETDRK4(benchmark::State& state) {
  const ModelSpec m{ModelKind::modified_swift_hohenberg, 0.5, 0.05, domain(int(state.range(0)))};
  const double s = std::sqrt(2.0 / std::numbers::pi);
  const ForcingModel g(ForcingKind::quasiperiodic, m.domain,
                       {{0.025, 1.0, 0.0, SpectralField::mode(m.domain, {1, 0}, s)},
                        {0.025, std::numbers::sqrt2, 0.0, SpectralField::mode(m.domain, {2, 0}, s)}});
  IntegratorConfig c;
  c.dt = 2e-3;
  c.scheme = Scheme::etd_rk4;
  const Stepper stepper(Model(m), g, c);
  SpectralField u = random_smooth_field(m.domain, 3, 1.0);
  double t = 0.0;
  benchmark::DoNotOptimize(stepper.step(u, t));
  for (auto _ : state) {
    u = stepper.step(u, t);
    t += c.dt;
  }
  benchmark::DoNotOptimize(u);
}
BENCHMARK(BM_StepETDRK4)->RangeMultiplier(4)->Range(32, 2048);

}  // namespace

BENCHMARK_MAIN();
