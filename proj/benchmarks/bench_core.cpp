#include <benchmark/benchmark.h>

#include "qkpz/bessel.hpp"
#include "qkpz/classical_asep.hpp"
#include "qkpz/identities.hpp"
#include "qkpz/ito.hpp"
#include "qkpz/lindblad.hpp"
#include "qkpz/operators.hpp"

namespace {

void BM_HeisenbergIncrement(benchmark::State& state) {
  const auto chain = qkpz::build_chain(static_cast<int>(state.range(0)));
  const auto obs = qkpz::height_op(chain, chain.length / 2);
  for (auto _ : state) {
    benchmark::DoNotOptimize(qkpz::heisenberg_increment(chain, 1.0, obs));
  }
}
BENCHMARK(BM_HeisenbergIncrement)->Arg(4)->Arg(6);

void BM_SchrodingerApply(benchmark::State& state) {
  const auto chain = qkpz::build_chain(static_cast<int>(state.range(0)));
  const auto spec = qkpz::make_generator_spec(chain, 1.0);
  const auto rho = qkpz::pointer_density(chain, qkpz::alternating_config(chain.length));
  for (auto _ : state) {
    benchmark::DoNotOptimize(qkpz::schrodinger_generator_apply(spec, rho));
  }
}
BENCHMARK(BM_SchrodingerApply)->Arg(6)->Arg(8);

void BM_MasterEvolve(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const auto generator = qkpz::classical::classical_generator(L, 1.0, qkpz::classical::Boundary::closed);
  std::vector<double> p0(std::size_t{1} << L, 0.0);
  p0[qkpz::step_config(L).basis_index()] = 1.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qkpz::classical::master_evolve(generator, p0, 0.5));
  }
}
BENCHMARK(BM_MasterEvolve)->Arg(10)->Arg(14);

void BM_GillespieTasep(benchmark::State& state) {
  const int L = static_cast<int>(state.range(0));
  const auto init = qkpz::classical::bernoulli_half_profile(L, 99);
  const std::vector<double> samples{10.0};
  for (auto _ : state) {
    benchmark::DoNotOptimize(qkpz::classical::gillespie_sample(
        L, qkpz::classical::asep_rates(0.0), init, 10.0, 42, qkpz::classical::Boundary::periodic,
        samples));
  }
}
BENCHMARK(BM_GillespieTasep)->Arg(1024)->Arg(4096);

void BM_BesselScaled(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(qkpz::bessel_i_scaled(12, static_cast<double>(state.range(0))));
  }
}
BENCHMARK(BM_BesselScaled)->Arg(1)->Arg(50)->Arg(500);

}  // namespace

BENCHMARK_MAIN();
