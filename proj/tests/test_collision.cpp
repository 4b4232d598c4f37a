#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qkpz/collision.hpp"
#include "qkpz/lindblad.hpp"
#include "qkpz/operators.hpp"
#include "qkpz/rng.hpp"

using namespace qkpz;
using namespace qkpz::collision;

TEST_CASE("thermal ancilla: geometric weights, tail rule, mean occupation") {
  // alpha = 1, 30 levels: tail before renormalization is 2^-30 ~ 9.3e-10.
  CHECK(thermal_tail_mass(1.0, 30) == doctest::Approx(9.31e-10).epsilon(1e-3));
  const auto weights = thermal_ancilla(AncillaSpec{1.0, 30});
  CHECK(weights.size() == 30);
  CHECK(weights.sum() == doctest::Approx(1.0).epsilon(1e-15));
  for (int n = 1; n < 30; ++n)
    CHECK(weights(n) / weights(n - 1) == doctest::Approx(0.5).epsilon(1e-12));

  double mean = 0.0;
  for (int n = 0; n < 30; ++n) mean += n * weights(n);
  CHECK(std::abs(mean - 1.0) < 1e-7);

  CHECK_THROWS_AS(thermal_ancilla(AncillaSpec{1.0, 2}), ConfigError);  // tail 0.25
  CHECK(ancilla_levels_for(1.0) == 27);  // smallest d with 2^-d < 1e-8
}

TEST_CASE("dt = 0 collision is the identity channel") {
  const auto chain = build_chain(2);
  const auto config = make_collision_config(chain, 1.0, 0.0);
  const auto rho0 = pointer_density(chain, OccupationConfig::from_string("01"));
  const auto rho1 = collision_step(config, rho0);
  CHECK(max_abs(rho1.mat() - rho0.mat()) <= 1e-14);
}

TEST_CASE("collision step is trace preserving and number conserving") {
  const auto chain = build_chain(3);
  const auto config = make_collision_config(chain, 1.0, 0.05);
  const CollisionModel model(config);

  const Vector psi = coherent_probe_state(chain);
  DensityMatrix rho{Matrix(psi * psi.adjoint())};
  Matrix total = Matrix::Zero(chain.dim(), chain.dim());
  for (int j = 1; j <= 3; ++j) total += number_op(chain, j).mat();
  const double n0 = real_expectation(rho, OperatorMatrix(total));

  for (int s = 0; s < 10; ++s) {
    rho = model.step(rho);
    CHECK(std::abs(rho.mat().trace() - Complex(1.0, 0.0)) <= 1e-11);
    CHECK(real_expectation(rho, OperatorMatrix(total)) == doctest::Approx(n0).epsilon(1e-10));
  }
  CHECK_NOTHROW(rho.validate());
}

TEST_CASE("one small collision matches the generator flow to O(dt^2)") {
  const auto chain = build_chain(2);
  const double dt = 1e-3;
  const auto config = make_collision_config(chain, 1.0, dt);
  const auto rho0 = pointer_density(chain, OccupationConfig::from_string("01"));
  const auto rho1 = collision_step(config, rho0);
  const Matrix expected = rho0.mat() + dt * schrodinger_generator_apply(
                                                make_generator_spec(chain, 1.0), rho0);
  for (std::int64_t b = 0; b < chain.dim(); ++b)
    CHECK(std::abs(rho1.mat()(b, b).real() - expected(b, b).real()) < 5e-6);
}

TEST_CASE("sequential and even-odd sweeps agree at leading order") {
  const auto chain = build_chain(3);
  const double dt = 0.01;
  const Vector psi = coherent_probe_state(chain);
  const DensityMatrix rho0{Matrix(psi * psi.adjoint())};
  const auto even_odd = collision_step(make_collision_config(chain, 1.0, dt, SweepOrder::even_odd), rho0);
  const auto sequential =
      collision_step(make_collision_config(chain, 1.0, dt, SweepOrder::sequential), rho0);
  CHECK(max_abs(even_odd.mat() - sequential.mat()) < 5.0 * dt * dt);
}

TEST_CASE("convergence study: first-order channel against the Lindblad oracle") {
  const std::vector<double> dts{0.1, 0.05, 0.025};
  const auto rows = convergence_study(3, 1.0, 1.0, dts);
  REQUIRE(rows.size() == 3);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].error < rows[i - 1].error);  // monotone decrease
    CHECK(rows[i].ratio > 1.7);
    CHECK(rows[i].ratio < 2.3);
  }
  CHECK_THROWS_AS(convergence_study(3, 1.0, 1.0, std::vector<double>{0.1, 0.3}), ConfigError);
  CHECK_THROWS_AS(convergence_study(3, 1.0, 1.0, std::vector<double>{0.13}), ConfigError);
}

TEST_CASE("truncation robustness: doubling the ancilla space changes nothing measurable") {
  const std::vector<double> dts{0.1, 0.05};
  const int base_levels = ancilla_levels_for(1.0);
  const auto base = convergence_study(2, 1.0, 0.5, dts, base_levels);
  const auto doubled = convergence_study(2, 1.0, 0.5, dts, 2 * base_levels);
  for (std::size_t i = 0; i < base.size(); ++i) {
    CHECK(std::abs(base[i].error - doubled[i].error) <
          0.01 * std::max(base[i].error, doubled[i].error));
    CHECK(std::abs(base[i].error - doubled[i].error) < 1e-6);
  }
}

TEST_CASE("trajectories: determinism, normalization, step bookkeeping") {
  const auto chain = build_chain(2);
  const CollisionModel model(make_collision_config(chain, 1.0, 0.05));
  const Vector psi0 = coherent_probe_state(chain);

  const auto a = model.sample_trajectory(psi0, 0.5, 77);
  const auto b = model.sample_trajectory(psi0, 0.5, 77);
  REQUIRE(a.states.size() == b.states.size());
  REQUIRE(a.states.size() == 11);  // 10 steps + initial state
  for (std::size_t i = 0; i < a.states.size(); ++i) {
    CHECK((a.states[i] - b.states[i]).norm() == 0.0);  // bitwise identical
    CHECK(std::abs(a.states[i].norm() - 1.0) <= 1e-10);
  }
  const auto c = model.sample_trajectory(psi0, 0.5, 78);
  CHECK((a.states.back() - c.states.back()).norm() > 0.0);

  CHECK_THROWS_AS(model.sample_trajectory(Vector(2.0 * psi0), 0.5, 1), DomainError);
  CHECK_THROWS_AS(model.sample_trajectory(psi0, 0.52, 1), ConfigError);
}

TEST_CASE("trajectory ensemble mean converges to the channel value (1e5 runs, 4 SE)") {
  const auto chain = build_chain(2);
  const double dt = 0.05;
  const double T = 1.0;
  const CollisionModel model(make_collision_config(chain, 1.0, dt));
  const Vector psi0 = coherent_probe_state(chain);
  const OperatorMatrix n1 = number_op(chain, 1);

  DensityMatrix rho{Matrix(psi0 * psi0.adjoint())};
  for (int s = 0; s < 20; ++s) rho = model.step(rho);
  const double channel_value = real_expectation(rho, n1);

  const auto seeds = derive_seed_list(404, 100000);
  const auto estimate = trajectory_ensemble_mean(model, psi0, T, n1, seeds, 2);
  INFO("ensemble " << estimate.mean << " channel " << channel_value << " stderr "
                   << estimate.stderr_mean);
  CHECK(std::abs(estimate.mean - channel_value) <= 4.0 * estimate.stderr_mean);

  // Threading does not change the estimate.
  const auto small_seeds = derive_seed_list(404, 500);
  const auto single = trajectory_ensemble_mean(model, psi0, T, n1, small_seeds, 1);
  const auto threaded = trajectory_ensemble_mean(model, psi0, T, n1, small_seeds, 4);
  CHECK(single.mean == threaded.mean);
}
