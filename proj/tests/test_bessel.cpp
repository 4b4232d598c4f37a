#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qkpz/bessel.hpp"
#include "qkpz/classical_asep.hpp"
#include "qkpz/operators.hpp"

using namespace qkpz;

TEST_CASE("bessel_i at the origin and positivity") {
  CHECK(bessel_i(0, 0.0) == 1.0);
  CHECK(bessel_i(1, 0.0) == 0.0);
  CHECK(bessel_i(7, 0.0) == 0.0);
  for (const double x : {0.3, 2.0, 40.0, 300.0})
    for (const int n : {0, 1, 5}) CHECK(bessel_i(n, x) > 0.0);
  CHECK_THROWS_AS(bessel_i(201, 1.0), DomainError);
  CHECK_THROWS_AS(bessel_i(0, -0.1), DomainError);
  CHECK_THROWS_AS(bessel_i(0, 701.0), DomainError);
}

TEST_CASE("symmetry I_{-n} = I_n and reference spot values") {
  CHECK(bessel_i(-3, 2.5) == bessel_i(3, 2.5));
  CHECK(bessel_i(-12, 55.0) == bessel_i(12, 55.0));
  // Handbook values.
  CHECK(bessel_i(0, 1.0) == doctest::Approx(1.2660658777520084).epsilon(1e-13));
  CHECK(bessel_i(1, 1.0) == doctest::Approx(0.5651591039924850).epsilon(1e-13));
  CHECK(bessel_i(0, 10.0) == doctest::Approx(2815.716628466254).epsilon(1e-12));
  // Independent implementation cross-check for a spread of arguments.
  for (const double x : {0.1, 1.0, 7.5, 25.0, 60.0, 200.0}) {
    for (const int n : {0, 1, 4, 11}) {
      const double reference = std::cyl_bessel_i(static_cast<double>(n), x);
      CHECK(bessel_i(n, x) == doctest::Approx(reference).epsilon(1e-10));
    }
  }
}

TEST_CASE("normalization identity: the scaled row sums to one") {
  for (const double x : {0.1, 1.0, 10.0}) {
    // Tail bound: stop when the term is far below the target accuracy.
    double sum = bessel_i_scaled(0, x);
    for (int n = 1; n <= 60; ++n) sum += 2.0 * bessel_i_scaled(n, x);
    CHECK(std::abs(sum - 1.0) <= 1e-12);
  }
  // The same identity through the unscaled values at moderate x.
  for (const double x : {0.1, 1.0, 10.0}) {
    double sum = bessel_i(0, x);
    for (int n = 1; n <= 60; ++n) sum += 2.0 * bessel_i(n, x);
    CHECK(std::abs(sum * std::exp(-x) - 1.0) <= 1e-12);
  }
}

TEST_CASE("series and recurrence agree around the crossover") {
  for (const double x : {20.0, 29.9, 30.1, 45.0}) {
    for (const int n : {0, 2, 9}) {
      // Both internal routes must agree regardless of which one bessel_i picks.
      const double direct = bessel_i_scaled(n, x);
      const double reference = std::cyl_bessel_i(static_cast<double>(n), x) * std::exp(-x);
      CHECK(direct == doctest::Approx(reference).epsilon(1e-11));
    }
  }
  CHECK(bessel_eval(0, 10.0).method == BesselEval::Method::series);
  CHECK(bessel_eval(0, 100.0).method == BesselEval::Method::downward_recurrence);
}

TEST_CASE("propagator: t = 0 reproduces the initial data exactly") {
  const std::vector<double> z0{1.0, 2.0, 0.5, 0.25, 4.0};
  for (int k = 1; k <= 5; ++k) {
    const auto result = bessel_propagator(1.0, 0.0, k, z0);
    CHECK(result.value == z0[static_cast<std::size_t>(k - 1)]);
  }
}

TEST_CASE("propagator: kernel row sums to one on constant data") {
  const std::vector<double> z0(9, 3.7);
  for (const double t : {0.2, 1.0, 5.0}) {
    const auto result = bessel_propagator(0.8, t, 5, z0);
    CHECK(result.value == doctest::Approx(3.7).epsilon(1e-13));
    CHECK(result.truncation_bound < 1e-13);
  }
  CHECK_THROWS_AS(bessel_propagator(0.0, 1.0, 1, z0), DomainError);
}

TEST_CASE("propagator matches the classical evolution of the step profile at L=15") {
  const int L = 15;
  const double alpha = 1.0;
  const auto init = step_config(L);
  const std::vector<double> times{0.5};
  const auto rows = bessel_vs_evolution(L, alpha, init, 8, times);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].light_cone_ok);
  CHECK(rows[0].abs_diff < 1e-6);
}

TEST_CASE("light-cone gate flags rows that a finite chain cannot emulate") {
  const int L = 9;
  const double alpha = 1.0;
  const auto init = alternating_config(L);
  const std::vector<double> times{0.3, 3.0};
  const auto rows = bessel_vs_evolution(L, alpha, init, 5, times);
  // Distance to the boundary is 4 < 2 t nu + 5 for every positive t here.
  CHECK_FALSE(rows[0].light_cone_ok);
  CHECK_FALSE(rows[1].light_cone_ok);
  // The short-time flagged row is still numerically close; the long-time one
  // visibly drifts, which is exactly why the gate exists.
  CHECK(rows[0].abs_diff < 1e-3);
  CHECK(rows[1].abs_diff > rows[0].abs_diff);
}

TEST_CASE("finite-size effects shrink as L grows at fixed geometry") {
  const double alpha = 1.0;
  const double t = 0.4;
  // Centered site, alternating data; compare the same physical window.
  double previous = 1e9;
  for (const int L : {9, 13, 15}) {
    const auto rows =
        bessel_vs_evolution(L, alpha, alternating_config(L), (L + 1) / 2, std::vector<double>{t});
    CHECK(rows[0].abs_diff < previous + 1e-12);
    previous = rows[0].abs_diff;
  }
}

TEST_CASE("triple cross-check at L=9: quantum path agrees with the classical sector") {
  const int L = 9;
  const double alpha = 1.0;
  const auto rows = bessel_vs_evolution(L, alpha, alternating_config(L), 5,
                                        std::vector<double>{0.3}, /*quantum_path=*/true);
  REQUIRE(rows.size() == 1);
  REQUIRE(rows[0].quantum_classical_diff.has_value());
  CHECK(*rows[0].quantum_classical_diff < 1e-9);
  // The Bessel comparison is gated out at this size; report only.
  CHECK_FALSE(rows[0].light_cone_ok);
}
