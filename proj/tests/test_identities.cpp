#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qkpz/identities.hpp"
#include "qkpz/ito.hpp"
#include "qkpz/lindblad.hpp"
#include "qkpz/operators.hpp"

using namespace qkpz;

TEST_CASE("number identity at machine precision across alpha") {
  CHECK(check_number_identity(5, 1.0).residual < 1e-12);
  CHECK(check_number_identity(5, 0.0).residual < 1e-12);
  CHECK(check_number_identity(4, 2.7).residual < 1e-12);
}

TEST_CASE("continuity identity, including the closed-boundary form") {
  const auto rep = check_continuity(5, 1.0);
  CHECK(rep.residual < 1e-12);
  for (const auto& [name, value] : rep.components) CHECK(value < 1e-12);
  CHECK(check_continuity(5, 0.3).residual < 1e-12);
}

TEST_CASE("height drift and correlator (discrete KPZ form)") {
  const auto rep = check_height_kpz(6, 1.0);
  CHECK(rep.residual < 1e-12);
  CHECK(check_height_kpz(5, 0.3).residual < 1e-12);
  CHECK(check_height_kpz(6, 2.7).residual < 1e-12);
}

TEST_CASE("cole-hopf linearizes exactly at delta*, and only there") {
  const double alpha = 1.0;
  const double delta_star = cole_hopf_delta(alpha);
  const auto at_star = check_cole_hopf(5, alpha, delta_star);
  CHECK(at_star.residual < 1e-12);

  // Away from delta* the nonlinear form still holds but the heat form fails.
  const auto off_star = check_cole_hopf(5, alpha, -0.3);
  double general = -1.0, linear = -1.0;
  for (const auto& [name, value] : off_star.components) {
    if (name == "general-drift") general = value;
    if (name == "linear-drift") linear = value;
  }
  CHECK(general >= 0.0);
  CHECK(general < 1e-12);
  CHECK(linear > 1e-3);
  CHECK(off_star.pass);  // the asserted residual excludes the heat form off delta*

  CHECK(check_cole_hopf(5, 0.5, cole_hopf_delta(0.5)).residual < 1e-12);
  CHECK_THROWS_AS(check_cole_hopf(5, 0.0, -0.5), DomainError);
}

TEST_CASE("noise rearrangement equalities and their negative control") {
  CHECK(check_noise_rearrangement(4, 1.0).residual < 1e-12);
  CHECK(check_noise_rearrangement(4, 3.0).residual < 1e-12);

  // Replacing the decorated noise by the plain one breaks the identity.
  const auto chain = build_chain(4);
  const double alpha = 1.0;
  const double delta = cole_hopf_delta(alpha);
  const int k = 2;
  const auto z = ItoExpression::from_operator(height_exponential_op(chain, k, delta));
  const auto zhalf = ItoExpression::from_operator(height_exponential_op(chain, k, delta / 2.0));
  const auto plain = edge_noise(chain, k, NoiseDecoration::plain, alpha);
  const auto sandwich = ito_product(ito_product(zhalf, plain, alpha), zhalf, alpha);
  const auto wrong = ito_product(z, plain, alpha);  // plain instead of dB^{(+)}
  CHECK(expression_distance(sandwich, wrong) > 1e-3);
}

TEST_CASE("burgers identity with and without asymmetry") {
  CHECK(check_burgers(6, 1.0).residual < 1e-12);
  CHECK(check_burgers(6, 0.0).residual < 1e-12);
  CHECK(check_burgers(5, 2.7).residual < 1e-12);
}

TEST_CASE("burgers and continuity share the same noise arithmetic (definitional)") {
  // The centered density is the backward height gradient, and it differs from
  // the plain density by a multiple of the identity, so the two increments
  // have identical noise parts term by term.
  const auto chain = build_chain(5);
  const double alpha = 0.8;
  for (int k = 2; k <= 4; ++k) {
    const auto via_centered =
        noise_component(heisenberg_increment(chain, alpha, centered_number_op(chain, k)));
    const auto via_plain =
        noise_component(heisenberg_increment(chain, alpha, number_op(chain, k)));
    CHECK(expression_distance(via_centered, via_plain) <= 1e-13);
    const Matrix gradient =
        height_op(chain, k).mat() - height_op(chain, k - 1).mat();
    CHECK(max_abs(gradient - centered_number_op(chain, k).mat()) == 0.0);
  }
}

TEST_CASE("replica closure: distinct sites, contact term, permutation symmetry") {
  CHECK(check_replica(6, 1.0, 2, 4).residual < 1e-12);
  CHECK(check_replica(6, 1.0, 3, 3).residual < 1e-12);
  CHECK(check_replica(6, 0.4, 2, 5).residual < 1e-12);
  CHECK_THROWS_AS(check_replica(6, 1.0, 1, 3), IndexError);

  const auto chain = build_chain(6);
  const double delta = cole_hopf_delta(1.0);
  const Matrix u12 = height_exponential_op(chain, 2, delta).mat() *
                     height_exponential_op(chain, 4, delta).mat();
  const Matrix u21 = height_exponential_op(chain, 4, delta).mat() *
                     height_exponential_op(chain, 2, delta).mat();
  CHECK(max_abs(u12 - u21) == 0.0);
}

TEST_CASE("all checks pass simultaneously over the acceptance grid") {
  for (const int L : {5, 6}) {
    for (const double alpha : {0.3, 1.0, 2.7}) {
      for (const auto& rep : run_identity_suite(L, alpha)) {
        INFO(rep.name << " L=" << L << " alpha=" << alpha << " residual=" << rep.residual);
        CHECK(rep.pass);
        CHECK(rep.residual < 1e-10);
      }
    }
  }
}

TEST_CASE("negative controls: a 1% alpha perturbation is visible in every check") {
  const int L = 5;
  const double alpha = 1.0;
  const double bumped = 1.01 * alpha;
  CHECK(check_number_identity(L, alpha, bumped).residual > 1e-4);
  CHECK(check_continuity(L, alpha, bumped).residual > 1e-4);
  CHECK(check_height_kpz(L, alpha, bumped).residual > 1e-4);
  CHECK(check_cole_hopf(L, alpha, cole_hopf_delta(alpha), bumped).residual > 1e-4);
  CHECK(check_noise_rearrangement(L, alpha, bumped).residual > 1e-4);
  CHECK(check_burgers(L, alpha, bumped).residual > 1e-4);
  CHECK(check_replica(L, alpha, 3, 3, bumped).residual > 1e-4);
}

TEST_CASE("particle-hole plus reflection symmetry of the generator and residuals") {
  const int L = 5;
  const double alpha = 0.7;
  const auto chain = build_chain(L);
  const auto spec = make_generator_spec(chain, alpha);

  // Basis permutation b -> reverse(~b): occupied<->empty combined with the
  // spatial flip j -> L+1-j.
  const auto transform = [&](std::uint32_t bits) {
    std::uint32_t out = 0;
    for (int j = 1; j <= L; ++j)
      if (!((bits >> (j - 1)) & 1u)) out |= 1u << (L - j);
    return out;
  };
  Matrix perm = Matrix::Zero(chain.dim(), chain.dim());
  for (std::int64_t b = 0; b < chain.dim(); ++b) perm(transform(static_cast<std::uint32_t>(b)), b) = 1.0;

  // Generator covariance: U L*(O) U^dag = L*(U O U^dag).
  for (int k = 2; k <= L - 1; ++k) {
    const Matrix nk = number_op(chain, k).mat();
    const Matrix lhs = perm * adjoint_generator_apply(spec, OperatorMatrix(nk)).mat() * perm.adjoint();
    const Matrix transformed = perm * nk * perm.adjoint();
    const Matrix rhs = adjoint_generator_apply(spec, OperatorMatrix(transformed)).mat();
    CHECK(max_abs(lhs - rhs) <= 1e-12);
  }

  // Per-site residual symmetry for the number identity and the height drift.
  const Matrix id = Matrix::Identity(chain.dim(), chain.dim());
  auto number_residual = [&](int k) {
    const Matrix lhs = adjoint_generator_apply(spec, number_op(chain, k)).mat();
    const Matrix nkm = number_op(chain, k - 1).mat(), nk = number_op(chain, k).mat(),
                 nkp = number_op(chain, k + 1).mat();
    return (lhs - (nkp * (id - nk) - nk * (id - nkm) + alpha * ((nkp - nk) - (nk - nkm)))).norm();
  };
  auto height_residual = [&](int k) {
    const Matrix hkm = height_op(chain, k - 1).mat(), hk = height_op(chain, k).mat(),
                 hkp = height_op(chain, k + 1).mat();
    const Matrix expected =
        (alpha + 0.5) * (hkp - 2.0 * hk + hkm) - (hkp - hk) * (hk - hkm) + 0.25 * id;
    return (drift(heisenberg_increment(chain, alpha, height_op(chain, k))).mat() - expected).norm();
  };
  for (int k = 2; k <= L - 1; ++k) {
    CHECK(number_residual(k) == doctest::Approx(number_residual(L + 1 - k)).epsilon(1e-9));
    if (k <= L - 2 && L + 1 - k <= L - 2 && L + 1 - k >= 2)
      CHECK(height_residual(k) == doctest::Approx(height_residual(L + 1 - k)).epsilon(1e-9));
  }
}

TEST_CASE("continuum probe: exact uniform-ensemble averages") {
  const std::vector<double> alphas{10.0, 100.0};
  const auto rows = continuum_noise_probe(6, alphas);
  REQUIRE(rows.size() == 2);
  CHECK(std::abs(rows[0].average - 5.25) < 1e-12);
  CHECK(std::abs(rows[1].average - 50.25) < 1e-12);
  CHECK(rows[1].ratio == doctest::Approx(1.005).epsilon(1e-12));
  // The ratio decreases toward 1 like 1 + 1/(2 alpha).
  CHECK(rows[0].ratio > rows[1].ratio);
  CHECK(rows[0].ratio == doctest::Approx(rows[0].expected_ratio).epsilon(1e-12));
  CHECK_THROWS_AS(continuum_noise_probe(6, std::vector<double>{-1.0}), DomainError);
  CHECK_THROWS_AS(continuum_noise_probe(6, std::vector<double>{2.0, 1.0}), DomainError);
}

TEST_CASE("generator equivalence check is deterministic in its seed") {
  const auto a = check_generator_equivalence(5, 1.0, 10, 42);
  const auto b = check_generator_equivalence(5, 1.0, 10, 42);
  CHECK(a.residual == b.residual);
  CHECK(a.residual < 1e-11);
  CHECK(a.pass);
}
