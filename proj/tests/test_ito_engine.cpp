#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "qkpz/ito.hpp"
#include "qkpz/lindblad.hpp"
#include "qkpz/operators.hpp"

using namespace qkpz;

namespace {

Matrix random_matrix(Eigen::Index dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Matrix m(dim, dim);
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) m(r, c) = Complex(dist(rng), dist(rng));
  return m;
}

ItoExpression noise_term(const Matrix& coeff, int edge, NoiseKind kind) {
  return ItoExpression::make(OperatorMatrix(coeff), {NoiseFactor{edge, kind}}, 0, 0.0);
}

}  // namespace

TEST_CASE("hamiltonian increment has two noise terms per edge and no drift") {
  CHECK(hamiltonian_increment(build_chain(2)).terms().size() == 2);
  CHECK(hamiltonian_increment(build_chain(5)).terms().size() == 8);
  const auto dH = hamiltonian_increment(build_chain(3));
  CHECK(max_abs(drift(dH).mat()) == 0.0);
  CHECK(drift(dH).dim() == 8);
}

TEST_CASE("ito contraction table") {
  std::mt19937_64 rng(11);
  const Matrix a = random_matrix(8, rng), b = random_matrix(8, rng);
  const double alpha = 0.7;

  // dW^1 dWbar^1 -> (1+alpha) AB dt
  const auto w_wbar = ito_product(noise_term(a, 1, NoiseKind::W), noise_term(b, 1, NoiseKind::Wbar), alpha);
  REQUIRE(w_wbar.terms().size() == 1);
  CHECK(w_wbar.terms()[0].dt_power == 1);
  CHECK(w_wbar.terms()[0].noise.empty());
  CHECK(max_abs(w_wbar.terms()[0].coeff.mat() - (1.0 + alpha) * (a * b)) <= 1e-13);

  // dWbar^1 dW^1 -> alpha BA dt
  const auto wbar_w = ito_product(noise_term(b, 1, NoiseKind::Wbar), noise_term(a, 1, NoiseKind::W), alpha);
  REQUIRE(wbar_w.terms().size() == 1);
  CHECK(max_abs(wbar_w.terms()[0].coeff.mat() - alpha * (b * a)) <= 1e-13);

  // Off-edge and same-kind products vanish.
  CHECK(ito_product(noise_term(a, 1, NoiseKind::Wbar), noise_term(b, 2, NoiseKind::W), alpha).empty());
  CHECK(ito_product(noise_term(a, 1, NoiseKind::W), noise_term(b, 1, NoiseKind::W), alpha).empty());
  CHECK(ito_product(noise_term(a, 1, NoiseKind::Wbar), noise_term(b, 1, NoiseKind::Wbar), alpha).empty());
}

TEST_CASE("order preservation: engine difference equals AB + alpha [A, B]") {
  std::mt19937_64 rng(13);
  const double alpha = 1.3;
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix a = random_matrix(8, rng), b = random_matrix(8, rng);
    const auto forward =
        ito_product(noise_term(a, 2, NoiseKind::W), noise_term(b, 2, NoiseKind::Wbar), alpha);
    const auto backward =
        ito_product(noise_term(b, 2, NoiseKind::Wbar), noise_term(a, 2, NoiseKind::W), alpha);
    const Matrix diff = drift(forward).mat() - drift(backward).mat();
    const Matrix expected = a * b + alpha * (a * b - b * a);
    CHECK(max_abs(diff - expected) <= 1e-12);
  }
}

TEST_CASE("ito product distributes over sums (bilinearity)") {
  std::mt19937_64 rng(17);
  const double alpha = 0.4;
  const Matrix a = random_matrix(4, rng), b = random_matrix(4, rng), c = random_matrix(4, rng);
  const auto ea = noise_term(a, 1, NoiseKind::W);
  const auto eb = noise_term(b, 1, NoiseKind::W);
  const auto ec = noise_term(c, 1, NoiseKind::Wbar);
  const auto lhs = ito_product(ea + eb, ec, alpha);
  const auto rhs = ito_product(ea, ec, alpha) + ito_product(eb, ec, alpha);
  CHECK(expression_distance(lhs, rhs) <= 1e-13);
}

TEST_CASE("normalization is idempotent and prunes tiny coefficients") {
  std::mt19937_64 rng(19);
  const Matrix a = random_matrix(4, rng);
  auto e = noise_term(a, 1, NoiseKind::W) + noise_term(Matrix(1e-16 * a), 2, NoiseKind::W);
  CHECK(e.terms().size() == 1);  // tiny term pruned
  auto twice = e;
  twice.normalize();
  CHECK(expression_distance(e, twice) == 0.0);
}

TEST_CASE("heisenberg increment of the identity and of the total number vanish") {
  const auto chain = build_chain(4);
  CHECK(heisenberg_increment(chain, 1.0, OperatorMatrix::identity(chain.dim())).empty());

  Matrix total = Matrix::Zero(chain.dim(), chain.dim());
  for (int j = 1; j <= 4; ++j) total += number_op(chain, j).mat();
  const auto dn = heisenberg_increment(chain, 0.8, OperatorMatrix(total));
  CHECK(max_abs(drift(dn).mat()) <= 1e-13);
  CHECK(noise_component(dn).empty());
}

TEST_CASE("heisenberg drift of n_k matches the generator identity on interior sites") {
  const auto chain = build_chain(5);
  const double alpha = 0.9;
  const Matrix id = Matrix::Identity(chain.dim(), chain.dim());
  for (int k = 2; k <= 4; ++k) {
    const auto dn = heisenberg_increment(chain, alpha, number_op(chain, k));
    const Matrix nkm = number_op(chain, k - 1).mat(), nk = number_op(chain, k).mat(),
                 nkp = number_op(chain, k + 1).mat();
    const Matrix expected =
        nkp * (id - nk) - nk * (id - nkm) + alpha * ((nkp - nk) - (nk - nkm));
    CHECK(max_abs(drift(dn).mat() - expected) <= 1e-12);
  }
}

TEST_CASE("engine drift equals the direct dual generator on random observables") {
  const auto chain = build_chain(5);
  const double alpha = 1.0;
  const auto spec = make_generator_spec(chain, alpha);
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 50; ++trial) {
    Matrix m = random_matrix(chain.dim(), rng);
    const OperatorMatrix obs(Matrix(0.5 * (m + Matrix(m.adjoint()))));
    const Matrix via_engine = drift(heisenberg_increment(chain, alpha, obs)).mat();
    const Matrix direct = adjoint_generator_apply(spec, obs).mat();
    CHECK((via_engine - direct).norm() <= 1e-11);
  }
}

TEST_CASE("edge noise: zero mean, decorated scaling, off-edge correlator") {
  const auto chain = build_chain(4);
  const double alpha = 1.0;
  const auto plain = edge_noise(chain, 2, NoiseDecoration::plain, alpha);
  CHECK(max_abs(drift(plain).mat()) == 0.0);  // E[dB] = 0

  // Plus decoration at alpha = 1 scales the W term by e^{delta/2} = 2^{-1/2}.
  const auto plus = edge_noise(chain, 2, NoiseDecoration::plus, alpha);
  const Matrix hop = hop_op(chain, 2).mat();
  for (const auto& term : plus.terms()) {
    REQUIRE(term.noise.size() == 1);
    if (term.noise[0].kind == NoiseKind::W) {
      const Matrix expected = Complex(0.0, 1.0) * std::pow(2.0, -0.5) * hop;
      CHECK(max_abs(term.coeff.mat() - expected) <= 1e-14);
    } else {
      const Matrix expected = Complex(0.0, -1.0) * std::pow(2.0, 0.5) * hop.adjoint();
      CHECK(max_abs(term.coeff.mat() - expected) <= 1e-14);
    }
  }
  CHECK_THROWS_AS(edge_noise(chain, 2, NoiseDecoration::plus, 0.0), DomainError);
  CHECK_THROWS_AS(edge_noise(chain, 4, NoiseDecoration::plain, 1.0), IndexError);

  // Distinct edges never contract.
  const auto other = edge_noise(chain, 3, NoiseDecoration::plain, alpha);
  CHECK(max_abs(noise_correlator(plain, other, alpha).mat()) == 0.0);
}

TEST_CASE("noise part of the height increment is the edge noise") {
  const auto chain = build_chain(5);
  const double alpha = 0.6;
  for (int k = 2; k <= 4; ++k) {
    const auto dh = heisenberg_increment(chain, alpha, height_op(chain, k));
    const auto expected = edge_noise(chain, k, NoiseDecoration::plain, alpha);
    CHECK(expression_distance(noise_component(dh), expected) <= 1e-12);
  }
}

TEST_CASE("decorated correlator reproduces the contact potential") {
  const auto chain = build_chain(5);
  for (const double alpha : {0.5, 1.0, 2.0}) {
    const Matrix id = Matrix::Identity(chain.dim(), chain.dim());
    for (int k = 2; k <= 3; ++k) {
      const auto plus = edge_noise(chain, k, NoiseDecoration::plus, alpha);
      const auto minus = edge_noise(chain, k, NoiseDecoration::minus, alpha);
      const Matrix corr = noise_correlator(plus, minus, alpha).mat();
      const Matrix nk = number_op(chain, k).mat(), nkp = number_op(chain, k + 1).mat();
      const Matrix contact = ((id - nk) * nkp) / (1.0 + alpha) + (nk * (id - nkp)) / alpha;
      CHECK(max_abs(corr - alpha * (alpha + 1.0) * contact) <= 1e-12);
    }
  }
}
