#pragma once

#include <compare>
#include <optional>
#include <vector>

#include "qkpz/chain.hpp"
#include "qkpz/operator_matrix.hpp"

namespace qkpz {

// Quantum Ito calculus over the edge noises dW^j, dWbar^j. Within bath
// averages the increments satisfy
//   dWbar^j dW^k = delta_jk alpha dt,   dW^k dWbar^j = delta_jk (1+alpha) dt,
//   dW dW = dWbar dWbar = 0,            E[dW] = E[dWbar] = 0,
// and all higher stochastic orders vanish. Expressions carry formal sums of
// (system operator) x (ordered noise word) x dt^p with order p + |word|/2 <= 1.

enum class NoiseKind { W, Wbar };

struct NoiseFactor {
  int edge = 0;  // 1..L-1
  NoiseKind kind = NoiseKind::W;
  friend auto operator<=>(const NoiseFactor&, const NoiseFactor&) = default;
};

struct ItoTerm {
  OperatorMatrix coeff;
  std::vector<NoiseFactor> noise;  // length 0..2
  int dt_power = 0;                // 0 or 1
};

class ItoExpression {
 public:
  static constexpr double kPruneTolerance = 1e-14;

  ItoExpression() = default;

  static ItoExpression from_operator(const OperatorMatrix& op);
  // Builds coeff * (product of factors) * dt^p; contracts/drops per the rules
  // above, so the stored terms always satisfy the order bound.
  static ItoExpression make(const OperatorMatrix& coeff, std::vector<NoiseFactor> noise,
                            int dt_power, double alpha);

  const std::vector<ItoTerm>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  // Hilbert-space dimension; tracked even when every term has been pruned,
  // so drift/noise of an identically-zero increment keep their shape.
  Eigen::Index dim() const { return space_dim_; }

  ItoExpression operator+(const ItoExpression& other) const;
  ItoExpression operator-(const ItoExpression& other) const;
  ItoExpression scaled(Complex factor) const;

  // Canonical form: terms sorted by (dt_power, noise word), one term per key,
  // coefficients below the prune tolerance removed. Idempotent.
  void normalize();

 private:
  std::vector<ItoTerm> terms_;
  Eigen::Index space_dim_ = 0;
  friend ItoExpression ito_product(const ItoExpression&, const ItoExpression&, double);
  friend ItoExpression hamiltonian_increment(const ChainDescriptor&);
  friend ItoExpression noise_component(const ItoExpression&);
};

// dH = sum_j [ c_{j+1}^dag c_j dW^j + c_j^dag c_{j+1} dWbar^j ].
ItoExpression hamiltonian_increment(const ChainDescriptor& chain);

// Ordered product: coefficients multiply left to right (system operators
// commute with the noise factors), noise words concatenate and contract.
ItoExpression ito_product(const ItoExpression& a, const ItoExpression& b, double alpha);

// dO = i[dH, O] - 1/2 [dH, [dH, O]] with Ito contraction: the dt coefficient
// is the dual Lindbladian (TASEP part + alpha * SSEP part), the noise part is
// i[dH, O].
ItoExpression heisenberg_increment(const ChainDescriptor& chain, double alpha,
                                   const OperatorMatrix& observable);

enum class NoiseDecoration { plain, plus, minus };

// dB^k = i[c_{k+1}^dag c_k dW^k - c_k^dag c_{k+1} dWbar^k]; decorated
// variants scale the W term by e^{+-delta/2} and the Wbar term by
// e^{-+delta/2}. delta defaults to delta*(alpha); pass an explicit value to
// build decorations at a general delta.
ItoExpression edge_noise(const ChainDescriptor& chain, int edge, NoiseDecoration decoration,
                         double alpha, std::optional<double> delta = std::nullopt);

// dt coefficient with empty noise word.
OperatorMatrix drift(const ItoExpression& e);
// All dt^0 terms with nonempty noise word.
ItoExpression noise_component(const ItoExpression& e);

// dt coefficient of ito_product(noise_component(e1), noise_component(e2));
// order preserved (e1 left of e2).
OperatorMatrix noise_correlator(const ItoExpression& e1, const ItoExpression& e2, double alpha);

// Max Frobenius distance between coefficients over the union of term keys.
double expression_distance(const ItoExpression& a, const ItoExpression& b);

}  // namespace qkpz
