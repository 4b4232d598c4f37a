#include "qkpz/ito.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "qkpz/operators.hpp"

namespace qkpz {

namespace {

using NoiseWord = std::vector<NoiseFactor>;

struct TermKey {
  int dt_power;
  NoiseWord noise;
  friend bool operator<(const TermKey& a, const TermKey& b) {
    if (a.dt_power != b.dt_power) return a.dt_power < b.dt_power;
    return std::lexicographical_compare(
        a.noise.begin(), a.noise.end(), b.noise.begin(), b.noise.end(),
        [](const NoiseFactor& x, const NoiseFactor& y) { return x < y; });
  }
};

// Reduces a raw (word, dt_power, scalar) triple per the Ito table. Returns
// false when the term vanishes identically.
bool reduce_word(NoiseWord& word, int& dt_power, double alpha, double& scalar) {
  if (word.size() >= 3) return false;                      // order > 1
  if (word.size() == 2) {
    const auto [e1, k1] = std::pair(word[0].edge, word[0].kind);
    const auto [e2, k2] = std::pair(word[1].edge, word[1].kind);
    if (e1 != e2) return false;
    if (k1 == NoiseKind::W && k2 == NoiseKind::Wbar)
      scalar *= (1.0 + alpha);
    else if (k1 == NoiseKind::Wbar && k2 == NoiseKind::W)
      scalar *= alpha;
    else
      return false;                                        // WW or WbarWbar
    word.clear();
    dt_power += 1;
  }
  if (dt_power >= 2) return false;                         // dt^2
  if (dt_power == 1 && !word.empty()) return false;        // dt x dW
  return true;
}

}  // namespace

ItoExpression ItoExpression::from_operator(const OperatorMatrix& op) {
  ItoExpression e;
  e.space_dim_ = op.dim();
  e.terms_.push_back(ItoTerm{op, {}, 0});
  e.normalize();
  return e;
}

ItoExpression ItoExpression::make(const OperatorMatrix& coeff, std::vector<NoiseFactor> noise,
                                  int dt_power, double alpha) {
  double scalar = 1.0;
  ItoExpression e;
  e.space_dim_ = coeff.dim();
  if (reduce_word(noise, dt_power, alpha, scalar)) {
    OperatorMatrix c = (scalar == 1.0) ? coeff : OperatorMatrix(Matrix(scalar * coeff.mat()));
    e.terms_.push_back(ItoTerm{std::move(c), std::move(noise), dt_power});
  }
  e.normalize();
  return e;
}

void ItoExpression::normalize() {
  std::map<TermKey, Matrix> merged;
  for (auto& term : terms_) {
    if (term.noise.size() > 2 || term.dt_power > 1) continue;  // dropped as zero
    TermKey key{term.dt_power, term.noise};
    auto it = merged.find(key);
    if (it == merged.end())
      merged.emplace(std::move(key), term.coeff.mat());
    else
      it->second += term.coeff.mat();
  }
  terms_.clear();
  for (auto& [key, coeff] : merged) {
    if (max_abs(coeff) < kPruneTolerance) continue;
    terms_.push_back(ItoTerm{OperatorMatrix(std::move(coeff)), key.noise, key.dt_power});
  }
}

ItoExpression ItoExpression::operator+(const ItoExpression& other) const {
  ItoExpression e;
  e.space_dim_ = std::max(space_dim_, other.space_dim_);
  e.terms_ = terms_;
  e.terms_.insert(e.terms_.end(), other.terms_.begin(), other.terms_.end());
  e.normalize();
  return e;
}

ItoExpression ItoExpression::operator-(const ItoExpression& other) const {
  return *this + other.scaled(Complex(-1.0, 0.0));
}

ItoExpression ItoExpression::scaled(Complex factor) const {
  ItoExpression e;
  e.space_dim_ = space_dim_;
  for (const auto& term : terms_)
    e.terms_.push_back(ItoTerm{OperatorMatrix(Matrix(factor * term.coeff.mat())), term.noise, term.dt_power});
  e.normalize();
  return e;
}

ItoExpression hamiltonian_increment(const ChainDescriptor& chain) {
  ItoExpression e;
  e.space_dim_ = chain.dim();
  for (int j = 1; j <= chain.edge_count(); ++j) {
    const OperatorMatrix hop = hop_op(chain, j);
    e.terms_.push_back(ItoTerm{hop, {NoiseFactor{j, NoiseKind::W}}, 0});
    e.terms_.push_back(ItoTerm{hop.adjoint(), {NoiseFactor{j, NoiseKind::Wbar}}, 0});
  }
  e.normalize();
  return e;
}

ItoExpression ito_product(const ItoExpression& a, const ItoExpression& b, double alpha) {
  ItoExpression out;
  out.space_dim_ = std::max(a.space_dim_, b.space_dim_);
  for (const auto& ta : a.terms_) {
    for (const auto& tb : b.terms_) {
      if (ta.coeff.dim() != tb.coeff.dim())
        throw DimensionError("ito_product: coefficient dimension mismatch");
      NoiseWord word = ta.noise;
      word.insert(word.end(), tb.noise.begin(), tb.noise.end());
      int dt_power = ta.dt_power + tb.dt_power;
      double scalar = 1.0;
      if (!reduce_word(word, dt_power, alpha, scalar)) continue;
      Matrix coeff = scalar * (ta.coeff.mat() * tb.coeff.mat());
      out.terms_.push_back(ItoTerm{OperatorMatrix(std::move(coeff)), std::move(word), dt_power});
    }
  }
  out.normalize();
  return out;
}

ItoExpression heisenberg_increment(const ChainDescriptor& chain, double alpha,
                                   const OperatorMatrix& observable) {
  if (observable.dim() != chain.dim())
    throw DimensionError("heisenberg_increment: observable dimension mismatch");
  const ItoExpression dH = hamiltonian_increment(chain);
  const ItoExpression obs = ItoExpression::from_operator(observable);
  const ItoExpression ho = ito_product(dH, obs, alpha);
  const ItoExpression oh = ito_product(obs, dH, alpha);
  const ItoExpression first = (ho - oh).scaled(Complex(0.0, 1.0));
  // [dH,[dH,O]] = dH dH O - 2 dH O dH + O dH dH under the contraction rules.
  const ItoExpression hho = ito_product(dH, ho, alpha);
  const ItoExpression hoh = ito_product(ho, dH, alpha);
  const ItoExpression ohh = ito_product(oh, dH, alpha);
  const ItoExpression second =
      (hho - hoh.scaled(Complex(2.0, 0.0)) + ohh).scaled(Complex(-0.5, 0.0));
  return first + second;
}

ItoExpression edge_noise(const ChainDescriptor& chain, int edge, NoiseDecoration decoration,
                         double alpha, std::optional<double> delta) {
  if (edge < 1 || edge > chain.edge_count()) throw IndexError("edge_noise: edge out of range");
  double w_scale = 1.0, wbar_scale = 1.0;
  if (decoration != NoiseDecoration::plain) {
    const double d = delta ? *delta : cole_hopf_delta(alpha);  // throws for alpha <= 0
    const double half = (decoration == NoiseDecoration::plus) ? d / 2.0 : -d / 2.0;
    w_scale = std::exp(half);
    wbar_scale = std::exp(-half);
  }
  const OperatorMatrix hop = hop_op(chain, edge);
  const Complex i(0.0, 1.0);
  ItoExpression e;
  e = ItoExpression::make(OperatorMatrix(Matrix(i * w_scale * hop.mat())),
                          {NoiseFactor{edge, NoiseKind::W}}, 0, alpha) +
      ItoExpression::make(OperatorMatrix(Matrix(-i * wbar_scale * hop.adjoint().mat())),
                          {NoiseFactor{edge, NoiseKind::Wbar}}, 0, alpha);
  return e;
}

OperatorMatrix drift(const ItoExpression& e) {
  for (const auto& term : e.terms())
    if (term.dt_power == 1 && term.noise.empty()) return term.coeff;
  // No dt term: zero of the expression's dimension (or empty when e is empty).
  return OperatorMatrix::zero(e.dim());
}

ItoExpression noise_component(const ItoExpression& e) {
  ItoExpression out;
  out.space_dim_ = e.dim();
  for (const auto& term : e.terms())
    if (term.dt_power == 0 && !term.noise.empty())
      out = out + ItoExpression::make(term.coeff, term.noise, 0, 0.0);
  return out;
}

OperatorMatrix noise_correlator(const ItoExpression& e1, const ItoExpression& e2, double alpha) {
  return drift(ito_product(noise_component(e1), noise_component(e2), alpha));
}

double expression_distance(const ItoExpression& a, const ItoExpression& b) {
  double dist = 0.0;
  auto scan = [&](const ItoExpression& x, const ItoExpression& y) {
    for (const auto& tx : x.terms()) {
      const Matrix* other = nullptr;
      for (const auto& ty : y.terms())
        if (ty.dt_power == tx.dt_power && ty.noise == tx.noise) { other = &ty.coeff.mat(); break; }
      const double d = other ? (tx.coeff.mat() - *other).norm() : tx.coeff.mat().norm();
      dist = std::max(dist, d);
    }
  };
  scan(a, b);
  scan(b, a);
  return dist;
}

}  // namespace qkpz
