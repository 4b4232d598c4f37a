#include "qkpz/lindblad.hpp"

#include <algorithm>
#include <cmath>

namespace qkpz {

namespace {

// Precomputed per-generator scaffolding for the fused fast path: the list of
// applicable source configs per jump and the total exit-rate weight per config
// (the diagonal of sum_k rate_k L_k^dag L_k, which is a projector sum).
struct FastGenerator {
  std::vector<std::vector<std::int64_t>> sources;  // per jump, ascending
  std::vector<std::uint32_t> toggles;              // per jump
  std::vector<double> rates;                       // per jump
  Eigen::VectorXd exit_weight;                     // per config
  Matrix anti;                                     // -1/2 (w_r + w_c), complex for SIMD

  explicit FastGenerator(const GeneratorSpec& spec) {
    const auto dim = spec.chain.dim();
    exit_weight = Eigen::VectorXd::Zero(dim);
    for (const auto& jump : spec.jumps) {
      std::vector<std::int64_t> src;
      for (std::int64_t b = 0; b < dim; ++b)
        if (jump.applicable(static_cast<std::uint32_t>(b))) {
          src.push_back(b);
          exit_weight(b) += jump.rate;
        }
      sources.push_back(std::move(src));
      toggles.push_back(jump.toggle_mask());
      rates.push_back(jump.rate);
    }
    anti.resize(dim, dim);
    for (Eigen::Index c = 0; c < dim; ++c)
      for (Eigen::Index r = 0; r < dim; ++r)
        anti(r, c) = Complex(-0.5 * (exit_weight(r) + exit_weight(c)), 0.0);
  }

  // out = sum_k rate_k L_k rho L_k^dag - 1/2 {W, rho} with W = diag(exit_weight).
  void schrodinger(const Matrix& rho, Matrix& out) const {
    out = rho.cwiseProduct(anti);
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const auto& src = sources[k];
      const std::uint32_t mask = toggles[k];
      const double rate = rates[k];
      for (const std::int64_t c : src) {
        const std::int64_t tc = c ^ static_cast<std::int64_t>(mask);
        for (const std::int64_t r : src)
          out(r ^ static_cast<std::int64_t>(mask), tc) += rate * rho(r, c);
      }
    }
  }

  // out = sum_k rate_k L_k^dag O L_k - 1/2 {W, O}: (L^dag O L)(r,c) = O(T r, T c)
  // on applicable (r, c), zero elsewhere.
  void heisenberg(const Matrix& obs, Matrix& out) const {
    out = obs.cwiseProduct(anti);
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const auto& src = sources[k];
      const std::uint32_t mask = toggles[k];
      const double rate = rates[k];
      for (const std::int64_t c : src) {
        const std::int64_t tc = c ^ static_cast<std::int64_t>(mask);
        for (const std::int64_t r : src)
          out(r, c) += rate * obs(r ^ static_cast<std::int64_t>(mask), tc);
      }
    }
  }
};

}  // namespace

GeneratorSpec make_generator_spec(const ChainDescriptor& chain, double alpha) {
  if (alpha < 0.0) throw DomainError("make_generator_spec: need alpha >= 0");
  GeneratorSpec spec{chain, alpha, {}};
  for (int j = 1; j <= chain.edge_count(); ++j) {
    spec.jumps.push_back(JumpSpec{j, HopDirection::toward_lower, 1.0 + alpha});
    spec.jumps.push_back(JumpSpec{j, HopDirection::toward_higher, alpha});
  }
  return spec;
}

OperatorMatrix dense_jump_matrix(const ChainDescriptor& chain, const JumpSpec& jump) {
  const auto dim = chain.dim();
  Matrix m = Matrix::Zero(dim, dim);
  for (std::int64_t b = 0; b < dim; ++b)
    if (jump.applicable(static_cast<std::uint32_t>(b)))
      m(b ^ static_cast<std::int64_t>(jump.toggle_mask()), b) = 1.0;
  return OperatorMatrix(std::move(m));
}

OperatorMatrix adjoint_generator_apply(const GeneratorSpec& spec, const OperatorMatrix& observable) {
  if (observable.dim() != spec.chain.dim())
    throw DimensionError("adjoint_generator_apply: dimension mismatch");
  const FastGenerator fast(spec);
  Matrix out(observable.dim(), observable.dim());
  fast.heisenberg(observable.mat(), out);
  return OperatorMatrix(std::move(out));
}

Matrix schrodinger_generator_apply(const GeneratorSpec& spec, const Matrix& rho) {
  if (rho.rows() != spec.chain.dim() || rho.cols() != spec.chain.dim())
    throw DimensionError("schrodinger_generator_apply: dimension mismatch");
  const FastGenerator fast(spec);
  Matrix out(rho.rows(), rho.cols());
  fast.schrodinger(rho, out);
  return out;
}

Matrix schrodinger_generator_apply(const GeneratorSpec& spec, const DensityMatrix& rho) {
  return schrodinger_generator_apply(spec, rho.mat());
}

double generator_norm_estimate(const GeneratorSpec& spec) {
  double total = 0.0;
  for (const auto& jump : spec.jumps) total += jump.rate;
  const double rate_bound = 2.0 * total;
  const auto dim = spec.chain.dim();
  if (dim > 1024) return rate_bound;

  // Spectral norm of the generator as a map on Frobenius space, by power
  // iteration on G^dag G. The Frobenius adjoint of the Schrodinger apply is
  // the Heisenberg apply, so one G^dag G step is one of each. Deterministic
  // start vector; 10% headroom on top of the estimate.
  const FastGenerator fast(spec);
  Matrix v(dim, dim), w(dim, dim);
  std::uint64_t noise = 0x9e3779b97f4a7c15ULL;
  for (Eigen::Index c = 0; c < dim; ++c)
    for (Eigen::Index r = 0; r < dim; ++r) {
      noise ^= noise << 13;
      noise ^= noise >> 7;
      noise ^= noise << 17;
      v(r, c) = Complex(static_cast<double>(noise >> 11) * 0x1.0p-53 - 0.5, 0.0);
    }
  v /= v.norm();
  double lambda = 0.0;
  for (int iteration = 0; iteration < 30; ++iteration) {
    fast.schrodinger(v, w);
    fast.heisenberg(w, v);
    lambda = v.norm();
    if (lambda == 0.0) return rate_bound;
    v /= lambda;
  }
  return std::min(rate_bound, 1.1 * std::sqrt(lambda));
}

EvolutionResult evolve(const GeneratorSpec& spec, const DensityMatrix& rho0, double horizon,
                       std::span<const double> sample_times) {
  if (horizon < 0.0) throw DomainError("evolve: need T >= 0");
  rho0.validate();
  std::vector<double> times(sample_times.begin(), sample_times.end());
  if (times.empty()) times.push_back(horizon);
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0 || times[i] > horizon + 1e-12)
      throw RangeError("evolve: sample time outside [0, T]");
    if (i > 0 && times[i] <= times[i - 1])
      throw RangeError("evolve: sample times must be strictly increasing");
  }

  EvolutionResult result;
  result.times = times;
  const double norm = generator_norm_estimate(spec);
  double step = horizon;
  if (horizon > 0.0 && norm > 0.0) {
    step = std::pow(1e-12 / (horizon * std::pow(norm, 4.0)), 0.25);
    step = std::min(step, horizon);
  }
  result.stats.step_size = step;

  const FastGenerator fast(spec);
  const auto dim = spec.chain.dim();
  Matrix rho = rho0.mat();
  Matrix k1(dim, dim), k2(dim, dim), k3(dim, dim), k4(dim, dim), work(dim, dim);

  auto rk4_segment = [&](double t_from, double t_to) {
    const double span = t_to - t_from;
    if (span <= 0.0) return;
    const auto steps = static_cast<std::int64_t>(std::ceil(span / step - 1e-12));
    const double h = span / static_cast<double>(std::max<std::int64_t>(steps, 1));
    for (std::int64_t s = 0; s < steps; ++s) {
      fast.schrodinger(rho, k1);
      work = rho + (0.5 * h) * k1;
      fast.schrodinger(work, k2);
      work = rho + (0.5 * h) * k2;
      fast.schrodinger(work, k3);
      work = rho + h * k3;
      fast.schrodinger(work, k4);
      rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      result.stats.steps += 1;
    }
  };

  double current = 0.0;
  for (const double t : times) {
    rk4_segment(current, t);
    current = t;
    const double trace = rho.trace().real();
    const double drift_mag = std::abs(1.0 - trace);
    result.stats.max_renormalization = std::max(result.stats.max_renormalization, drift_mag);
    if (drift_mag > 1e-10)
      throw IntegrationError("evolve: trace renormalization exceeded 1e-10 budget");
    rho /= trace;
    result.states.emplace_back(rho, /*validate_now=*/false);
    result.states.back().validate();
  }
  return result;
}

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& observable) {
  if (rho.dim() != observable.dim()) throw DimensionError("expectation: dimension mismatch");
  return (rho.mat() * observable.mat()).trace();
}

double real_expectation(const DensityMatrix& rho, const OperatorMatrix& observable) {
  const Complex value = expectation(rho, observable);
  if (std::abs(value.imag()) >= 1e-11)
    throw DomainError("real_expectation: imaginary part above 1e-11 for Hermitian pair");
  return value.real();
}

RateMatrix diagonal_restriction(const GeneratorSpec& spec) {
  // Columns accumulate in jump-list order (edge ascending, favored then
  // reverse) so the result compares exactly against classical_generator.
  const auto dim = spec.chain.dim();
  RateMatrix rates(dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    const auto bits = static_cast<std::uint32_t>(b);
    for (const auto& jump : spec.jumps)
      if (jump.rate > 0.0 && jump.applicable(bits))
        rates.add_rate(b, b ^ static_cast<std::int64_t>(jump.toggle_mask()), jump.rate);
  }
  return rates;
}

}  // namespace qkpz
