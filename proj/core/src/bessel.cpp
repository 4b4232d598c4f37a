#include "qkpz/bessel.hpp"

#include <algorithm>
#include <cmath>

#include "qkpz/classical_asep.hpp"
#include "qkpz/lindblad.hpp"
#include "qkpz/operators.hpp"

namespace qkpz {

namespace {

constexpr double kSeriesCutoff = 30.0;

void require_domain(int order, double x) {
  if (std::abs(order) > 200) throw DomainError("bessel_i: |order| capped at 200");
  if (!(x >= 0.0) || x > 700.0) throw DomainError("bessel_i: argument must be in [0, 700]");
}

double series_scaled(int n, double x) {
  // e^{-x} sum_m (x/2)^{n+2m} / (m! (n+m)!), no cancellation (all terms >= 0).
  if (x == 0.0) return n == 0 ? 1.0 : 0.0;
  const double half = 0.5 * x;
  double term = std::exp(n * std::log(half) - std::lgamma(n + 1.0) - x);
  double sum = term;
  for (int m = 0; m < 400; ++m) {
    term *= half * half / ((m + 1.0) * (n + m + 1.0));
    sum += term;
    if (term < sum * 1e-17) break;
  }
  return sum;
}

// Normalized downward recurrence: f_{m-1} = f_{m+1} + (2m/x) f_m from a start
// order well above max(n, x); I_0 + 2 sum_{m>=1} I_m = e^x fixes the scale, so
// f_n / S is exactly the scaled value e^{-x} I_n(x).
double miller_scaled(int n, double x) {
  const double top = std::max(static_cast<double>(n), x);
  const int start = static_cast<int>(top + 10.0 * std::sqrt(top) + 40.0);  // always > n
  double fp = 0.0;       // f_{m+1}
  double fm = 1e-280;    // f_m seed; its weight in the normalized result is negligible
  double result = 0.0;
  double norm = 0.0;
  for (int m = start; m >= 1; --m) {
    const double fmm = fp + (2.0 * m / x) * fm;  // f_{m-1}
    fp = fm;
    fm = fmm;
    if (m - 1 == n) result = fm;
    norm += (m - 1 >= 1) ? 2.0 * fm : fm;  // accumulate f_0 + 2 sum f_m
    if (std::abs(fm) > 1e280) {            // rescale to avoid overflow
      fp *= 1e-280;
      fm *= 1e-280;
      norm *= 1e-280;
      result *= 1e-280;
    }
  }
  return result / norm;
}

}  // namespace

BesselEval bessel_eval(int order, double argument) {
  require_domain(order, argument);
  const int n = std::abs(order);  // I_{-n} = I_n
  BesselEval eval;
  eval.order = order;
  eval.argument = argument;
  if (argument <= kSeriesCutoff) {
    eval.method = BesselEval::Method::series;
    eval.value = series_scaled(n, argument) * std::exp(argument);
  } else {
    eval.method = BesselEval::Method::downward_recurrence;
    eval.value = miller_scaled(n, argument) * std::exp(argument);
  }
  return eval;
}

double bessel_i(int order, double argument) { return bessel_eval(order, argument).value; }

double bessel_i_scaled(int order, double argument) {
  require_domain(order, argument);
  const int n = std::abs(order);
  return argument <= kSeriesCutoff ? series_scaled(n, argument) : miller_scaled(n, argument);
}

PropagatorResult bessel_propagator(double alpha, double t, int k, std::span<const double> z0) {
  if (t < 0.0) throw DomainError("bessel_propagator: need t >= 0");
  const double nu = diffusion_scale(alpha);  // throws for alpha <= 0
  const int L = static_cast<int>(z0.size());
  if (L < 1) throw DimensionError("bessel_propagator: empty initial data");
  if (k < 1 || k > L) throw IndexError("bessel_propagator: site out of range");

  const double y = 2.0 * t * nu;
  // Grow the radius until the kernel tail (kernel sums to 1) is below 1e-14.
  std::vector<double> kernel{bessel_i_scaled(0, y)};
  double covered = kernel[0];
  int radius = 0;
  while (1.0 - covered >= 1e-14) {
    ++radius;
    if (radius > 4000) throw IntegrationError("bessel_propagator: kernel radius runaway");
    kernel.push_back(bessel_i_scaled(radius, y));
    covered += 2.0 * kernel.back();
  }

  auto z_ext = [&](int site) {
    if (site < 1) return z0[0];
    if (site > L) return z0[static_cast<std::size_t>(L - 1)];
    return z0[static_cast<std::size_t>(site - 1)];
  };

  double value = kernel[0] * z_ext(k);
  for (int n = 1; n <= radius; ++n)
    value += kernel[static_cast<std::size_t>(n)] * (z_ext(k - n) + z_ext(k + n));

  double max_abs_z = 0.0;
  for (const double z : z0) max_abs_z = std::max(max_abs_z, std::abs(z));
  PropagatorResult result;
  result.value = value;
  result.truncation_bound = std::max(1.0 - covered, 0.0) * max_abs_z;
  result.radius = radius;
  return result;
}

std::vector<BesselComparisonRow> bessel_vs_evolution(int L, double alpha,
                                                     const OccupationConfig& init, int k,
                                                     std::span<const double> times,
                                                     bool quantum_path) {
  if (init.length != L) throw ConfigError("bessel_vs_evolution: init length mismatch");
  const ChainDescriptor chain = build_chain(L);
  if (k < 1 || k > L) throw IndexError("bessel_vs_evolution: site out of range");
  if (quantum_path && L > 9)
    throw SizeError("bessel_vs_evolution: full Lindblad cross-check capped at L = 9");
  const double delta = cole_hopf_delta(alpha);
  const double mu = drift_absorption_mu(alpha);
  const double nu = diffusion_scale(alpha);

  std::vector<double> z0(static_cast<std::size_t>(L));
  for (int site = 1; site <= L; ++site)
    z0[static_cast<std::size_t>(site - 1)] = height_exponential_value(init.bits, site, delta);

  const RateMatrix generator = classical::classical_generator(L, alpha, classical::Boundary::closed);
  std::vector<double> p0(static_cast<std::size_t>(chain.dim()), 0.0);
  p0[init.basis_index()] = 1.0;

  // One quantum integration pass sampling every positive time.
  std::vector<BesselComparisonRow> rows;
  std::vector<double> positive_times;
  for (const double t : times)
    if (t > 0.0) positive_times.push_back(t);
  EvolutionResult quantum;
  if (quantum_path && !positive_times.empty()) {
    const GeneratorSpec spec = make_generator_spec(chain, alpha);
    quantum = evolve(spec, pointer_density(chain, init), positive_times.back(), positive_times);
  }

  for (const double t : times) {
    BesselComparisonRow row;
    row.t = t;
    const double distance = static_cast<double>(std::min(k - 1, L - k));
    row.margin = distance - (2.0 * t * nu + 5.0);
    row.light_cone_ok = row.margin > 0.0;

    const PropagatorResult prop = bessel_propagator(alpha, t, k, z0);
    row.bessel_value = prop.value;
    row.truncation_bound = prop.truncation_bound;

    const std::vector<double> pt = classical::master_evolve(generator, p0, t);
    double classical_value = 0.0;
    for (std::int64_t b = 0; b < chain.dim(); ++b)
      classical_value += pt[static_cast<std::size_t>(b)] *
                         height_exponential_value(static_cast<std::uint32_t>(b), k, delta);
    row.classical_value = std::exp(mu * t) * classical_value;
    row.abs_diff = std::abs(row.bessel_value - row.classical_value);

    if (quantum_path) {
      if (t == 0.0) {
        row.quantum_value = z0[static_cast<std::size_t>(k - 1)];
      } else {
        const auto it = std::find(positive_times.begin(), positive_times.end(), t);
        const auto& rho = quantum.states[static_cast<std::size_t>(it - positive_times.begin())];
        row.quantum_value =
            std::exp(mu * t) * real_expectation(rho, cole_hopf_op(chain, k, alpha));
      }
      row.quantum_classical_diff = std::abs(*row.quantum_value - row.classical_value);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace qkpz
