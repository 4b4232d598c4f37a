#pragma once

#include <span>
#include <vector>

#include "qkpz/chain.hpp"
#include "qkpz/operator_matrix.hpp"
#include "qkpz/rate_matrix.hpp"

namespace qkpz {

// Mean (noise-averaged) dynamics: the dissipator combines
//   rate (1+alpha): jump c_j^dag c_{j+1} (particle moves from site j+1 to j,
//                   the TASEP-favored direction in this convention), and
//   rate alpha:     jump c_{j+1}^dag c_j (the reverse hop)
// for every edge j. Generators are immutable; evolve is a pure function.

enum class HopDirection { toward_lower, toward_higher };

struct JumpSpec {
  int edge = 0;
  HopDirection direction = HopDirection::toward_lower;
  double rate = 0.0;

  // Bit action on a basis config: applicable(b) iff the source pattern holds;
  // the target config is b ^ toggle_mask (both hop directions toggle the same
  // two bits, only the source pattern differs).
  std::uint32_t toggle_mask() const { return (1u << (edge - 1)) | (1u << edge); }
  bool applicable(std::uint32_t bits) const {
    const bool lo = (bits >> (edge - 1)) & 1u;
    const bool hi = (bits >> edge) & 1u;
    return direction == HopDirection::toward_lower ? (!lo && hi) : (lo && !hi);
  }
};

struct GeneratorSpec {
  ChainDescriptor chain;
  double alpha = 0.0;
  std::vector<JumpSpec> jumps;  // edge-ascending, favored hop then reverse
};

GeneratorSpec make_generator_spec(const ChainDescriptor& chain, double alpha);

// Dense matrix of a single jump operator (tests and cross-checks).
OperatorMatrix dense_jump_matrix(const ChainDescriptor& chain, const JumpSpec& jump);

// Heisenberg picture: sum over jumps of rate (L^dag O L - 1/2 {L^dag L, O}).
OperatorMatrix adjoint_generator_apply(const GeneratorSpec& spec, const OperatorMatrix& observable);

// Schrodinger picture on a general square matrix (trace of the result is 0).
Matrix schrodinger_generator_apply(const GeneratorSpec& spec, const Matrix& rho);
Matrix schrodinger_generator_apply(const GeneratorSpec& spec, const DensityMatrix& rho);

struct IntegratorStats {
  std::int64_t steps = 0;
  double step_size = 0.0;
  double max_renormalization = 0.0;  // largest |1 - trace| removed at samples
};

struct EvolutionResult {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  IntegratorStats stats;
};

// Fixed-step classical RK4. The step is chosen a priori from
// h^4 |G|^4 T <= 1e-12 with |G| = 2 sum(rates) (all jump operators have unit
// spectral norm). States are renormalized in trace only at sample times; a
// renormalization beyond 1e-10 raises IntegrationError.
EvolutionResult evolve(const GeneratorSpec& spec, const DensityMatrix& rho0, double horizon,
                       std::span<const double> sample_times);

Complex expectation(const DensityMatrix& rho, const OperatorMatrix& observable);
// For Hermitian pairs: checks the imaginary part is below 1e-11, discards it.
double real_expectation(const DensityMatrix& rho, const OperatorMatrix& observable);

// Generator restricted to diagonal matrix units: entry (b', b) is the rate of
// config b -> b'. Built from the jump specs' bit action (L <= 16); equals the
// classical ASEP generator of classical_asep.hpp exactly.
RateMatrix diagonal_restriction(const GeneratorSpec& spec);

double generator_norm_estimate(const GeneratorSpec& spec);

}  // namespace qkpz
