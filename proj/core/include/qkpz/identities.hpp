#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qkpz/chain.hpp"
#include "qkpz/operator_matrix.hpp"

namespace qkpz {

// Machine verification of the lattice operator identities: each check builds
// the left-hand side mechanically (Ito engine / generator) and the right-hand
// side directly from the operator algebra, then reports the worst Frobenius
// residual over the interior range it declares. Checks are pure functions.
//
// The optional reference_alpha evaluates the reference side at a different
// alpha; it exists as a sensitivity control (a 1% perturbation must push every
// alpha-dependent residual far above threshold).

struct IdentityReport {
  std::string name;
  int chain_length = 0;
  double alpha = 0.0;
  int range_first = 0;  // first/last site or edge checked
  int range_last = 0;
  double residual = 0.0;  // max Frobenius residual over the range
  double threshold = 1e-10;
  bool pass = false;
  std::vector<std::pair<std::string, double>> components;  // labelled sub-residuals
};

// Dual Lindbladian on the number operator (interior sites 2..L-1).
IdentityReport check_number_identity(int L, double alpha,
                                     std::optional<double> reference_alpha = std::nullopt);

// Local continuity: drift of n_k against j_k - j_{k-1}, noise against
// dB^k - dB^{k-1} (interior k = 2..L-1).
IdentityReport check_continuity(int L, double alpha,
                                std::optional<double> reference_alpha = std::nullopt);

// Discrete KPZ form of the height drift and the height-dependent noise
// correlator (interior k = 2..L-2, correlator over all interior pairs).
IdentityReport check_height_kpz(int L, double alpha,
                                std::optional<double> reference_alpha = std::nullopt);

// Cole-Hopf evolution at a general delta (nonlinear form), at delta* the
// linear heat form with drift absorption, and the decorated-noise factor.
IdentityReport check_cole_hopf(int L, double alpha, double delta,
                               std::optional<double> reference_alpha = std::nullopt);

// Z^{1/2} dB Z^{1/2} = Z dB^(+) = dB^(-) Z (checked at t = 0).
IdentityReport check_noise_rearrangement(int L, double alpha,
                                         std::optional<double> reference_alpha = std::nullopt);

// Discrete viscous Burgers equation for the centered density.
IdentityReport check_burgers(int L, double alpha,
                             std::optional<double> reference_alpha = std::nullopt);

// Two-replica closure: generator on Z_{k1} Z_{k2} against the two-index
// lattice Laplacian plus the contact potential (requires interior k1, k2).
IdentityReport check_replica(int L, double alpha, int k1, int k2,
                             std::optional<double> reference_alpha = std::nullopt);

// Flow-expansion re-derivation: drift(heisenberg_increment(O)) against
// adjoint_generator_apply(O) over `samples` pseudo-random Hermitian O.
IdentityReport check_generator_equivalence(int L, double alpha, int samples,
                                           std::uint64_t seed, double threshold = 1e-11);

// Uniform pointer-ensemble average of <dB_k^2>/dt per alpha; the exact value
// on the uniform ensemble is alpha/2 + 1/4, so the ratio to alpha/2 tends to
// 1 as alpha grows (the almost-commuting noise regime).
struct ContinuumProbeRow {
  double alpha = 0.0;
  double average = 0.0;         // ensemble average of <dB_k^2>/dt
  double ratio = 0.0;           // average / (alpha/2)
  double expected_ratio = 0.0;  // 1 + 1/(2 alpha)
};
std::vector<ContinuumProbeRow> continuum_noise_probe(int L, std::span<const double> alphas);

// The 7 equation checks plus generator equivalence, in manifest order.
std::vector<IdentityReport> run_identity_suite(int L, double alpha, std::uint64_t seed = 12345,
                                               int equivalence_samples = 10);

}  // namespace qkpz
