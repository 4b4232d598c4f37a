#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qkpz/chain.hpp"
#include "qkpz/rate_matrix.hpp"

namespace qkpz {
namespace classical {

// Classical exclusion process matching the quantum model's mean dynamics on
// pointer states: hop toward lower site index at rate (1+alpha) (the favored
// direction in this convention), reverse at rate alpha. The periodic variant
// exists only here; heights are tracked as integrated bond currents.

enum class Boundary { closed, periodic };

struct HopRates {
  double toward_lower = 0.0;   // favored direction
  double toward_higher = 0.0;  // reverse
};

inline HopRates asep_rates(double alpha) { return HopRates{1.0 + alpha, alpha}; }
inline HopRates symmetric_rates(double rate = 1.0) { return HopRates{rate, rate}; }

// Exact-sector state (L <= 16): bridges site-occupation profiles and the
// basis indexing of RateMatrix / master_evolve.
struct ClassicalState {
  int length = 0;
  std::uint32_t bits = 0;  // bit (j-1) = occupation of site j
  Boundary boundary = Boundary::closed;

  static ClassicalState from_profile(std::span<const std::uint8_t> occupations, Boundary boundary);
  std::vector<std::uint8_t> profile() const;
  std::int64_t index() const { return bits; }
  // Delta distribution on this configuration.
  std::vector<double> point_distribution() const;
};

// Markov generator on the 2^L configuration space (L <= 16). Column b holds
// the outflow of config b; columns sum to zero. Insertion order is edge
// ascending, favored hop then reverse, matching diagonal_restriction exactly.
RateMatrix classical_generator(int L, double alpha, Boundary boundary);
RateMatrix classical_generator(int L, HopRates rates, Boundary boundary);

// p(T) = e^{T G} p0 via uniformization (exact to the Poisson-tail truncation
// 1e-14; preserves positivity and normalization).
std::vector<double> master_evolve(const RateMatrix& generator, std::vector<double> p0, double T);

// Continuous-time kinetic Monte Carlo (rejection-free event lists, O(1) per
// hop). Deterministic per seed. `heights` holds the integrated current
// through the marked bond (favored hops count +1, reverse hops -1) at each
// sample time; `states` is recorded only when requested.
struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<double> times;
  std::vector<double> heights;
  std::vector<std::vector<std::uint8_t>> states;  // optional site occupations
};

struct GillespieOptions {
  int marked_bond = 0;          // default: central bond
  bool record_states = false;
};

Trajectory gillespie_sample(int L, HopRates rates, std::span<const std::uint8_t> init, double T,
                            std::uint64_t seed, Boundary boundary,
                            std::span<const double> sample_times, GillespieOptions options = {});

// Initial profiles for large lattices.
std::vector<std::uint8_t> step_profile(int L);
std::vector<std::uint8_t> alternating_profile(int L);
std::vector<std::uint8_t> bernoulli_half_profile(int L, std::uint64_t seed);

// Ensemble of trajectories sharing parameters and sample times.
struct ClassicalEnsemble {
  int length = 0;
  HopRates rates;
  Boundary boundary = Boundary::closed;
  std::vector<double> times;
  std::vector<Trajectory> trajectories;  // distinct seeds
};

// One trajectory per seed (seeds must be distinct); deterministic regardless
// of thread count. With bernoulli_init each trajectory draws its own
// density-1/2 initial profile from its seed, otherwise the step profile.
ClassicalEnsemble run_ensemble(int L, HopRates rates, Boundary boundary, double T,
                               std::span<const double> sample_times,
                               std::span<const std::uint64_t> seeds, int threads,
                               bool bernoulli_init);

struct GrowthStats {
  std::vector<double> times;
  std::vector<double> mean_height;
  std::vector<double> var_height;
  int n_samples = 0;
  double beta = 0.0;         // fitted growth exponent (var ~ t^{2 beta})
  double beta_stderr = 0.0;
  double fit_t_min = 0.0;
  double fit_t_max = 0.0;
};

// Ensemble variance of the height with a log-log least-squares fit of the
// variance over the window; beta = slope / 2.
GrowthStats height_growth_stats(const ClassicalEnsemble& ensemble, double fit_t_min,
                                double fit_t_max);

}  // namespace classical
}  // namespace qkpz
