#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qkpz/chain.hpp"

namespace qkpz {

// Modified Bessel functions of the first kind, self-contained: power series
// for small arguments, normalized downward (Miller) recurrence otherwise.
// Domain: |n| <= 200, 0 <= x <= 700; relative accuracy 1e-12.

struct BesselEval {
  enum class Method { series, downward_recurrence };
  int order = 0;
  double argument = 0.0;
  double value = 0.0;
  Method method = Method::series;
};

BesselEval bessel_eval(int order, double argument);
double bessel_i(int order, double argument);
// e^{-x} I_n(x): the lattice heat kernel weight, stable for large x.
double bessel_i_scaled(int order, double argument);

// Averaged Cole-Hopf propagator: value_k(t) = sum_l K_{k-l}(t) z0(l) with
// K_n(t) = I_n(2 t nu) e^{-2 t nu}, nu = sqrt(alpha(alpha+1)); z0 given on
// sites 1..L and continued outside by its boundary values. The sum is
// truncated where the kernel tail falls below 1e-14; the bound returned is
// (tail mass) * max|z0|.
struct PropagatorResult {
  double value = 0.0;
  double truncation_bound = 0.0;
  int radius = 0;
};
PropagatorResult bessel_propagator(double alpha, double t, int k, std::span<const double> z0);

// Cross-check of the propagator against direct evolution of a pointer state.
// Rows with the light-cone margin violated (2 t nu + 5 >= distance from k to
// the nearest boundary) are flagged, not asserted: the finite chain no longer
// emulates the infinite lattice there.
struct BesselComparisonRow {
  double t = 0.0;
  double margin = 0.0;         // boundary distance minus light-cone radius (+5 safety)
  bool light_cone_ok = false;
  double bessel_value = 0.0;
  double truncation_bound = 0.0;
  double classical_value = 0.0;   // master-equation evolution of e^{delta h_k}
  double abs_diff = 0.0;
  std::optional<double> quantum_value;          // full Lindblad path (L <= 9)
  std::optional<double> quantum_classical_diff;
};

std::vector<BesselComparisonRow> bessel_vs_evolution(int L, double alpha,
                                                     const OccupationConfig& init, int k,
                                                     std::span<const double> times,
                                                     bool quantum_path = false);

}  // namespace qkpz
