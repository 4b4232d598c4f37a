#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "qkpz/chain.hpp"
#include "qkpz/operator_matrix.hpp"

namespace qkpz {
namespace collision {

// Repeated-interaction discretization of the quantum noise: each step couples
// every edge to a fresh truncated thermal bosonic ancilla through the exact
// unitary U_j = exp(-i sqrt(dt) (c_{j+1}^dag c_j x a + c_j^dag c_{j+1} x a^dag)),
// tracing the ancilla out after each collision. The channel converges to the
// Lindblad flow at first order in dt.

struct AncillaSpec {
  double alpha = 0.0;  // mean occupation of the bath mode
  int levels = 0;      // Fock truncation d_b (levels 0..d_b-1)
};

// Tail mass (alpha/(1+alpha))^levels of the truncated Bose-Einstein weights.
double thermal_tail_mass(double alpha, int levels);
// Smallest truncation satisfying the tail rule (< 1e-8).
int ancilla_levels_for(double alpha);

// Renormalized thermal weights p_n ~ alpha^n/(1+alpha)^{n+1}; ConfigError if
// the truncation violates the tail rule.
Eigen::VectorXd thermal_ancilla(const AncillaSpec& spec);

enum class SweepOrder { even_odd, sequential };

struct CollisionConfig {
  ChainDescriptor chain;
  double alpha = 0.0;
  double dt = 0.0;
  SweepOrder order = SweepOrder::even_odd;
  AncillaSpec ancilla;
};

CollisionConfig make_collision_config(const ChainDescriptor& chain, double alpha, double dt,
                                      SweepOrder order = SweepOrder::even_odd,
                                      std::optional<int> levels_override = std::nullopt);

// Precomputes the per-edge joint unitaries (exact eigendecomposition of the
// edge x ancilla block) for a fixed (chain, dt, truncation).
class CollisionModel {
 public:
  explicit CollisionModel(CollisionConfig config);

  const CollisionConfig& config() const { return config_; }

  // One full sweep (CPTP map) over the edges in the configured order.
  DensityMatrix step(const DensityMatrix& rho) const;

  // Measurement unraveling: the ancilla is prepared in a Fock state sampled
  // from the thermal weights and measured in the number basis after the
  // collision. The seed fully determines the trajectory.
  struct PureTrajectory {
    std::uint64_t seed = 0;
    std::vector<double> times;
    std::vector<Vector> states;  // normalized pure states, one per step
  };
  PureTrajectory sample_trajectory(const Vector& psi0, double T, std::uint64_t seed) const;

 private:
  void collide_edge(std::size_t edge_index, const Matrix& rho, Matrix& out) const;

  CollisionConfig config_;
  Eigen::VectorXd weights_;          // thermal ancilla weights
  std::vector<int> sweep_;           // edge visit order
  std::vector<Matrix> unitaries_;    // per edge, dim (2^L * d_b)
};

DensityMatrix collision_step(const CollisionConfig& config, const DensityMatrix& rho);

struct ConvergenceRow {
  double dt = 0.0;
  double error = 0.0;  // max observable deviation from the Lindblad flow at T
  double ratio = 0.0;  // error(previous dt) / error(this dt); 0 for the first row
};

// Errors against the Lindblad oracle over {n_k, h_k, Z_k} expectations from a
// coherent product probe state.
std::vector<ConvergenceRow> convergence_study(int L, double alpha, double T,
                                              std::span<const double> dts,
                                              std::optional<int> levels_override = std::nullopt);

// Probe state used by the convergence study: (|0> + e^{i 0.7 j} |1>)/sqrt(2)
// per site j (carries off-diagonal coherences).
Vector coherent_probe_state(const ChainDescriptor& chain);

// Ensemble mean of <psi_T| O |psi_T> over one trajectory per seed;
// deterministic regardless of thread count.
struct EnsembleEstimate {
  double mean = 0.0;
  double stderr_mean = 0.0;
  int count = 0;
};
EnsembleEstimate trajectory_ensemble_mean(const CollisionModel& model, const Vector& psi0,
                                          double T, const OperatorMatrix& observable,
                                          std::span<const std::uint64_t> seeds, int threads);

}  // namespace collision
}  // namespace qkpz
