#include "qkpz/collision.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <thread>

#include "qkpz/lindblad.hpp"
#include "qkpz/operators.hpp"
#include "qkpz/rng.hpp"

namespace qkpz {
namespace collision {

namespace {

constexpr double kTailRule = 1e-8;
constexpr Eigen::Index kJointCap = 8192;

}  // namespace

double thermal_tail_mass(double alpha, int levels) {
  if (alpha <= 0.0) throw DomainError("thermal_tail_mass: need alpha > 0");
  if (levels < 1) throw ConfigError("thermal_tail_mass: need at least one Fock level");
  return std::pow(alpha / (1.0 + alpha), static_cast<double>(levels));
}

int ancilla_levels_for(double alpha) {
  int levels = 1;
  while (thermal_tail_mass(alpha, levels) >= kTailRule) {
    ++levels;
    if (levels > 4000) throw ConfigError("ancilla_levels_for: truncation runaway");
  }
  return levels;
}

Eigen::VectorXd thermal_ancilla(const AncillaSpec& spec) {
  const double tail = thermal_tail_mass(spec.alpha, spec.levels);
  if (tail >= kTailRule)
    throw ConfigError("thermal_ancilla: truncated tail mass violates the 1e-8 rule");
  const double ratio = spec.alpha / (1.0 + spec.alpha);
  Eigen::VectorXd weights(spec.levels);
  double w = 1.0 / (1.0 + spec.alpha);
  for (int n = 0; n < spec.levels; ++n) {
    weights(n) = w;
    w *= ratio;
  }
  weights /= weights.sum();  // renormalize the truncation deficit away
  return weights;
}

CollisionConfig make_collision_config(const ChainDescriptor& chain, double alpha, double dt,
                                      SweepOrder order, std::optional<int> levels_override) {
  if (dt < 0.0) throw ConfigError("make_collision_config: need dt >= 0");
  if (dt * (chain.length - 1) > 0.5)
    std::fprintf(stderr,
                 "qkpz collision: dt * (L-1) = %.3g exceeds 0.5; the sweep is far from the "
                 "continuous-time regime\n",
                 dt * (chain.length - 1));
  CollisionConfig config;
  config.chain = chain;
  config.alpha = alpha;
  config.dt = dt;
  config.order = order;
  config.ancilla = AncillaSpec{alpha, levels_override ? *levels_override : ancilla_levels_for(alpha)};
  return config;
}

CollisionModel::CollisionModel(CollisionConfig config) : config_(std::move(config)) {
  weights_ = thermal_ancilla(config_.ancilla);
  const int L = config_.chain.length;
  if (config_.order == SweepOrder::even_odd) {
    for (int j = 2; j <= L - 1; j += 2) sweep_.push_back(j);
    for (int j = 1; j <= L - 1; j += 2) sweep_.push_back(j);
  } else {
    for (int j = 1; j <= L - 1; ++j) sweep_.push_back(j);
  }

  const Eigen::Index sys_dim = config_.chain.dim();
  const Eigen::Index levels = config_.ancilla.levels;
  const Eigen::Index joint_dim = sys_dim * levels;
  if (joint_dim > kJointCap)
    throw SizeError("CollisionModel: joint dimension exceeds the desk-scale cap");

  // Exact block exponential: H = sqrt(dt)(hop x a + hop^dag x a^dag) on the
  // (two sites) x ancilla block, then embedded into the full joint space.
  const double root_dt = std::sqrt(config_.dt);
  Matrix block_h = Matrix::Zero(4 * levels, 4 * levels);
  for (Eigen::Index m = 1; m < levels; ++m) {
    const double amp = root_dt * std::sqrt(static_cast<double>(m));
    // hop maps pair 01 (n_j=1, n_{j+1}=0, pair index 1) to pair 10 (index 2).
    block_h(2 + 4 * (m - 1), 1 + 4 * m) += amp;  // hop x a
    block_h(1 + 4 * m, 2 + 4 * (m - 1)) += amp;  // hop^dag x a^dag
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(block_h);
  const Matrix block_u = es.eigenvectors() *
                         (Complex(0.0, -1.0) * es.eigenvalues().array().cast<Complex>())
                             .exp()
                             .matrix()
                             .asDiagonal() *
                         es.eigenvectors().adjoint();

  for (const int edge : sweep_) {
    Matrix u = Matrix::Zero(joint_dim, joint_dim);
    const std::int64_t pair_shift = edge - 1;
    const std::int64_t pair_mask = std::int64_t{3} << pair_shift;
    for (Eigen::Index m = 0; m < levels; ++m) {
      for (std::int64_t sys = 0; sys < sys_dim; ++sys) {
        const std::int64_t rest = sys & ~pair_mask;
        const std::int64_t pair = (sys & pair_mask) >> pair_shift;
        for (Eigen::Index mp = 0; mp < levels; ++mp) {
          for (std::int64_t pair_out = 0; pair_out < 4; ++pair_out) {
            const Complex amp = block_u(pair_out + 4 * mp, pair + 4 * m);
            if (amp == Complex(0.0, 0.0)) continue;
            const std::int64_t sys_out = rest | (pair_out << pair_shift);
            u(sys_out + sys_dim * mp, sys + sys_dim * m) = amp;
          }
        }
      }
    }
    unitaries_.push_back(std::move(u));
  }
}

void CollisionModel::collide_edge(std::size_t edge_index, const Matrix& rho, Matrix& out) const {
  const Eigen::Index sys_dim = config_.chain.dim();
  const Eigen::Index levels = config_.ancilla.levels;
  const Eigen::Index joint_dim = sys_dim * levels;
  Matrix joint = Matrix::Zero(joint_dim, joint_dim);
  for (Eigen::Index m = 0; m < levels; ++m)
    joint.block(sys_dim * m, sys_dim * m, sys_dim, sys_dim) = weights_(m) * rho;
  const Matrix& u = unitaries_[edge_index];
  const Matrix evolved = u * joint * u.adjoint();
  out.setZero();
  for (Eigen::Index m = 0; m < levels; ++m)
    out += evolved.block(sys_dim * m, sys_dim * m, sys_dim, sys_dim);
}

DensityMatrix CollisionModel::step(const DensityMatrix& rho) const {
  Matrix current = rho.mat();
  Matrix next(current.rows(), current.cols());
  for (std::size_t e = 0; e < sweep_.size(); ++e) {
    collide_edge(e, current, next);
    current.swap(next);
  }
  return DensityMatrix(std::move(current), /*validate_now=*/false);
}

DensityMatrix collision_step(const CollisionConfig& config, const DensityMatrix& rho) {
  if (rho.dim() != config.chain.dim()) throw DimensionError("collision_step: dimension mismatch");
  return CollisionModel(config).step(rho);
}

CollisionModel::PureTrajectory CollisionModel::sample_trajectory(const Vector& psi0, double T,
                                                                 std::uint64_t seed) const {
  const Eigen::Index sys_dim = config_.chain.dim();
  if (psi0.size() != sys_dim) throw DimensionError("sample_trajectory: state dimension mismatch");
  if (std::abs(psi0.norm() - 1.0) > 1e-12) throw DomainError("sample_trajectory: psi0 not normalized");
  const double steps_real = T / config_.dt;
  const auto steps = static_cast<std::int64_t>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9)
    throw ConfigError("sample_trajectory: T must be an integer number of steps");

  const Eigen::Index levels = config_.ancilla.levels;
  Rng rng(seed);
  PureTrajectory traj;
  traj.seed = seed;
  traj.times.push_back(0.0);
  traj.states.push_back(psi0);

  Vector psi = psi0;
  Vector joint(sys_dim * levels);
  for (std::int64_t s = 0; s < steps; ++s) {
    for (std::size_t e = 0; e < sweep_.size(); ++e) {
      // Thermal Fock preparation.
      double draw = rng.uniform();
      Eigen::Index prepared = levels - 1;
      for (Eigen::Index m = 0; m < levels; ++m) {
        draw -= weights_(m);
        if (draw < 0.0) { prepared = m; break; }
      }
      joint.noalias() = unitaries_[e].middleCols(sys_dim * prepared, sys_dim) * psi;
      // Number-basis measurement of the ancilla.
      double pick = rng.uniform();
      Eigen::Index outcome = levels - 1;
      for (Eigen::Index m = 0; m < levels; ++m) {
        const double p = joint.segment(sys_dim * m, sys_dim).squaredNorm();
        pick -= p;
        if (pick < 0.0) { outcome = m; break; }
      }
      psi = joint.segment(sys_dim * outcome, sys_dim);
      psi /= psi.norm();
    }
    traj.times.push_back(static_cast<double>(s + 1) * config_.dt);
    traj.states.push_back(psi);
  }
  return traj;
}

Vector coherent_probe_state(const ChainDescriptor& chain) {
  Vector psi = Vector::Zero(chain.dim());
  psi(0) = 1.0;
  for (int j = 1; j <= chain.length; ++j) {
    // Tensor in (|0> + e^{i 0.7 j} |1>)/sqrt(2) at site j (LSB-first layout).
    const Eigen::Index block = Eigen::Index{1} << (j - 1);
    const Complex phase = std::exp(Complex(0.0, 0.7 * j)) / std::sqrt(2.0);
    for (Eigen::Index b = 0; b < block; ++b) {
      psi(b + block) = psi(b) * phase;
      psi(b) /= std::sqrt(2.0);
    }
  }
  return psi;
}

std::vector<ConvergenceRow> convergence_study(int L, double alpha, double T,
                                              std::span<const double> dts,
                                              std::optional<int> levels_override) {
  if (dts.empty()) throw ConfigError("convergence_study: need at least one dt");
  for (std::size_t i = 1; i < dts.size(); ++i)
    if (dts[i] >= dts[i - 1]) throw ConfigError("convergence_study: dts must decrease");

  const ChainDescriptor chain = build_chain(L);
  const Vector psi = coherent_probe_state(chain);
  const DensityMatrix rho0(Matrix(psi * psi.adjoint()));

  std::vector<OperatorMatrix> observables;
  for (int k = 1; k <= L; ++k) observables.push_back(number_op(chain, k));
  for (int k = 1; k <= L; ++k) observables.push_back(height_op(chain, k));
  if (alpha > 0.0)
    for (int k = 1; k <= L; ++k) observables.push_back(cole_hopf_op(chain, k, alpha));

  const GeneratorSpec spec = make_generator_spec(chain, alpha);
  const EvolutionResult oracle = evolve(spec, rho0, T, std::vector<double>{T});
  std::vector<double> reference;
  for (const auto& obs : observables)
    reference.push_back(real_expectation(oracle.states.front(), obs));

  std::vector<ConvergenceRow> rows;
  for (const double dt : dts) {
    const double steps_real = T / dt;
    const auto steps = static_cast<std::int64_t>(std::llround(steps_real));
    if (std::abs(steps_real - static_cast<double>(steps)) > 1e-9)
      throw ConfigError("convergence_study: T/dt must be integral");
    const CollisionModel model(
        make_collision_config(chain, alpha, dt, SweepOrder::even_odd, levels_override));
    DensityMatrix rho = rho0;
    for (std::int64_t s = 0; s < steps; ++s) rho = model.step(rho);
    double error = 0.0;
    for (std::size_t i = 0; i < observables.size(); ++i)
      error = std::max(error, std::abs(real_expectation(rho, observables[i]) - reference[i]));
    ConvergenceRow row;
    row.dt = dt;
    row.error = error;
    row.ratio = rows.empty() ? 0.0 : rows.back().error / error;
    rows.push_back(row);
  }
  return rows;
}

EnsembleEstimate trajectory_ensemble_mean(const CollisionModel& model, const Vector& psi0,
                                          double T, const OperatorMatrix& observable,
                                          std::span<const std::uint64_t> seeds, int threads) {
  const int count = static_cast<int>(seeds.size());
  if (count < 1) throw ConfigError("trajectory_ensemble_mean: need at least one trajectory");
  std::vector<double> values(static_cast<std::size_t>(count));
  auto run_range = [&](int first, int last) {
    for (int i = first; i < last; ++i) {
      const auto traj = model.sample_trajectory(psi0, T, seeds[static_cast<std::size_t>(i)]);
      const Vector& psi = traj.states.back();
      values[static_cast<std::size_t>(i)] = (psi.adjoint() * observable.mat() * psi)(0).real();
    }
  };
  const int workers = std::max(1, threads);
  if (workers == 1) {
    run_range(0, count);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int first = w * chunk;
      const int last = std::min(count, first + chunk);
      if (first < last) pool.emplace_back(run_range, first, last);
    }
    for (auto& th : pool) th.join();
  }
  double sum = 0.0, sum_sq = 0.0;
  for (const double v : values) {
    sum += v;
    sum_sq += v * v;
  }
  EnsembleEstimate est;
  est.count = count;
  est.mean = sum / static_cast<double>(count);
  const double var =
      (sum_sq - static_cast<double>(count) * est.mean * est.mean) / static_cast<double>(count - 1);
  est.stderr_mean = std::sqrt(std::max(var, 0.0) / static_cast<double>(count));
  return est;
}

}  // namespace collision
}  // namespace qkpz
