#include "qkpz/classical_asep.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "qkpz/rng.hpp"

namespace qkpz {
namespace classical {

namespace {

void require_small(int L, const char* who) {
  if (L < 2) throw SizeError(std::string(who) + ": need L >= 2");
  if (L > 16) throw SizeError(std::string(who) + ": exact configuration space capped at L = 16");
}

void require_rates(HopRates rates) {
  if (rates.toward_lower < 0.0 || rates.toward_higher < 0.0)
    throw DomainError("classical rates must be non-negative");
}

}  // namespace

ClassicalState ClassicalState::from_profile(std::span<const std::uint8_t> occupations,
                                            Boundary boundary) {
  const int L = static_cast<int>(occupations.size());
  require_small(L, "ClassicalState::from_profile");
  ClassicalState state{L, 0, boundary};
  for (int j = 0; j < L; ++j)
    if (occupations[static_cast<std::size_t>(j)]) state.bits |= 1u << j;
  return state;
}

std::vector<std::uint8_t> ClassicalState::profile() const {
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(length), 0);
  for (int j = 0; j < length; ++j) occ[static_cast<std::size_t>(j)] = (bits >> j) & 1u;
  return occ;
}

std::vector<double> ClassicalState::point_distribution() const {
  std::vector<double> p(std::size_t{1} << length, 0.0);
  p[bits] = 1.0;
  return p;
}

RateMatrix classical_generator(int L, double alpha, Boundary boundary) {
  if (alpha < 0.0) throw DomainError("classical_generator: need alpha >= 0");
  return classical_generator(L, asep_rates(alpha), boundary);
}

RateMatrix classical_generator(int L, HopRates rates, Boundary boundary) {
  require_small(L, "classical_generator");
  require_rates(rates);
  const std::int64_t dim = std::int64_t{1} << L;
  const int bonds = (boundary == Boundary::closed) ? L - 1 : L;
  RateMatrix generator(dim);
  for (std::int64_t b = 0; b < dim; ++b) {
    const auto bits = static_cast<std::uint32_t>(b);
    for (int edge = 1; edge <= bonds; ++edge) {
      const int lo = edge;                       // site index
      const int hi = (edge == L) ? 1 : edge + 1; // wraps only when periodic
      const bool nlo = (bits >> (lo - 1)) & 1u;
      const bool nhi = (bits >> (hi - 1)) & 1u;
      const std::uint32_t mask = (1u << (lo - 1)) | (1u << (hi - 1));
      if (!nlo && nhi) generator.add_rate(b, b ^ mask, rates.toward_lower);
      if (nlo && !nhi) generator.add_rate(b, b ^ mask, rates.toward_higher);
    }
  }
  return generator;
}

std::vector<double> master_evolve(const RateMatrix& generator, std::vector<double> p0, double T) {
  if (static_cast<std::int64_t>(p0.size()) != generator.dim())
    throw DimensionError("master_evolve: distribution size mismatch");
  double sum = 0.0;
  for (double p : p0) {
    if (p < -1e-12) throw DomainError("master_evolve: negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("master_evolve: distribution must sum to 1");
  if (T < 0.0) throw DomainError("master_evolve: need T >= 0");
  if (T == 0.0) return p0;

  // Uniformization: e^{TG} = e^{-lambda T} sum_k (lambda T)^k / k! M^k with
  // M = I + G/lambda column-stochastic; truncated at Poisson tail < 1e-14.
  const double lambda = generator.max_exit_rate();
  if (lambda == 0.0) return p0;
  const double lt = lambda * T;
  const std::size_t n = p0.size();
  std::vector<double> term = p0, next(n), result(n, 0.0);
  double log_weight = -lt;  // log of e^{-lt} (lt)^k / k! at k = 0
  double tail = 1.0;
  for (int k = 0;; ++k) {
    const double weight = std::exp(log_weight);
    for (std::size_t i = 0; i < n; ++i) result[i] += weight * term[i];
    tail -= weight;
    if (tail < 1e-14 && k >= static_cast<int>(lt)) break;
    if (k > 2000000) throw IntegrationError("master_evolve: uniformization failed to converge");
    generator.apply(term, next);
    for (std::size_t i = 0; i < n; ++i) term[i] += next[i] / lambda;  // M term
    log_weight += std::log(lt) - std::log(static_cast<double>(k + 1));
  }
  return result;
}

std::vector<std::uint8_t> step_profile(int L) {
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(L), 0);
  for (int j = 0; j < (L + 1) / 2; ++j) occ[static_cast<std::size_t>(j)] = 1;
  return occ;
}

std::vector<std::uint8_t> alternating_profile(int L) {
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(L), 0);
  for (int j = 0; j < L; j += 2) occ[static_cast<std::size_t>(j)] = 1;
  return occ;
}

std::vector<std::uint8_t> bernoulli_half_profile(int L, std::uint64_t seed) {
  Rng rng(derive_stream_seed(seed, 0x1717));
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(L), 0);
  for (auto& site : occ) site = rng.bernoulli(0.5) ? 1 : 0;
  return occ;
}

namespace {

// Membership lists with O(1) insert/remove for the rejection-free event loop.
class BondList {
 public:
  explicit BondList(int bonds) : position_(static_cast<std::size_t>(bonds), -1) {}

  void insert(int bond) {
    if (position_[static_cast<std::size_t>(bond)] >= 0) return;
    position_[static_cast<std::size_t>(bond)] = static_cast<int>(members_.size());
    members_.push_back(bond);
  }
  void remove(int bond) {
    const int pos = position_[static_cast<std::size_t>(bond)];
    if (pos < 0) return;
    const int last = members_.back();
    members_[static_cast<std::size_t>(pos)] = last;
    position_[static_cast<std::size_t>(last)] = pos;
    members_.pop_back();
    position_[static_cast<std::size_t>(bond)] = -1;
  }
  std::size_t size() const { return members_.size(); }
  int at(std::size_t index) const { return members_[index]; }

 private:
  std::vector<int> members_;
  std::vector<int> position_;
};

}  // namespace

Trajectory gillespie_sample(int L, HopRates rates, std::span<const std::uint8_t> init, double T,
                            std::uint64_t seed, Boundary boundary,
                            std::span<const double> sample_times, GillespieOptions options) {
  if (L < 2) throw SizeError("gillespie_sample: need L >= 2");
  require_rates(rates);
  if (static_cast<int>(init.size()) != L) throw ConfigError("gillespie_sample: init length mismatch");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < 0.0 || sample_times[i] > T)
      throw RangeError("gillespie_sample: sample time outside [0, T]");
    if (i > 0 && sample_times[i] <= sample_times[i - 1])
      throw RangeError("gillespie_sample: sample times must increase");
  }

  const int bonds = (boundary == Boundary::closed) ? L - 1 : L;
  const int marked = (options.marked_bond >= 1 && options.marked_bond <= bonds)
                         ? options.marked_bond
                         : std::max(1, bonds / 2);

  std::vector<std::uint8_t> occ(init.begin(), init.end());
  // bond j couples site j with site j+1 (site 1 when j == L on the ring);
  // internally bonds are 0-based.
  auto left_site = [&](int bond) { return bond; };
  auto right_site = [&](int bond) { return (bond + 1 == L) ? 0 : bond + 1; };

  BondList favored(bonds), reverse(bonds);
  auto classify = [&](int bond) {
    const std::uint8_t lo = occ[static_cast<std::size_t>(left_site(bond))];
    const std::uint8_t hi = occ[static_cast<std::size_t>(right_site(bond))];
    if (!lo && hi)
      favored.insert(bond);
    else
      favored.remove(bond);
    if (lo && !hi)
      reverse.insert(bond);
    else
      reverse.remove(bond);
  };
  for (int bond = 0; bond < bonds; ++bond) classify(bond);

  Trajectory traj;
  traj.seed = seed;
  Rng rng(seed);
  double t = 0.0;
  double height = 0.0;
  std::size_t next_sample = 0;

  // Samples strictly before the next event see the current state (the height
  // process is right-continuous at event times).
  auto record_before = [&](double event_time) {
    while (next_sample < sample_times.size() && sample_times[next_sample] < event_time) {
      traj.times.push_back(sample_times[next_sample]);
      traj.heights.push_back(height);
      if (options.record_states) traj.states.push_back(occ);
      ++next_sample;
    }
  };
  auto flush_samples = [&] {
    while (next_sample < sample_times.size()) {
      traj.times.push_back(sample_times[next_sample]);
      traj.heights.push_back(height);
      if (options.record_states) traj.states.push_back(occ);
      ++next_sample;
    }
  };

  auto reclassify_around = [&](int bond) {
    classify(bond);
    if (boundary == Boundary::periodic) {
      classify((bond + 1) % bonds);
      classify((bond + bonds - 1) % bonds);
    } else {
      if (bond + 1 < bonds) classify(bond + 1);
      if (bond - 1 >= 0) classify(bond - 1);
    }
  };

  while (true) {
    const double total_rate = rates.toward_lower * static_cast<double>(favored.size()) +
                              rates.toward_higher * static_cast<double>(reverse.size());
    if (total_rate <= 0.0) break;  // frozen configuration
    const double dt = rng.exponential(total_rate);
    if (t + dt > T) break;
    record_before(t + dt);
    t += dt;

    const double pick = rng.uniform() * total_rate;
    const bool is_favored = pick < rates.toward_lower * static_cast<double>(favored.size());
    const BondList& pool = is_favored ? favored : reverse;
    const int bond = pool.at(static_cast<std::size_t>(rng.below(pool.size())));

    const int lo = left_site(bond), hi = right_site(bond);
    std::swap(occ[static_cast<std::size_t>(lo)], occ[static_cast<std::size_t>(hi)]);
    if (bond == marked - 1) height += is_favored ? 1.0 : -1.0;
    reclassify_around(bond);
  }
  flush_samples();
  return traj;
}

ClassicalEnsemble run_ensemble(int L, HopRates rates, Boundary boundary, double T,
                               std::span<const double> sample_times,
                               std::span<const std::uint64_t> seeds, int threads,
                               bool bernoulli_init) {
  const int seed_count = static_cast<int>(seeds.size());
  if (seed_count < 1) throw ConfigError("run_ensemble: need at least one seed");
  for (std::size_t i = 0; i < seeds.size(); ++i)
    for (std::size_t j = i + 1; j < seeds.size(); ++j)
      if (seeds[i] == seeds[j]) throw ConfigError("run_ensemble: seeds must be distinct");

  ClassicalEnsemble ensemble;
  ensemble.length = L;
  ensemble.rates = rates;
  ensemble.boundary = boundary;
  ensemble.times.assign(sample_times.begin(), sample_times.end());
  ensemble.trajectories.resize(static_cast<std::size_t>(seed_count));

  auto run_range = [&](int first, int last) {
    for (int i = first; i < last; ++i) {
      const std::uint64_t seed = seeds[static_cast<std::size_t>(i)];
      const std::vector<std::uint8_t> init =
          bernoulli_init ? bernoulli_half_profile(L, seed) : step_profile(L);
      ensemble.trajectories[static_cast<std::size_t>(i)] =
          gillespie_sample(L, rates, init, T, seed, boundary, sample_times);
    }
  };

  const int workers = std::max(1, threads);
  if (workers == 1) {
    run_range(0, seed_count);
  } else {
    std::vector<std::thread> pool;
    const int chunk = (seed_count + workers - 1) / workers;
    for (int w = 0; w < workers; ++w) {
      const int first = w * chunk;
      const int last = std::min(seed_count, first + chunk);
      if (first < last) pool.emplace_back(run_range, first, last);
    }
    for (auto& th : pool) th.join();
  }
  return ensemble;
}

GrowthStats height_growth_stats(const ClassicalEnsemble& ensemble, double fit_t_min,
                                double fit_t_max) {
  const std::size_t n_traj = ensemble.trajectories.size();
  const std::size_t n_times = ensemble.times.size();
  if (n_traj < 2) throw ConfigError("height_growth_stats: need at least two trajectories");
  for (const auto& traj : ensemble.trajectories)
    if (traj.heights.size() != n_times)
      throw DimensionError("height_growth_stats: trajectory sample count mismatch");

  GrowthStats stats;
  stats.times = ensemble.times;
  stats.n_samples = static_cast<int>(n_traj);
  stats.fit_t_min = fit_t_min;
  stats.fit_t_max = fit_t_max;
  stats.mean_height.resize(n_times);
  stats.var_height.resize(n_times);
  for (std::size_t ti = 0; ti < n_times; ++ti) {
    double sum = 0.0, sum_sq = 0.0;
    for (const auto& traj : ensemble.trajectories) {
      const double h = traj.heights[ti];
      sum += h;
      sum_sq += h * h;
    }
    const double mean = sum / static_cast<double>(n_traj);
    stats.mean_height[ti] = mean;
    stats.var_height[ti] =
        (sum_sq - static_cast<double>(n_traj) * mean * mean) / static_cast<double>(n_traj - 1);
  }

  // Log-log least squares on the window; var ~ t^{2 beta}.
  std::vector<double> xs, ys;
  for (std::size_t ti = 0; ti < n_times; ++ti) {
    const double t = ensemble.times[ti];
    if (t < fit_t_min || t > fit_t_max) continue;
    if (stats.var_height[ti] <= 0.0 || t <= 0.0) continue;
    xs.push_back(std::log(t));
    ys.push_back(std::log(stats.var_height[ti]));
  }
  if (xs.size() < 3) throw RangeError("height_growth_stats: fit window has fewer than 3 points");
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double fit = my + slope * (xs[i] - mx);
    ss_res += (ys[i] - fit) * (ys[i] - fit);
  }
  const double slope_var = (xs.size() > 2) ? ss_res / (n - 2.0) / sxx : 0.0;
  stats.beta = slope / 2.0;
  stats.beta_stderr = std::sqrt(std::max(slope_var, 0.0)) / 2.0;
  return stats;
}

}  // namespace classical
}  // namespace qkpz
