#include "qkpz/harness.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "csv_writer.hpp"
#include "qkpz/bessel.hpp"
#include "qkpz/classical_asep.hpp"
#include "qkpz/collision.hpp"
#include "qkpz/identities.hpp"
#include "qkpz/lindblad.hpp"
#include "qkpz/operators.hpp"
#include "qkpz/rng.hpp"
#include "qkpz/version.hpp"

namespace qkpz {
namespace harness {

namespace fs = std::filesystem;
using nlohmann::json;
using detail::CsvWriter;

namespace {

struct ExperimentSchema {
  std::vector<std::string> allowed_keys;
  std::map<std::string, double> tolerance_defaults;
};

const ExperimentSchema& schema_for(Experiment experiment) {
  static const std::map<Experiment, ExperimentSchema> schemas = {
      {Experiment::verify,
       {{"experiment", "chain_length", "alpha", "seeds", "output_path", "tolerances"},
        {{"residual", 1e-10}, {"generator_equivalence", 1e-11}}}},
      {Experiment::bessel,
       {{"experiment", "chain_length", "alpha", "time_horizon", "init", "site", "output_path",
         "tolerances"},
        {{"bessel", 1e-6}, {"quantum_classical", 1e-9}}}},
      {Experiment::collision_converge,
       {{"experiment", "chain_length", "alpha", "time_horizon", "dts", "ancilla_levels",
         "output_path", "tolerances"},
        {{"ratio_low", 1.7}, {"ratio_high", 2.3}}}},
      {Experiment::classical_compare,
       {{"experiment", "chain_length", "alpha", "time_horizon", "init", "seeds", "output_path",
         "tolerances"},
        {{"sigma", 4.0}, {"quantum_diag", 1e-9}, {"offdiag", 1e-10}}}},
      {Experiment::growth_exponent,
       {{"experiment", "chain_length", "alpha", "symmetric_rates", "time_horizon", "seeds",
         "fit_t_min", "fit_t_max", "sample_points", "output_path", "tolerances"},
        {}}},
      {Experiment::continuum_probe,
       {{"experiment", "chain_length", "alphas", "output_path", "tolerances"},
        {{"exact", 1e-12}}}},
      {Experiment::trajectory,
       {{"experiment", "chain_length", "alpha", "time_horizon", "dt", "ancilla_levels", "seeds",
         "output_path", "tolerances"},
        {{"sigma", 4.0}}}},
  };
  return schemas.at(experiment);
}

std::string iso_timestamp() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

double tol(const RunConfig& config, const std::string& name) {
  const auto it = config.tolerances.find(name);
  if (it == config.tolerances.end())
    throw ConfigError("missing tolerance '" + name + "'");
  return it->second;
}

CheckResult make_check(std::string name, double value, double threshold, bool pass,
                       std::string detail = "") {
  return CheckResult{std::move(name), pass, value, threshold, std::move(detail)};
}

// Short numeric form for check names and human-facing details.
std::string short_num(double value) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", value);
  return buf;
}

OccupationConfig init_config_for(const RunConfig& config) {
  if (config.init.empty() || config.init == "alternating")
    return alternating_config(config.chain_length);
  if (config.init == "step") return step_config(config.chain_length);
  const OccupationConfig parsed = OccupationConfig::from_string(config.init);
  if (parsed.length != config.chain_length)
    throw ConfigError("config.init: pattern length does not match chain_length");
  return parsed;
}

// ---------------------------------------------------------------------------
// Experiment bodies. Each fills manifest.checks and writes CSV artifacts.
// ---------------------------------------------------------------------------

void run_verify(const RunConfig& config, const fs::path& out_dir, RunManifest& manifest) {
  const double residual_tol = tol(config, "residual");
  const double equivalence_tol = tol(config, "generator_equivalence");
  auto reports = run_identity_suite(config.chain_length, config.alpha, config.seeds.base,
                                    config.seeds.effective_count());
  CsvWriter csv(out_dir / "verify.csv", "verify v1",
                {"name", "chain_length", "alpha", "range_first", "range_last", "residual",
                 "threshold", "pass"});
  for (auto& rep : reports) {
    rep.threshold = (rep.name == "generator-equivalence") ? equivalence_tol : residual_tol;
    rep.pass = rep.residual < rep.threshold;
    csv.write_row({rep.name, CsvWriter::num(rep.chain_length), CsvWriter::num(rep.alpha),
                   CsvWriter::num(rep.range_first), CsvWriter::num(rep.range_last),
                   CsvWriter::num(rep.residual), CsvWriter::num(rep.threshold),
                   rep.pass ? "true" : "false"});
    manifest.checks.push_back(make_check(rep.name, rep.residual, rep.threshold, rep.pass));
  }
  manifest.artifacts.push_back("verify.csv");
}

void run_bessel(const RunConfig& config, const fs::path& out_dir, RunManifest& manifest) {
  const double bessel_tol = tol(config, "bessel");
  const double quantum_tol = tol(config, "quantum_classical");
  const int L = config.chain_length;
  const int k = (config.site >= 1) ? config.site : (L + 1) / 2;
  const OccupationConfig init = init_config_for(config);
  const double T = config.time_horizon;
  const std::vector<double> times{T / 5.0, 3.0 * T / 5.0, T};
  const bool quantum_path = L <= 9;

  const auto rows = bessel_vs_evolution(L, config.alpha, init, k, times, quantum_path);
  CsvWriter csv(out_dir / "bessel.csv", "bessel v1",
                {"t", "margin", "light_cone_ok", "bessel_value", "truncation_bound",
                 "classical_value", "abs_diff", "quantum_value", "quantum_classical_diff"});
  for (const auto& row : rows) {
    csv.write_row({CsvWriter::num(row.t), CsvWriter::num(row.margin),
                   row.light_cone_ok ? "true" : "false", CsvWriter::num(row.bessel_value),
                   CsvWriter::num(row.truncation_bound), CsvWriter::num(row.classical_value),
                   CsvWriter::num(row.abs_diff),
                   row.quantum_value ? CsvWriter::num(*row.quantum_value) : "",
                   row.quantum_classical_diff ? CsvWriter::num(*row.quantum_classical_diff) : ""});
    const std::string at = "@t=" + short_num(row.t);
    if (row.light_cone_ok) {
      manifest.checks.push_back(
          make_check("bessel-match" + at, row.abs_diff, bessel_tol, row.abs_diff < bessel_tol));
    } else {
      manifest.checks.push_back(make_check("bessel-flagged" + at, row.abs_diff, 0.0, true,
                                           "light-cone margin violated; reported, not asserted"));
    }
    if (row.quantum_classical_diff)
      manifest.checks.push_back(make_check("quantum-classical" + at, *row.quantum_classical_diff,
                                           quantum_tol,
                                           *row.quantum_classical_diff < quantum_tol));
  }
  manifest.artifacts.push_back("bessel.csv");
}

void run_collision_converge(const RunConfig& config, const fs::path& out_dir,
                            RunManifest& manifest) {
  const double ratio_low = tol(config, "ratio_low");
  const double ratio_high = tol(config, "ratio_high");
  const auto rows = collision::convergence_study(config.chain_length, config.alpha,
                                                 config.time_horizon, config.dts,
                                                 config.ancilla_levels);
  CsvWriter csv(out_dir / "collision_converge.csv", "collision-converge v1",
                {"dt", "error", "ratio"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv.write_row({CsvWriter::num(rows[i].dt), CsvWriter::num(rows[i].error),
                   i == 0 ? "" : CsvWriter::num(rows[i].ratio)});
    if (i > 0) {
      const bool in_band = rows[i].ratio >= ratio_low && rows[i].ratio <= ratio_high;
      manifest.checks.push_back(make_check("convergence-ratio@dt=" + short_num(rows[i].dt),
                                           rows[i].ratio, ratio_high, in_band,
                                           "band [" + short_num(ratio_low) + ", " + short_num(ratio_high) + "]"));
      manifest.checks.push_back(make_check("error-decreasing@dt=" + short_num(rows[i].dt),
                                           rows[i].error, rows[i - 1].error,
                                           rows[i].error < rows[i - 1].error));
    }
  }
  manifest.artifacts.push_back("collision_converge.csv");
}

void run_classical_compare(const RunConfig& config, const fs::path& out_dir,
                           RunManifest& manifest) {
  const double sigma = tol(config, "sigma");
  const double quantum_diag_tol = tol(config, "quantum_diag");
  const double offdiag_tol = tol(config, "offdiag");
  const int L = config.chain_length;
  const double T = config.time_horizon;
  const OccupationConfig init = init_config_for(config);

  const ChainDescriptor chain = build_chain(L);
  const GeneratorSpec spec = make_generator_spec(chain, config.alpha);
  const RateMatrix classical_gen =
      classical::classical_generator(L, config.alpha, classical::Boundary::closed);

  // Exact construction equality between the quantum diagonal restriction and
  // the classical generator.
  const bool generators_equal = diagonal_restriction(spec) == classical_gen;
  manifest.checks.push_back(
      make_check("generator-equality", generators_equal ? 0.0 : 1.0, 0.5, generators_equal));

  const classical::ClassicalState init_state{L, init.basis_index(), classical::Boundary::closed};
  const std::vector<double> p0 = init_state.point_distribution();
  const std::vector<double> p_final = classical::master_evolve(classical_gen, p0, T);

  // Quantum pointer evolution stays diagonal and matches the master equation.
  if (L <= 8) {
    const std::vector<double> sample_times{T / 2.0, T};
    const EvolutionResult evo = evolve(spec, pointer_density(chain, init), T, sample_times);
    CsvWriter qcsv(out_dir / "classical_compare_quantum.csv", "classical-compare-quantum v1",
                   {"t", "max_offdiag", "max_diag_diff"});
    double worst_offdiag = 0.0, worst_diag = 0.0;
    for (std::size_t i = 0; i < sample_times.size(); ++i) {
      const Matrix& rho = evo.states[i].mat();
      Matrix off = rho;
      off.diagonal().setZero();
      const double max_offdiag = max_abs(off);
      const std::vector<double> pt = classical::master_evolve(classical_gen, p0, sample_times[i]);
      double max_diag_diff = 0.0;
      for (std::int64_t b = 0; b < chain.dim(); ++b)
        max_diag_diff = std::max(
            max_diag_diff, std::abs(rho(b, b).real() - pt[static_cast<std::size_t>(b)]));
      qcsv.write_row({CsvWriter::num(sample_times[i]), CsvWriter::num(max_offdiag),
                      CsvWriter::num(max_diag_diff)});
      worst_offdiag = std::max(worst_offdiag, max_offdiag);
      worst_diag = std::max(worst_diag, max_diag_diff);
    }
    manifest.checks.push_back(
        make_check("pointer-closure", worst_offdiag, offdiag_tol, worst_offdiag < offdiag_tol));
    manifest.checks.push_back(
        make_check("diagonal-match", worst_diag, quantum_diag_tol, worst_diag < quantum_diag_tol));
    manifest.artifacts.push_back("classical_compare_quantum.csv");
  }

  // Gillespie occupation marginals against the master equation.
  const auto seeds = config.seeds.materialize();
  const std::vector<double> at_final{T};
  std::vector<std::int64_t> counts(static_cast<std::size_t>(L), 0);
  const std::vector<std::uint8_t> init_profile = init_state.profile();
  for (const std::uint64_t seed : seeds) {
    classical::GillespieOptions options;
    options.record_states = true;
    const auto traj = classical::gillespie_sample(L, classical::asep_rates(config.alpha),
                                                  init_profile, T, seed,
                                                  classical::Boundary::closed, at_final, options);
    for (int site = 0; site < L; ++site)
      counts[static_cast<std::size_t>(site)] += traj.states.back()[static_cast<std::size_t>(site)];
  }
  CsvWriter csv(out_dir / "classical_compare_marginals.csv", "classical-compare v1",
                {"site", "p_master", "p_gillespie", "stderr", "z"});
  double worst_z = 0.0;
  const auto n = static_cast<double>(seeds.size());
  for (int site = 1; site <= L; ++site) {
    double p_master = 0.0;
    for (std::int64_t b = 0; b < chain.dim(); ++b)
      if (occupation_bit(static_cast<std::uint32_t>(b), site))
        p_master += p_final[static_cast<std::size_t>(b)];
    const double p_mc = static_cast<double>(counts[static_cast<std::size_t>(site - 1)]) / n;
    const double stderr_binomial = std::sqrt(std::max(p_master * (1.0 - p_master), 0.0) / n);
    const double z = stderr_binomial > 0.0
                         ? std::abs(p_mc - p_master) / stderr_binomial
                         : (p_mc == p_master ? 0.0 : std::numeric_limits<double>::infinity());
    worst_z = std::max(worst_z, z);
    csv.write_row({CsvWriter::num(site), CsvWriter::num(p_master), CsvWriter::num(p_mc),
                   CsvWriter::num(stderr_binomial), CsvWriter::num(z)});
  }
  manifest.checks.push_back(make_check("mc-marginals-z", worst_z, sigma, worst_z < sigma));
  manifest.artifacts.push_back("classical_compare_marginals.csv");
}

void run_growth_exponent(const RunConfig& config, const fs::path& out_dir, RunManifest& manifest) {
  const int L = config.chain_length;
  const double T = config.time_horizon;
  if (config.seeds.effective_count() < 2)
    throw ConfigError("growth-exponent: need at least two seeds");
  std::vector<double> times;
  const int points = std::max(config.sample_points, 4);
  for (int i = 0; i < points; ++i) {
    const double t = std::exp(std::log(T) * static_cast<double>(i) / static_cast<double>(points - 1));
    if (times.empty() || t > times.back() + 1e-12) times.push_back(t);
  }
  const classical::HopRates rates = config.symmetric_rates ? classical::symmetric_rates(1.0)
                                                           : classical::asep_rates(config.alpha);
  const auto seeds = config.seeds.materialize();
  const auto ensemble = classical::run_ensemble(L, rates, classical::Boundary::periodic, T, times,
                                                seeds, config.threads, /*bernoulli_init=*/true);
  const auto stats = classical::height_growth_stats(ensemble, config.fit_t_min, config.fit_t_max);

  CsvWriter summary(out_dir / "ensemble_summary.csv", "classical-ensemble v1",
                    {"t", "mean_height", "var_height", "n_samples"});
  for (std::size_t i = 0; i < stats.times.size(); ++i)
    summary.write_row({CsvWriter::num(stats.times[i]), CsvWriter::num(stats.mean_height[i]),
                       CsvWriter::num(stats.var_height[i]), CsvWriter::num(stats.n_samples)});
  manifest.artifacts.push_back("ensemble_summary.csv");

  CsvWriter csv(out_dir / "growth_exponent.csv", "growth-exponent v1",
                {"t", "var_height", "n_samples", "beta_fit", "beta_stderr"});
  for (std::size_t i = 0; i < stats.times.size(); ++i)
    csv.write_row({CsvWriter::num(stats.times[i]), CsvWriter::num(stats.var_height[i]),
                   CsvWriter::num(stats.n_samples), CsvWriter::num(stats.beta),
                   CsvWriter::num(stats.beta_stderr)});
  manifest.artifacts.push_back("growth_exponent.csv");

  const auto lo = config.tolerances.find("beta_min");
  const auto hi = config.tolerances.find("beta_max");
  if (lo != config.tolerances.end() && hi != config.tolerances.end()) {
    const bool in_range = stats.beta >= lo->second && stats.beta <= hi->second;
    manifest.checks.push_back(make_check("beta-in-range", stats.beta, hi->second, in_range,
                                         "band [" + short_num(lo->second) + ", " + short_num(hi->second) + "], stderr " + short_num(stats.beta_stderr)));
  } else {
    manifest.checks.push_back(make_check("beta-fit", stats.beta, 0.0, true,
                                         "informational; stderr " + short_num(stats.beta_stderr)));
  }
}

void run_continuum_probe(const RunConfig& config, const fs::path& out_dir, RunManifest& manifest) {
  const double exact_tol = tol(config, "exact");
  const auto rows = continuum_noise_probe(config.chain_length, config.alphas);
  CsvWriter csv(out_dir / "continuum_probe.csv", "continuum-probe v1",
                {"alpha", "average", "ratio", "expected_ratio"});
  for (const auto& row : rows) {
    csv.write_row({CsvWriter::num(row.alpha), CsvWriter::num(row.average),
                   CsvWriter::num(row.ratio), CsvWriter::num(row.expected_ratio)});
    const double deviation = std::abs(row.average - (row.alpha / 2.0 + 0.25));
    manifest.checks.push_back(make_check("probe-exact@alpha=" + short_num(row.alpha),
                                         deviation, exact_tol, deviation < exact_tol));
  }
  manifest.artifacts.push_back("continuum_probe.csv");
}

void run_trajectory(const RunConfig& config, const fs::path& out_dir, RunManifest& manifest) {
  const double sigma = tol(config, "sigma");
  const ChainDescriptor chain = build_chain(config.chain_length);
  const auto model_config = collision::make_collision_config(
      chain, config.alpha, config.dt, collision::SweepOrder::even_odd, config.ancilla_levels);
  const collision::CollisionModel model(model_config);
  const Vector psi0 = collision::coherent_probe_state(chain);
  const OperatorMatrix observable = number_op(chain, 1);

  // Channel reference: deterministic collision-channel evolution of |psi0>.
  const auto steps = static_cast<std::int64_t>(std::llround(config.time_horizon / config.dt));
  DensityMatrix rho(Matrix(psi0 * psi0.adjoint()));
  for (std::int64_t s = 0; s < steps; ++s) rho = model.step(rho);
  const double channel_value = real_expectation(rho, observable);

  const auto seeds = config.seeds.materialize();
  const auto estimate = collision::trajectory_ensemble_mean(model, psi0, config.time_horizon,
                                                            observable, seeds, config.threads);
  const double z = estimate.stderr_mean > 0.0
                       ? std::abs(estimate.mean - channel_value) / estimate.stderr_mean
                       : 0.0;
  CsvWriter csv(out_dir / "trajectory.csv", "trajectory v1",
                {"observable", "t", "ensemble_mean", "channel_value", "stderr", "z", "n"});
  csv.write_row({"n_1", CsvWriter::num(config.time_horizon), CsvWriter::num(estimate.mean),
                 CsvWriter::num(channel_value), CsvWriter::num(estimate.stderr_mean),
                 CsvWriter::num(z), CsvWriter::num(estimate.count)});
  manifest.artifacts.push_back("trajectory.csv");
  manifest.checks.push_back(make_check("ensemble-vs-channel-z", z, sigma, z < sigma));
}

}  // namespace

const char* experiment_name(Experiment experiment) {
  switch (experiment) {
    case Experiment::verify: return "verify";
    case Experiment::bessel: return "bessel";
    case Experiment::collision_converge: return "collision-converge";
    case Experiment::classical_compare: return "classical-compare";
    case Experiment::growth_exponent: return "growth-exponent";
    case Experiment::continuum_probe: return "continuum-probe";
    case Experiment::trajectory: return "trajectory";
  }
  return "unknown";
}

std::optional<Experiment> experiment_from_name(const std::string& name) {
  for (const Experiment e :
       {Experiment::verify, Experiment::bessel, Experiment::collision_converge,
        Experiment::classical_compare, Experiment::growth_exponent, Experiment::continuum_probe,
        Experiment::trajectory})
    if (name == experiment_name(e)) return e;
  return std::nullopt;
}

std::vector<std::uint64_t> SeedSpec::materialize() const {
  if (!explicit_seeds.empty()) return explicit_seeds;
  if (count < 1) throw ConfigError("seeds: count must be at least 1");
  return derive_seed_list(base, count);
}

RunConfig default_config(Experiment experiment) {
  RunConfig config;
  config.experiment = experiment;
  config.tolerances = schema_for(experiment).tolerance_defaults;
  switch (experiment) {
    case Experiment::verify:
      config.chain_length = 5;
      config.alpha = 1.0;
      config.seeds = SeedSpec{12345, 50, {}};
      break;
    case Experiment::bessel:
      config.chain_length = 15;
      config.alpha = 1.0;
      config.time_horizon = 0.5;
      config.init = "alternating";
      break;
    case Experiment::collision_converge:
      config.chain_length = 3;
      config.alpha = 1.0;
      config.time_horizon = 1.0;
      config.dts = {0.1, 0.05, 0.025};
      break;
    case Experiment::classical_compare:
      config.chain_length = 5;
      config.alpha = 0.7;
      config.time_horizon = 1.0;
      config.init = "step";
      config.seeds = SeedSpec{1, 100000, {}};
      break;
    case Experiment::growth_exponent:
      config.chain_length = 4096;
      config.alpha = 0.0;
      config.time_horizon = 1000.0;
      config.seeds = SeedSpec{1, 200, {}};
      config.fit_t_min = 100.0;
      config.fit_t_max = 1000.0;
      config.sample_points = 25;
      break;
    case Experiment::continuum_probe:
      config.chain_length = 6;
      config.alphas = {10.0, 100.0};
      break;
    case Experiment::trajectory:
      config.chain_length = 2;
      config.alpha = 1.0;
      config.time_horizon = 1.0;
      config.dt = 0.05;
      config.seeds = SeedSpec{7, 10000, {}};
      break;
  }
  return config;
}

RunConfig parse_config(const std::string& json_text, bool strict) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config: top level must be a JSON object");
  if (!doc.contains("experiment")) throw ConfigError("config: missing required field 'experiment'");
  if (!doc["experiment"].is_string()) throw ConfigError("config.experiment: must be a string");
  const auto experiment = experiment_from_name(doc["experiment"].get<std::string>());
  if (!experiment)
    throw ConfigError("config.experiment: unknown experiment '" +
                      doc["experiment"].get<std::string>() + "'");

  RunConfig config = default_config(*experiment);
  const ExperimentSchema& schema = schema_for(*experiment);

  if (strict) {
    for (const auto& [key, value] : doc.items()) {
      (void)value;
      if (std::find(schema.allowed_keys.begin(), schema.allowed_keys.end(), key) ==
          schema.allowed_keys.end())
        throw ConfigError("config." + key + ": unknown key for experiment '" +
                          experiment_name(*experiment) + "'");
    }
  }

  auto get_number = [&](const char* key, double& target) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number()) throw ConfigError(std::string("config.") + key + ": must be a number");
    target = doc[key].get<double>();
  };
  auto get_int = [&](const char* key, int& target) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_number_integer())
      throw ConfigError(std::string("config.") + key + ": must be an integer");
    target = doc[key].get<int>();
  };
  auto get_string = [&](const char* key, std::string& target) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_string()) throw ConfigError(std::string("config.") + key + ": must be a string");
    target = doc[key].get<std::string>();
  };
  auto get_number_list = [&](const char* key, std::vector<double>& target) {
    if (!doc.contains(key)) return;
    if (!doc[key].is_array()) throw ConfigError(std::string("config.") + key + ": must be an array");
    target.clear();
    for (const auto& v : doc[key]) {
      if (!v.is_number()) throw ConfigError(std::string("config.") + key + ": entries must be numbers");
      target.push_back(v.get<double>());
    }
  };

  get_int("chain_length", config.chain_length);
  get_number("alpha", config.alpha);
  get_number_list("alphas", config.alphas);
  get_number("time_horizon", config.time_horizon);
  get_number("dt", config.dt);
  get_number_list("dts", config.dts);
  get_string("output_path", config.output_path);
  get_string("init", config.init);
  get_int("site", config.site);
  get_number("fit_t_min", config.fit_t_min);
  get_number("fit_t_max", config.fit_t_max);
  get_int("sample_points", config.sample_points);
  if (doc.contains("symmetric_rates")) {
    if (!doc["symmetric_rates"].is_boolean())
      throw ConfigError("config.symmetric_rates: must be a boolean");
    config.symmetric_rates = doc["symmetric_rates"].get<bool>();
  }
  if (doc.contains("ancilla_levels")) {
    if (!doc["ancilla_levels"].is_number_integer())
      throw ConfigError("config.ancilla_levels: must be an integer");
    config.ancilla_levels = doc["ancilla_levels"].get<int>();
  }

  if (doc.contains("seeds")) {
    const auto& seeds = doc["seeds"];
    if (seeds.is_array()) {
      config.seeds.explicit_seeds.clear();
      for (const auto& s : seeds) {
        if (!s.is_number_integer()) throw ConfigError("config.seeds: entries must be integers");
        config.seeds.explicit_seeds.push_back(s.get<std::uint64_t>());
      }
      if (config.seeds.explicit_seeds.empty())
        throw ConfigError("config.seeds: seed list must not be empty");
    } else if (seeds.is_object()) {
      for (const auto& [key, value] : seeds.items()) {
        (void)value;
        if (key != "base" && key != "count")
          throw ConfigError("config.seeds." + key + ": unknown key (use base/count)");
      }
      if (seeds.contains("base")) {
        if (!seeds["base"].is_number_integer())
          throw ConfigError("config.seeds.base: must be an integer");
        config.seeds.base = seeds["base"].get<std::uint64_t>();
      }
      if (seeds.contains("count")) {
        if (!seeds["count"].is_number_integer())
          throw ConfigError("config.seeds.count: must be an integer");
        config.seeds.count = seeds["count"].get<int>();
      }
      if (config.seeds.count < 1) throw ConfigError("config.seeds.count: must be at least 1");
    } else if (seeds.is_number_integer()) {
      config.seeds.base = seeds.get<std::uint64_t>();
    } else {
      throw ConfigError("config.seeds: must be a list, an object {base, count}, or an integer");
    }
  }

  if (doc.contains("tolerances")) {
    if (!doc["tolerances"].is_object()) throw ConfigError("config.tolerances: must be an object");
    for (const auto& [key, value] : doc["tolerances"].items()) {
      const bool known = schema.tolerance_defaults.count(key) > 0 ||
                         (*experiment == Experiment::growth_exponent &&
                          (key == "beta_min" || key == "beta_max"));
      if (strict && !known)
        throw ConfigError("config.tolerances." + key + ": unknown tolerance for experiment '" +
                          std::string(experiment_name(*experiment)) + "'");
      if (!value.is_number())
        throw ConfigError("config.tolerances." + key + ": must be a number");
      const double v = value.get<double>();
      if (v <= 0.0) throw ConfigError("config.tolerances." + key + ": must be positive");
      config.tolerances[key] = v;
    }
  }

  if (config.chain_length < 2) throw ConfigError("config.chain_length: must be at least 2");
  return config;
}

std::string config_to_json(const RunConfig& config) {
  json doc;
  doc["experiment"] = experiment_name(config.experiment);
  doc["chain_length"] = config.chain_length;
  doc["alpha"] = config.alpha;
  if (!config.alphas.empty()) doc["alphas"] = config.alphas;
  if (config.time_horizon > 0.0) doc["time_horizon"] = config.time_horizon;
  if (config.dt > 0.0) doc["dt"] = config.dt;
  if (!config.dts.empty()) doc["dts"] = config.dts;
  if (!config.seeds.explicit_seeds.empty())
    doc["seeds"] = config.seeds.explicit_seeds;
  else
    doc["seeds"] = {{"base", config.seeds.base}, {"count", config.seeds.count}};
  doc["output_path"] = config.output_path;
  if (!config.init.empty()) doc["init"] = config.init;
  if (config.site > 0) doc["site"] = config.site;
  if (config.experiment == Experiment::growth_exponent) {
    doc["symmetric_rates"] = config.symmetric_rates;
    doc["fit_t_min"] = config.fit_t_min;
    doc["fit_t_max"] = config.fit_t_max;
    doc["sample_points"] = config.sample_points;
  }
  if (config.ancilla_levels) doc["ancilla_levels"] = *config.ancilla_levels;
  doc["tolerances"] = config.tolerances;
  return doc.dump(2);
}

RunManifest run(const RunConfig& config) {
  RunManifest manifest;
  manifest.experiment = experiment_name(config.experiment);
  manifest.version = std::string(kProjectName) + " " + kVersion;
  manifest.config_echo = config_to_json(config);
  manifest.started_utc = iso_timestamp();

  const fs::path out_dir(config.output_path);
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  try {
    switch (config.experiment) {
      case Experiment::verify: run_verify(config, out_dir, manifest); break;
      case Experiment::bessel: run_bessel(config, out_dir, manifest); break;
      case Experiment::collision_converge: run_collision_converge(config, out_dir, manifest); break;
      case Experiment::classical_compare: run_classical_compare(config, out_dir, manifest); break;
      case Experiment::growth_exponent: run_growth_exponent(config, out_dir, manifest); break;
      case Experiment::continuum_probe: run_continuum_probe(config, out_dir, manifest); break;
      case Experiment::trajectory: run_trajectory(config, out_dir, manifest); break;
    }
    bool all_pass = true;
    for (const auto& check : manifest.checks) all_pass = all_pass && check.pass;
    manifest.status = all_pass ? "pass" : "fail";
  } catch (const std::exception& e) {
    manifest.status = "error";
    manifest.error_message = e.what();
  }
  manifest.finished_utc = iso_timestamp();

  // Atomic manifest write: temporary file in the same directory, then rename.
  json doc;
  doc["experiment"] = manifest.experiment;
  doc["version"] = manifest.version;
  doc["config"] = json::parse(manifest.config_echo);
  doc["started_utc"] = manifest.started_utc;
  doc["finished_utc"] = manifest.finished_utc;
  doc["status"] = manifest.status;
  if (!manifest.error_message.empty()) doc["error"] = manifest.error_message;
  doc["artifacts"] = manifest.artifacts;
  doc["checks"] = json::array();
  for (const auto& check : manifest.checks) {
    json c;
    c["name"] = check.name;
    c["pass"] = check.pass;
    c["value"] = check.value;
    c["threshold"] = check.threshold;
    if (!check.detail.empty()) c["detail"] = check.detail;
    doc["checks"].push_back(c);
  }
  const fs::path tmp = out_dir / "manifest.json.tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    out << doc.dump(2) << "\n";
  }
  fs::rename(tmp, out_dir / "manifest.json");
  return manifest;
}

int exit_code_for(const RunManifest& manifest) {
  if (manifest.status == "pass") return 0;
  if (manifest.status == "fail") return 1;
  return 3;
}

void print_manifest_lines(const RunManifest& manifest) {
  for (const auto& check : manifest.checks) {
    std::printf("[%s] %s value=%.6g threshold=%.6g%s%s\n", check.pass ? "PASS" : "FAIL",
                check.name.c_str(), check.value, check.threshold,
                check.detail.empty() ? "" : " -- ", check.detail.c_str());
  }
  std::printf("%s: %s\n", manifest.experiment.c_str(), manifest.status.c_str());
}

}  // namespace harness
}  // namespace qkpz
