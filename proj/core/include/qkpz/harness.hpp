#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace qkpz {
namespace harness {

// Run orchestration: JSON config in, CSV artifacts + JSON manifest out.
// (config, seeds) fully determine every numeric output; manifests additionally
// carry timestamps and are written atomically at run end.

enum class Experiment {
  verify,
  bessel,
  collision_converge,
  classical_compare,
  growth_exponent,
  continuum_probe,
  trajectory,
};

const char* experiment_name(Experiment experiment);
std::optional<Experiment> experiment_from_name(const std::string& name);

struct SeedSpec {
  std::uint64_t base = 1;
  int count = 1;
  std::vector<std::uint64_t> explicit_seeds;  // used verbatim when non-empty

  // Explicit list when given, otherwise `count` derived streams from `base`.
  std::vector<std::uint64_t> materialize() const;
  int effective_count() const {
    return explicit_seeds.empty() ? count : static_cast<int>(explicit_seeds.size());
  }
};

struct RunConfig {
  Experiment experiment = Experiment::verify;
  int chain_length = 0;
  double alpha = 0.0;
  std::vector<double> alphas;       // continuum-probe
  double time_horizon = 0.0;
  std::vector<double> dts;          // collision-converge
  double dt = 0.0;                  // trajectory
  SeedSpec seeds;
  std::string output_path = "qkpz_out";
  std::map<std::string, double> tolerances;  // defaults filled per experiment
  std::string init = "";            // "alternating", "step" or a 0/1 pattern
  int site = 0;                     // bessel observation site (0 = center)
  bool symmetric_rates = false;     // growth-exponent negative control
  double fit_t_min = 0.0;
  double fit_t_max = 0.0;
  int sample_points = 0;
  std::optional<int> ancilla_levels;
  int threads = 1;                  // CLI/env only, never part of the config file
};

// Strict parsing: unknown keys and type mismatches raise ConfigError naming
// the field; defaults (documented in --help and echoed in the manifest) fill
// everything absent.
RunConfig parse_config(const std::string& json_text, bool strict = true);
RunConfig default_config(Experiment experiment);
// Canonical JSON echo of the effective config (excluding threads).
std::string config_to_json(const RunConfig& config);

struct CheckResult {
  std::string name;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct RunManifest {
  std::string experiment;
  std::string version;
  std::string config_echo;  // canonical JSON
  std::string started_utc;
  std::string finished_utc;
  std::vector<CheckResult> checks;
  std::vector<std::string> artifacts;  // file paths relative to output dir
  std::string status = "error";        // "pass" | "fail" | "error"
  std::string error_message;
};

// Executes the experiment, writing artifacts under config.output_path and a
// manifest.json (atomic rename). Never throws for check failures or runtime
// errors inside the experiment: those are reported in the manifest status.
RunManifest run(const RunConfig& config);

// 0 all checks passed, 1 check failure, 3 runtime error. (Config errors are
// raised by parse_config before a manifest exists; the CLI maps them to 2.)
int exit_code_for(const RunManifest& manifest);

void print_manifest_lines(const RunManifest& manifest);

}  // namespace harness
}  // namespace qkpz
