// Command-line front end: one subcommand per experiment, JSON config in, CSV
// artifacts + JSON manifest out. Exit codes: 0 pass, 1 check failure,
// 2 config error, 3 runtime error.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "qkpz/errors.hpp"
#include "qkpz/harness.hpp"
#include "qkpz/version.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw qkpz::ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{std::string(qkpz::kProjectName) +
               " -- quantum exclusion process laboratory (identity checks, Lindblad and "
               "collision-model evolution, classical ASEP experiments)"};
  app.set_version_flag("--version", std::string(qkpz::kProjectName) + " " + qkpz::kVersion);
  app.require_subcommand(1);

  std::string config_path;
  std::string output_dir;
  std::uint64_t seed = 0;
  bool seed_given = false;
  int threads = 0;
  bool strict = true;

  for (const auto experiment :
       {qkpz::harness::Experiment::verify, qkpz::harness::Experiment::bessel,
        qkpz::harness::Experiment::collision_converge,
        qkpz::harness::Experiment::classical_compare, qkpz::harness::Experiment::growth_exponent,
        qkpz::harness::Experiment::continuum_probe, qkpz::harness::Experiment::trajectory}) {
    auto* sub = app.add_subcommand(qkpz::harness::experiment_name(experiment),
                                   "run the " +
                                       std::string(qkpz::harness::experiment_name(experiment)) +
                                       " experiment (defaults used for fields absent from the "
                                       "config; see the manifest for the effective values)");
    sub->add_option("--config", config_path, "JSON run configuration");
    sub->add_option("--output", output_dir, "output directory (overrides config output_path)");
    sub->add_option("--seed", seed, "base seed (overrides config seeds.base)")
        ->each([&](const std::string&) { seed_given = true; });
    sub->add_option("--threads", threads,
                    "worker threads for ensembles (QKPZ_THREADS as fallback, default 1)");
    sub->add_flag("--strict,!--no-strict", strict,
                  "reject unknown config keys (default: strict)");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string sub_name = app.get_subcommands().front()->get_name();

  try {
    const auto experiment = qkpz::harness::experiment_from_name(sub_name);
    qkpz::harness::RunConfig config = qkpz::harness::default_config(*experiment);
    if (!config_path.empty()) {
      config = qkpz::harness::parse_config(read_file(config_path), strict);
      if (config.experiment != *experiment)
        throw qkpz::ConfigError("config experiment '" +
                                std::string(qkpz::harness::experiment_name(config.experiment)) +
                                "' does not match subcommand '" + sub_name + "'");
    }
    if (!output_dir.empty()) config.output_path = output_dir;
    if (seed_given) config.seeds.base = seed;

    if (threads > 0) {
      config.threads = threads;
    } else if (const char* env = std::getenv("QKPZ_THREADS")) {
      config.threads = std::max(1, std::atoi(env));
    }

    const qkpz::harness::RunManifest manifest = qkpz::harness::run(config);
    qkpz::harness::print_manifest_lines(manifest);
    if (!manifest.error_message.empty())
      std::fprintf(stderr, "error: %s\n", manifest.error_message.c_str());
    return qkpz::harness::exit_code_for(manifest);
  } catch (const qkpz::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
}
