#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qkpz/errors.hpp"
#include "qkpz/harness.hpp"

using namespace qkpz;
using namespace qkpz::harness;

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

fs::path fresh_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qkpz_test_" + name);
  fs::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("parse_config: the documented examples") {
  const auto verify = parse_config(R"({"experiment":"verify","chain_length":5,"alpha":1.0})");
  CHECK(verify.experiment == Experiment::verify);
  CHECK(verify.chain_length == 5);
  CHECK(verify.tolerances.at("residual") == 1e-10);
  CHECK(verify.tolerances.at("generator_equivalence") == 1e-11);

  CHECK_THROWS_AS(parse_config(R"({"chain_length":5})"), ConfigError);

  const auto bessel = parse_config(
      R"({"experiment":"bessel","chain_length":15,"alpha":1.0,"time_horizon":0.5})");
  CHECK(bessel.experiment == Experiment::bessel);
  CHECK(bessel.time_horizon == 0.5);
}

TEST_CASE("parse_config: strictness and field-path errors") {
  CHECK_THROWS_WITH_AS(parse_config(R"({"experiment":"verify","chain_lenth":5})"),
                       doctest::Contains("chain_lenth"), ConfigError);
  // Unknown keys tolerated when strict mode is off.
  CHECK_NOTHROW(parse_config(R"({"experiment":"verify","chain_lenth":5})", /*strict=*/false));
  // Tolerance typos are named.
  CHECK_THROWS_WITH_AS(
      parse_config(R"({"experiment":"verify","tolerances":{"residul":1e-10}})"),
      doctest::Contains("residul"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment":"verify","tolerances":{"residual":-1.0}})"),
                  ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment":"nope"})"), ConfigError);
  CHECK_THROWS_AS(parse_config("not json"), ConfigError);
  // A key valid for one experiment is rejected for another.
  CHECK_THROWS_AS(parse_config(R"({"experiment":"verify","time_horizon":1.0})"), ConfigError);
}

TEST_CASE("parse_config: seed forms") {
  const auto list = parse_config(R"({"experiment":"trajectory","seeds":[3,5,9]})");
  CHECK(list.seeds.materialize() == std::vector<std::uint64_t>{3, 5, 9});
  const auto counted = parse_config(R"({"experiment":"trajectory","seeds":{"base":10,"count":4}})");
  CHECK(counted.seeds.materialize().size() == 4);
  const auto bare = parse_config(R"({"experiment":"trajectory","seeds":42})");
  CHECK(bare.seeds.base == 42);
  CHECK_THROWS_AS(parse_config(R"({"experiment":"trajectory","seeds":[]})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment":"trajectory","seeds":{"count":0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"experiment":"trajectory","seeds":{"bose":1}})"), ConfigError);
}

TEST_CASE("growth-exponent config requires seeds") {
  auto config = default_config(Experiment::growth_exponent);
  config.seeds.count = 0;
  config.output_path = fresh_dir("growth_noseeds").string();
  const auto manifest = run(config);
  CHECK(manifest.status == "error");
  CHECK(exit_code_for(manifest) == 3);
}

TEST_CASE("verify run: manifest lists the eight identity checks and passes") {
  auto config = default_config(Experiment::verify);
  config.chain_length = 5;
  config.alpha = 1.0;
  config.seeds.count = 10;
  const fs::path dir = fresh_dir("verify");
  config.output_path = dir.string();

  const auto manifest = run(config);
  CHECK(manifest.status == "pass");
  CHECK(exit_code_for(manifest) == 0);
  CHECK(manifest.checks.size() == 8);
  for (const auto& check : manifest.checks) {
    CHECK(check.pass);
    if (check.name != "generator-equivalence") CHECK(check.value < 1e-10);
  }
  CHECK(fs::exists(dir / "verify.csv"));
  CHECK(fs::exists(dir / "manifest.json"));

  const std::string manifest_text = slurp(dir / "manifest.json");
  CHECK(manifest_text.find("generator-equivalence") != std::string::npos);
  CHECK(manifest_text.find("\"status\": \"pass\"") != std::string::npos);
}

TEST_CASE("continuum-probe run writes the expected checks") {
  auto config = default_config(Experiment::continuum_probe);
  const fs::path dir = fresh_dir("probe");
  config.output_path = dir.string();
  const auto manifest = run(config);
  CHECK(manifest.status == "pass");
  CHECK(manifest.checks.size() == 2);
  const std::string csv = slurp(dir / "continuum_probe.csv");
  CHECK(csv.find("# schema: continuum-probe v1") == 0);
  CHECK(csv.find("5.25") != std::string::npos);
  CHECK(csv.find("50.25") != std::string::npos);
  CHECK(csv.find("\r") == std::string::npos);  // LF endings only
}

TEST_CASE("reruns with identical config and seeds are byte-identical") {
  auto config = default_config(Experiment::growth_exponent);
  config.chain_length = 128;
  config.time_horizon = 50.0;
  config.seeds = SeedSpec{9, 24, {}};
  config.fit_t_min = 5.0;
  config.fit_t_max = 50.0;
  config.sample_points = 10;

  const fs::path dir_a = fresh_dir("growth_a");
  const fs::path dir_b = fresh_dir("growth_b");
  config.output_path = dir_a.string();
  const auto first = run(config);
  config.output_path = dir_b.string();
  config.threads = 3;  // thread count must not affect the bytes
  const auto second = run(config);
  CHECK(first.status != "error");
  CHECK(second.status != "error");
  CHECK(slurp(dir_a / "growth_exponent.csv") == slurp(dir_b / "growth_exponent.csv"));
  CHECK(slurp(dir_a / "ensemble_summary.csv") == slurp(dir_b / "ensemble_summary.csv"));
}

TEST_CASE("trajectory run emits a channel-consistency check") {
  auto config = default_config(Experiment::trajectory);
  config.seeds.count = 2000;
  const fs::path dir = fresh_dir("trajectory");
  config.output_path = dir.string();
  config.threads = 2;
  const auto manifest = run(config);
  CHECK(manifest.status == "pass");
  REQUIRE(manifest.checks.size() == 1);
  CHECK(manifest.checks[0].name == "ensemble-vs-channel-z");
  const std::string csv = slurp(dir / "trajectory.csv");
  CHECK(csv.find("# schema: trajectory v1") == 0);
}

TEST_CASE("classical-compare run passes its three check families") {
  auto config = default_config(Experiment::classical_compare);
  config.seeds.count = 20000;
  const fs::path dir = fresh_dir("classical");
  config.output_path = dir.string();
  const auto manifest = run(config);
  CHECK(manifest.status == "pass");
  bool saw_generator = false, saw_closure = false, saw_marginals = false;
  for (const auto& check : manifest.checks) {
    saw_generator |= check.name == "generator-equality";
    saw_closure |= check.name == "pointer-closure";
    saw_marginals |= check.name == "mc-marginals-z";
  }
  CHECK(saw_generator);
  CHECK(saw_closure);
  CHECK(saw_marginals);
}

TEST_CASE("experiment names round-trip") {
  for (const auto e : {Experiment::verify, Experiment::bessel, Experiment::collision_converge,
                       Experiment::classical_compare, Experiment::growth_exponent,
                       Experiment::continuum_probe, Experiment::trajectory}) {
    const auto back = experiment_from_name(experiment_name(e));
    REQUIRE(back.has_value());
    CHECK(*back == e);
  }
  CHECK_FALSE(experiment_from_name("unknown").has_value());
}
