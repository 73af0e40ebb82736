#include "monolab/config.hpp"
#include "monolab/errors.hpp"
#include "monolab/rng.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <filesystem>

using namespace monolab;

namespace {

const std::filesystem::path kConfigs = MONOLAB_CONFIG_DIR;

}  // namespace

TEST_CASE("defaults fill every documented key") {
  const ExperimentConfig c = ExperimentConfig::parse("");
  CHECK(c == ExperimentConfig::defaults());
  CHECK(c.get("grid", "domain") == "dirichlet");
  CHECK(c.get_long("grid", "n") == 32);
  CHECK(c.get_double("symmetry", "tol_sym") == 1e-5);
  const SystemSpec s = build_system(c);
  CHECK(s == catalog::dirichlet_cubic(15.0, 32));
}

TEST_CASE("grammar: sections, comments, whitespace") {
  const ExperimentConfig c = ExperimentConfig::parse(
      "# leading comment\n"
      "[grid]\n"
      "  n =   16   # trailing comment\n"
      "domain=ring\n"
      "\n"
      "[classify]\n"
      "tol_cyc = 1e-7\n");
  CHECK(c.get_long("grid", "n") == 16);
  CHECK(c.get("grid", "domain") == "ring");
  CHECK(build_budget(c, build_system(c)).tol_cyc == 1e-7);
}

TEST_CASE("malformed input is rejected") {
  CHECK_THROWS_AS(ExperimentConfig::parse("[grid]\nbogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[nowhere]\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("n = 3\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[grid]\nn 3\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[grid\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[grid]\nn = 3\nn = 4\n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::parse("[grid]\nn = three\n").get_long("grid", "n"), ConfigError);
  CHECK_THROWS_AS(ExperimentConfig::load(kConfigs / "does_not_exist.conf"), ConfigError);
  CHECK_THROWS_AS(build_system(ExperimentConfig::parse("[system]\nkind = quantum\n")), ConfigError);
  CHECK_THROWS_AS(build_system(ExperimentConfig::parse("[grid]\nn = 2\n")), GridError);
  ExperimentConfig c;
  CHECK_THROWS_AS(c.set("grid", "nodes", "3"), ConfigError);
}

TEST_CASE("parse, serialize, parse is the identity on shipped configs") {
  int seen = 0;
  for (const auto& entry : std::filesystem::directory_iterator(kConfigs)) {
    if (entry.path().extension() != ".conf") continue;
    ++seen;
    const ExperimentConfig c = ExperimentConfig::load(entry.path());
    const ExperimentConfig again = ExperimentConfig::parse(c.serialize());
    CHECK(again == c);
    CHECK(again.serialize() == c.serialize());
    CHECK_NOTHROW(build_system(c));
  }
  CHECK(seen >= 10);
}

TEST_CASE("shipped configs reproduce the catalog") {
  CHECK(build_system(ExperimentConfig::load(kConfigs / "dirichlet_cubic_l15.conf")) == catalog::dirichlet_cubic(15.0));
  CHECK(build_system(ExperimentConfig::load(kConfigs / "dirichlet_cubic_l5.conf")) == catalog::dirichlet_cubic(5.0));
  CHECK(build_system(ExperimentConfig::load(kConfigs / "neumann_cubic_l5.conf")) == catalog::neumann_cubic());
  CHECK(build_system(ExperimentConfig::load(kConfigs / "ring_cubic_l5.conf")) == catalog::ring_cubic());
  CHECK(build_system(ExperimentConfig::load(kConfigs / "radial3_cubic_l15.conf")) == catalog::radial_cubic());
  CHECK(build_system(ExperimentConfig::load(kConfigs / "scalar_cubic.conf")).kind() ==
        catalog::scalar_cubic().kind());
}

TEST_CASE("store_system round-trips every catalog system") {
  std::vector<SystemSpec> all = catalog::shipped_parabolic();
  all.push_back(catalog::scalar_cubic());
  all.push_back(catalog::logistic(3.2));
  all.push_back(catalog::linear_cooperative());
  for (const auto& sys : all) {
    ExperimentConfig c = ExperimentConfig::defaults();
    store_system(c, sys);
    const ExperimentConfig reparsed = ExperimentConfig::parse(c.serialize());
    CHECK(build_system(reparsed) == sys);
  }
}

TEST_CASE("budget and sampler sections") {
  const ExperimentConfig c = ExperimentConfig::parse(
      "[system]\nkind = analytic\n[classify]\nmax_iterations = 10\n"
      "[sampling]\nstrategy = line\nbase = 0.1, 0.2\ndirection = 1 2\nseed = 18446744073709551615\n");
  const SystemSpec sys = build_system(c);
  const ClassifyBudget b = build_budget(c, sys);
  CHECK(b.max_iterations == 10);
  CHECK(b.tol_cyc == 1e-8);
  const SamplerSpec s = build_sampler(c);
  CHECK(s.strategy == SamplingStrategy::LineScan);
  CHECK(s.base == std::vector<double>{0.1, 0.2});
  CHECK(s.direction == std::vector<double>{1.0, 2.0});
  CHECK(s.seed == 18446744073709551615ULL);
  CHECK(build_budget(ExperimentConfig::defaults(), build_system(ExperimentConfig::defaults())).tol_cyc == 1e-6);
}

TEST_CASE("format_double is shortest round-trip") {
  auto rng = SplitMix64::stream(3, 0);
  for (int i = 0; i < 1000; ++i) {
    const double v = std::ldexp(rng.uniform(-1, 1), static_cast<int>(rng.below(200)) - 100);
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(15.0) == "15");
  CHECK_THROWS_AS(parse_double("1.0x"), ConfigError);
}
