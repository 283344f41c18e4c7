#include "doctest.h"
#include "swarmlab/config.hpp"
#include "swarmlab/errors.hpp"

using namespace swarmlab;
using nlohmann::json;

namespace {

ExperimentConfig resolved(ExperimentKind k) {
  auto c = preset(k);
  c.resolve();
  return c;
}

bool config_error(const ExperimentConfig& c) {
  try {
    c.validate();
  } catch (const Error& e) {
    return e.kind() == ErrorKind::ConfigError;
  }
  return false;
}

}  // namespace

TEST_CASE("presets resolve their automatic fields") {
  const auto e1 = resolved(ExperimentKind::Exp1);
  CHECK(e1.init.scale == 25000 + 128);
  CHECK(e1.estimators.t_m == 50000);
  CHECK(e1.estimators.t_e == 100000);
  CHECK(e1.stagnating_set() == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9});
  CHECK_NOTHROW(e1.validate());

  const auto e2 = resolved(ExperimentKind::Exp2);
  CHECK(e2.init.scale == 500);
  CHECK(e2.estimators.t_m == 100000);
  CHECK(e2.estimators.coarse_step == 100);
  CHECK(e2.estimators.early_cut == 10000);
  CHECK_FALSE(e2.persist.traces);

  const auto e3 = resolved(ExperimentKind::Exp3);
  CHECK(e3.stagnating_set().empty());
  CHECK(e3.stagnation_config().delta_t == 100);
  CHECK(e3.estimators.t_m % 100 == 0);
  CHECK_NOTHROW(e3.validate());
}

TEST_CASE("resolve is idempotent") {
  auto c = resolved(ExperimentKind::Exp2);
  const auto once = c.to_json();
  c.resolve();
  CHECK(c.to_json() == once);
}

TEST_CASE("json round trip") {
  auto c = resolved(ExperimentKind::Exp3);
  c.base_seed = 1234;
  c.stagnation.c0 = -45;
  c.estimators.tau_grid = {5, 50};
  const auto back = ExperimentConfig::from_json(c.to_json());
  CHECK(back.to_json() == c.to_json());
  CHECK(back.fingerprint() == c.fingerprint());
}

TEST_CASE("fingerprint ignores output location and thread count only") {
  const auto base = resolved(ExperimentKind::Exp1);
  auto moved = base;
  moved.output_dir = "/elsewhere";
  moved.threads = 7;
  CHECK(moved.fingerprint() == base.fingerprint());
  CHECK(base.fingerprint().size() == 16);

  auto other = base;
  other.T = 99000;
  CHECK(other.fingerprint() != base.fingerprint());
  other = base;
  other.base_seed = 2;
  CHECK(other.fingerprint() != base.fingerprint());
  other = base;
  other.precision.guard_bits = 128;
  CHECK(other.fingerprint() != base.fingerprint());
}

TEST_CASE("FNV-1a reference values") {
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
}

TEST_CASE("merge_json overlays and rejects unknown keys") {
  auto c = preset(ExperimentKind::Exp1);
  c.merge_json(json::parse(R"({"particles": 2, "init": {"stagnating": 7}, "stagnation": {"n0": 2}})"));
  CHECK(c.N == 2);
  CHECK(c.init.stagnating == 7);
  CHECK(c.init.kind == InitKind::Special);
  CHECK(c.stagnation.n0 == 2);
  CHECK_THROWS_AS(c.merge_json(json::parse(R"({"particle": 2})")), Error);
  CHECK_THROWS_AS(c.merge_json(json::parse(R"({"init": {"bogus": 1}})")), Error);
}

TEST_CASE("validation failures are config errors") {
  auto c = resolved(ExperimentKind::Exp1);
  c.N = 0;
  CHECK(config_error(c));

  c = resolved(ExperimentKind::Exp1);
  c.init.stagnating = 10;  // leaves no remainder
  CHECK(config_error(c));

  c = resolved(ExperimentKind::Exp1);
  c.init.dstar = 3;  // 3 + 9 - 1 > 10
  CHECK(config_error(c));

  c = preset(ExperimentKind::Exp3);
  c.estimators.t_m = 150;  // not a multiple of delta_t = 100
  c.resolve();
  CHECK(config_error(c));

  c = resolved(ExperimentKind::Exp2);
  c.estimators.tau_grid = {0};
  CHECK(config_error(c));

  c = resolved(ExperimentKind::Exp1);
  c.precision.guard_bits = 8;
  CHECK(config_error(c));

  c = resolved(ExperimentKind::Exp1);
  c.stagnation.c0 = -10;
  CHECK(config_error(c));
}

TEST_CASE("desk scale") {
  auto c = preset(ExperimentKind::Exp3);
  apply_desk(c);
  c.resolve();
  CHECK(c.R == 50);
  CHECK(c.T == 100000);
  CHECK(c.T % c.delta_t == 0);
  CHECK_NOTHROW(c.validate());

  auto e1 = preset(ExperimentKind::Exp1);
  apply_desk(e1);
  e1.resolve();
  CHECK(e1.T == 20000);
  CHECK(e1.estimators.t_m == 10000);
  CHECK(e1.init.scale == 5000 + 128);
}

TEST_CASE("experiment names") {
  CHECK(parse_experiment("exp2") == ExperimentKind::Exp2);
  CHECK(parse_experiment("run") == ExperimentKind::SingleRun);
  CHECK(experiment_name(ExperimentKind::Exp3) == "exp3");
  CHECK_THROWS_AS(parse_experiment("exp9"), Error);
}

TEST_CASE("thread count falls back to the environment") {
  ExperimentConfig c;
  c.threads = 3;
  CHECK(c.effective_threads() == 3);
  c.threads = 0;
  CHECK(c.effective_threads() >= 1);
}
