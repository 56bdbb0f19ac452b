#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "spdelab/config.hpp"

using namespace spdelab;
using nlohmann::json;

namespace {

json base_config() {
  return json::parse(R"({
    "model": {
      "n_modes": 4,
      "reaction": {
        "kind": "affine",
        "slopes": {"type": "power", "amplitude": 0.5, "exponent": 1.0},
        "offsets": {"type": "list", "values": [0.1]},
        "c_f": 0.5
      },
      "diffusion": {
        "scales": {"type": "list", "values": [0.2, 0.1]},
        "modulation": {"type": "constant", "value": 1.0},
        "sigma_bar": 0.25,
        "c_sigma": 0.0
      },
      "jumps": {
        "kind": "discrete",
        "marks": [0.5],
        "weights": [2.0],
        "direction": {"type": "list", "values": [1.0]},
        "modulation": {"type": "constant", "value": 1.0}
      }
    },
    "run": {
      "seed": 7,
      "dt": 0.001,
      "horizon": 0.5,
      "members": 4,
      "threads": 2,
      "initial": {"type": "point", "coefficients": [0.8]}
    },
    "experiment": {
      "kind": "contraction",
      "x0": [0.8],
      "y0": [-0.2],
      "obs_times": [0.0, 0.25, 0.5],
      "rate_fraction": 0.75
    }
  })");
}

}  // namespace

TEST_CASE("full configuration parses and its echo is a fixed point") {
  auto cfg = Config::from_json(base_config());
  CHECK(cfg.model.n_modes == 4);
  CHECK(cfg.model.reaction.kind == ReactionSpec::Kind::affine);
  CHECK(cfg.model.reaction.c_f == doctest::Approx(0.5));
  CHECK(cfg.model.diffusion.sigma_bar == doctest::Approx(0.25));
  CHECK(cfg.model.jumps.marks.size() == 1);
  CHECK(cfg.run.seed == 7);
  CHECK(cfg.run.members == 4);
  CHECK(cfg.experiment.kind == ExperimentKind::contraction);
  REQUIRE(cfg.experiment.obs_times.size() == 3);

  // Emit, re-parse, emit again: the normalized form must be stable.
  const json echo1 = cfg.to_json();
  auto cfg2 = Config::from_json(echo1);
  const json echo2 = cfg2.to_json();
  CHECK(echo1.dump() == echo2.dump());
  // Defaulted declared constants appear materialized in the echo.
  CHECK(echo1["model"]["jumps"].contains("c_g"));
  CHECK(echo1["model"]["jumps"].contains("envelope_scale"));
}

TEST_CASE("every experiment kind round trips through its echo") {
  json base = base_config();
  const std::vector<json> experiments = {
      json::parse(R"({"kind": "concentration",
                      "observable": {"type": "linear", "coefficients": [1.0],
                                     "label": "mode1"},
                      "r_grid": [0.05, 0.1]})"),
      json::parse(R"({"kind": "certificates",
                      "observable": {"type": "distance", "anchor": [0.0],
                                     "label": "norm"},
                      "lambda_grid": [1.0, 2.0], "r_grid": [0.1, 0.2],
                      "samples": 10, "burn_in": 0.0, "spacing": 0.05,
                      "block_size": 5, "bootstrap_replicates": 50})"),
      json::parse(R"({"kind": "galerkin", "levels": [2, 4],
                      "n_reference": 8, "tolerance_ratio": 0.1})"),
      json::parse(R"({"kind": "moments", "mode_counts": [2, 4],
                      "ratio_cap": 1.5})"),
      json::parse(R"({"kind": "rates", "r_max": 0.5, "lambda_max": 8.0,
                      "grid_points": 11})"),
  };
  for (const auto& exp : experiments) {
    base["experiment"] = exp;
    auto cfg = Config::from_json(base);
    CHECK(std::string(experiment_kind_name(cfg.experiment.kind)) ==
          exp["kind"].get<std::string>());
    const json echo1 = cfg.to_json();
    const json echo2 = Config::from_json(echo1).to_json();
    CHECK(echo1.dump() == echo2.dump());
  }
}

TEST_CASE("unknown keys are rejected everywhere") {
  auto expect_unknown = [](json j, const std::string& key) {
    const std::string needle = "unknown key \"" + key + "\"";
    CHECK_THROWS_WITH_AS(Config::from_json(j),
                         doctest::Contains(needle.c_str()),
                         std::invalid_argument);
  };
  json j = base_config();
  j["extra_top"] = 1;
  expect_unknown(j, "extra_top");

  j = base_config();
  j["model"]["colour"] = "blue";
  expect_unknown(j, "colour");

  j = base_config();
  j["run"]["step_count"] = 10;
  expect_unknown(j, "step_count");

  j = base_config();
  j["experiment"]["tolerance"] = 0.1;
  expect_unknown(j, "tolerance");

  j = base_config();
  j["model"]["reaction"]["slopes"]["offset"] = 2.0;
  expect_unknown(j, "offset");

  j = base_config();
  j["model"]["diffusion"]["modulation"]["width"] = 2.0;
  expect_unknown(j, "width");
}

TEST_CASE("structural and range violations are rejected with locations") {
  auto expect_throw = [](json j, const std::string& fragment) {
    CHECK_THROWS_WITH_AS(Config::from_json(j),
                         doctest::Contains(fragment.c_str()),
                         std::invalid_argument);
  };

  json j = base_config();
  j["run"]["dt"] = 0.0;
  expect_throw(j, "run.dt");

  j = base_config();
  j["run"]["horizon"] = 0.5001;  // 500.1 steps of dt = 0.001: off the grid
  CHECK_THROWS_AS(Config::from_json(j), std::invalid_argument);

  j = base_config();
  j["run"]["members"] = 0;
  expect_throw(j, "run.members");

  j = base_config();
  j["run"]["seed"] = -5;
  expect_throw(j, "nonnegative");

  j = base_config();
  j["model"]["n_modes"] = 0;
  expect_throw(j, "n_modes");

  j = base_config();
  j["experiment"]["obs_times"] = {0.0, 0.0005};  // off the dt grid
  CHECK_THROWS_AS(Config::from_json(j), std::invalid_argument);

  j = base_config();
  j["experiment"]["obs_times"] = {0.25, 0.1};
  expect_throw(j, "ascending");

  j = base_config();
  j["experiment"]["rate_fraction"] = 1.5;
  expect_throw(j, "rate_fraction");

  j = base_config();
  j["experiment"] = {{"kind", "galerkin"},
                     {"levels", {4, 4}},
                     {"n_reference", 16}};
  expect_throw(j, "ascending");

  j = base_config();
  j["experiment"] = {{"kind", "galerkin"},
                     {"levels", {2, 4, 8}},
                     {"n_reference", 8}};
  expect_throw(j, "exceed the largest level");

  j = base_config();
  j["experiment"] = {{"kind", "concentration"},
                     {"observable",
                      {{"type", "linear"},
                       {"coefficients", {0.0, 0.0}},
                       {"label", "zero"}}},
                     {"r_grid", {0.1}}};
  CHECK_THROWS_AS(Config::from_json(j), std::invalid_argument);

  j = base_config();
  j["experiment"] = {{"kind", "concentration"},
                     {"observable",
                      {{"type", "linear"},
                       {"coefficients", {1.0}},
                       {"label", "m"}}},
                     {"r_grid", {-0.1, 0.5}}};
  expect_throw(j, "must be > 0");

  // Certificates sampling schedule must fit inside the horizon.
  j = base_config();
  j["experiment"] = json::parse(
      R"({"kind": "certificates",
          "observable": {"type": "linear", "coefficients": [1.0], "label": "m"},
          "lambda_grid": [1.0], "r_grid": [0.1],
          "samples": 10, "burn_in": 0.4, "spacing": 0.1})");
  expect_throw(j, "exceeds run.horizon");

  j = base_config();
  j["experiment"]["kind"] = "diagnostics";
  expect_throw(j, "unknown experiment kind");

  j = base_config();
  j["model"]["reaction"]["slopes"]["type"] = "gaussian";
  expect_throw(j, "\"list\" or \"power\"");
}

TEST_CASE("declared constants below their tight bounds fail at parse time") {
  json j = base_config();
  j["model"]["diffusion"]["sigma_bar"] = 0.2;  // ||{0.2, 0.1}|| ~ 0.2236
  CHECK_THROWS_WITH_AS(Config::from_json(j), doctest::Contains("sigma_bar"),
                       std::invalid_argument);

  // Unbounded scales need an explicit sigma_bar.
  j = base_config();
  j["model"]["diffusion"] = {
      {"scales", {{"type", "power"}, {"amplitude", 1.0}, {"exponent", 0.5}}}};
  CHECK_THROWS_WITH_AS(Config::from_json(j),
                       doctest::Contains("sigma_bar must be given"),
                       std::invalid_argument);

  j = base_config();
  j["model"]["reaction"]["c_f"] = 0.1;  // slopes peak at 0.5
  CHECK_THROWS_WITH_AS(Config::from_json(j), doctest::Contains("c_f"),
                       std::invalid_argument);
}

TEST_CASE("interval jump measures are materialized into discrete echoes") {
  json j = base_config();
  j["model"]["jumps"] = json::parse(
      R"({"kind": "interval_uniform", "lo": -0.5, "hi": 0.5,
          "total_mass": 1.0, "nodes": 4,
          "direction": {"type": "list", "values": [0.3]},
          "modulation": {"type": "constant", "value": 1.0}})");
  auto cfg = Config::from_json(j);
  CHECK(cfg.model.jumps.marks.size() == 4);
  CHECK(cfg.model.jumps.total_mass() == doctest::Approx(1.0).epsilon(1e-12));
  const json echo = cfg.to_json();
  CHECK(echo["model"]["jumps"]["kind"] == "discrete");
  CHECK(echo["model"]["jumps"]["marks"].size() == 4);
  const json echo2 = Config::from_json(echo).to_json();
  CHECK(echo.dump() == echo2.dump());
}

TEST_CASE("jump-free models omit the jumps block in the echo") {
  json j = base_config();
  j["model"].erase("jumps");
  auto cfg = Config::from_json(j);
  CHECK(cfg.model.jumps.empty());
  CHECK(!cfg.to_json()["model"].contains("jumps"));
}

TEST_CASE("file loading reports open and parse failures") {
  const std::string good = "/tmp/spdelab_test_config_good.json";
  {
    std::ofstream out(good);
    out << base_config().dump(2);
  }
  auto cfg = Config::from_file(good);
  CHECK(cfg.model.n_modes == 4);

  CHECK_THROWS_WITH_AS(Config::from_file("/tmp/spdelab_no_such_file.json"),
                       doctest::Contains("cannot open"), std::invalid_argument);

  const std::string bad = "/tmp/spdelab_test_config_bad.json";
  {
    std::ofstream out(bad);
    out << "{ this is not json";
  }
  CHECK_THROWS_AS(Config::from_file(bad), std::invalid_argument);
}

TEST_CASE("gaussian initial laws round trip with unequal lengths") {
  json j = base_config();
  j["run"]["initial"] = {{"type", "gaussian"},
                         {"mean", {0.5}},
                         {"stddev", {0.1, 0.1, 0.05}}};
  auto cfg = Config::from_json(j);
  CHECK(cfg.run.initial.kind == InitialLaw::Kind::gaussian);
  CHECK(cfg.run.initial.stddev.size() == 3);
  const json echo = cfg.to_json();
  CHECK(Config::from_json(echo).to_json().dump() == echo.dump());
}
