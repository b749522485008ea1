#include <doctest.h>

#include <cstdlib>

#include <nlohmann/json.hpp>

#include "rrjam/errors.hpp"
#include "rrjam/io.hpp"
#include "rrjam/scenario.hpp"

using namespace rrjam;

namespace {

nlohmann::json base_scenario() {
  return nlohmann::json::parse(R"({
    "topology": {
      "m": 2,
      "positions": [[0, 0], [80, 3]],
      "fading": "rayleigh"
    },
    "chain": {"lambda": 1.0, "gamma": 1.7},
    "jammer": {"p_R": 0.8, "p_J": 0.2},
    "experiment": {"W": 500, "n_paths": 100, "seed": 7, "model": "full", "detector": "both"}
  })");
}

}  // namespace

TEST_CASE("scenario parsing") {
  SUBCASE("valid scenario round-trips the fields") {
    const Scenario s = Scenario::from_json(base_scenario());
    CHECK(s.topology.m == 2);
    CHECK(s.lambda == 1.0);
    CHECK(s.gamma == 1.7);
    REQUIRE(s.jammer.point.has_value());
    CHECK(s.jammer.point->p_R == 0.8);
    CHECK(s.experiment.W == 500);
    CHECK(s.experiment.seed == 7);
    CHECK(s.experiment.both_detectors);
  }

  SUBCASE("unknown keys are rejected at every level") {
    auto j = base_scenario();
    j["unknown_top"] = 1;
    CHECK_THROWS_AS(Scenario::from_json(j), ValidationError);

    j = base_scenario();
    j["experiment"]["walk"] = 3;
    CHECK_THROWS_AS(Scenario::from_json(j), ValidationError);

    j = base_scenario();
    j["topology"]["mm"] = 3;
    CHECK_THROWS_AS(Scenario::from_json(j), ValidationError);
  }

  SUBCASE("jammer point must be complete") {
    auto j = base_scenario();
    j["jammer"].erase("p_J");
    CHECK_THROWS_AS(Scenario::from_json(j), ValidationError);
  }

  SUBCASE("grid specs") {
    auto j = base_scenario();
    j["jammer"] = {{"grid_p_R", {0.0, 1.0, 5}}, {"grid_p_J", {0.0, 1.0, 3}}};
    const Scenario s = Scenario::from_json(j);
    REQUIRE(s.jammer.grid_R.has_value());
    const auto vals = s.jammer.grid_R->values();
    REQUIRE(vals.size() == 5);
    CHECK(vals.front() == 0.0);
    CHECK(vals.back() == 1.0);
    CHECK(vals[2] == doctest::Approx(0.5));
  }

  SUBCASE("theta at the noise floor is rejected with a named constraint") {
    auto j = base_scenario();
    j["topology"]["theta"] = 4.0124e-13;
    try {
      Scenario::from_json(j);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("theta") != std::string::npos);
    }
  }
}

TEST_CASE("double formatting round-trips and is minimal") {
  for (const double v : {0.0, 1.0, 0.1, 8.5959e-7, 2.5119e-12, -3.25, 1.0 / 3.0}) {
    const std::string s = format_double(v);
    CHECK(std::strtod(s.c_str(), nullptr) == v);
  }
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
}

TEST_CASE("csv assembly") {
  CsvWriter csv({"a", "b"});
  csv.add_row(std::vector<double>{1.5, 2.0});
  csv.add_row({std::string("x"), std::string("y")});
  CHECK(csv.str() == "a,b\n1.5,2\nx,y\n");
  CHECK_THROWS_AS(csv.add_row(std::vector<double>{1.0}), ValidationError);
}
