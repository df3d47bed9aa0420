#include <catch2/catch_amalgamated.hpp>
#include <string>

#include "indi/harness/config.hpp"
#include "scenarios.hpp"

using namespace indi;
using namespace indi::harness;
using indi::sim::ScenarioConfig;

TEST_CASE("serialize-parse round trip is exact") {
  ScenarioConfig cfg = scenarios::windtunnel_crossing(sim::ControllerKind::indi_nonlinear, 42);
  cfg.vehicle.mass = 0.473;
  cfg.control.filter_omega_n = 47.1234567890123;
  cfg.sensors.accel_bias = {0.01, -0.02, 0.003};
  cfg.adaptation.enabled = true;
  cfg.adaptation.thrust_target = sim::ThrustTarget::accel;
  cfg.accel_schedule = {{1.0, 1.5, {0.0, 4.0, 0.0}}};

  const std::string text = serialize_scenario(cfg);
  const ScenarioConfig parsed = parse_scenario(text);
  REQUIRE(serialize_scenario(parsed) == text);
}

TEST_CASE("defaults fill a minimal config") {
  const ScenarioConfig cfg = parse_scenario(
      "[scenario]\n"
      "name = minimal\n"
      "duration_s = 2\n");
  CHECK(cfg.name == "minimal");
  CHECK(cfg.duration == 2.0);
  CHECK(cfg.vehicle.mass == 0.5);
  REQUIRE(cfg.waypoints.size() == 1);  // defaults to holding the start position
}

TEST_CASE("comments and blank lines are ignored") {
  const ScenarioConfig cfg = parse_scenario(
      "# full-line comment\n"
      "\n"
      "[scenario]\n"
      "name = commented   # trailing comment\n"
      "duration_s = 3  # seconds\n");
  CHECK(cfg.name == "commented");
  CHECK(cfg.duration == 3.0);
}

TEST_CASE("unknown keys are rejected with line and key") {
  try {
    parse_scenario("[scenario]\nname = x\n[vehicle]\nmaas_kg = 0.5\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("line 4") != std::string::npos);
    CHECK(msg.find("maas_kg") != std::string::npos);
    CHECK(msg.find("vehicle") != std::string::npos);
  }
}

TEST_CASE("unknown sections are rejected") {
  CHECK_THROWS_AS(parse_scenario("[vehicles]\nmass_kg = 0.5\n"), ConfigError);
}

TEST_CASE("keys before any section are rejected") {
  CHECK_THROWS_AS(parse_scenario("name = orphan\n"), ConfigError);
}

TEST_CASE("malformed values name the offending key") {
  try {
    parse_scenario("[scenario]\nduration_s = fast\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("duration_s") != std::string::npos);
    CHECK(msg.find("line 2") != std::string::npos);
  }
}

TEST_CASE("waypoints need exactly four numbers") {
  CHECK_THROWS_AS(parse_scenario("[waypoints]\nwp = 0 1 2\n"), ConfigError);
}

TEST_CASE("controller and mode names are validated") {
  CHECK_THROWS_AS(parse_scenario("[scenario]\ncontroller = indy\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("[wind]\nmode = hurricane\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("[adaptation]\nthrust_target = guess\n"), ConfigError);
}

TEST_CASE("type invariants are enforced after parsing") {
  CHECK_THROWS_AS(parse_scenario("[vehicle]\nmass_kg = -1\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("[scenario]\nduration_s = 0\n"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("[wind]\nmode = windtunnel-jet\njet_speed = 31\n"),
                  ConfigError);
  CHECK_THROWS_AS(
      parse_scenario("[waypoints]\nwp = 5 0 0 -1\nwp = 2 0 0 -1\n"),  // unsorted
      ConfigError);
}

TEST_CASE("every shipped config parses and validates") {
  for (const char* name :
       {"hover-calm.cfg", "windtunnel-indi.cfg", "windtunnel-pid.cfg", "takeoff-wind-indi.cfg",
        "takeoff-wind-pid.cfg", "flip-linear.cfg", "flip-nonlinear.cfg",
        "adaptation-demo.cfg"}) {
    const std::string path = std::string(CONFIG_DIR) + "/" + name;
    INFO(path);
    REQUIRE_NOTHROW(load_scenario(path));
  }
}
