#include <doctest.h>

#include <fstream>

#include "eqins/config_io.hpp"
#include "test_support.hpp"

using namespace eqins;
namespace fs = std::filesystem;

TEST_CASE("config json roundtrip preserves every field") {
  SimConfig cfg = SimConfig::paper();
  cfg.integrator = Integrator::Rk4;
  cfg.dt = 0.002;
  cfg.duration = 12.5;
  cfg.gains = Gains(2.5, 10.0, 15.0);
  cfg.gravity = Vec3(0.0, 0.0, 1.62);
  cfg.measurement_decimation = 5;
  cfg.noise_std = 0.02;
  cfg.seed = 99;
  cfg.checks.lyapunov_increase_tol = 3e-5;

  cfg.attitude_update = AttitudeUpdate::ExpMap;

  const SimConfig back = config_from_json(config_to_json(cfg));
  CHECK(back.integrator == Integrator::Rk4);
  CHECK(back.attitude_update == AttitudeUpdate::ExpMap);
  CHECK(back.dt == cfg.dt);
  CHECK(back.duration == cfg.duration);
  CHECK(back.gains.c() == 2.5);
  CHECK(back.gains.lv() == 10.0);
  CHECK(back.gains.lp() == 15.0);
  CHECK((back.gravity - cfg.gravity).norm() == 0.0);
  CHECK(back.measurement_decimation == 5);
  REQUIRE(back.noise_std.has_value());
  CHECK(*back.noise_std == 0.02);
  CHECK(back.seed == 99);
  CHECK(back.checks.lyapunov_increase_tol == 3e-5);
  CHECK((back.initial_observer.xhat.r.matrix() -
         cfg.initial_observer.xhat.r.matrix()).norm() < 1e-15);
  CHECK((back.initial_observer.xhat.w - cfg.initial_observer.xhat.w).norm() == 0.0);
}

TEST_CASE("attitude accepts a rotation-vector form") {
  nlohmann::json j = config_to_json(SimConfig::paper());
  j["initial_observer"]["attitude"] = {{"rotvec", {0.99 * M_PI, 0.0, 0.0}}};
  const SimConfig cfg = config_from_json(j);
  CHECK((cfg.initial_observer.xhat.r.matrix() -
         so3_exp(Vec3(0.99 * M_PI, 0, 0)).matrix()).norm() < 1e-15);
}

TEST_CASE("malformed documents are rejected with context") {
  nlohmann::json j = config_to_json(SimConfig::paper());
  j["gravity"] = {1.0, 2.0};
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);

  j = config_to_json(SimConfig::paper());
  j["integrator"] = "midpoint";
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);

  j = config_to_json(SimConfig::paper());
  j["gains"]["lv"] = -3.0;
  CHECK_THROWS_AS(config_from_json(j), GainDomainError);

  j = config_to_json(SimConfig::paper());
  j["dt"] = "soon";
  CHECK_THROWS_AS(config_from_json(j), std::invalid_argument);
}

TEST_CASE("apply_override") {
  nlohmann::json j = config_to_json(SimConfig::paper());

  apply_override(j, "gains.c=8.0");
  CHECK(j["gains"]["c"].get<double>() == 8.0);

  apply_override(j, "integrator=rk4");
  CHECK(j["integrator"].get<std::string>() == "rk4");

  apply_override(j, "gravity=[0,0,1.62]");
  CHECK(j["gravity"][2].get<double>() == 1.62);

  apply_override(j, "gravity.2=9.78");
  CHECK(j["gravity"][2].get<double>() == 9.78);

  apply_override(j, "noise_std=0.05");
  const SimConfig cfg = config_from_json(j);
  CHECK(cfg.gains.c() == 8.0);
  CHECK(cfg.integrator == Integrator::Rk4);
  REQUIRE(cfg.noise_std.has_value());
  CHECK(*cfg.noise_std == 0.05);

  CHECK_THROWS_WITH_AS(apply_override(j, "gains.kp=1.0"),
                       doctest::Contains("gains.kp"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(j, "gravity.7=1.0"), std::invalid_argument);
  CHECK_THROWS_AS(apply_override(j, "no_equals_sign"), std::invalid_argument);
}

TEST_CASE("load_config and save_config") {
  const fs::path dir = fs::temp_directory_path() / "eqins_test_config";
  fs::remove_all(dir);
  fs::create_directories(dir);

  CHECK_THROWS_AS(load_config(dir / "missing.json"), IoError);

  SimConfig cfg = SimConfig::paper();
  cfg.duration = 7.0;
  save_config(cfg, dir / "cfg.json");
  const SimConfig back = load_config(dir / "cfg.json");
  CHECK(back.duration == 7.0);
  CHECK(back.gains.lp() == 20.0);

  std::ofstream(dir / "broken.json") << "{ not json";
  CHECK_THROWS_AS(load_config(dir / "broken.json"), std::invalid_argument);
}
