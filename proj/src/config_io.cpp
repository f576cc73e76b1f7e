#include "eqins/config_io.hpp"

#include <fstream>

namespace eqins {

namespace {

using nlohmann::json;

json vec3_to_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec3_from_json(const json& j, const std::string& key) {
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("config: '" + key + "' must be an array of 3 numbers");
  }
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

json rotation_to_json(const Rotation& r) {
  json rows = json::array();
  for (int i = 0; i < 3; ++i) {
    rows.push_back(json::array(
        {r.matrix()(i, 0), r.matrix()(i, 1), r.matrix()(i, 2)}));
  }
  return rows;
}

Rotation rotation_from_json(const json& j, const std::string& key) {
  // Either a 3x3 row array or {"rotvec": [x, y, z]}.
  if (j.is_object() && j.contains("rotvec")) {
    return so3_exp(vec3_from_json(j.at("rotvec"), key + ".rotvec"));
  }
  if (!j.is_array() || j.size() != 3) {
    throw std::invalid_argument("config: '" + key +
                                "' must be a 3x3 matrix or {\"rotvec\": [...]}");
  }
  Mat3 m;
  for (int i = 0; i < 3; ++i) {
    const json& row = j[i];
    if (!row.is_array() || row.size() != 3) {
      throw std::invalid_argument("config: '" + key + "' row " + std::to_string(i) +
                                  " must have 3 entries");
    }
    for (int c = 0; c < 3; ++c) {
      m(i, c) = row[c].get<double>();
    }
  }
  return Rotation(m);
}

}  // namespace

nlohmann::json config_to_json(const SimConfig& cfg) {
  json j;
  j["duration"] = cfg.duration;
  j["dt"] = cfg.dt;
  j["integrator"] = cfg.integrator == Integrator::Euler ? "euler" : "rk4";
  j["attitude_update"] = cfg.attitude_update == AttitudeUpdate::Project ? "project" : "exp";
  j["gains"] = {{"c", cfg.gains.c()}, {"lv", cfg.gains.lv()}, {"lp", cfg.gains.lp()}};
  j["gravity"] = vec3_to_json(cfg.gravity);
  j["initial_system"] = {{"attitude", rotation_to_json(cfg.initial_system.r)},
                         {"velocity", vec3_to_json(cfg.initial_system.v)},
                         {"position", vec3_to_json(cfg.initial_system.p)}};
  j["initial_observer"] = {{"attitude", rotation_to_json(cfg.initial_observer.xhat.r)},
                           {"velocity", vec3_to_json(cfg.initial_observer.xhat.velocity())},
                           {"position", vec3_to_json(cfg.initial_observer.xhat.position())},
                           {"vz", vec3_to_json(cfg.initial_observer.vz())},
                           {"pz", vec3_to_json(cfg.initial_observer.pz())}};
  if (cfg.input_profile.kind == InputProfile::Kind::Paper) {
    j["input_profile"] = {{"name", "paper"}};
  } else {
    j["input_profile"] = {{"name", "constant"},
                          {"omega", vec3_to_json(cfg.input_profile.omega)},
                          {"accel", vec3_to_json(cfg.input_profile.accel)}};
  }
  j["measurement_decimation"] = cfg.measurement_decimation;
  j["noise_std"] = cfg.noise_std ? json(*cfg.noise_std) : json(nullptr);
  j["seed"] = cfg.seed;
  j["checks"] = {{"lyapunov_increase_tol", cfg.checks.lyapunov_increase_tol},
                 {"classify_tol", cfg.checks.classify_tol}};
  return j;
}

SimConfig config_from_json(const nlohmann::json& j) {
  SimConfig cfg;
  try {
    if (j.contains("duration")) cfg.duration = j.at("duration").get<double>();
    if (j.contains("dt")) cfg.dt = j.at("dt").get<double>();
    if (j.contains("integrator")) {
      const std::string name = j.at("integrator").get<std::string>();
      if (name == "euler") {
        cfg.integrator = Integrator::Euler;
      } else if (name == "rk4") {
        cfg.integrator = Integrator::Rk4;
      } else {
        throw std::invalid_argument("config: integrator must be 'euler' or 'rk4'");
      }
    }
    if (j.contains("attitude_update")) {
      const std::string name = j.at("attitude_update").get<std::string>();
      if (name == "project") {
        cfg.attitude_update = AttitudeUpdate::Project;
      } else if (name == "exp") {
        cfg.attitude_update = AttitudeUpdate::ExpMap;
      } else {
        throw std::invalid_argument("config: attitude_update must be 'project' or 'exp'");
      }
    }
    if (j.contains("gains")) {
      const json& g = j.at("gains");
      cfg.gains = Gains(g.at("c").get<double>(), g.at("lv").get<double>(),
                        g.at("lp").get<double>());
    }
    if (j.contains("gravity")) cfg.gravity = vec3_from_json(j.at("gravity"), "gravity");
    if (j.contains("initial_system")) {
      const json& s = j.at("initial_system");
      cfg.initial_system.r = rotation_from_json(s.at("attitude"), "initial_system.attitude");
      cfg.initial_system.v = vec3_from_json(s.at("velocity"), "initial_system.velocity");
      cfg.initial_system.p = vec3_from_json(s.at("position"), "initial_system.position");
    }
    if (j.contains("initial_observer")) {
      const json& o = j.at("initial_observer");
      ObserverState obs;
      Mat32 what;
      what.col(0) = vec3_from_json(o.at("velocity"), "initial_observer.velocity");
      what.col(1) = vec3_from_json(o.at("position"), "initial_observer.position");
      obs.xhat = ExtendedPose{
          rotation_from_json(o.at("attitude"), "initial_observer.attitude"), what};
      obs.wz.col(0) = vec3_from_json(o.at("vz"), "initial_observer.vz");
      obs.wz.col(1) = vec3_from_json(o.at("pz"), "initial_observer.pz");
      cfg.initial_observer = obs;
    }
    if (j.contains("input_profile")) {
      const json& p = j.at("input_profile");
      const std::string name = p.at("name").get<std::string>();
      if (name == "paper") {
        cfg.input_profile = InputProfile{};
      } else if (name == "constant") {
        cfg.input_profile.kind = InputProfile::Kind::Constant;
        cfg.input_profile.omega = vec3_from_json(p.at("omega"), "input_profile.omega");
        cfg.input_profile.accel = vec3_from_json(p.at("accel"), "input_profile.accel");
      } else {
        throw std::invalid_argument("config: unknown input profile '" + name + "'");
      }
    }
    if (j.contains("measurement_decimation")) {
      cfg.measurement_decimation = j.at("measurement_decimation").get<int>();
    }
    if (j.contains("noise_std") && !j.at("noise_std").is_null()) {
      cfg.noise_std = j.at("noise_std").get<double>();
    }
    if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("checks")) {
      const json& c = j.at("checks");
      if (c.contains("lyapunov_increase_tol")) {
        cfg.checks.lyapunov_increase_tol = c.at("lyapunov_increase_tol").get<double>();
      }
      if (c.contains("classify_tol")) {
        cfg.checks.classify_tol = c.at("classify_tol").get<double>();
      }
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("config: malformed document: ") + e.what());
  }
  cfg.validate();
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream file(path);
  if (!file) {
    throw IoError("load_config: cannot open " + path.string());
  }
  json j;
  try {
    file >> j;
  } catch (const json::exception& e) {
    throw std::invalid_argument("load_config: invalid JSON in " + path.string() + ": " +
                                e.what());
  }
  return config_from_json(j);
}

void save_config(const SimConfig& cfg, const std::filesystem::path& path) {
  std::ofstream file(path);
  if (!file) {
    throw IoError("save_config: cannot open " + path.string());
  }
  file << config_to_json(cfg).dump(2) << '\n';
  if (!file) {
    throw IoError("save_config: write failed for " + path.string());
  }
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw std::invalid_argument("--set expects KEY=VALUE, got '" + assignment + "'");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string value = assignment.substr(eq + 1);

  json* node = &j;
  std::size_t pos = 0;
  while (pos <= key.size()) {
    const auto dot = key.find('.', pos);
    const std::string part =
        key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    const bool last = dot == std::string::npos;
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(part);
      } catch (...) {
        throw std::invalid_argument("--set: '" + key + "' indexes an array with '" +
                                    part + "'");
      }
      if (idx >= node->size()) {
        throw std::invalid_argument("--set: index out of range in '" + key + "'");
      }
      node = &(*node)[idx];
    } else if (node->is_object() && node->contains(part)) {
      node = &(*node)[part];
    } else {
      throw std::invalid_argument("--set: unknown config key '" + key + "'");
    }
    if (last) {
      break;
    }
    pos = dot + 1;
  }

  json parsed = json::parse(value, nullptr, false);
  if (parsed.is_discarded()) {
    parsed = json(value);  // plain string value, e.g. integrator=rk4
  }
  *node = parsed;
}

}  // namespace eqins
