#pragma once

#include "gaugelab/models.hpp"

#include <json.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace gaugelab {

using ordered_json = nlohmann::ordered_json;

struct ConfigError : InvalidInput {
  using InvalidInput::InvalidInput;
};

struct ExperimentConfig {
  ModelSpec model;
  std::uint64_t seed = 1;
  std::vector<std::string> suite;
  std::vector<MeshSpec> mesh_sequence;
  std::string output = "out";
  std::string format = "json";
  int samples = 0;  // 0: each check's default
  Tolerances tol;
};

namespace detail {

inline std::map<std::string, double Tolerances::*> tolerance_fields() {
  return {{"construction", &Tolerances::construction}, {"exact", &Tolerances::exact},
          {"property", &Tolerances::property},         {"flow", &Tolerances::flow},
          {"subspace", &Tolerances::subspace},         {"rank_rel", &Tolerances::rank_rel},
          {"compatibility", &Tolerances::compatibility}, {"solver_rel", &Tolerances::solver_rel},
          {"jacobi", &Tolerances::jacobi},             {"brst", &Tolerances::brst},
          {"basicness", &Tolerances::basicness},       {"label_abelian", &Tolerances::label_abelian},
          {"label_flow", &Tolerances::label_flow},     {"expm", &Tolerances::expm},
          {"rate_band", &Tolerances::rate_band}};
}

inline MeshSpec parse_mesh(const nlohmann::json& j, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  MeshSpec m;
  for (auto it = j.begin(); it != j.end(); ++it)
    if (it.key() != "builder" && it.key() != "n") throw ConfigError("unknown key '" + it.key() + "' in " + where);
  if (!j.contains("builder") || !j["builder"].is_string()) throw ConfigError(where + ".builder must be a string");
  m.builder = j["builder"].get<std::string>();
  if (j.contains("n")) {
    if (!j["n"].is_number_integer() || j["n"].get<long long>() < 1) throw ConfigError(where + ".n must be a positive integer");
    m.n = static_cast<int>(j["n"].get<long long>());
  }
  static const std::vector<std::string> builders{"interval", "circle", "disk", "annulus", "sphere"};
  if (std::find(builders.begin(), builders.end(), m.builder) == builders.end())
    throw ConfigError("unknown mesh builder '" + m.builder + "' in " + where);
  return m;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::vector<std::string> keys{"model", "seed", "suite", "mesh_sequence", "output", "format", "samples", "tolerances"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::find(keys.begin(), keys.end(), it.key()) == keys.end()) throw ConfigError("unknown config key '" + it.key() + "'");
  ExperimentConfig c;
  if (j.contains("model")) {
    const auto& m = j["model"];
    if (!m.is_object()) throw ConfigError("model must be an object");
    for (auto it = m.begin(); it != m.end(); ++it)
      if (it.key() != "name" && it.key() != "algebra" && it.key() != "mesh" && it.key() != "theta")
        throw ConfigError("unknown key '" + it.key() + "' in model");
    if (m.contains("name")) {
      if (!m["name"].is_string()) throw ConfigError("model.name must be a string");
      c.model.name = m["name"].get<std::string>();
    }
    if (m.contains("algebra")) {
      if (!m["algebra"].is_string()) throw ConfigError("model.algebra must be a string");
      c.model.algebra = m["algebra"].get<std::string>();
    }
    if (m.contains("mesh")) c.model.mesh = detail::parse_mesh(m["mesh"], "model.mesh");
    if (m.contains("theta")) {
      if (!m["theta"].is_number()) throw ConfigError("model.theta must be a number");
      c.model.theta = m["theta"].get<double>();
    }
  }
  static const std::vector<std::string> models{"maxwell", "ym_su2", "chern_simons_disk", "theta_ym", "bf_corner"};
  if (std::find(models.begin(), models.end(), c.model.name) == models.end())
    throw ConfigError("unknown model '" + c.model.name + "'");
  try {
    (void)presets::by_name(c.model.algebra_name());
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (c.model.theta != 0.0 && c.model.name != "theta_ym") throw ConfigError("theta is only meaningful for theta_ym");
  if (j.contains("seed")) {
    if (!j["seed"].is_number_unsigned() && !(j["seed"].is_number_integer() && j["seed"].get<long long>() >= 0))
      throw ConfigError("seed must be a non-negative integer");
    c.seed = j["seed"].get<std::uint64_t>();
  }
  if (j.contains("suite")) {
    if (!j["suite"].is_array()) throw ConfigError("suite must be a list of check names");
    for (const auto& s : j["suite"]) {
      if (!s.is_string()) throw ConfigError("suite entries must be strings");
      c.suite.push_back(s.get<std::string>());
    }
  }
  if (j.contains("mesh_sequence")) {
    if (!j["mesh_sequence"].is_array()) throw ConfigError("mesh_sequence must be a list");
    int i = 0;
    for (const auto& s : j["mesh_sequence"]) c.mesh_sequence.push_back(detail::parse_mesh(s, "mesh_sequence[" + std::to_string(i++) + "]"));
  }
  if (j.contains("output")) {
    if (!j["output"].is_string()) throw ConfigError("output must be a string");
    c.output = j["output"].get<std::string>();
  }
  if (j.contains("format")) {
    if (!j["format"].is_string()) throw ConfigError("format must be a string");
    c.format = j["format"].get<std::string>();
  }
  if (c.format != "json" && c.format != "csv") throw ConfigError("format must be json or csv");
  if (j.contains("samples")) {
    if (!j["samples"].is_number_integer() || j["samples"].get<long long>() < 1) throw ConfigError("samples must be a positive integer");
    c.samples = static_cast<int>(j["samples"].get<long long>());
  }
  if (j.contains("tolerances")) {
    if (!j["tolerances"].is_object()) throw ConfigError("tolerances must be an object");
    const auto fields = detail::tolerance_fields();
    for (auto it = j["tolerances"].begin(); it != j["tolerances"].end(); ++it) {
      auto f = fields.find(it.key());
      if (f == fields.end()) throw ConfigError("unknown tolerance '" + it.key() + "'");
      if (!it.value().is_number() || !(it.value().get<double>() > 0)) throw ConfigError("tolerance '" + it.key() + "' must be positive");
      c.tol.*(f->second) = it.value().get<double>();
    }
  }
  return c;
}

inline ExperimentConfig parse_config_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

inline ordered_json mesh_json(const MeshSpec& m) { return ordered_json{{"builder", m.builder}, {"n", m.n}}; }

inline ordered_json model_json(const ModelSpec& s) {
  ordered_json j;
  j["name"] = s.name;
  j["algebra"] = s.algebra_name();
  j["mesh"] = mesh_json(s.mesh);
  j["theta"] = s.theta;
  return j;
}

inline ordered_json tolerances_json(const Tolerances& t) {
  ordered_json j;
  j["version"] = Tolerances::version;
  for (const auto& [k, f] : detail::tolerance_fields()) j[k] = t.*f;
  return j;
}

}  // namespace gaugelab
