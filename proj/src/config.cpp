#include "fragchain/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace fragchain {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

template <class T>
T field(const json& j, const char* key, T fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw InvalidConfigError(std::string("config: field '") + key + "' has the wrong type");
  }
}

}  // namespace

SimConfig parse_config(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw InvalidConfigError(std::string("config: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw InvalidConfigError("config: top level must be an object");
  static const char* known[] = {"law",           "erosion", "alpha",    "mode",        "epsilon", "horizon",
                                "snapshot_times", "seed",    "replicas", "event_budget"};
  for (const auto& [key, value] : j.items())
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw InvalidConfigError("config: unknown field '" + key + "'");

  if (!j.contains("law")) throw InvalidConfigError("config: missing 'law'");
  const auto& law = j.at("law");
  std::string name;
  std::map<std::string, double> params;
  if (law.is_string()) {
    name = law.get<std::string>();
  } else if (law.is_object() && law.contains("name") && law.at("name").is_string()) {
    name = law.at("name").get<std::string>();
    params = field<std::map<std::string, double>>(law, "params", {});
  } else {
    throw InvalidConfigError("config: 'law' must be a name or {\"name\": ..., \"params\": {...}}");
  }

  SimConfig cfg;
  cfg.law = make_law(name, params);
  cfg.erosion = field(j, "erosion", 0.0);
  cfg.alpha = field(j, "alpha", 0.0);
  cfg.mode = sim_mode_from_string(field<std::string>(j, "mode", "exact"));
  cfg.epsilon = field(j, "epsilon", 0.0);
  if (j.contains("horizon") && j.at("horizon") == "inf")
    cfg.horizon = kInf;
  else
    cfg.horizon = field(j, "horizon", 1.0);
  cfg.snapshot_times = field<std::vector<double>>(j, "snapshot_times", {});
  cfg.seed = field<std::uint64_t>(j, "seed", 0);
  cfg.replicas = field<std::size_t>(j, "replicas", 1);
  cfg.event_budget = field<std::uint64_t>(j, "event_budget", cfg.event_budget);
  return cfg;
}

SimConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigNotFoundError("config not found: " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const SimConfig& cfg) {
  ordered_json j;
  ordered_json law;
  law["name"] = cfg.law ? cfg.law->name() : "";
  law["params"] = cfg.law ? cfg.law->params() : std::map<std::string, double>{};
  j["law"] = law;
  j["erosion"] = cfg.erosion;
  j["alpha"] = cfg.alpha;
  j["mode"] = to_string(cfg.mode);
  j["epsilon"] = cfg.epsilon;
  j["horizon"] = std::isfinite(cfg.horizon) ? ordered_json(cfg.horizon) : ordered_json("inf");
  j["snapshot_times"] = cfg.snapshot_times;
  j["seed"] = cfg.seed;
  j["replicas"] = cfg.replicas;
  j["event_budget"] = cfg.event_budget;
  return j.dump(2);
}

}  // namespace fragchain
