#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "fragchain/engine.hpp"

namespace fragchain {

struct ConfigNotFoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

/// Parses a JSON simulation config:
///   {"law": {"name": "uniform_binary", "params": {}}, "erosion": 0,
///    "alpha": 0, "mode": "exact", "epsilon": 1e-3, "horizon": 2,
///    "snapshot_times": [1, 2], "seed": 1, "replicas": 10,
///    "event_budget": 100000000}
/// Only "law" is required. Throws InvalidConfigError on malformed input and
/// UnknownLawError on an unknown law; the engine preconditions are checked
/// separately by SimConfig::validate.
SimConfig parse_config(std::string_view json_text);
SimConfig load_config(const std::string& path);

/// Canonical JSON of a resolved config (fixed key order).
std::string config_to_json(const SimConfig& cfg);

}  // namespace fragchain
