#pragma once

#include "uavswarm/scenario.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace uavswarm {

/// Loads `key = value` lines into a ScenarioConfig. Keys are dotted
/// (`swarm.size`) or written under a `[section]` header (`size` below
/// `[swarm]`). `#` and `;` start comments. Unknown keys, repeated keys and
/// malformed values throw ConfigError naming the key.
void parse_config(std::istream& in, ScenarioConfig& cfg, const std::string& source = "<config>");

void load_config_file(const std::string& path, ScenarioConfig& cfg);

/// Applies UAVSIM_<SECTION>_<KEY> environment variables, e.g.
/// UAVSIM_SWARM_SIZE=5 for swarm.size. Returns the keys that were set.
std::vector<std::string> apply_env_overrides(ScenarioConfig& cfg);

/// Sets one dotted key from its text form.
void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value);

/// Every recognised key, in schema order.
std::vector<std::string> config_keys();

/// Writes the full configuration in the same format parse_config reads.
void write_config(std::ostream& os, const ScenarioConfig& cfg);

/// Name of the environment variable that overrides `key`.
std::string env_name(const std::string& key);

}  // namespace uavswarm
