#include "uavswarm/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>

namespace uavswarm {

namespace {

std::string trim(std::string s) {
  const auto ws = [](unsigned char c) { return std::isspace(c) != 0; };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end || !std::isfinite(out))
    throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

long long to_integer(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || p != end) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_integer(key, v);
  if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
    throw ConfigError(key, "integer out of range");
  return static_cast<int>(x);
}

// Shortest text that reads back to the same double.
std::string fmt(double x) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, r.ptr);
}

struct Entry {
  std::string key;
  std::function<void(ScenarioConfig&, const std::string&)> set;
  std::function<std::string(const ScenarioConfig&)> get;
};

Entry real(std::string key, double ScenarioConfig::*m) {
  return {key, [key, m](ScenarioConfig& c, const std::string& v) { c.*m = to_double(key, v); },
          [m](const ScenarioConfig& c) { return fmt(c.*m); }};
}

Entry integer(std::string key, int ScenarioConfig::*m) {
  return {key, [key, m](ScenarioConfig& c, const std::string& v) { c.*m = to_int(key, v); },
          [m](const ScenarioConfig& c) { return std::to_string(c.*m); }};
}

template <class Sub>
Entry nested_real(std::string key, Sub ScenarioConfig::*s, double Sub::*m) {
  return {key,
          [key, s, m](ScenarioConfig& c, const std::string& v) { (c.*s).*m = to_double(key, v); },
          [s, m](const ScenarioConfig& c) { return fmt((c.*s).*m); }};
}

const std::vector<Entry>& schema() {
  static const std::vector<Entry> entries = [] {
    std::vector<Entry> e;
    e.push_back({"scenario.kind",
                 [](ScenarioConfig& c, const std::string& v) {
                   if (v == "in_front") c.kind = ScenarioKind::ObstacleInFront;
                   else if (v == "on_side") c.kind = ScenarioKind::ObstacleOnSide;
                   else throw ConfigError("scenario.kind", "expected in_front or on_side");
                 },
                 [](const ScenarioConfig& c) { return to_string(c.kind); }});
    e.push_back({"run.planner",
                 [](ScenarioConfig& c, const std::string& v) {
                   if (v == "main") c.planner = PlannerKind::Main;
                   else if (v == "baseline") c.planner = PlannerKind::Baseline;
                   else throw ConfigError("run.planner", "expected main or baseline");
                 },
                 [](const ScenarioConfig& c) { return to_string(c.planner); }});
    e.push_back({"run.seed",
                 [](ScenarioConfig& c, const std::string& v) {
                   const long long s = to_integer("run.seed", v);
                   if (s < 0) throw ConfigError("run.seed", "must be >= 0");
                   c.seed = static_cast<std::uint64_t>(s);
                 },
                 [](const ScenarioConfig& c) { return std::to_string(c.seed); }});
    e.push_back(integer("run.max_steps", &ScenarioConfig::max_steps));
    e.push_back(integer("run.resume_hysteresis", &ScenarioConfig::resume_hysteresis));
    e.push_back(real("run.lookahead_steps", &ScenarioConfig::lookahead_steps));

    e.push_back(real("arena.width", &ScenarioConfig::arena_width));
    e.push_back(real("arena.height", &ScenarioConfig::arena_height));
    e.push_back(real("arena.start_x", &ScenarioConfig::start_x));
    e.push_back(real("arena.cruise_altitude", &ScenarioConfig::cruise_altitude));

    e.push_back(integer("swarm.size", &ScenarioConfig::swarm_size));
    e.push_back(real("swarm.formation_radius", &ScenarioConfig::formation_radius));
    e.push_back(real("swarm.speed", &ScenarioConfig::swarm_speed));
    e.push_back(real("swarm.step_time", &ScenarioConfig::step_time));
    e.push_back(real("swarm.influence_radius", &ScenarioConfig::swarm_influence));

    e.push_back({"obstacle.kind",
                 [](ScenarioConfig& c, const std::string& v) {
                   if (v == "mass_point") c.obstacle_kind = ObstacleKind::MassPoint;
                   else if (v == "shaped") c.obstacle_kind = ObstacleKind::Shaped;
                   else throw ConfigError("obstacle.kind", "expected mass_point or shaped");
                 },
                 [](const ScenarioConfig& c) { return to_string(c.obstacle_kind); }});
    e.push_back(integer("obstacle.count", &ScenarioConfig::obstacle_count));
    e.push_back(real("obstacle.speed", &ScenarioConfig::obstacle_speed));
    e.push_back(real("obstacle.distance", &ScenarioConfig::obstacle_distance));
    e.push_back(real("obstacle.influence_radius", &ScenarioConfig::obstacle_influence));
    e.push_back(real("obstacle.shape_radius", &ScenarioConfig::shape_radius));
    e.push_back(integer("obstacle.shape_samples", &ScenarioConfig::shape_samples));
    e.push_back(real("obstacle.aim_jitter", &ScenarioConfig::aim_jitter));

    e.push_back(real("safety.d_thr", &ScenarioConfig::d_thr));
    e.push_back(real("safety.sensing_range", &ScenarioConfig::sensing_range));
    e.push_back(real("safety.d_safe", &ScenarioConfig::d_safe));
    e.push_back(real("safety.d_obs", &ScenarioConfig::d_obs));
    e.push_back(real("safety.d_u2u", &ScenarioConfig::d_u2u));
    e.push_back(real("safety.clearance_fraction", &ScenarioConfig::clearance_fraction));
    e.push_back(integer("safety.clearance_steps", &ScenarioConfig::clearance_steps));

    e.push_back(integer("planner.horizon_steps", &ScenarioConfig::horizon_steps));
    e.push_back(real("planner.cell", &ScenarioConfig::cell));
    e.push_back(real("planner.grid_margin", &ScenarioConfig::grid_margin));
    e.push_back(nested_real("planner.lambda1", &ScenarioConfig::weights, &CostWeights::lambda1));
    e.push_back(nested_real("planner.lambda2", &ScenarioConfig::weights, &CostWeights::lambda2));
    e.push_back(real("planner.kappa_max", &ScenarioConfig::kappa_max));
    e.push_back(real("planner.heading_weight", &ScenarioConfig::heading_weight));
    e.push_back(real("planner.max_altitude_change", &ScenarioConfig::max_altitude_change));

    e.push_back(integer("pso.particles", &ScenarioConfig::pso_particles));
    e.push_back(integer("pso.iterations", &ScenarioConfig::pso_iterations));
    e.push_back(real("pso.inertia", &ScenarioConfig::pso_inertia));
    e.push_back(real("pso.c1", &ScenarioConfig::pso_c1));
    e.push_back(real("pso.c2", &ScenarioConfig::pso_c2));
    e.push_back(real("pso.init_sigma", &ScenarioConfig::pso_init_sigma));

    e.push_back(real("predict.gamma", &ScenarioConfig::predict_gamma));
    e.push_back(real("predict.tolerance", &ScenarioConfig::predict_tolerance));
    e.push_back(integer("predict.max_iter", &ScenarioConfig::predict_max_iter));

    e.push_back(nested_real("energy.turning_power", &ScenarioConfig::energy,
                            &EnergyCoefficients::turning_power));
    e.push_back(nested_real("energy.length_power", &ScenarioConfig::energy,
                            &EnergyCoefficients::length_power));
    e.push_back(nested_real("energy.comms_power", &ScenarioConfig::energy,
                            &EnergyCoefficients::comms_power));
    e.push_back(nested_real("energy.mass", &ScenarioConfig::energy, &EnergyCoefficients::mass));
    e.push_back(nested_real("energy.gravity", &ScenarioConfig::energy, &EnergyCoefficients::gravity));

    e.push_back(real("baseline.gain", &ScenarioConfig::baseline_gain));
    return e;
  }();
  return entries;
}

const Entry* find_entry(const std::string& key) {
  for (const auto& e : schema())
    if (e.key == key) return &e;
  return nullptr;
}

}  // namespace

void set_config_value(ScenarioConfig& cfg, const std::string& key, const std::string& value) {
  const Entry* e = find_entry(key);
  if (e == nullptr) throw ConfigError(key, "unknown key");
  e->set(cfg, trim(value));
}

void parse_config(std::istream& in, ScenarioConfig& cfg, const std::string& source) {
  std::string line;
  std::string section;
  std::set<std::string> seen;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ConfigError(where, "empty key");
    if (!section.empty()) key = section + "." + key;
    if (!seen.insert(key).second) throw ConfigError(key, "repeated key");
    set_config_value(cfg, key, line.substr(eq + 1));
  }
}

void load_config_file(const std::string& path, ScenarioConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  parse_config(in, cfg, path);
}

std::string env_name(const std::string& key) {
  std::string out = "UAVSIM_";
  for (char c : key)
    out += c == '.' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::string> apply_env_overrides(ScenarioConfig& cfg) {
  std::vector<std::string> applied;
  for (const auto& e : schema()) {
    const char* v = std::getenv(env_name(e.key).c_str());
    if (v == nullptr) continue;
    e.set(cfg, trim(v));
    applied.push_back(e.key);
  }
  return applied;
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& e : schema()) keys.push_back(e.key);
  return keys;
}

void write_config(std::ostream& os, const ScenarioConfig& cfg) {
  std::string section;
  for (const auto& e : schema()) {
    const auto dot = e.key.find('.');
    const std::string s = e.key.substr(0, dot);
    if (s != section) {
      os << (section.empty() ? "" : "\n") << '[' << s << "]\n";
      section = s;
    }
    os << e.key.substr(dot + 1) << " = " << e.get(cfg) << '\n';
  }
}

}  // namespace uavswarm
