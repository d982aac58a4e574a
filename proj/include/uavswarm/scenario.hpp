#pragma once

#include "uavswarm/cost.hpp"
#include "uavswarm/field.hpp"
#include "uavswarm/geometry.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace uavswarm {

enum class ScenarioKind { ObstacleInFront, ObstacleOnSide };
enum class PlannerKind { Main, Baseline };

/// Invalid configuration; `field()` names the offending key.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ScenarioConfig {
  ScenarioKind kind{ScenarioKind::ObstacleInFront};
  PlannerKind planner{PlannerKind::Main};
  std::uint64_t seed{1};
  int max_steps{200};

  double arena_width{300.0};
  double arena_height{300.0};
  double start_x{50.0};           // swarm centre at spawn
  double obstacle_distance{200.0};
  double cruise_altitude{100.0};

  int swarm_size{3};
  double formation_radius{20.0};  // tau
  double swarm_speed{10.0};       // v_s
  double step_time{1.0};          // s per planning step; |S| = v_s * step_time
  double swarm_influence{5.0};    // R_s

  ObstacleKind obstacle_kind{ObstacleKind::MassPoint};
  int obstacle_count{1};
  double obstacle_speed{5.0};
  double obstacle_influence{100.0};  // R_o
  double shape_radius{5.0};
  int shape_samples{8};
  double aim_jitter{5.0};            // m, uniform lateral aim offset

  double d_thr{50.0};
  double sensing_range{100.0};
  double d_safe{20.0};
  double d_obs{10.0};
  double d_u2u{5.0};
  double clearance_fraction{0.5};  // hard U2O bound for level arcs, from d_obs (0) to d_safe (1)
  int clearance_steps{9};       // straight steps checked after the arc

  int horizon_steps{10};  // k
  double cell{1.0};       // grid cell and waypoint spacing h
  double grid_margin{10.0};
  CostWeights weights;
  EnergyCoefficients energy;

  int pso_particles{30};
  int pso_iterations{50};
  double pso_inertia{0.7};
  double pso_c1{0.5};
  double pso_c2{0.5};
  double pso_init_sigma{0.05};
  double kappa_max{0.2};
  double heading_weight{1e-3};
  double max_altitude_change{20.0};

  double predict_gamma{1.0};
  double predict_tolerance{1e-3};
  int predict_max_iter{200};

  int resume_hysteresis{3};
  double lookahead_steps{2.0};  // pure-pursuit lookahead in units of |S|
  double baseline_gain{2000.0};  // smallest U2O-safe gain on the InFront suite

  [[nodiscard]] double step_len() const { return swarm_speed * step_time; }
  [[nodiscard]] double clearance() const { return d_obs + clearance_fraction * (d_safe - d_obs); }

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

/// Defaults of the reference setup with `kind` applied.
ScenarioConfig make_scenario(ScenarioKind kind);

std::string to_string(ScenarioKind k);
std::string to_string(PlannerKind k);
std::string to_string(ObstacleKind k);

enum class Mode { Cruise, Avoid, Resume };
std::string to_string(Mode m);

struct UavState {
  int id{0};
  Point3 position{0.0, 0.0, 0.0};
  double heading{0.0};
  double speed{10.0};
  double original_altitude{0.0};
  std::vector<Point2> path;  // pre-planned waypoints
  std::size_t next_waypoint{1};
  Mode mode{Mode::Cruise};
  int clear_steps{0};  // consecutive Avoid steps without threat or conflict
  bool finished{false};
};

struct WorldState {
  std::vector<UavState> uavs;
  std::vector<ObstacleModel> obstacles;
  Point2 swarm_target{0.0, 0.0};
  int step{0};
  bool avoiding{false};  // any UAV in Avoid
  int clear_steps{0};    // swarm-wide counter of the baseline planner
};

/// Spawns the circular formation on the left, targets on the right and the
/// obstacles ahead of (InFront) or beside (OnSide) the swarm. The formation
/// phase, the aim offset and the OnSide approach side come from `cfg.seed`.
WorldState spawn_world(const ScenarioConfig& cfg);

}  // namespace uavswarm
