#include "uavswarm/scenario.hpp"

#include <cmath>

namespace uavswarm {

namespace {

void require(bool ok, const char* field, const std::string& msg) {
  if (!ok) throw ConfigError(field, msg);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(swarm_size >= 2 && swarm_size <= 10, "swarm.size", "must be in [2, 10]");
  require(formation_radius >= 1.0 && formation_radius <= 20.0, "swarm.formation_radius",
          "must be in [1, 20]");
  require(swarm_speed > 0.0, "swarm.speed", "must be > 0");
  require(step_time > 0.0, "swarm.step_time", "must be > 0");
  require(swarm_influence > 0.0, "swarm.influence_radius", "must be > 0");
  require(arena_width > 0.0 && arena_height > 0.0, "arena.width", "arena must have positive size");
  require(start_x >= 0.0 && start_x < arena_width, "arena.start_x", "must lie inside the arena");
  require(obstacle_count >= 0, "obstacle.count", "must be >= 0");
  require(obstacle_speed >= 0.0, "obstacle.speed", "must be >= 0");
  require(obstacle_distance > 0.0, "obstacle.distance", "must be > 0");
  require(shape_radius >= 0.0, "obstacle.shape_radius", "must be >= 0");
  require(obstacle_kind != ObstacleKind::Shaped || shape_samples >= 1, "obstacle.shape_samples",
          "shaped obstacles need at least one sample");
  require(aim_jitter >= 0.0, "obstacle.aim_jitter", "must be >= 0");
  require(d_obs > 0.0, "safety.d_obs", "must be > 0");
  require(d_u2u > 0.0, "safety.d_u2u", "must be > 0");
  require(d_safe >= d_obs + step_len() - 1e-9, "safety.d_safe", "must be >= d_obs + |S|");
  require(clearance_fraction > 0.0 && clearance_fraction <= 1.0, "safety.clearance_fraction",
          "must be in (0, 1]");
  require(clearance_steps >= 0, "safety.clearance_steps", "must be >= 0");
  require(obstacle_influence > d_safe, "obstacle.influence_radius", "must exceed d_safe");
  require(d_thr > 0.0, "safety.d_thr", "must be > 0");
  require(d_thr <= sensing_range, "safety.d_thr", "must not exceed the sensing range");
  require(horizon_steps >= 1, "planner.horizon_steps", "must be >= 1");
  require(cell > 0.0, "planner.cell", "must be > 0");
  require(step_len() / cell >= 2.0, "planner.cell", "must leave at least 2 cells per step");
  require(grid_margin >= 0.0, "planner.grid_margin", "must be >= 0");
  require(weights.lambda1 >= 0.0 && weights.lambda2 >= 0.0 &&
              std::abs(weights.lambda1 + weights.lambda2 - 1.0) <= 1e-9,
          "planner.lambda1", "lambda1 and lambda2 must be >= 0 and sum to 1");
  require(energy.turning_power >= 0.0 && energy.length_power >= 0.0 && energy.comms_power >= 0.0 &&
              energy.mass >= 0.0 && energy.gravity >= 0.0,
          "energy.mass", "energy coefficients must be >= 0");
  require(pso_particles >= 2, "pso.particles", "must be >= 2");
  require(pso_iterations >= 0, "pso.iterations", "must be >= 0");
  require(pso_init_sigma >= 0.0, "pso.init_sigma", "must be >= 0");
  require(kappa_max > 0.0, "planner.kappa_max", "must be > 0");
  require(heading_weight >= 0.0, "planner.heading_weight", "must be >= 0");
  require(max_altitude_change > 0.0, "planner.max_altitude_change", "must be > 0");
  require(predict_gamma > 0.0, "predict.gamma", "must be > 0");
  require(predict_tolerance > 0.0, "predict.tolerance", "must be > 0");
  require(predict_max_iter >= 1, "predict.max_iter", "must be >= 1");
  require(resume_hysteresis >= 0, "run.resume_hysteresis", "must be >= 0");
  require(lookahead_steps > 0.0, "run.lookahead_steps", "must be > 0");
  require(max_steps >= 1, "run.max_steps", "must be >= 1");
  require(baseline_gain >= 0.0, "baseline.gain", "must be >= 0");
}

ScenarioConfig make_scenario(ScenarioKind kind) {
  ScenarioConfig c;
  c.kind = kind;
  return c;
}

std::string to_string(ScenarioKind k) {
  return k == ScenarioKind::ObstacleInFront ? "in_front" : "on_side";
}

std::string to_string(PlannerKind k) { return k == PlannerKind::Main ? "main" : "baseline"; }

std::string to_string(ObstacleKind k) {
  return k == ObstacleKind::MassPoint ? "mass_point" : "shaped";
}

std::string to_string(Mode m) {
  switch (m) {
    case Mode::Cruise: return "cruise";
    case Mode::Avoid: return "avoid";
    case Mode::Resume: return "resume";
  }
  return "?";
}

WorldState spawn_world(const ScenarioConfig& cfg) {
  cfg.validate();
  Rng rng(derive_seed(cfg.seed, {0x5ce7a1}));
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  WorldState w;
  const Point2 center(cfg.start_x, 0.5 * cfg.arena_height);
  const double phase = 2.0 * kPi * unit(rng);
  const int n = cfg.swarm_size;
  Point2 target_sum = Point2::Zero();
  for (int i = 0; i < n; ++i) {
    const double a = phase + 2.0 * kPi * i / n;
    const Point2 p = center + cfg.formation_radius * unit_from_heading(a);
    UavState u;
    u.id = i;
    u.position = lift(p, cfg.cruise_altitude);
    u.heading = 0.0;
    u.speed = cfg.swarm_speed;
    u.original_altitude = cfg.cruise_altitude;
    // Straight pre-planned path that ends beyond the right edge.
    u.path = {p, Point2(cfg.arena_width, p.y()), Point2(cfg.arena_width + 100.0, p.y())};
    u.next_waypoint = 1;
    target_sum += u.path[1];
    w.uavs.push_back(std::move(u));
  }
  w.swarm_target = target_sum / n;

  const double side = unit(rng) < 0.5 ? 1.0 : -1.0;
  for (int k = 0; k < cfg.obstacle_count; ++k) {
    const double jitter = cfg.aim_jitter * (2.0 * unit(rng) - 1.0);
    const double lane = (k - 0.5 * (cfg.obstacle_count - 1)) * 3.0 * cfg.d_safe;
    ObstacleModel o;
    o.kind = cfg.obstacle_kind;
    o.influence_radius = cfg.obstacle_influence;
    o.altitude = cfg.cruise_altitude;
    if (cfg.kind == ScenarioKind::ObstacleInFront) {
      o.center = center + Vec2(cfg.obstacle_distance, lane + jitter);
      o.velocity = Vec2(-cfg.obstacle_speed, 0.0);
    } else {
      // Interception course: the obstacle crosses the swarm path where the
      // swarm centre will be when it arrives.
      const double ratio = cfg.obstacle_speed / cfg.swarm_speed;
      const double ahead = cfg.obstacle_distance / std::sqrt(1.0 + ratio * ratio);
      o.center = center + Vec2(ahead + lane + jitter, side * ahead * ratio);
      o.velocity = Vec2(0.0, -side * cfg.obstacle_speed);
      if (cfg.obstacle_speed == 0.0) o.center = center + Vec2(cfg.obstacle_distance + lane, jitter);
    }
    if (o.kind == ObstacleKind::Shaped) {
      for (int s = 0; s < cfg.shape_samples; ++s)
        o.sample_points.push_back(
            o.center + cfg.shape_radius * unit_from_heading(2.0 * kPi * s / cfg.shape_samples));
    }
    o.validate(cfg.d_safe, cfg.shape_radius);
    w.obstacles.push_back(std::move(o));
  }
  return w;
}

}  // namespace uavswarm
