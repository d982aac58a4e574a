#include "uavswarm/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>

namespace uavswarm {

std::string to_string(EventKind k) {
  switch (k) {
    case EventKind::Trigger: return "trigger";
    case EventKind::Conflict: return "conflict";
    case EventKind::AltitudeChange: return "altitude_change";
    case EventKind::EmergencyAltitude: return "emergency_altitude";
    case EventKind::PredictionFailed: return "prediction_failed";
    case EventKind::PlannerFallback: return "planner_fallback";
    case EventKind::Resume: return "resume";
    case EventKind::AltitudeReturn: return "altitude_return";
    case EventKind::Finished: return "finished";
  }
  return "?";
}

namespace {

// Stream tags for derive_seed.
constexpr std::uint64_t kTagLevel = 0x1e7e1;
constexpr std::uint64_t kTagAltitude = 0xa171;
constexpr std::uint64_t kTagSafety = 0x5afe;

// Conflicts are detected and resolved against d_u2u plus this margin.
constexpr double kSeparationMargin = 0.5;

// Heading offset from the path of a UAV giving way to a teammate, rad.
constexpr double kYieldAngle = 0.5;

double u2o_distance(const Point3& p, const ObstacleModel& o) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& m : o.mass_points())
    best = std::min(best, std::hypot((level(p) - m).norm(), p.z() - o.altitude));
  return best;
}

std::vector<std::size_t> active_uavs(const WorldState& w) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < w.uavs.size(); ++i)
    if (!w.uavs[i].finished) out.push_back(i);
  return out;
}

// Keeps next_waypoint on the segment the UAV is currently abreast of.
void advance_waypoint(UavState& u) {
  const Point2 p = level(u.position);
  while (u.next_waypoint + 1 < u.path.size()) {
    const Point2& a = u.path[u.next_waypoint - 1];
    const Point2& b = u.path[u.next_waypoint];
    const Vec2 d = b - a;
    if ((p - a).dot(d) < d.squaredNorm()) break;
    ++u.next_waypoint;
  }
}

// Signed distance from the current path segment (left positive).
double cross_track(const UavState& u) {
  const Point2& a = u.path[u.next_waypoint - 1];
  const Vec2 d = (u.path[u.next_waypoint] - a).normalized();
  const Vec2 r = level(u.position) - a;
  return d.x() * r.y() - d.y() * r.x();
}

Point2 lookahead_point(const UavState& u, double dist) {
  const Point2 p = level(u.position);
  std::size_t k = u.next_waypoint;
  Point2 a = u.path[k - 1];
  Vec2 d = (u.path[k] - a).normalized();
  Point2 q = a + d * (p - a).dot(d);
  // Never closer along the path than the UAV is off it: rejoin at <= 45 deg.
  double left = std::max(dist, (p - q).norm());
  while (true) {
    const double seg = (u.path[k] - q).dot(d);
    if (seg >= left || k + 1 >= u.path.size()) return q + d * left;
    left -= std::max(0.0, seg);
    q = u.path[k];
    ++k;
    d = (u.path[k] - u.path[k - 1]).normalized();
  }
}

ArcParams pursuit_arc(const UavState& u, const ScenarioConfig& cfg) {
  const double s = cfg.step_len();
  const Point2 p = level(u.position);
  const Point2 target = lookahead_point(u, cfg.lookahead_steps * s);
  const Vec2 to = target - p;
  const double alpha = wrap_angle(heading_of(to) - u.heading);
  double kappa = 0.0;
  if (std::abs(alpha) >= kPi / 2.0)
    kappa = alpha > 0.0 ? cfg.kappa_max : -cfg.kappa_max;
  else
    kappa = std::clamp(2.0 * std::sin(alpha) / to.norm(), -cfg.kappa_max, cfg.kappa_max);
  return {u.heading, kappa, p, s};
}

// Turns towards `desired` as far as kappa_max allows within one step.
ArcParams turn_towards(const UavState& u, double desired, const ScenarioConfig& cfg) {
  const double s = cfg.step_len();
  const double turn = wrap_angle(desired - u.heading);
  const double kappa = std::clamp(turn / s, -cfg.kappa_max, cfg.kappa_max);
  return {u.heading, kappa, level(u.position), s};
}

// Level points of `count` waypoints spread over `steps` steps of pure
// pursuit from the current state.
Trajectory pursuit_rollout(const UavState& u0, int steps, std::size_t count,
                           const ScenarioConfig& cfg) {
  const double s = cfg.step_len();
  const double ds = steps * s / static_cast<double>(count - 1);
  UavState u = u0;
  Trajectory t;
  t.spacing = ds;
  t.step_len = s;
  t.steps = steps;
  ArcParams arc = pursuit_arc(u, cfg);
  int at = 0;
  for (std::size_t j = 0; j < count; ++j) {
    const double along = ds * static_cast<double>(j);
    while (along > (at + 1) * s + 1e-9) {
      u.position = lift(arc.end(), u.position.z());
      u.heading = wrap_angle(arc.end_heading());
      advance_waypoint(u);
      arc = pursuit_arc(u, cfg);
      ++at;
    }
    t.waypoints.push_back(arc.point_at(along - at * s));
  }
  return t;
}

// Smallest 3-D distance between a level rollout flown at altitude z and the
// obstacles moving at constant velocity, time-aligned at the swarm speed.
double rollout_clearance(const Trajectory& t, double z, const std::vector<ObstacleModel>& obstacles,
                         const ScenarioConfig& cfg) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < t.size(); ++j) {
    const double time = t.spacing * static_cast<double>(j) / cfg.swarm_speed;
    for (const auto& o : obstacles)
      best = std::min(best, u2o_distance(lift(t[j], z), o.advanced(time)));
  }
  return best;
}

// Conflicts once every UAV has changed altitude by dz. The change is flown
// vertically at the start positions, so that motion is checked as well.
ConflictSet separation_conflicts(std::span<const Trajectory> trajs, std::span<const double> z,
                                 std::span<const double> dz, double d_u2u) {
  std::vector<double> zf(z.size());
  for (std::size_t k = 0; k < z.size(); ++k) zf[k] = z[k] + dz[k];
  ConflictSet c = detect_conflicts(trajs, d_u2u, zf);
  std::vector<bool> inv(z.size(), false);
  for (auto k : c.involved) inv[k] = true;
  for (auto& p : c.pairs) {
    const double a = z[p.i] - z[p.j];
    const double b = zf[p.i] - zf[p.j];
    const double gap = a * b <= 0.0 ? 0.0 : std::min(std::abs(a), std::abs(b));
    const double d = std::hypot((trajs[p.i][0] - trajs[p.j][0]).norm(), gap);
    if (d < p.distance) {
      p.distance = d;
      p.index = 0;
    }
    if (d < d_u2u) {
      p.conflict = true;
      inv[p.i] = inv[p.j] = true;
    }
  }
  c.involved.clear();
  for (std::size_t k = 0; k < inv.size(); ++k)
    if (inv[k]) c.involved.push_back(k);
  return c;
}

AltitudePlanConfig altitude_config(const ScenarioConfig& cfg) {
  AltitudePlanConfig a;
  a.pso.particles = cfg.pso_particles;
  a.pso.iterations = cfg.pso_iterations;
  a.pso.inertia = cfg.pso_inertia;
  a.pso.c1 = cfg.pso_c1;
  a.pso.c2 = cfg.pso_c2;
  a.max_delta = cfg.max_altitude_change;
  a.check_transition = true;
  return a;
}

// Plans altitude changes for the active UAVs whose trajectories conflict.
// `dz` (one per active UAV) holds changes already decided; it is updated in
// place. Returns the active positions that were in conflict.
std::vector<std::size_t> resolve_altitudes(const WorldState& w, std::span<const std::size_t> active,
                                           std::span<const Trajectory> trajs, std::vector<double>& dz,
                                           const ScenarioConfig& cfg, std::uint64_t tag,
                                           RunLog& log) {
  std::vector<double> z;
  for (auto i : active) z.push_back(w.uavs[i].position.z());
  const double sep = cfg.d_u2u + kSeparationMargin;
  const ConflictSet conflicts = separation_conflicts(trajs, z, dz, sep);
  if (conflicts.empty()) return {};

  std::string who;
  for (auto k : conflicts.involved)
    who += (who.empty() ? "" : " ") + std::to_string(w.uavs[active[k]].id);
  log.events.push_back({w.step, -1, EventKind::Conflict, who});

  std::vector<std::uint64_t> seeds;
  for (auto k : conflicts.involved)
    seeds.push_back(derive_seed(cfg.seed, {tag, static_cast<std::uint64_t>(w.step),
                                           static_cast<std::uint64_t>(w.uavs[active[k]].id)}));
  const AltitudePlan alt = plan_altitude(conflicts, trajs, sep, altitude_config(cfg), seeds, z, dz);
  if (alt.emergency) log.events.push_back({w.step, -1, EventKind::EmergencyAltitude, who});
  for (auto k : conflicts.involved) {
    if (alt.deltas[k] != dz[k] && alt.deltas[k] != 0.0)
      log.events.push_back({w.step, w.uavs[active[k]].id, EventKind::AltitudeChange,
                            std::to_string(alt.deltas[k])});
  }
  dz = alt.deltas;
  return conflicts.involved;
}

Bounds2 planning_window(const WorldState& w, std::span<const std::size_t> active, double reach) {
  Bounds2 b{level(w.uavs[active[0]].position), level(w.uavs[active[0]].position)};
  for (auto i : active) {
    const Point2 p = level(w.uavs[i].position);
    b.min = b.min.cwiseMin(p);
    b.max = b.max.cwiseMax(p);
  }
  b.min -= Vec2(reach, reach);
  b.max += Vec2(reach, reach);
  return b;
}

struct MainPlan {
  std::vector<ArcParams> arcs;  // indexed by UAV
  std::vector<double> dz;       // indexed by active position
  std::vector<bool> conflict;   // indexed by active position
};

// One step of the main planner. Avoiding UAVs get field-based predictions and
// PSO-Level arcs; the others follow their pure-pursuit rollouts. Altitude
// conflicts are resolved over everybody's trajectory.
MainPlan plan_main(const WorldState& w, std::span<const std::size_t> active,
                   const std::vector<ObstacleModel>& sensed, std::span<const Trajectory> rollouts,
                   const ScenarioConfig& cfg, RunLog& log) {
  const double s = cfg.step_len();
  const double h = cfg.cell;
  const std::size_t n = w.uavs.size();
  const std::size_t na = active.size();

  MainPlan out;
  out.arcs.resize(n);
  out.dz.assign(na, 0.0);
  out.conflict.assign(na, false);
  std::vector<Trajectory> trajs(rollouts.begin(), rollouts.end());
  std::vector<double> z;
  for (auto i : active) z.push_back(w.uavs[i].position.z());

  std::vector<std::size_t> avoiding;  // active positions
  for (std::size_t k = 0; k < na; ++k)
    if (w.uavs[active[k]].mode == Mode::Avoid) avoiding.push_back(k);

  std::vector<Point2> positions;
  for (auto i : active) positions.push_back(level(w.uavs[i].position));
  const CenterResult pstar = conceptual_center(positions, w.swarm_target, s);

  EnvironmentField field;
  field.swarm = {pstar.center, cfg.swarm_speed, cfg.swarm_influence};
  field.d_safe = cfg.d_safe;
  field.obstacles = sensed;

  const double reach = cfg.horizon_steps * s + cfg.grid_margin;
  Bounds2 window;
  if (!avoiding.empty()) window = planning_window(w, active, reach + h);

  // Planes sharing the same visible obstacles share their samples.
  std::map<std::vector<bool>, IntensitySamples> planes;
  auto plane_for = [&](double altitude, EnvironmentField& plane) -> const IntensitySamples& {
    std::vector<bool> key;
    plane = EnvironmentField{field.swarm, {}, field.d_safe};
    for (const auto& o : field.obstacles) {
      const bool in = std::abs(o.altitude - altitude) < cfg.d_obs;
      key.push_back(in);
      if (in) plane.obstacles.push_back(o);
    }
    auto it = planes.find(key);
    if (it == planes.end()) it = planes.emplace(key, sample_intensity(plane, window, h)).first;
    return it->second;
  };

  GradientGridOptions gopts;
  gopts.required_reach = reach;
  std::vector<Clearance> clearance(n);
  auto grid_for = [&](std::size_t i, double altitude) {
    EnvironmentField plane;
    const auto& samples = plane_for(altitude, plane);
    clearance[i] = {{}, cfg.clearance(), cfg.clearance_steps};
    for (const auto& o : plane.obstacles)
      for (const auto& m : o.mass_points()) clearance[i].points.push_back({m, o.velocity});
    const Point2 p0 = level(w.uavs[i].position);
    return binarize_and_smooth(samples, environment_intensity(p0, plane), gopts);
  };

  const auto l = static_cast<std::size_t>(std::lround(cfg.horizon_steps * s / h)) + 1;
  const ElSystem sys = build_el_system(l, cfg.weights.lambda1);
  PredictOptions popts;
  popts.lambda2 = cfg.weights.lambda2;
  popts.gamma = cfg.predict_gamma;
  popts.tolerance = cfg.predict_tolerance;
  popts.max_iter = cfg.predict_max_iter;

  std::vector<GradientGrid> grids(n);
  std::vector<Prediction> preds(n);
  for (auto k : avoiding) {
    const std::size_t i = active[k];
    const auto& u = w.uavs[i];
    grids[i] = grid_for(i, u.position.z());
    const Trajectory init =
        init_prediction(level(u.position), unit_from_heading(u.heading), cfg.horizon_steps, s, h);
    preds[i] = predict_trajectory(init, sys, grids[i], popts);
    if (preds[i].failed) log.events.push_back({w.step, u.id, EventKind::PredictionFailed, ""});
    trajs[k] = preds[i].trajectory;
  }

  // UAVs past the right edge have finished; move those waypoints out of the
  // way so they cannot conflict.
  for (std::size_t k = 0; k < na; ++k)
    for (auto& p : trajs[k].waypoints)
      if (p.x() >= cfg.arena_width) p = Point2(cfg.arena_width + 1e6 * static_cast<double>(k + 1), 0.0);

  // Back to the original altitude when that keeps every pair separated over
  // the horizon. When a teammate blocks the return, the UAV further back on
  // its path gives way by veering off, away from the teammate.
  std::vector<std::optional<double>> yield_heading(na);
  for (std::size_t k = 0; k < na; ++k) {
    const auto& u = w.uavs[active[k]];
    if (u.mode != Mode::Resume || u.position.z() == u.original_altitude) continue;
    out.dz[k] = u.original_altitude - u.position.z();
    const ConflictSet c = separation_conflicts(trajs, z, out.dz, cfg.d_u2u + kSeparationMargin);
    if (std::find(c.involved.begin(), c.involved.end(), k) == c.involved.end()) {
      log.events.push_back({w.step, u.id, EventKind::AltitudeReturn, std::to_string(out.dz[k])});
      continue;
    }
    out.dz[k] = 0.0;
    const Vec2 along = (u.path[u.next_waypoint] - u.path[u.next_waypoint - 1]).normalized();
    const Point2 p = level(u.position);
    for (const auto& pair : c.pairs) {
      if (!pair.conflict || (pair.i != k && pair.j != k)) continue;
      const std::size_t j = pair.i == k ? pair.j : pair.i;
      const Vec2 d = p - level(w.uavs[active[j]].position);
      const double ahead = d.dot(along);
      if (ahead > 0.0 || (ahead == 0.0 && u.id < w.uavs[active[j]].id)) continue;
      const double side = along.x() * d.y() - along.y() * d.x() >= 0.0 ? 1.0 : -1.0;
      yield_heading[k] = heading_of(along) + side * kYieldAngle;
      break;
    }
  }

  for (auto k : resolve_altitudes(w, active, trajs, out.dz, cfg, kTagAltitude, log))
    out.conflict[k] = true;

  LevelPlanConfig lcfg;
  lcfg.pso.particles = cfg.pso_particles;
  lcfg.pso.iterations = cfg.pso_iterations;
  lcfg.pso.inertia = cfg.pso_inertia;
  lcfg.pso.c1 = cfg.pso_c1;
  lcfg.pso.c2 = cfg.pso_c2;
  lcfg.pso.init_sigma = cfg.pso_init_sigma;
  lcfg.kappa_max = cfg.kappa_max;
  lcfg.heading_weight = cfg.heading_weight;
  lcfg.spacing = h;
  for (std::size_t k = 0; k < na; ++k) {
    const std::size_t i = active[k];
    const auto& u = w.uavs[i];
    if (u.mode != Mode::Avoid) {
      out.arcs[i] = yield_heading[k] ? turn_towards(u, *yield_heading[k], cfg) : pursuit_arc(u, cfg);
      continue;
    }
    if (out.dz[k] != 0.0) grids[i] = grid_for(i, u.position.z() + out.dz[k]);
    const Point2 goal = lookahead_point(u, cfg.lookahead_steps * s);
    const UavPose pose{level(u.position), u.heading, s, cfg.swarm_speed,
                       heading_of(goal - level(u.position))};
    Rng rng(derive_seed(cfg.seed, {kTagLevel, static_cast<std::uint64_t>(w.step),
                                   static_cast<std::uint64_t>(u.id)}));
    try {
      const LevelPlan lp =
          plan_level(pose, grids[i], preds[i], cfg.weights, lcfg, rng, clearance[i]);
      if (!(lp.cost < 0.5 * kOutOfBoundsPenalty)) throw std::runtime_error("arc leaves the grid");
      out.arcs[i] = lp.arc;
    } catch (const std::exception& e) {
      log.events.push_back({w.step, u.id, EventKind::PlannerFallback, e.what()});
      out.arcs[i] = {u.heading, 0.0, pose.position, s};
    }
  }
  return out;
}

}  // namespace

std::vector<double> baseline_virtual_force(const WorldState& world, const ScenarioConfig& cfg) {
  EnvironmentField field;
  field.swarm = {Point2::Zero(), cfg.swarm_speed, cfg.swarm_influence};
  field.d_safe = cfg.d_safe;
  std::vector<double> out;
  out.reserve(world.uavs.size());
  for (const auto& u : world.uavs) {
    const Point2 p = level(u.position);
    EnvironmentField near{field.swarm, {}, field.d_safe};
    // Keep the swarm term out of the picture: park it far away.
    near.swarm.center = p + Vec2(1e9, 0.0);
    for (const auto& o : world.obstacles)
      if (u2o_distance(u.position, o) <= cfg.sensing_range &&
          std::abs(o.altitude - u.position.z()) < cfg.d_obs)
        near.obstacles.push_back(o);
    const Point2 goal = u.path[std::min(u.next_waypoint, u.path.size() - 1)];
    Vec2 dir = goal - p;
    dir = dir.norm() > 0.0 ? Vec2(dir.normalized()) : unit_from_heading(u.heading);
    const Vec2 v = dir - cfg.baseline_gain * environment_gradient(p, near);
    out.push_back(v.norm() > 0.0 ? heading_of(v) : u.heading);
  }
  return out;
}

void step(WorldState& w, const ScenarioConfig& cfg, RunLog& log, RunTiming* timing) {
  const std::size_t n = w.uavs.size();
  const double s = cfg.step_len();
  const auto active = active_uavs(w);
  if (active.empty()) return;
  for (auto i : active) advance_waypoint(w.uavs[i]);

  // Sense: every obstacle seen by any teammate is shared.
  std::vector<ObstacleModel> sensed;
  for (const auto& o : w.obstacles) {
    double d = std::numeric_limits<double>::infinity();
    for (auto i : active) d = std::min(d, u2o_distance(w.uavs[i].position, o));
    if (d <= cfg.sensing_range) sensed.push_back(o);
  }
  std::vector<double> u2o(active.size(), std::numeric_limits<double>::infinity());
  for (std::size_t k = 0; k < active.size(); ++k)
    for (const auto& o : sensed) u2o[k] = std::min(u2o[k], u2o_distance(w.uavs[active[k]].position, o));
  const double min_u2o = active.empty() ? 0.0 : *std::min_element(u2o.begin(), u2o.end());

  std::vector<ArcParams> arcs(n);
  std::vector<double> dz(n, 0.0);
  std::vector<Mode> flown_mode(n, Mode::Cruise);

  if (cfg.planner == PlannerKind::Baseline) {
    if (min_u2o < cfg.d_thr) {
      if (!w.avoiding) log.events.push_back({w.step, -1, EventKind::Trigger, std::to_string(min_u2o)});
      w.avoiding = true;
      w.clear_steps = 0;
      for (auto i : active) w.uavs[i].mode = Mode::Avoid;
    }
    for (auto i : active) flown_mode[i] = w.uavs[i].mode;
    const auto headings = baseline_virtual_force(w, cfg);
    for (auto i : active) arcs[i] = turn_towards(w.uavs[i], headings[i], cfg);
    if (w.avoiding && min_u2o >= cfg.d_thr && ++w.clear_steps >= cfg.resume_hysteresis) {
      w.avoiding = false;
      log.events.push_back({w.step, -1, EventKind::Resume, ""});
      for (auto i : active) w.uavs[i].mode = Mode::Cruise;
    }
  } else {
    // Pure-pursuit rollouts: what the UAVs fly if they follow their paths from
    // here. A UAV is threatened by an obstacle inside d_thr that its rollout
    // would pass closer than d_safe.
    const auto count = static_cast<std::size_t>(std::lround(cfg.horizon_steps * s / cfg.cell)) + 1;
    std::vector<Trajectory> rollouts;
    std::vector<bool> threat(active.size(), false);
    for (std::size_t k = 0; k < active.size(); ++k) {
      const auto& u = w.uavs[active[k]];
      rollouts.push_back(pursuit_rollout(u, cfg.horizon_steps, count, cfg));
      threat[k] = u2o[k] < cfg.d_thr &&
                  rollout_clearance(rollouts[k], u.position.z(), sensed, cfg) < cfg.d_safe;
    }

    // The first threat sends the whole swarm into Avoid; later ones only the
    // UAV concerned.
    const bool any_threat = std::find(threat.begin(), threat.end(), true) != threat.end();
    if (any_threat && !w.avoiding) {
      log.events.push_back({w.step, -1, EventKind::Trigger, std::to_string(min_u2o)});
      for (auto i : active) {
        w.uavs[i].mode = Mode::Avoid;
        w.uavs[i].clear_steps = 0;
      }
    } else {
      for (std::size_t k = 0; k < active.size(); ++k) {
        auto& u = w.uavs[active[k]];
        if (!threat[k] || u.mode == Mode::Avoid) continue;
        log.events.push_back({w.step, u.id, EventKind::Trigger, std::to_string(u2o[k])});
        u.mode = Mode::Avoid;
        u.clear_steps = 0;
      }
    }
    for (auto i : active) flown_mode[i] = w.uavs[i].mode;
    w.avoiding = std::any_of(active.begin(), active.end(),
                             [&](std::size_t i) { return w.uavs[i].mode == Mode::Avoid; });

    const auto t0 = std::chrono::steady_clock::now();
    MainPlan plan = plan_main(w, active, sensed, rollouts, cfg, log);
    arcs = plan.arcs;
    // Final check on the arcs about to be flown.
    std::vector<Trajectory> flights;
    for (auto i : active) flights.push_back(arc_trajectory(arcs[i], cfg.cell, cfg.kappa_max + 1e-12));
    for (auto k : resolve_altitudes(w, active, flights, plan.dz, cfg, kTagSafety, log))
      plan.conflict[k] = true;
    for (std::size_t k = 0; k < active.size(); ++k) dz[active[k]] = plan.dz[k];
    const auto t1 = std::chrono::steady_clock::now();
    if (timing && w.avoiding)
      timing->plan_seconds.push_back(std::chrono::duration<double>(t1 - t0).count());

    for (std::size_t k = 0; k < active.size(); ++k) {
      auto& u = w.uavs[active[k]];
      if (u.mode == Mode::Avoid) {
        u.clear_steps = (!threat[k] && !plan.conflict[k]) ? u.clear_steps + 1 : 0;
        if (u.clear_steps >= cfg.resume_hysteresis) {
          u.mode = Mode::Resume;
          u.clear_steps = 0;
          log.events.push_back({w.step, u.id, EventKind::Resume, ""});
        }
      } else if (u.mode == Mode::Resume && u.position.z() + dz[active[k]] == u.original_altitude &&
                 std::abs(cross_track(u)) < 0.5 &&
                 std::abs(wrap_angle(u.heading - heading_of(u.path[u.next_waypoint] -
                                                            u.path[u.next_waypoint - 1]))) < 0.02) {
        u.mode = Mode::Cruise;
      }
    }
    w.avoiding = std::any_of(active.begin(), active.end(),
                             [&](std::size_t i) { return w.uavs[i].mode == Mode::Avoid; });
  }

  // Execute one arc per UAV. An altitude change is flown vertically before
  // the level motion; obstacles move at constant velocity.
  std::vector<std::vector<Point3>> samples(n);
  for (auto i : active) {
    auto& u = w.uavs[i];
    const auto pts = arc_points(arcs[i], kSubSamples + 1, cfg.kappa_max + 1e-12);
    const double z0 = u.position.z();
    for (int k = 0; k <= kSubSamples; ++k)
      samples[i].push_back(lift(pts[k], k == 0 ? z0 : z0 + dz[i]));
  }
  const bool first_frame_needed = log.frames.empty();
  for (int k = first_frame_needed ? 0 : 1; k <= kSubSamples; ++k) {
    const double frac = double(k) / kSubSamples;
    Frame f;
    f.time = (w.step + frac) * cfg.step_time;
    f.active.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      f.active[i] = !samples[i].empty();
      f.uavs.push_back(samples[i].empty() ? w.uavs[i].position : samples[i][k]);
    }
    for (const auto& o : w.obstacles) {
      const Vec2 shift = o.velocity * (frac * cfg.step_time);
      for (const auto& m : o.mass_points()) f.obstacle_points.push_back(lift(m + shift, o.altitude));
    }
    log.frames.push_back(std::move(f));
  }

  for (auto i : active) {
    auto& u = w.uavs[i];
    auto& flown = log.flown[i];
    for (int k = 1; k <= kSubSamples; ++k) {
      const Point3& a = samples[i][k - 1];
      const Point3& b = samples[i][k];
      if (b.x() >= cfg.arena_width && a.x() < cfg.arena_width) {
        const double t = (cfg.arena_width - a.x()) / (b.x() - a.x());
        flown.push_back(a + t * (b - a));
        u.finished = true;
        log.events.push_back({w.step, u.id, EventKind::Finished, ""});
        break;
      }
      flown.push_back(b);
    }
    u.position = samples[i].back();
    u.heading = wrap_angle(arcs[i].end_heading());
  }
  for (auto& o : w.obstacles) o = o.advanced(cfg.step_time);

  ++w.step;
  std::vector<Point2> centers;
  for (const auto& o : w.obstacles) centers.push_back(o.center);
  log.obstacle_centers.push_back(std::move(centers));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& u = w.uavs[i];
    UavRecord r;
    r.step = w.step;
    r.uav = u.id;
    r.position = u.position;
    r.omega = arcs[i].slope;
    r.kappa = arcs[i].curvature;
    r.mode = flown_mode[i];
    r.delta_alt = dz[i];
    r.energy_cum = trajectory_energy(log.flown[i], cfg.energy).total();
    log.records.push_back(r);
  }
  log.steps = w.step;
}

RunLog begin_log(const WorldState& w) {
  RunLog log;
  log.uav_count = static_cast<int>(w.uavs.size());
  log.flown.resize(w.uavs.size());
  for (std::size_t i = 0; i < w.uavs.size(); ++i) {
    const auto& u = w.uavs[i];
    log.flown[i].push_back(u.position);
    log.records.push_back({0, u.id, u.position, u.heading, 0.0, u.mode, 0.0, 0.0});
  }
  std::vector<Point2> centers;
  for (const auto& o : w.obstacles) centers.push_back(o.center);
  log.obstacle_centers.push_back(std::move(centers));
  return log;
}

RunLog run_scenario(const ScenarioConfig& cfg, RunTiming* timing) {
  WorldState w = spawn_world(cfg);
  RunLog log = begin_log(w);
  while (w.step < cfg.max_steps) {
    if (std::all_of(w.uavs.begin(), w.uavs.end(), [](const UavState& u) { return u.finished; })) {
      log.complete = true;
      break;
    }
    step(w, cfg, log, timing);
  }
  if (std::all_of(w.uavs.begin(), w.uavs.end(), [](const UavState& u) { return u.finished; }))
    log.complete = true;
  return log;
}

}  // namespace uavswarm
