#include "uavswarm/experiments.hpp"

#include <cmath>
#include <limits>

namespace uavswarm {

std::vector<SeedRun> run_seeds(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds,
                               bool keep_logs) {
  std::vector<SeedRun> out;
  out.reserve(seeds.size());
  for (auto s : seeds) {
    SeedRun r;
    r.seed = s;
    ScenarioConfig c = cfg;
    c.seed = s;
    try {
      RunTiming timing;
      r.log = run_scenario(c, &timing);
      r.metrics = compute_metrics(r.log, c, &timing);
      if (!keep_logs) r.log = {};
    } catch (const std::exception& e) {
      r.error = e.what();
      r.log = {};
    }
    out.push_back(std::move(r));
  }
  return out;
}

Aggregate aggregate(const std::vector<SeedRun>& runs) {
  Aggregate a;
  a.min_u2o_m = std::numeric_limits<double>::infinity();
  a.min_u2u_m = std::numeric_limits<double>::infinity();
  std::vector<double> energy;
  double plan = 0.0;
  for (const auto& r : runs) {
    ++a.runs;
    if (!r.error.empty()) {
      ++a.failed;
      continue;
    }
    const RunMetrics& m = r.metrics;
    if (!m.complete) ++a.incomplete;
    if (m.collision) ++a.collisions;
    energy.push_back(m.total_energy);
    a.min_u2o_m = std::min(a.min_u2o_m, m.min_u2o);
    a.min_u2u_m = std::min(a.min_u2u_m, m.min_u2u);
    plan += m.mean_plan_time_s;
  }
  if (energy.empty()) return a;
  const double n = static_cast<double>(energy.size());
  for (double e : energy) a.mean_energy_j += e / n;
  double sq = 0.0;
  for (double e : energy) sq += (e - a.mean_energy_j) * (e - a.mean_energy_j);
  a.sd_energy_j = energy.size() > 1 ? std::sqrt(sq / (n - 1.0)) : 0.0;
  a.mean_plan_time_s = plan / n;
  return a;
}

std::vector<std::uint64_t> seed_range(int n, std::uint64_t first) {
  std::vector<std::uint64_t> s;
  for (int i = 0; i < n; ++i) s.push_back(first + static_cast<std::uint64_t>(i));
  return s;
}

AblationFixture make_ablation_fixture(const ScenarioConfig& cfg) {
  AblationFixture fx;
  fx.weights = cfg.weights;
  fx.field.d_safe = cfg.d_safe;
  // Swarm term parked far away; only the two obstacles shape the plane.
  fx.field.swarm = {Point2(-1e6, 0.0), cfg.swarm_speed, cfg.swarm_influence};
  ObstacleModel a;
  a.center = Point2(0.0, -25.0);
  a.influence_radius = cfg.obstacle_influence;
  ObstacleModel b = a;
  b.center = Point2(40.0, 5.0);
  fx.field.obstacles = {a, b};

  const Point2 p0(0.0, 0.0);
  const Vec2 g = environment_gradient(p0, fx.field);
  Vec2 tangent(-g.y(), g.x());
  if (tangent.x() < 0.0) tangent = -tangent;
  const double s = cfg.step_len();
  fx.uav = {p0, heading_of(tangent), s, cfg.swarm_speed, {}};

  const double reach = cfg.horizon_steps * s + cfg.grid_margin;
  GradientGridOptions gopts;
  gopts.required_reach = reach;
  const Bounds2 bounds{p0 - Vec2(reach + cfg.cell, reach + cfg.cell),
                       p0 + Vec2(reach + cfg.cell, reach + cfg.cell)};
  fx.grid = build_gradient_grid(fx.field, p0, bounds, cfg.cell, gopts);

  fx.level.pso.particles = cfg.pso_particles;
  fx.level.pso.iterations = cfg.pso_iterations;
  fx.level.pso.inertia = cfg.pso_inertia;
  fx.level.pso.c1 = cfg.pso_c1;
  fx.level.pso.c2 = cfg.pso_c2;
  fx.level.pso.init_sigma = cfg.pso_init_sigma;
  fx.level.kappa_max = cfg.kappa_max;
  fx.level.heading_weight = cfg.heading_weight;
  fx.level.spacing = cfg.cell;

  const auto l = static_cast<std::size_t>(std::lround(cfg.horizon_steps * s / cfg.cell)) + 1;
  const ElSystem sys = build_el_system(l, cfg.weights.lambda1);
  PredictOptions popts;
  popts.lambda2 = cfg.weights.lambda2;
  popts.gamma = cfg.predict_gamma;
  popts.tolerance = cfg.predict_tolerance;
  popts.max_iter = cfg.predict_max_iter;
  fx.prediction = predict_trajectory(
      init_prediction(p0, unit_from_heading(fx.uav.heading), cfg.horizon_steps, s, cfg.cell), sys,
      fx.grid, popts);
  return fx;
}

AblationRuns run_ablation(const AblationFixture& fx, int reps, std::uint64_t seed) {
  AblationRuns out;
  for (int mode = 0; mode < 2; ++mode) {
    LevelPlanConfig lc = fx.level;
    lc.pso.init = mode == 0 ? PsoInit::Uniform : PsoInit::Gaussian;
    auto& dst = mode == 0 ? out.uniform : out.predicted;
    for (int r = 0; r < reps; ++r) {
      Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(mode), static_cast<std::uint64_t>(r)}));
      const LevelPlan lp = plan_level(fx.uav, fx.grid, fx.prediction, fx.weights, lc, rng);
      dst.push_back({lp.arc.slope, lp.arc.curvature, lp.cost});
    }
  }
  return out;
}

SearchOutcome level_grid_search(const AblationFixture& fx, int n) {
  std::vector<double> lo, hi;
  level_bounds(fx.uav, fx.level, lo, hi);
  SearchOutcome best{0.0, 0.0, std::numeric_limits<double>::infinity()};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = lo[0] + (hi[0] - lo[0]) * i / (n - 1);
      const double k = lo[1] + (hi[1] - lo[1]) * j / (n - 1);
      const double c = arc_cost(fx.uav, w, k, fx.grid, fx.weights, fx.level);
      if (c < best.cost) best = {w, k, c};
    }
  return best;
}

AblationSummary summarize(const std::vector<SearchOutcome>& runs, const SearchOutcome& oracle,
                          double rel_tol) {
  AblationSummary s;
  if (runs.empty()) return s;
  int trapped = 0;
  for (const auto& r : runs) {
    const double gap = r.cost - oracle.cost;
    if (gap > rel_tol * std::abs(oracle.cost)) ++trapped;
    s.mean_gap += gap;
    s.mean_distance += std::hypot(r.omega - oracle.omega, r.kappa - oracle.kappa);
  }
  const double n = static_cast<double>(runs.size());
  s.trap_rate = trapped / n;
  s.mean_gap /= n;
  s.mean_distance /= n;
  return s;
}

double calibrate_baseline_gain(ScenarioConfig cfg, const std::vector<std::uint64_t>& seeds,
                               const std::vector<double>& ladder) {
  cfg.planner = PlannerKind::Baseline;
  for (double g : ladder) {
    cfg.baseline_gain = g;
    bool safe = true;
    for (const auto& r : run_seeds(cfg, seeds))
      if (!r.error.empty() || r.metrics.min_u2o < cfg.d_obs) {
        safe = false;
        break;
      }
    if (safe) return g;
  }
  return ladder.empty() ? cfg.baseline_gain : ladder.back();
}

}  // namespace uavswarm
