// Acceptance runs. One line per criterion: "criterion N PASS|FAIL: details".
// Exit status is 0 only when every requested criterion passes.

#include "oracles.hpp"
#include "uavswarm/experiments.hpp"
#include "uavswarm/predict.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

using namespace uavswarm;

namespace {

struct Verdict {
  bool pass{false};
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double mean_energy(const ScenarioConfig& cfg, int seeds, int* bad = nullptr) {
  const auto runs = run_seeds(cfg, seed_range(seeds));
  const Aggregate a = aggregate(runs);
  if (bad) *bad += a.failed + a.incomplete + a.collisions;
  return a.mean_energy_j;
}

// Zero collisions over the eight scenario families.
Verdict criterion_1() {
  const auto t0 = std::chrono::steady_clock::now();
  int runs = 0, collisions = 0, failed = 0, incomplete = 0;
  double lo_u2o = 1e18, lo_u2u = 1e18;
  std::string worst;
  for (auto kind : {ScenarioKind::ObstacleInFront, ScenarioKind::ObstacleOnSide})
    for (auto ok : {ObstacleKind::MassPoint, ObstacleKind::Shaped})
      for (double vo : {5.0, 10.0}) {
        ScenarioConfig cfg = make_scenario(kind);
        cfg.obstacle_kind = ok;
        cfg.obstacle_speed = vo;
        const Aggregate a = aggregate(run_seeds(cfg, seed_range(100)));
        runs += a.runs;
        collisions += a.collisions;
        failed += a.failed;
        incomplete += a.incomplete;
        if (a.min_u2o_m < lo_u2o) {
          lo_u2o = a.min_u2o_m;
          worst = to_string(kind) + "/" + to_string(ok) + fmt("/v_o=%.0f", vo);
        }
        lo_u2u = std::min(lo_u2u, a.min_u2u_m);
      }
  const double t = seconds_since(t0);
  return {collisions == 0 && failed == 0 && runs == 800 && t < 600.0,
          fmt("%d runs, %d collisions, %d errors, %d incomplete; min U2O %.2f m (%s), "
              "min U2U %.2f m; %.0f s (limit 600 s)",
              runs, collisions, failed, incomplete, lo_u2o, worst.c_str(), lo_u2u, t)};
}

// Initialization ablation on the two-obstacle fixture.
Verdict criterion_2() {
  const auto t0 = std::chrono::steady_clock::now();
  const AblationFixture fx = make_ablation_fixture();

  // Exhaustive search over the same box, finer than the library's.
  std::vector<double> lo, hi;
  level_bounds(fx.uav, fx.level, lo, hi);
  SearchOutcome oracle{0.0, 0.0, 1e18};
  const int n = 301;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double w = lo[0] + (hi[0] - lo[0]) * i / (n - 1);
      const double k = lo[1] + (hi[1] - lo[1]) * j / (n - 1);
      const double c = arc_cost(fx.uav, w, k, fx.grid, fx.weights, fx.level);
      if (c < oracle.cost) oracle = {w, k, c};
    }

  const AblationRuns runs = run_ablation(fx, 500, 2024);
  const AblationSummary u = summarize(runs.uniform, oracle);
  const AblationSummary p = summarize(runs.predicted, oracle);
  const double t = seconds_since(t0);
  const bool pass = u.trap_rate >= 0.5 && p.trap_rate <= 0.05 && p.mean_gap < u.mean_gap && t < 300.0;
  return {pass, fmt("oracle %.5f; trap rate uniform %.3f (need >= 0.5), prediction %.3f "
                    "(need <= 0.05); mean gap uniform %.6f, prediction %.6f (need smaller); %.0f s",
                    oracle.cost, u.trap_rate, p.trap_rate, u.mean_gap, p.mean_gap, t)};
}

// Main planner against the virtual-force baseline on InFront.
Verdict criterion_3() {
  const auto t0 = std::chrono::steady_clock::now();
  ScenarioConfig cfg = make_scenario(ScenarioKind::ObstacleInFront);
  const auto seeds = seed_range(100);
  cfg.baseline_gain =
      calibrate_baseline_gain(cfg, seeds, {1000.0, 2000.0, 3000.0, 5000.0, 7000.0, 10000.0});
  cfg.planner = PlannerKind::Main;
  const Aggregate m = aggregate(run_seeds(cfg, seeds));
  cfg.planner = PlannerKind::Baseline;
  const Aggregate b = aggregate(run_seeds(cfg, seeds));
  const double ratio = m.mean_energy_j / b.mean_energy_j;
  const double t = seconds_since(t0);
  return {ratio <= 0.7 && m.failed == 0 && b.failed == 0 && t < 600.0,
          fmt("main %.1f J, baseline %.1f J (gain %.0f, %d runs with U2U collisions), "
              "ratio %.3f (need <= 0.7); %.0f s",
              m.mean_energy_j, b.mean_energy_j, cfg.baseline_gain, b.collisions, ratio, t)};
}

// PSO-Alt against the exhaustive lattice search.
Verdict criterion_4() {
  const auto t0 = std::chrono::steady_clock::now();
  const double d_u2u = 5.0;
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> pos(-4.0, 4.0), head(-kPi, kPi);
  int cases = 0, worse = 0, infeasible = 0;
  double worst_ratio = 0.0;
  for (std::size_t w : {2u, 3u}) {
    int made = 0;
    while (made < 100) {
      std::vector<Trajectory> trajs;
      for (std::size_t i = 0; i < w; ++i)
        trajs.push_back(init_prediction(Point2(pos(rng), pos(rng)), unit_from_heading(head(rng)),
                                        1, 10.0, 1.0));
      const ConflictSet c = detect_conflicts(trajs, d_u2u);
      if (c.involved.size() != w) continue;
      ++made;
      const auto best = oracle::altitude_brute_force(min_level_distances(trajs), w, d_u2u);
      std::vector<std::uint64_t> seeds;
      for (std::size_t i = 0; i < w; ++i) seeds.push_back(1000 * w + 10 * made + i);
      const AltitudePlan plan = plan_altitude(c, trajs, d_u2u, AltitudePlanConfig{}, seeds);
      ++cases;
      if (!best.feasible) continue;
      const bool feasible = plan.feasible && altitude_cost(plan.deltas, trajs, d_u2u).feasible;
      if (!feasible) ++infeasible;
      const double ratio = best.cost > 0.0 ? plan.cost / best.cost : (plan.cost > 1e-9 ? 1e9 : 1.0);
      worst_ratio = std::max(worst_ratio, ratio);
      if (plan.cost > 1.05 * best.cost + 1e-12) ++worse;
    }
  }
  const double t = seconds_since(t0);
  return {worse == 0 && infeasible == 0 && cases == 200 && t < 300.0,
          fmt("%d geometries; %d above 1.05 x oracle, worst ratio %.4f; %d infeasible; %.0f s", cases,
              worse, worst_ratio, infeasible, t)};
}

// Prediction: fixed point, matrix identities, monotone level cost.
Verdict criterion_5() {
  const auto t0 = std::chrono::steady_clock::now();
  EnvironmentField flat;
  flat.swarm = {Point2(1e6, 0), 10.0, 5.0};
  const GradientGrid g0 =
      build_gradient_grid(flat, Point2(0, 0), {Point2(-130, -130), Point2(130, 130)}, 1.0);
  const auto sys = build_el_system(101, 0.5);
  const Trajectory line = init_prediction(Point2(-20, 10), unit_from_heading(0.4), 10, 10.0, 1.0);
  const Prediction still = predict_trajectory(line, sys, g0);
  double drift = 0.0;
  for (std::size_t i = 0; i < line.size(); ++i)
    drift = std::max(drift, (still.trajectory[i] - line[i]).norm());

  double row_err = 0.0, inv_err = 0.0;
  for (std::size_t l : {11u, 51u, 101u})
    for (double lam : {0.1, 0.5, 0.9}) {
      const auto s = build_el_system(l, lam);
      for (std::size_t i = 0; i < l; ++i) row_err = std::max(row_err, std::abs(s.matrix.row_sum(i) - 1.0));
      for (std::size_t c = 0; c < l; ++c) {
        std::vector<double> e(l, 0.0);
        e[c] = 1.0;
        const auto col = s.matrix.multiply(s.solver.solve(e));
        for (std::size_t r = 0; r < l; ++r) inv_err = std::max(inv_err, std::abs(col[r] - e[r]));
      }
    }

  // Level cost per accepted iteration on a bent curve and near an obstacle.
  double rise = 0.0;
  PredictOptions o;
  o.record_costs = true;
  auto track = [&](const Prediction& p) {
    for (std::size_t i = 1; i < p.cost_history.size(); ++i)
      rise = std::max(rise, p.cost_history[i] - p.cost_history[i - 1]);
  };
  Trajectory bent = line;
  for (std::size_t i = 0; i < bent.size(); ++i)
    bent.waypoints[i] = Point2(-20.0 + static_cast<double>(i), 10.0 + 0.002 * static_cast<double>(i * i));
  bent.waypoints = resample_uniform(bent.waypoints, bent.size(), 1.0);
  track(predict_trajectory(bent, sys, g0, o));

  EnvironmentField env = flat;
  ObstacleModel obs;
  obs.center = Point2(50, 0);
  env.obstacles = {obs};
  for (double heading : {0.2, 0.5, -0.3}) {
    const Point2 p0(50, -30);
    const GradientGrid g = build_gradient_grid(env, p0, {Point2(-80, -150), Point2(180, 150)}, 1.0);
    track(predict_trajectory(init_prediction(p0, unit_from_heading(heading), 10, 10.0, 1.0), sys, g, o));
  }
  const double t = seconds_since(t0);
  return {drift <= 1e-9 && row_err <= 1e-9 && inv_err <= 1e-9 && rise <= 1e-6 && t < 60.0,
          fmt("fixed-point drift %.2e (<= 1e-9); row-sum error %.2e, M M^-1 error %.2e (<= 1e-9); "
              "largest level-cost rise %.2e (<= 1e-6); %.1f s",
              drift, row_err, inv_err, rise, t)};
}

// Energy arithmetic on the straight and the climb/descent path.
Verdict criterion_6() {
  const EnergyCoefficients c;
  std::vector<Point3> path;
  for (int i = 0; i <= 10; ++i) path.emplace_back(10.0 * i, 0.0, 100.0);
  const double flat = trajectory_energy(path, c).total();
  for (int i = 3; i <= 6; ++i) path[static_cast<std::size_t>(i)].z() += 5.0;
  const double extra = trajectory_energy(path, c).total() - flat;
  return {std::abs(flat - 982.0) <= 1e-9 && std::abs(extra - 98.1) <= 1e-9,
          fmt("straight 100 m: %.9f J (982.0); climb and descent of 5 m adds %.9f J (98.1)", flat,
              extra)};
}

// Parameter trends.
Verdict criterion_7() {
  const auto t0 = std::chrono::steady_clock::now();
  const int seeds = 30;
  int bad = 0;
  std::ostringstream d;
  bool pass = true;

  // d_obs = 5 keeps d_safe = 15 valid (d_safe >= d_obs + |S|).
  double prev = 0.0;
  d << "d_safe";
  for (double ds : {15.0, 20.0, 25.0, 30.0}) {
    ScenarioConfig cfg;
    cfg.d_obs = 5.0;
    cfg.d_safe = ds;
    const double e = mean_energy(cfg, seeds, &bad);
    d << fmt(" %.0f:%.1f", ds, e);
    if (ds > 15.0 && e < prev) pass = false;
    prev = e;
  }
  d << "; N";
  for (int n : {3, 5, 7}) {
    ScenarioConfig cfg;
    cfg.swarm_size = n;
    cfg.formation_radius = 20.0;
    const double e = mean_energy(cfg, seeds, &bad);
    d << fmt(" %d:%.1f", n, e);
    if (n > 3 && e < prev) pass = false;
    prev = e;
  }
  d << "; lambda1";
  double lo = 1e18, hi = 0.0, mid = 0.0;
  for (double l1 : {0.3, 0.5, 0.7}) {
    ScenarioConfig cfg;
    cfg.weights.lambda1 = l1;
    cfg.weights.lambda2 = 1.0 - l1;
    const double e = mean_energy(cfg, seeds, &bad);
    d << fmt(" %.1f:%.1f", l1, e);
    lo = std::min(lo, e);
    hi = std::max(hi, e);
    if (l1 == 0.5) mid = e;
  }
  const double spread = (hi - lo) / mid;
  const double t = seconds_since(t0);
  pass = pass && spread < 0.15 && t < 900.0;
  d << fmt(" (spread %.3f, need < 0.15); %d seeds per point, %d unsafe or failed runs; %.0f s",
           spread, seeds, bad, t);
  return {pass, d.str()};
}

// Mean planning time per avoidance step at N = 5.
Verdict criterion_8() {
  ScenarioConfig cfg;
  cfg.swarm_size = 5;
  double sum = 0.0;
  int n = 0;
  for (const auto& r : run_seeds(cfg, seed_range(10)))
    if (r.error.empty() && r.metrics.mean_plan_time_s > 0.0) {
      sum += r.metrics.mean_plan_time_s;
      ++n;
    }
  const double mean = n > 0 ? sum / n : 1e9;
  return {mean < 1.0, fmt("mean planning time %.4f s per step over %d runs (need < 1.0 s)", mean, n)};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance runs"};
  std::vector<int> which;
  app.add_option("--criterion", which, "criterion numbers (default: all)")
      ->check(CLI::Range(1, 8));
  CLI11_PARSE(app, argc, argv);
  if (which.empty()) which = {1, 2, 3, 4, 5, 6, 7, 8};

  const std::function<Verdict()> table[] = {criterion_1, criterion_2, criterion_3, criterion_4,
                                            criterion_5, criterion_6, criterion_7, criterion_8};
  bool all = true;
  for (int c : which) {
    Verdict v;
    try {
      v = table[c - 1]();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    std::cout << "criterion " << c << (v.pass ? " PASS: " : " FAIL: ") << v.detail << std::endl;
    all = all && v.pass;
  }
  return all ? 0 : 1;
}
