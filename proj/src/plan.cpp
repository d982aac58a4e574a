#include "uavswarm/plan.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavswarm {

Point2 ArcParams::point_at(double s) const {
  if (curvature == 0.0) return origin + unit_from_heading(slope) * s;
  const double r = 1.0 / curvature;
  const double a = slope + curvature * s;
  return origin + Vec2(r * (std::sin(a) - std::sin(slope)), r * (std::cos(slope) - std::cos(a)));
}

std::vector<Point2> arc_points(const ArcParams& arc, std::size_t n, double kappa_max) {
  if (n < 2) throw std::invalid_argument("arc_points: need at least 2 points");
  if (std::abs(arc.curvature) > kappa_max)
    throw std::invalid_argument("arc_points: |kappa| exceeds kappa_max");
  std::vector<Point2> pts;
  pts.reserve(n);
  const double ds = arc.step_len / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) pts.push_back(arc.point_at(ds * static_cast<double>(i)));
  return pts;
}

Trajectory arc_trajectory(const ArcParams& arc, double h, double kappa_max) {
  const auto segs = std::max<long>(2, std::lround(arc.step_len / h));
  Trajectory t;
  t.waypoints = arc_points(arc, static_cast<std::size_t>(segs) + 1, kappa_max);
  const double ds = arc.step_len / static_cast<double>(segs);
  const double k = std::abs(arc.curvature);
  t.spacing = k == 0.0 ? ds : 2.0 / k * std::sin(0.5 * k * ds);
  t.step_len = arc.step_len;
  t.steps = 1;
  return t;
}

ArcFit fit_arc(std::span<const Point2> pts) {
  if (pts.size() < 3) throw std::invalid_argument("fit_arc: need at least 3 points");
  const Vec2 chord = pts.back() - pts.front();
  const double len = chord.norm();
  if (!(len > 0.0)) throw std::invalid_argument("fit_arc: degenerate points");

  double max_off = 0.0;
  const Vec2 u = chord / len;
  for (const auto& p : pts) {
    const Vec2 d = p - pts.front();
    max_off = std::max(max_off, std::abs(u.x() * d.y() - u.y() * d.x()));
  }
  if (max_off <= 1e-9 * len) return {heading_of(chord), 0.0};

  // Kasa fit on centred, scaled data: x^2 + y^2 + D x + E y + F = 0.
  Point2 mean = Point2::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  const double scale = len;
  Eigen::MatrixXd a(pts.size(), 3);
  Eigen::VectorXd b(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const Vec2 q = (pts[i] - mean) / scale;
    a(static_cast<long>(i), 0) = q.x();
    a(static_cast<long>(i), 1) = q.y();
    a(static_cast<long>(i), 2) = 1.0;
    b(static_cast<long>(i)) = -(q.x() * q.x() + q.y() * q.y());
  }
  const Eigen::Vector3d sol = a.colPivHouseholderQr().solve(b);
  const Vec2 c_unit(-0.5 * sol(0), -0.5 * sol(1));
  const double r2 = c_unit.squaredNorm() - sol(2);
  if (!(r2 > 0.0) || r2 > 1e12) return {heading_of(chord), 0.0};
  const double radius = std::sqrt(r2) * scale;
  const Point2 center = mean + c_unit * scale;

  // Travel direction follows the chord; the centre's side gives the sign.
  const Vec2 radial = pts.front() - center;
  Vec2 tangent(-radial.y(), radial.x());
  if (tangent.dot(chord) < 0.0) tangent = -tangent;
  const Vec2 to_center = center - pts.front();
  const double sign = tangent.x() * to_center.y() - tangent.y() * to_center.x() >= 0.0 ? 1.0 : -1.0;
  return {heading_of(tangent), sign / radius};
}

void level_bounds(const UavPose& uav, const LevelPlanConfig& cfg, std::vector<double>& lower,
                  std::vector<double>& upper) {
  lower = {uav.heading - cfg.slope_half_range, -cfg.kappa_max};
  upper = {uav.heading + cfg.slope_half_range, cfg.kappa_max};
}

double arc_cost(const UavPose& uav, double omega, double kappa, const GradientGrid& grid,
                const CostWeights& w, const LevelPlanConfig& cfg) {
  const ArcParams arc{omega, kappa, uav.position, uav.step_len};
  const Trajectory t = arc_trajectory(arc, cfg.spacing, cfg.kappa_max);
  const double dw = wrap_angle(omega - uav.preferred_heading.value_or(uav.heading));
  return level_cost(t, grid, w).value + cfg.heading_weight * dw * dw;
}

double arc_clearance(const UavPose& uav, double omega, double kappa, const Clearance& c,
                     double spacing) {
  double best = std::numeric_limits<double>::infinity();
  if (c.points.empty()) return best;
  const ArcParams arc{omega, kappa, uav.position, uav.step_len};
  const auto segs = std::max<long>(2, std::lround(uav.step_len / spacing));
  const double ds = uav.step_len / static_cast<double>(segs);
  const long total = segs * (1 + c.continuation_steps);
  const Point2 end = arc.end();
  const Vec2 dir = unit_from_heading(arc.end_heading());
  for (long j = 0; j <= total; ++j) {
    const double along = ds * static_cast<double>(j);
    const Point2 p = j <= segs ? arc.point_at(along) : end + dir * (along - uav.step_len);
    const double t = along / uav.speed;
    for (const auto& m : c.points)
      best = std::min(best, (p - (m.position + m.velocity * t)).norm());
  }
  return best;
}

LevelPlan plan_level(const UavPose& uav, const GradientGrid& grid, const Prediction& predicted,
                     const CostWeights& w, const LevelPlanConfig& cfg, Rng& rng,
                     const Clearance& clearance) {
  PsoConfig pso = cfg.pso;
  level_bounds(uav, cfg, pso.lower, pso.upper);

  LevelPlan out;
  if (predicted.failed || predicted.trajectory.size() < 3) {
    out.init_center = {uav.heading, 0.0};
    out.heading_hold_init = true;
  } else {
    const auto& wp = predicted.trajectory.waypoints;
    const std::size_t end = std::min(wp.size() - 1, predicted.trajectory.step_end_index(1));
    if (end < 2) {
      out.init_center = {uav.heading, 0.0};
      out.heading_hold_init = true;
    } else {
      out.init_center = fit_arc(std::span<const Point2>(wp.data(), end + 1));
      out.init_center.slope = uav.heading + wrap_angle(out.init_center.slope - uav.heading);
    }
  }
  const std::vector<double> center{
      std::clamp(out.init_center.slope, pso.lower[0], pso.upper[0]),
      std::clamp(out.init_center.curvature, pso.lower[1], pso.upper[1])};

  if (cfg.anchor_preferred && uav.preferred_heading && cfg.pso.init != PsoInit::Uniform)
    pso.anchors.push_back({uav.heading + wrap_angle(*uav.preferred_heading - uav.heading), 0.0});

  const Objective f = [&](std::span<const double> x) {
    const double gap = clearance.min_distance - arc_clearance(uav, x[0], x[1], clearance, cfg.spacing);
    return Score{arc_cost(uav, x[0], x[1], grid, w, cfg), std::max(0.0, gap)};
  };
  PsoResult r = pso_minimize(f, pso, center, rng);
  out.arc = {r.best[0], r.best[1], uav.position, uav.step_len};
  out.cost = r.best_score.cost;
  out.clearance = arc_clearance(uav, r.best[0], r.best[1], clearance, cfg.spacing);
  out.clear = r.best_score.feasible();
  out.trace = std::move(r.trace);
  return out;
}

std::size_t adopt_consensus(std::span<const PsoResult> results) {
  if (results.empty()) throw std::invalid_argument("adopt_consensus: no results");
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    const Score& a = results[i].best_score;
    const Score& b = results[best].best_score;
    if (better(a, b)) {
      best = i;
    } else if (!better(b, a) && results[i].best < results[best].best) {
      best = i;
    }
  }
  return best;
}

namespace {

// Coordinate descent by 1-D scans (0.05 m, then 0.0005 m around the best).
// Coordinate `hold` (if in range) stays fixed.
std::pair<std::vector<double>, Score> descend(const Objective& f, std::vector<double> x,
                                              double max_delta, std::size_t hold) {
  Score s = f(x);
  const int coarse = static_cast<int>(std::lround(2.0 * max_delta / 0.05));
  for (int pass = 0; pass < 20; ++pass) {
    bool moved = false;
    for (std::size_t k = 0; k < x.size(); ++k) {
      if (k == hold) continue;
      const double start = x[k];
      double best_v = start;
      Score best_s = s;
      auto probe = [&](double v) {
        x[k] = std::clamp(v, -max_delta, max_delta);
        const Score sc = f(x);
        if (better(sc, best_s)) best_s = sc, best_v = x[k];
      };
      for (int i = 0; i <= coarse; ++i) probe(-max_delta + 0.05 * i);
      const double mid = best_v;
      for (int i = -100; i <= 100; ++i) probe(mid + 0.0005 * i);
      x[k] = best_v;
      if (better(best_s, s)) {
        s = best_s;
        moved = moved || best_v != start;
      }
    }
    if (!moved) break;
  }
  return {x, s};
}

}  // namespace

AltitudePlan plan_altitude(const ConflictSet& conflicts, std::span<const Trajectory> level_trajs,
                           double d_u2u, const AltitudePlanConfig& cfg,
                           std::span<const std::uint64_t> seeds,
                           std::span<const double> base_altitudes,
                           std::span<const double> preset_deltas) {
  const std::size_t n = level_trajs.size();
  const auto& inv = conflicts.involved;
  const std::size_t w = inv.size();
  if (w < 2) throw std::invalid_argument("plan_altitude: fewer than 2 involved UAVs");
  if (seeds.size() != w) throw std::invalid_argument("plan_altitude: one seed per involved UAV");
  for (auto i : inv)
    if (i >= n) throw std::invalid_argument("plan_altitude: involved index out of range");
  if (!base_altitudes.empty() && base_altitudes.size() != n)
    throw std::invalid_argument("plan_altitude: altitude count mismatch");
  if (!preset_deltas.empty() && preset_deltas.size() != n)
    throw std::invalid_argument("plan_altitude: preset delta count mismatch");

  const std::vector<double> levels = min_level_distances(level_trajs);
  const std::vector<double> starts =
      cfg.check_transition ? start_level_distances(level_trajs) : std::vector<double>{};
  std::vector<double> preset(n, 0.0);
  if (!preset_deltas.empty()) preset.assign(preset_deltas.begin(), preset_deltas.end());
  double preset_cost = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::find(inv.begin(), inv.end(), i) == inv.end()) preset_cost += std::abs(preset[i]);

  std::vector<double> full(n, 0.0);
  auto evaluate = [&](std::span<const double> deltas) {
    return altitude_cost_from_levels(deltas, levels, d_u2u, base_altitudes, starts);
  };
  const Objective f = [&](std::span<const double> x) {
    full = preset;
    for (std::size_t k = 0; k < w; ++k) full[inv[k]] = x[k];
    const AltitudeCost ac = evaluate(full);
    return ac.feasible ? Score{ac.cost - preset_cost, 0.0} : Score::infeasible(ac.violation);
  };

  PsoConfig pso = cfg.pso;
  pso.lower.assign(w, -cfg.max_delta);
  pso.upper.assign(w, cfg.max_delta);
  const std::vector<double> center(w, 0.0);

  AltitudePlan out;
  out.instances.reserve(w);
  for (std::size_t k = 0; k < w; ++k) {
    Rng rng(seeds[k]);
    out.instances.push_back(pso_minimize(f, pso, center, rng));
  }
  const PsoResult& adopted = out.instances[adopt_consensus(out.instances)];
  std::vector<double> best = adopted.best;
  Score best_score = adopted.best_score;
  if (cfg.polish) {
    // Every UAV holds all results after the exchange, so each computes the
    // same polish. Starts: the adopted vector, then each offset pinned at 0.
    for (std::size_t k = 0; k <= w; ++k) {
      std::vector<double> x0 = adopted.best;
      if (k < w) x0[k] = 0.0;
      auto held = descend(f, std::move(x0), cfg.max_delta, k);
      auto [x, sc] = descend(f, std::move(held.first), cfg.max_delta, w);
      if (better(sc, best_score) || (!better(best_score, sc) && x < best)) {
        best = std::move(x);
        best_score = sc;
      }
    }
  }

  out.deltas = preset;
  if (best_score.feasible()) {
    for (std::size_t k = 0; k < w; ++k) out.deltas[inv[k]] = best[k];
    out.cost = best_score.cost;
    out.feasible = true;
    return out;
  }

  out.emergency = true;
  const double gap = std::ceil(d_u2u);
  double cost = 0.0;
  for (std::size_t k = 0; k < w; ++k) {
    const double mag = gap * static_cast<double>(k / 2 + 1);
    out.deltas[inv[k]] = k % 2 == 0 ? mag : -mag;
    cost += mag;
  }
  out.cost = cost;
  out.feasible = evaluate(out.deltas).feasible;
  return out;
}

}  // namespace uavswarm
