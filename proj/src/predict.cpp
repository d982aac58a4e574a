#include "uavswarm/predict.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavswarm {

ElSystem build_el_system(std::size_t length, double lambda1, StencilSign sign) {
  if (length < 5) throw std::invalid_argument("EL system needs at least 5 waypoints");
  if (lambda1 < 0.0) throw std::invalid_argument("lambda1 must be >= 0");

  // D4 = D^T D with D the (L-2) x L second-difference operator. Rows of D4
  // sum to zero, so M = I +/- lambda1 * D4 has unit row sums.
  const std::size_t n = length;
  PentadiagonalMatrix d4(n);
  for (std::size_t r = 0; r + 2 < n; ++r) {
    const std::size_t idx[3] = {r, r + 1, r + 2};
    const double coef[3] = {1.0, -2.0, 1.0};
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        d4.set(idx[a], idx[b], d4.at(idx[a], idx[b]) + coef[a] * coef[b]);
  }

  const double s = sign == StencilSign::Descent ? lambda1 : -lambda1;
  ElSystem sys;
  sys.length = n;
  sys.lambda1 = lambda1;
  sys.sign = sign;
  sys.matrix = PentadiagonalMatrix(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = (i >= 2 ? i - 2 : 0); j <= std::min(n - 1, i + 2); ++j) {
      const double v = (i == j ? 1.0 : 0.0) + s * d4.at(i, j);
      if (v != 0.0) sys.matrix.set(i, j, v);
    }
  }
  // Dirichlet row: the first waypoint is the UAV position.
  for (std::size_t j = 0; j <= 2; ++j) sys.matrix.set(0, j, j == 0 ? 1.0 : 0.0);
  sys.solver = PentadiagonalLU(sys.matrix);
  return sys;
}

Trajectory init_prediction(const Point2& pos, const Vec2& velocity, int steps, double step_len,
                           double spacing) {
  const double speed = velocity.norm();
  if (!(speed > 0.0)) throw std::invalid_argument("init_prediction: zero velocity");
  if (steps < 1 || !(step_len > 0.0) || !(spacing > 0.0))
    throw std::invalid_argument("init_prediction: invalid horizon");
  const auto count = static_cast<std::size_t>(std::lround(steps * step_len / spacing)) + 1;
  const Vec2 dir = velocity / speed;
  Trajectory t;
  t.spacing = spacing;
  t.step_len = step_len;
  t.steps = steps;
  t.waypoints.reserve(count);
  for (std::size_t i = 0; i < count; ++i) t.waypoints.push_back(pos + dir * (spacing * i));
  return t;
}

std::vector<Point2> resample_uniform(std::span<const Point2> pts, std::size_t count,
                                     double spacing) {
  if (pts.size() < 2 || count == 0) throw std::invalid_argument("resample_uniform: too few points");
  std::vector<Point2> out;
  out.reserve(count);
  out.push_back(pts[0]);
  // Walk the polyline; each new point is the first one `spacing` away
  // (straight-line) from the previous output point.
  std::size_t seg = 0;
  double u = 0.0;  // position within segment seg, in [0, 1]
  while (out.size() < count) {
    const Point2& last = out.back();
    bool found = false;
    for (; seg + 1 < pts.size(); ++seg, u = 0.0) {
      const Point2 a = pts[seg];
      const Vec2 d = pts[seg + 1] - a;
      const double dd = d.squaredNorm();
      if (dd == 0.0) continue;
      // |a + t d - last|^2 = spacing^2, smallest root t >= u.
      const Vec2 f = a - last;
      const double b = f.dot(d);
      const double c = f.squaredNorm() - spacing * spacing;
      const double disc = b * b - dd * c;
      if (disc < 0.0) continue;
      const double r = std::sqrt(disc);
      for (double t : {(-b - r) / dd, (-b + r) / dd})
        if (t >= u && t <= 1.0) {
          u = t;
          out.push_back(a + d * t);
          found = true;
          break;
        }
      if (found) break;
    }
    if (!found) {
      // Past the end: continue along the last segment's direction.
      seg = pts.size() - 1;
      const Vec2 dir = (pts[pts.size() - 1] - pts[pts.size() - 2]).normalized();
      out.push_back(last + dir * spacing);
    }
  }
  return out;
}

namespace {

double objective(const Trajectory& t, const GradientGrid& grid, double lambda1, double lambda2) {
  return level_cost(t, grid, {lambda1, lambda2}).value;
}

// One semi-implicit step with external step size gamma.
void el_step(const Trajectory& cur, const ElSystem& sys, const GradientGrid& grid, double lambda2,
             double gamma, const Point2& anchor,
             std::vector<double>& xs, std::vector<double>& ys, Trajectory& next) {
  const std::size_t n = cur.size();
  const double h = cur.spacing;
  xs.resize(n);
  ys.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto e = sample_external(grid, cur[i]);
    // Descent direction of -1/2 E_s^2 is E_s * grad E_s.
    const Vec2 force = gamma * lambda2 * h * e.energy * e.gradient;
    xs[i] = cur[i].x() + force.x();
    ys[i] = cur[i].y() + force.y();
  }
  xs[0] = anchor.x();
  ys[0] = anchor.y();
  sys.solver.solve_in_place(xs);
  sys.solver.solve_in_place(ys);
  next.waypoints.resize(n);
  for (std::size_t i = 0; i < n; ++i) next.waypoints[i] = {xs[i], ys[i]};
}

}  // namespace

Prediction predict_trajectory(const Trajectory& init, const ElSystem& sys,
                              const GradientGrid& grid, const PredictOptions& opts) {
  if (init.size() != sys.length) throw std::invalid_argument("prediction length mismatch");
  const double h = init.spacing;
  // Bending energy scales with 1/h^3; fold that into the system weight.
  const double lambda1 = sys.lambda1;

  Prediction out;
  out.trajectory = init;
  const Point2 anchor = init[0];
  std::vector<double> xs, ys;

  double gamma = opts.gamma;
  auto system_for = [&](double g) {
    if (g == 1.0 && h == 1.0) return sys;
    return build_el_system(sys.length, lambda1 * g / (h * h * h), sys.sign);
  };

  while (gamma >= 1e-3) {
    ElSystem active = system_for(gamma);
    Trajectory cur = init;
    Trajectory next = init;
    double cost = objective(cur, grid, lambda1, opts.lambda2);
    out.cost_history.clear();
    if (opts.record_costs) out.cost_history.push_back(cost);

    double prev_disp = std::numeric_limits<double>::infinity();
    int growth = 0;
    bool restart = false;
    int it = 0;
    for (; it < opts.max_iter; ++it) {
      double step_gamma = gamma;
      double next_cost = 0.0;
      // Backtrack on the external step until the level cost does not rise.
      for (int tries = 0;; ++tries) {
        const ElSystem& s = step_gamma == gamma ? active : system_for(step_gamma);
        el_step(cur, s, grid, opts.lambda2, step_gamma, anchor, xs, ys, next);
        next_cost = objective(next, grid, lambda1, opts.lambda2);
        if (next_cost <= cost + 1e-12 || tries >= 20) break;
        step_gamma *= 0.5;
      }
      if (next_cost > cost + 1e-12) {
        // No descent direction left at this resolution.
        out.converged = true;
        break;
      }
      double disp = 0.0;
      for (std::size_t i = 0; i < cur.size(); ++i)
        disp = std::max(disp, (next[i] - cur[i]).norm());
      cur.waypoints.swap(next.waypoints);
      cost = next_cost;
      if (opts.record_costs) out.cost_history.push_back(cost);
      if (disp < opts.tolerance) {
        out.converged = true;
        ++it;
        break;
      }
      growth = disp > prev_disp ? growth + 1 : 0;
      prev_disp = disp;
      if (growth >= 10) {
        restart = true;
        break;
      }
    }
    if (restart) {
      gamma *= 0.5;
      continue;
    }
    out.iterations = it;
    out.gamma = gamma;
    out.trajectory.waypoints = resample_uniform(cur.waypoints, init.size(), h);
    return out;
  }

  out.failed = true;
  out.trajectory = init;
  out.gamma = gamma;
  return out;
}

const ConflictPair* ConflictSet::find(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  for (const auto& p : pairs)
    if (p.i == i && p.j == j) return &p;
  return nullptr;
}

ConflictSet detect_conflicts(std::span<const Trajectory> predictions, double threshold,
                             std::span<const double> altitudes) {
  if (!altitudes.empty() && altitudes.size() != predictions.size())
    throw std::invalid_argument("altitude count mismatch");
  ConflictSet out;
  std::vector<bool> involved(predictions.size(), false);
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    for (std::size_t j = i + 1; j < predictions.size(); ++j) {
      if (predictions[i].size() != predictions[j].size())
        throw std::invalid_argument("predictions must have equal lengths");
      const double dz = altitudes.empty() ? 0.0 : altitudes[i] - altitudes[j];
      ConflictPair p{i, j, std::numeric_limits<double>::infinity(), 0, false};
      for (std::size_t l = 0; l < predictions[i].size(); ++l) {
        const double d = std::hypot((predictions[i][l] - predictions[j][l]).norm(), dz);
        if (d < p.distance) {
          p.distance = d;
          p.index = l;
        }
      }
      p.conflict = p.distance < threshold;
      if (p.conflict) involved[i] = involved[j] = true;
      out.pairs.push_back(p);
    }
  }
  for (std::size_t i = 0; i < involved.size(); ++i)
    if (involved[i]) out.involved.push_back(i);
  return out;
}

}  // namespace uavswarm
