#include "uavswarm/cost.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace uavswarm {

std::size_t Trajectory::step_end_index(int step) const {
  const auto per_step = static_cast<std::size_t>(std::lround(step_len / spacing));
  return std::min(waypoints.size() - 1, per_step * static_cast<std::size_t>(step));
}

void Trajectory::validate_spacing(double rel_tol) const {
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const double d = (waypoints[i] - waypoints[i - 1]).norm();
    if (std::abs(d - spacing) > rel_tol * spacing)
      throw std::invalid_argument("trajectory waypoints are not equally spaced");
  }
}

void CostWeights::validate() const {
  if (lambda1 < 0.0 || lambda2 < 0.0) throw std::invalid_argument("cost weights must be >= 0");
  if (std::abs(lambda1 + lambda2 - 1.0) > 1e-9)
    throw std::invalid_argument("cost weights must sum to 1");
}

double f_eng(const Trajectory& traj) {
  const auto& s = traj.waypoints;
  if (s.size() < 3) throw std::invalid_argument("f_eng needs at least 3 waypoints");
  const double h = traj.spacing;
  double acc = 0.0;
  for (std::size_t i = 1; i + 1 < s.size(); ++i)
    acc += 0.5 * (s[i + 1] - 2.0 * s[i] + s[i - 1]).squaredNorm();
  return acc / (h * h * h);
}

SafetyCost f_saf(const Trajectory& traj, const GradientGrid& grid) {
  SafetyCost out;
  for (std::size_t l = 0; l < traj.size(); ++l) {
    const auto e = sample_external(grid, traj[l]);
    if (e.out_of_bounds) {
      out.out_of_bounds = true;
      out.value += kOutOfBoundsPenalty;
      continue;
    }
    out.value -= 0.5 * e.energy * e.energy * traj.spacing;
  }
  return out;
}

LevelCost level_cost(const Trajectory& traj, const GradientGrid& grid, const CostWeights& w) {
  LevelCost out;
  out.energy = f_eng(traj);
  const auto saf = f_saf(traj, grid);
  out.safety = saf.value;
  out.out_of_bounds = saf.out_of_bounds;
  out.value = w.lambda1 * out.energy + w.lambda2 * out.safety;
  return out;
}

std::vector<double> min_level_distances(std::span<const Trajectory> trajs) {
  const std::size_t w = trajs.size();
  std::vector<double> out(w * w, 0.0);
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = i + 1; j < w; ++j) {
      if (trajs[i].size() != trajs[j].size())
        throw std::invalid_argument("trajectories must have equal lengths");
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < trajs[i].size(); ++l)
        best = std::min(best, (trajs[i][l] - trajs[j][l]).norm());
      out[i * w + j] = out[j * w + i] = best;
    }
  }
  return out;
}

std::vector<double> start_level_distances(std::span<const Trajectory> trajs) {
  const std::size_t w = trajs.size();
  std::vector<double> out(w * w, 0.0);
  for (std::size_t i = 0; i < w; ++i)
    for (std::size_t j = i + 1; j < w; ++j)
      out[i * w + j] = out[j * w + i] = (trajs[i][0] - trajs[j][0]).norm();
  return out;
}

AltitudeCost altitude_cost_from_levels(std::span<const double> deltas,
                                       std::span<const double> min_level_dist, double d_u2u,
                                       std::span<const double> base_altitudes,
                                       std::span<const double> start_level_dist) {
  const std::size_t w = deltas.size();
  if (min_level_dist.size() != w * w) throw std::invalid_argument("distance matrix size mismatch");
  if (!start_level_dist.empty() && start_level_dist.size() != w * w)
    throw std::invalid_argument("start distance matrix size mismatch");
  if (!base_altitudes.empty() && base_altitudes.size() != w)
    throw std::invalid_argument("base altitude count mismatch");
  AltitudeCost out;
  for (double d : deltas) out.cost += std::abs(d);
  out.min_separation = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < w; ++i) {
    for (std::size_t j = i + 1; j < w; ++j) {
      const double dz0 = base_altitudes.empty() ? 0.0 : base_altitudes[i] - base_altitudes[j];
      const double dz = dz0 + deltas[i] - deltas[j];
      const double lv = min_level_dist[i * w + j];
      double sep = std::sqrt(lv * lv + dz * dz);
      if (!start_level_dist.empty()) {
        // Smallest vertical gap met while moving from dz0 to dz.
        const double gap = dz0 * dz <= 0.0 ? 0.0 : std::min(std::abs(dz0), std::abs(dz));
        sep = std::min(sep, std::hypot(start_level_dist[i * w + j], gap));
      }
      out.min_separation = std::min(out.min_separation, sep);
      if (sep < d_u2u) {
        out.feasible = false;
        out.violation += d_u2u - sep;
      }
    }
  }
  return out;
}

AltitudeCost altitude_cost(std::span<const double> deltas, std::span<const Trajectory> trajs,
                           double d_u2u, std::span<const double> base_altitudes) {
  if (deltas.size() != trajs.size()) throw std::invalid_argument("deltas/trajectories size mismatch");
  if (deltas.size() < 2) throw std::invalid_argument("altitude cost needs at least two UAVs");
  // Vertical offsets are constant along a trajectory, so the time-aligned 3-D
  // minimum is attained at the minimum level distance.
  const auto levels = min_level_distances(trajs);
  return altitude_cost_from_levels(deltas, levels, d_u2u, base_altitudes);
}

EnergyBreakdown trajectory_energy(std::span<const Point3> log_traj, const EnergyCoefficients& c) {
  EnergyBreakdown e;
  double turn = 0.0, len = 0.0, climb = 0.0;
  Vec2 prev_dir = Vec2::Zero();
  for (std::size_t i = 1; i < log_traj.size(); ++i) {
    const Vec2 d = level(log_traj[i]) - level(log_traj[i - 1]);
    const double l = d.norm();
    len += l;
    climb += std::abs(log_traj[i].z() - log_traj[i - 1].z());
    if (l > 0.0) {
      if (prev_dir.squaredNorm() > 0.0) {
        const double cross = prev_dir.x() * d.y() - prev_dir.y() * d.x();
        turn += std::abs(std::atan2(cross, prev_dir.dot(d)));
      }
      prev_dir = d;
    }
  }
  // |kappa| * len summed over steps is the total turning angle.
  e.turning = c.turning_power * c.mass * turn;
  e.length = c.length_power * c.mass * c.gravity * (len + climb);
  e.comms = c.comms_power * len;
  return e;
}

}  // namespace uavswarm
