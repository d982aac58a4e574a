#pragma once

#include "uavswarm/field.hpp"
#include "uavswarm/geometry.hpp"

#include <span>
#include <vector>

namespace uavswarm {

/// Equally spaced waypoints in the level plane.
struct Trajectory {
  std::vector<Point2> waypoints;
  double spacing{1.0};    // h
  double step_len{10.0};  // |S|
  int steps{1};           // k

  [[nodiscard]] std::size_t size() const { return waypoints.size(); }
  [[nodiscard]] const Point2& operator[](std::size_t i) const { return waypoints[i]; }

  /// Waypoint index at the end of planning step `step` (1-based).
  [[nodiscard]] std::size_t step_end_index(int step) const;

  /// Throws std::invalid_argument unless consecutive distances equal h
  /// within `rel_tol` (relative).
  void validate_spacing(double rel_tol = 1e-6) const;
};

struct CostWeights {
  double lambda1{0.5};
  double lambda2{0.5};

  void validate() const;
};

struct EnergyCoefficients {
  double turning_power{1.0};  // P_n
  double length_power{1.0};   // P_len
  double comms_power{0.01};   // P_comms
  double mass{1.0};
  double gravity{9.81};
};

inline constexpr double kOutOfBoundsPenalty = 1e6;

/// Discrete integral of 1/2 |S''|^2 over interior waypoints.
double f_eng(const Trajectory& traj);

struct SafetyCost {
  double value{0.0};
  bool out_of_bounds{false};
};

/// -sum 1/2 |grad smoothed binary|^2 h over all waypoints; out-of-bounds
/// waypoints add kOutOfBoundsPenalty each.
SafetyCost f_saf(const Trajectory& traj, const GradientGrid& grid);

struct LevelCost {
  double value{0.0};
  double energy{0.0};
  double safety{0.0};
  bool out_of_bounds{false};
};

LevelCost level_cost(const Trajectory& traj, const GradientGrid& grid, const CostWeights& w);

struct AltitudeCost {
  double cost{0.0};
  bool feasible{true};
  double violation{0.0};  // sum over pairs of (d_u2u - separation)_+
  double min_separation{0.0};
};

/// Sum of |delta| subject to time-aligned 3-D separation >= d_u2u.
/// `base_altitudes` (optional) are the current altitudes of the UAVs.
AltitudeCost altitude_cost(std::span<const double> deltas, std::span<const Trajectory> trajs,
                           double d_u2u, std::span<const double> base_altitudes = {});

/// Same constraint evaluated from precomputed minimum level distances
/// (row-major W x W matrix). When `start_level_dist` is given the altitude
/// change is flown vertically before the level motion, so a pair must also
/// stay separated while the UAVs climb or descend at their start positions.
AltitudeCost altitude_cost_from_levels(std::span<const double> deltas,
                                       std::span<const double> min_level_dist, double d_u2u,
                                       std::span<const double> base_altitudes = {},
                                       std::span<const double> start_level_dist = {});

/// Minimum time-aligned level distance for each pair, row-major W x W.
std::vector<double> min_level_distances(std::span<const Trajectory> trajs);

/// Level distance between the first waypoints of each pair, row-major W x W.
std::vector<double> start_level_distances(std::span<const Trajectory> trajs);

struct EnergyBreakdown {
  double turning{0.0};
  double length{0.0};
  double comms{0.0};
  [[nodiscard]] double total() const { return turning + length + comms; }
};

/// Energy of a flown 3-D polyline: turning from the heading change at each
/// vertex, length from the horizontal distance plus |altitude change|,
/// communication from the horizontal distance.
EnergyBreakdown trajectory_energy(std::span<const Point3> log_traj, const EnergyCoefficients& c);

}  // namespace uavswarm
