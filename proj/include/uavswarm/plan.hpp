#pragma once

#include "uavswarm/cost.hpp"
#include "uavswarm/field.hpp"
#include "uavswarm/predict.hpp"
#include "uavswarm/pso.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace uavswarm {

inline constexpr double kDefaultKappaMax = 0.2;

/// Circular arc of length `step_len` leaving `origin` with tangent `slope`.
/// Positive curvature turns left.
struct ArcParams {
  double slope{0.0};      // omega, rad
  double curvature{0.0};  // kappa, 1/m
  Point2 origin{0.0, 0.0};
  double step_len{10.0};

  [[nodiscard]] Point2 point_at(double s) const;
  [[nodiscard]] double end_heading() const { return slope + curvature * step_len; }
  [[nodiscard]] Point2 end() const { return point_at(step_len); }
};

/// n points equally spaced in arc length. Throws if |kappa| > kappa_max or n < 2.
std::vector<Point2> arc_points(const ArcParams& arc, std::size_t n,
                               double kappa_max = kDefaultKappaMax);

/// The arc as a Trajectory with round(step_len / h) + 1 points; the stored
/// spacing is the chord between neighbours.
Trajectory arc_trajectory(const ArcParams& arc, double h, double kappa_max = kDefaultKappaMax);

struct ArcFit {
  double slope{0.0};
  double curvature{0.0};
};

/// Least-squares (Kasa) circle through the points. The slope is the circle
/// tangent at the first point; nearly collinear input gives curvature 0 and
/// the direction of the first-to-last chord.
ArcFit fit_arc(std::span<const Point2> pts);

struct LevelPlanConfig {
  PsoConfig pso;
  double kappa_max{kDefaultKappaMax};
  double slope_half_range{kPi / 2.0};
  // Small pull towards the preferred heading, which decides flat regions.
  double heading_weight{1e-3};
  double spacing{1.0};
  // One particle starts at (preferred heading, 0) when the pose has one.
  bool anchor_preferred{true};
};

struct UavPose {
  Point2 position{0.0, 0.0};
  double heading{0.0};
  double step_len{10.0};
  double speed{10.0};  // m/s, times the arc against moving obstacles
  std::optional<double> preferred_heading;  // current heading if unset
};

struct MovingPoint {
  Point2 position{0.0, 0.0};
  Vec2 velocity{0.0, 0.0};
};

/// Obstacle points the arc must keep `min_distance` away from. The arc is
/// followed by `continuation_steps` straight steps at its end heading, and
/// each waypoint is compared with the points where they are when the UAV
/// gets there. Empty `points` means no constraint.
struct Clearance {
  std::vector<MovingPoint> points;
  double min_distance{0.0};
  int continuation_steps{0};
};

/// Search box [omega_lo, kappa_lo] .. [omega_hi, kappa_hi] around the heading.
void level_bounds(const UavPose& uav, const LevelPlanConfig& cfg, std::vector<double>& lower,
                  std::vector<double>& upper);

/// Cost of flying (omega, kappa) from the UAV pose.
double arc_cost(const UavPose& uav, double omega, double kappa, const GradientGrid& grid,
                const CostWeights& w, const LevelPlanConfig& cfg);

/// Smallest distance to the moving points over the arc and its straight
/// continuation; infinity without points.
double arc_clearance(const UavPose& uav, double omega, double kappa, const Clearance& c,
                     double spacing);

struct LevelPlan {
  ArcParams arc;
  double cost{0.0};
  double clearance{0.0};
  bool clear{true};  // clearance >= min_distance
  ArcFit init_center;
  bool heading_hold_init{false};
  std::vector<Score> trace;
};

/// PSO over (omega, kappa). Particles start around the arc fitted to the
/// first step of `predicted` (or the current heading with kappa = 0 when the
/// prediction failed). With cfg.pso.init == Uniform the prediction is ignored.
/// Arcs short of the clearance are infeasible; if every arc is, the one with
/// the largest clearance wins.
LevelPlan plan_level(const UavPose& uav, const GradientGrid& grid, const Prediction& predicted,
                     const CostWeights& w, const LevelPlanConfig& cfg, Rng& rng,
                     const Clearance& clearance = {});

struct AltitudePlanConfig {
  PsoConfig pso{.lower = {}, .upper = {}, .init = PsoInit::Uniform, .init_sigma = 0.05, .anchors = {}};
  double max_delta{20.0};
  // Also require separation during the vertical move at the start positions.
  bool check_transition{false};
  // Coordinate-descent polish of the adopted vector, also restarted with
  // each offset pinned at 0; escapes the ordering traps of the PSO.
  bool polish{true};
};

struct AltitudePlan {
  std::vector<double> deltas;  // one per UAV; 0 for uninvolved UAVs
  double cost{0.0};
  bool feasible{false};
  bool emergency{false};
  std::vector<PsoResult> instances;  // one per involved UAV
};

/// Decentralized altitude deconfliction. Each involved UAV runs its own PSO
/// (seeded from `seeds`, one per involved UAV) over the joint offsets of the
/// involved set; the feasible result with the lowest cost wins, ties going to
/// the lexicographically smallest vector, and is then polished (see
/// AltitudePlanConfig::polish). Uninvolved UAVs keep the change
/// given in `preset_deltas` (0 by default) and still count in the separation
/// constraint. Without any feasible result the involved UAVs are spread by
/// alternating multiples of ceil(d_u2u).
AltitudePlan plan_altitude(const ConflictSet& conflicts, std::span<const Trajectory> level_trajs,
                           double d_u2u, const AltitudePlanConfig& cfg,
                           std::span<const std::uint64_t> seeds,
                           std::span<const double> base_altitudes = {},
                           std::span<const double> preset_deltas = {});

/// Adoption rule shared by every UAV: best feasible score, then the
/// lexicographically smallest vector. Returns the index into `results`.
std::size_t adopt_consensus(std::span<const PsoResult> results);

}  // namespace uavswarm
