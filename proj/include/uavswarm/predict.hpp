#pragma once

#include "uavswarm/banded.hpp"
#include "uavswarm/cost.hpp"
#include "uavswarm/field.hpp"

#include <span>
#include <vector>

namespace uavswarm {

/// Which way the semi-implicit update moves along the level cost.
/// `Descent` builds M = I + lambda1 * D4 (stencil lambda1, -4 lambda1,
/// 1 + 6 lambda1, ...). `AntiDiffusive` keeps the opposite sign,
/// M = I - lambda1 * D4, which amplifies bending instead of damping it;
/// it exists so the difference can be demonstrated.
enum class StencilSign { Descent, AntiDiffusive };

/// Semi-implicit Euler-Lagrange system for an open curve of L waypoints.
/// Row 0 pins the first waypoint; the last two rows carry the free-end
/// (zero bending) closure of the bending energy. Every row sums to 1.
struct ElSystem {
  std::size_t length{0};
  double lambda1{0.0};
  StencilSign sign{StencilSign::Descent};
  PentadiagonalMatrix matrix;
  PentadiagonalLU solver;
};

ElSystem build_el_system(std::size_t length, double lambda1,
                         StencilSign sign = StencilSign::Descent);

/// Straight line of k * |S| / h + 1 waypoints from `pos` along `velocity`.
Trajectory init_prediction(const Point2& pos, const Vec2& velocity, int steps, double step_len,
                           double spacing);

struct PredictOptions {
  double lambda2{0.5};
  double gamma{1.0};
  double tolerance{1e-3};  // m, max waypoint displacement
  int max_iter{200};
  bool record_costs{false};
};

struct Prediction {
  Trajectory trajectory;
  bool failed{false};
  bool converged{false};
  int iterations{0};
  double gamma{1.0};
  std::vector<double> cost_history;  // level cost after each accepted iteration
};

/// Iterates S <- M^-1 (S + gamma * lambda2 * h * E_s grad E_s) with the
/// first waypoint held at the UAV position. A step that raises the level
/// cost is retried with gamma halved; displacement growing for 10
/// consecutive iterations restarts with gamma halved, and below
/// gamma = 1e-3 the prediction reports failure and returns `init`.
Prediction predict_trajectory(const Trajectory& init, const ElSystem& sys,
                              const GradientGrid& grid, const PredictOptions& opts = {});

/// Re-spaces a polyline to `count` points with consecutive straight-line
/// distance `spacing`, extending the last segment if the polyline is too short.
std::vector<Point2> resample_uniform(std::span<const Point2> pts, std::size_t count,
                                     double spacing);

struct ConflictPair {
  std::size_t i{0};
  std::size_t j{0};
  double distance{0.0};
  std::size_t index{0};  // waypoint index of the minimum
  bool conflict{false};
};

struct ConflictSet {
  std::vector<ConflictPair> pairs;    // every pair, i < j, listed once
  std::vector<std::size_t> involved;  // sorted members of conflicting pairs

  [[nodiscard]] bool empty() const { return involved.empty(); }
  [[nodiscard]] const ConflictPair* find(std::size_t i, std::size_t j) const;
};

/// Same-index minimum distance between every pair of predictions. When
/// `altitudes` is given the vertical offset between the UAVs is included.
ConflictSet detect_conflicts(std::span<const Trajectory> predictions, double threshold,
                             std::span<const double> altitudes = {});

}  // namespace uavswarm
