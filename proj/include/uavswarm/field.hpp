#pragma once

#include "uavswarm/geometry.hpp"

#include <iosfwd>
#include <span>
#include <vector>

namespace uavswarm {

enum class ObstacleKind { MassPoint, Shaped };

struct ObstacleModel {
  ObstacleKind kind{ObstacleKind::MassPoint};
  Point2 center{0.0, 0.0};
  Vec2 velocity{0.0, 0.0};
  double influence_radius{100.0};
  // Absolute positions of the mass points making up a shaped obstacle.
  std::vector<Point2> sample_points;
  double altitude{0.0};

  [[nodiscard]] double speed() const { return velocity.norm(); }

  /// Points the field and the surface distance are built from.
  [[nodiscard]] std::span<const Point2> mass_points() const {
    return kind == ObstacleKind::Shaped ? std::span<const Point2>(sample_points)
                                        : std::span<const Point2>(&center, 1);
  }

  /// Distance from q (level plane) to the nearest mass point.
  [[nodiscard]] double surface_distance(const Point2& q) const;

  /// Constant-velocity extrapolation by dt seconds.
  [[nodiscard]] ObstacleModel advanced(double dt) const;

  /// Throws std::invalid_argument if R_o <= d_safe or the sample set does not
  /// match the kind.
  void validate(double d_safe, double shape_radius) const;
};

struct SwarmFieldSpec {
  Point2 center{0.0, 0.0};  // conceptual center p*
  double speed{10.0};       // v_s
  double influence_radius{5.0};
};

struct EnvironmentField {
  SwarmFieldSpec swarm;
  std::vector<ObstacleModel> obstacles;
  double d_safe{20.0};

  /// Copy keeping only obstacles whose altitude differs from `altitude` by
  /// less than `exclusion`.
  [[nodiscard]] EnvironmentField for_plane(double altitude, double exclusion) const;
};

struct CenterResult {
  Point2 center;
  bool shifted{true};
};

/// Centroid of `positions` moved `step_len` towards `target`.
CenterResult conceptual_center(std::span<const Point2> positions, const Point2& target,
                               double step_len);

double swarm_intensity(const Point2& q, const SwarmFieldSpec& spec, double d_safe);
double obstacle_intensity(const Point2& q, const ObstacleModel& obs, double swarm_speed,
                          double d_safe);
double environment_intensity(const Point2& q, const EnvironmentField& env);

/// Central-difference gradient of the continuous environment field.
Vec2 environment_gradient(const Point2& q, const EnvironmentField& env, double step = 0.05);

// ---------------------------------------------------------------------------
// Grids

/// Node lattice: node (i, j) sits at origin + (i, j) * cell; row-major by j.
struct GridSpec {
  Point2 origin{0.0, 0.0};
  double cell{1.0};
  int nx{0};
  int ny{0};

  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
  [[nodiscard]] std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(j) * nx + i;
  }
  [[nodiscard]] Point2 node(int i, int j) const {
    return origin + Vec2(i * cell, j * cell);
  }
  [[nodiscard]] Bounds2 bounds() const {
    return {origin, origin + Vec2((nx - 1) * cell, (ny - 1) * cell)};
  }
  static GridSpec covering(const Bounds2& bounds, double cell);
};

/// Raw field samples, shared by every UAV planning on the same plane.
struct IntensitySamples {
  GridSpec spec;
  std::vector<double> phi;
};

IntensitySamples sample_intensity(const EnvironmentField& env, const Bounds2& bounds, double cell);

struct GradientGridOptions {
  double blur_sigma_cells{2.0};
  // Half-width of the square around p0 that must fit inside the bounds
  // (one prediction horizon).
  double required_reach{0.0};
};

/// Per-UAV external-energy grid. `binary` holds the thresholded field,
/// `edge` holds E_s = -|grad(smoothed binary)| and `grad_x`/`grad_y` its
/// central-difference gradient.
struct GradientGrid {
  GridSpec spec;
  double reference_intensity{0.0};
  std::vector<double> binary;
  std::vector<double> smoothed;
  std::vector<double> edge;
  std::vector<double> grad_x;
  std::vector<double> grad_y;

  [[nodiscard]] Bounds2 bounds() const { return spec.bounds(); }
};

GradientGrid binarize_and_smooth(const IntensitySamples& samples, double reference_intensity,
                                 const GradientGridOptions& opts = {});

/// Samples the field on `bounds`, thresholds at the intensity of p0 and
/// derives the edge energy. Throws std::invalid_argument when p0 (plus
/// opts.required_reach) does not fit in the bounds.
GradientGrid build_gradient_grid(const EnvironmentField& env, const Point2& p0,
                                 const Bounds2& bounds, double cell,
                                 const GradientGridOptions& opts = {});

struct ExternalSample {
  double energy{0.0};
  Vec2 gradient{0.0, 0.0};
  bool out_of_bounds{false};
};

/// Bilinear lookup of E_s and grad E_s; clamps to the border outside.
ExternalSample sample_external(const GradientGrid& grid, const Point2& q);

/// Writes one layer as a row-major CSV matrix with a `# origin=x,y cell=s`
/// header line.
void write_layer_csv(std::ostream& os, const GridSpec& spec, std::span<const double> values);

}  // namespace uavswarm
