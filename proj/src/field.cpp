#include "uavswarm/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>

namespace uavswarm {

double ObstacleModel::surface_distance(const Point2& q) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : mass_points()) best = std::min(best, (q - p).norm());
  return best;
}

ObstacleModel ObstacleModel::advanced(double dt) const {
  ObstacleModel out = *this;
  const Vec2 shift = velocity * dt;
  out.center += shift;
  for (auto& p : out.sample_points) p += shift;
  return out;
}

void ObstacleModel::validate(double d_safe, double shape_radius) const {
  if (!(influence_radius > d_safe))
    throw std::invalid_argument("obstacle influence radius must exceed d_safe");
  if (kind == ObstacleKind::Shaped) {
    if (sample_points.empty())
      throw std::invalid_argument("shaped obstacle needs at least one sample point");
    for (const auto& p : sample_points)
      if ((p - center).norm() > shape_radius + 1e-9)
        throw std::invalid_argument("shaped obstacle sample point outside its shape radius");
  } else if (!sample_points.empty()) {
    throw std::invalid_argument("mass-point obstacle must not carry sample points");
  }
}

EnvironmentField EnvironmentField::for_plane(double altitude, double exclusion) const {
  EnvironmentField out{swarm, {}, d_safe};
  for (const auto& o : obstacles)
    if (std::abs(o.altitude - altitude) < exclusion) out.obstacles.push_back(o);
  return out;
}

CenterResult conceptual_center(std::span<const Point2> positions, const Point2& target,
                               double step_len) {
  if (positions.empty()) throw std::invalid_argument("conceptual_center: no positions");
  Point2 centroid = Point2::Zero();
  for (const auto& p : positions) centroid += p;
  centroid /= static_cast<double>(positions.size());
  const Vec2 to_target = target - centroid;
  const double dist = to_target.norm();
  if (dist == 0.0) return {centroid, false};
  return {centroid + step_len * to_target / dist, true};
}

double swarm_intensity(const Point2& q, const SwarmFieldSpec& spec, double d_safe) {
  const double r = (q - spec.center).norm();
  if (r > spec.influence_radius) return 0.0;
  if (r == 0.0) return spec.speed / (d_safe * d_safe);
  return spec.speed / (r * r);
}

namespace {

double mass_point_intensity(double r, double peak_speed, double radius, double d_safe) {
  if (r > radius) return 0.0;
  if (r <= d_safe) return peak_speed / (d_safe * d_safe);
  return peak_speed / (r * r);
}

}  // namespace

double obstacle_intensity(const Point2& q, const ObstacleModel& obs, double swarm_speed,
                          double d_safe) {
  const double peak = std::max(obs.speed(), swarm_speed);
  double best = 0.0;
  for (const auto& p : obs.mass_points())
    best = std::max(best, mass_point_intensity((q - p).norm(), peak, obs.influence_radius, d_safe));
  return best;
}

double environment_intensity(const Point2& q, const EnvironmentField& env) {
  double phi = swarm_intensity(q, env.swarm, env.d_safe);
  for (const auto& o : env.obstacles) phi += obstacle_intensity(q, o, env.swarm.speed, env.d_safe);
  return phi;
}

Vec2 environment_gradient(const Point2& q, const EnvironmentField& env, double step) {
  const Vec2 dx(step, 0.0), dy(0.0, step);
  return {(environment_intensity(q + dx, env) - environment_intensity(q - dx, env)) / (2 * step),
          (environment_intensity(q + dy, env) - environment_intensity(q - dy, env)) / (2 * step)};
}

GridSpec GridSpec::covering(const Bounds2& bounds, double cell) {
  if (!(cell > 0.0)) throw std::invalid_argument("cell size must be positive");
  if (!(bounds.width() > 0.0) || !(bounds.height() > 0.0))
    throw std::invalid_argument("grid bounds must have positive extent");
  GridSpec spec;
  spec.origin = bounds.min;
  spec.cell = cell;
  spec.nx = static_cast<int>(std::floor(bounds.width() / cell + 1e-9)) + 1;
  spec.ny = static_cast<int>(std::floor(bounds.height() / cell + 1e-9)) + 1;
  if (spec.nx < 3 || spec.ny < 3) throw std::invalid_argument("grid needs at least 3x3 nodes");
  return spec;
}

IntensitySamples sample_intensity(const EnvironmentField& env, const Bounds2& bounds, double cell) {
  IntensitySamples out;
  out.spec = GridSpec::covering(bounds, cell);
  const auto& s = out.spec;
  out.phi.assign(s.size(), 0.0);

  // Each source only touches nodes inside its influence radius.
  auto splat = [&](const Point2& c, double radius, auto&& value_at) {
    const int i0 = std::max(0, static_cast<int>(std::floor((c.x() - radius - s.origin.x()) / s.cell)));
    const int i1 = std::min(s.nx - 1, static_cast<int>(std::ceil((c.x() + radius - s.origin.x()) / s.cell)));
    const int j0 = std::max(0, static_cast<int>(std::floor((c.y() - radius - s.origin.y()) / s.cell)));
    const int j1 = std::min(s.ny - 1, static_cast<int>(std::ceil((c.y() + radius - s.origin.y()) / s.cell)));
    for (int j = j0; j <= j1; ++j)
      for (int i = i0; i <= i1; ++i) value_at(i, j);
  };

  splat(env.swarm.center, env.swarm.influence_radius, [&](int i, int j) {
    out.phi[s.index(i, j)] += swarm_intensity(s.node(i, j), env.swarm, env.d_safe);
  });
  for (const auto& o : env.obstacles) {
    if (o.kind == ObstacleKind::MassPoint) {
      splat(o.center, o.influence_radius, [&](int i, int j) {
        out.phi[s.index(i, j)] += obstacle_intensity(s.node(i, j), o, env.swarm.speed, env.d_safe);
      });
    } else {
      // Shaped: max over sample points, so evaluate the whole footprint once.
      double reach = 0.0;
      for (const auto& p : o.sample_points) reach = std::max(reach, (p - o.center).norm());
      splat(o.center, o.influence_radius + reach, [&](int i, int j) {
        out.phi[s.index(i, j)] += obstacle_intensity(s.node(i, j), o, env.swarm.speed, env.d_safe);
      });
    }
  }
  return out;
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
    sum += k[i + radius];
  }
  for (auto& v : k) v /= sum;
  return k;
}

// Separable convolution with clamp-to-edge borders.
std::vector<double> blur(const GridSpec& s, const std::vector<double>& in, double sigma) {
  if (sigma <= 0.0) return in;
  const auto k = gaussian_kernel(sigma);
  const int r = static_cast<int>(k.size() / 2);
  std::vector<double> tmp(in.size()), out(in.size());
  for (int j = 0; j < s.ny; ++j) {
    const double* row = &in[s.index(0, j)];
    for (int i = 0; i < s.nx; ++i) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) acc += k[t + r] * row[std::clamp(i + t, 0, s.nx - 1)];
      tmp[s.index(i, j)] = acc;
    }
  }
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      double acc = 0.0;
      for (int t = -r; t <= r; ++t) acc += k[t + r] * tmp[s.index(i, std::clamp(j + t, 0, s.ny - 1))];
      out[s.index(i, j)] = acc;
    }
  }
  return out;
}

// Central differences inside, one-sided on the border.
void central_gradient(const GridSpec& s, const std::vector<double>& f, std::vector<double>& gx,
                      std::vector<double>& gy) {
  gx.assign(f.size(), 0.0);
  gy.assign(f.size(), 0.0);
  for (int j = 0; j < s.ny; ++j) {
    for (int i = 0; i < s.nx; ++i) {
      const int il = std::max(i - 1, 0), ir = std::min(i + 1, s.nx - 1);
      const int jl = std::max(j - 1, 0), jr = std::min(j + 1, s.ny - 1);
      gx[s.index(i, j)] = (f[s.index(ir, j)] - f[s.index(il, j)]) / ((ir - il) * s.cell);
      gy[s.index(i, j)] = (f[s.index(i, jr)] - f[s.index(i, jl)]) / ((jr - jl) * s.cell);
    }
  }
}

}  // namespace

GradientGrid binarize_and_smooth(const IntensitySamples& samples, double reference_intensity,
                                 const GradientGridOptions& opts) {
  GradientGrid g;
  g.spec = samples.spec;
  g.reference_intensity = reference_intensity;
  g.binary.resize(samples.phi.size());
  for (std::size_t n = 0; n < samples.phi.size(); ++n)
    g.binary[n] = samples.phi[n] >= reference_intensity ? 1.0 : -1.0;

  g.smoothed = blur(g.spec, g.binary, opts.blur_sigma_cells);

  std::vector<double> bx, by;
  central_gradient(g.spec, g.smoothed, bx, by);
  g.edge.resize(bx.size());
  for (std::size_t n = 0; n < bx.size(); ++n) g.edge[n] = -std::hypot(bx[n], by[n]);

  central_gradient(g.spec, g.edge, g.grad_x, g.grad_y);
  return g;
}

GradientGrid build_gradient_grid(const EnvironmentField& env, const Point2& p0,
                                 const Bounds2& bounds, double cell,
                                 const GradientGridOptions& opts) {
  const Vec2 reach(opts.required_reach, opts.required_reach);
  if (!bounds.contains(p0 - reach) || !bounds.contains(p0 + reach))
    throw std::invalid_argument("grid bounds do not contain p0 plus one prediction horizon");
  const auto samples = sample_intensity(env, bounds, cell);
  return binarize_and_smooth(samples, environment_intensity(p0, env), opts);
}

ExternalSample sample_external(const GradientGrid& grid, const Point2& q) {
  const auto& s = grid.spec;
  ExternalSample out;
  double fx = (q.x() - s.origin.x()) / s.cell;
  double fy = (q.y() - s.origin.y()) / s.cell;
  if (!(fx >= 0.0 && fx <= s.nx - 1 && fy >= 0.0 && fy <= s.ny - 1)) {
    out.out_of_bounds = true;
    fx = std::clamp(std::isfinite(fx) ? fx : 0.0, 0.0, static_cast<double>(s.nx - 1));
    fy = std::clamp(std::isfinite(fy) ? fy : 0.0, 0.0, static_cast<double>(s.ny - 1));
  }
  const int i0 = std::min(static_cast<int>(fx), s.nx - 2);
  const int j0 = std::min(static_cast<int>(fy), s.ny - 2);
  const double tx = fx - i0, ty = fy - j0;
  const double w00 = (1 - tx) * (1 - ty), w10 = tx * (1 - ty), w01 = (1 - tx) * ty, w11 = tx * ty;
  const auto a = s.index(i0, j0), b = s.index(i0 + 1, j0), c = s.index(i0, j0 + 1),
             d = s.index(i0 + 1, j0 + 1);
  auto lerp = [&](const std::vector<double>& v) {
    return w00 * v[a] + w10 * v[b] + w01 * v[c] + w11 * v[d];
  };
  out.energy = lerp(grid.edge);
  out.gradient = {lerp(grid.grad_x), lerp(grid.grad_y)};
  return out;
}

void write_layer_csv(std::ostream& os, const GridSpec& spec, std::span<const double> values) {
  if (values.size() != spec.size()) throw std::invalid_argument("layer size does not match grid");
  os << "# origin=" << spec.origin.x() << ',' << spec.origin.y() << " cell=" << spec.cell << '\n';
  char buf[32];
  for (int j = 0; j < spec.ny; ++j) {
    for (int i = 0; i < spec.nx; ++i) {
      std::snprintf(buf, sizeof buf, "%.6f", values[spec.index(i, j)] + 0.0);
      if (i) os << ',';
      os << buf;
    }
    os << '\n';
  }
}

}  // namespace uavswarm
