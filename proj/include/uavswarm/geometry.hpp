#pragma once

#include <Eigen/Core>

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <random>

namespace uavswarm {

using Point2 = Eigen::Vector2d;
using Point3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;

inline constexpr double kPi = std::numbers::pi;

inline double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a < 0.0) a += 2.0 * kPi;
  return a - kPi;
}

inline Vec2 unit_from_heading(double heading) {
  return {std::cos(heading), std::sin(heading)};
}

inline double heading_of(const Vec2& v) { return std::atan2(v.y(), v.x()); }

inline Point3 lift(const Point2& p, double z) { return {p.x(), p.y(), z}; }
inline Point2 level(const Point3& p) { return p.head<2>(); }

/// Axis-aligned rectangle in the level plane.
struct Bounds2 {
  Point2 min{0.0, 0.0};
  Point2 max{0.0, 0.0};

  [[nodiscard]] bool contains(const Point2& p) const {
    return p.x() >= min.x() && p.x() <= max.x() && p.y() >= min.y() && p.y() <= max.y();
  }
  [[nodiscard]] double width() const { return max.x() - min.x(); }
  [[nodiscard]] double height() const { return max.y() - min.y(); }
};

// Random streams are derived from (run seed, tags...) so per-UAV work is
// independent of evaluation order.
using Rng = std::mt19937_64;

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
  std::uint64_t h = splitmix64(seed);
  for (auto t : tags) h = splitmix64(h ^ splitmix64(t + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace uavswarm
