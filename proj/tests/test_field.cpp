#include <doctest.h>

#include "oracles.hpp"
#include "uavswarm/field.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace uavswarm;

namespace {

ObstacleModel mass_point(Point2 c, Vec2 v = Vec2::Zero()) {
  ObstacleModel o;
  o.center = c;
  o.velocity = v;
  o.influence_radius = 100.0;
  return o;
}

EnvironmentField no_swarm(std::vector<ObstacleModel> obs) {
  EnvironmentField f;
  f.swarm = {Point2(1e6, 1e6), 10.0, 5.0};
  f.obstacles = std::move(obs);
  return f;
}

}  // namespace

TEST_CASE("conceptual center moves one step towards the target") {
  const std::vector<Point2> pos{Point2(-1, -1), Point2(1, 1), Point2(1, -1), Point2(-1, 1)};
  auto c = conceptual_center(pos, Point2(100, 0), 10.0);
  CHECK(c.shifted);
  CHECK(c.center.x() == doctest::Approx(10.0));
  CHECK(c.center.y() == doctest::Approx(0.0));
  c = conceptual_center(pos, Point2(0, 50), 10.0);
  CHECK(c.center.y() == doctest::Approx(10.0));
  CHECK(std::abs(c.center.x()) < 1e-12);

  const std::vector<Point2> one{Point2(1, 1)};
  c = conceptual_center(one, Point2(1, 1), 10.0);
  CHECK_FALSE(c.shifted);
  CHECK(c.center == Point2(1, 1));
}

TEST_CASE("swarm field branches") {
  const SwarmFieldSpec s{Point2(0, 0), 10.0, 15.0};
  CHECK(swarm_intensity(Point2(10, 0), s, 20.0) == doctest::Approx(0.1));
  CHECK(swarm_intensity(Point2(15, 0), s, 20.0) == doctest::Approx(10.0 / 225.0));
  CHECK(swarm_intensity(Point2(16, 0), s, 20.0) == 0.0);
  CHECK(swarm_intensity(Point2(0, 0), s, 20.0) == doctest::Approx(10.0 / 400.0));
  for (double r : {0.5, 3.0, 7.5, 14.9})
    CHECK(swarm_intensity(Point2(0, r), s, 20.0) ==
          doctest::Approx(oracle::swarm_field(r, 10.0, 15.0, 20.0)));
}

TEST_CASE("obstacle field branches") {
  auto moving = mass_point(Point2(0, 0), Vec2(5, 0));
  CHECK(obstacle_intensity(Point2(10, 0), moving, 10.0, 20.0) == doctest::Approx(0.025));
  auto fast = mass_point(Point2(0, 0), Vec2(0, 15));
  CHECK(obstacle_intensity(Point2(10, 0), fast, 10.0, 20.0) == doctest::Approx(15.0 / 400.0));
  auto still = mass_point(Point2(0, 0));
  CHECK(obstacle_intensity(Point2(30, 0), still, 10.0, 20.0) == doctest::Approx(10.0 / 900.0));
  CHECK(obstacle_intensity(Point2(100.5, 0), still, 10.0, 20.0) == 0.0);
  CHECK(obstacle_intensity(Point2(100, 0), still, 10.0, 20.0) == doctest::Approx(1e-3));

  SUBCASE("plateau is constant, decay strictly decreasing") {
    const double plateau = obstacle_intensity(Point2(0, 0), still, 10.0, 20.0);
    for (double r : {0.0, 5.0, 12.0, 19.99})
      CHECK(obstacle_intensity(Point2(r, 0), still, 10.0, 20.0) == plateau);
    double prev = plateau;
    for (double r = 20.5; r < 100.0; r += 0.5) {
      const double v = obstacle_intensity(Point2(0, r), still, 10.0, 20.0);
      CHECK(v < prev);
      CHECK(v == doctest::Approx(oracle::obstacle_field(r, 0.0, 10.0, 20.0, 100.0)));
      prev = v;
    }
  }
}

TEST_CASE("environment field is the sum of its parts") {
  EnvironmentField env;
  env.swarm = {Point2(0, 0), 10.0, 15.0};
  env.d_safe = 20.0;
  CHECK(environment_intensity(Point2(50, 0), env) == 0.0);

  const auto o = mass_point(Point2(40, 0), Vec2(5, 0));
  env.obstacles = {o};
  const Point2 q(10, 0);
  CHECK(environment_intensity(q, env) ==
        doctest::Approx(swarm_intensity(q, env.swarm, 20.0) + obstacle_intensity(q, o, 10.0, 20.0)));

  EnvironmentField twice = env;
  twice.swarm.influence_radius = 1e-3;
  EnvironmentField once = twice;
  twice.obstacles = {o, o};
  CHECK(environment_intensity(Point2(0, 7), twice) ==
        doctest::Approx(2.0 * environment_intensity(Point2(0, 7), once)));

  SUBCASE("adding an obstacle never lowers the field") {
    EnvironmentField more = env;
    more.obstacles.push_back(mass_point(Point2(-30, 20)));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-150, 150);
    for (int i = 0; i < 200; ++i) {
      const Point2 p(u(rng), u(rng));
      CHECK(environment_intensity(p, more) >= environment_intensity(p, env));
    }
  }
}

TEST_CASE("shaped obstacle takes the nearest sample point") {
  ObstacleModel shaped = mass_point(Point2(0, 0));
  shaped.kind = ObstacleKind::Shaped;
  shaped.sample_points = {Point2(2, 0), Point2(-5, 0), Point2(0, 5)};
  const ObstacleModel centre = mass_point(Point2(0, 0));
  const Point2 q(40, 0);
  CHECK(obstacle_intensity(q, shaped, 10.0, 20.0) == doctest::Approx(10.0 / (38.0 * 38.0)));
  CHECK(obstacle_intensity(q, shaped, 10.0, 20.0) >= obstacle_intensity(q, centre, 10.0, 20.0));
  CHECK(shaped.surface_distance(q) == doctest::Approx(38.0));
  CHECK_THROWS_AS(centre.validate(120.0, 5.0), std::invalid_argument);
  ObstacleModel far = shaped;
  far.sample_points.push_back(Point2(9, 0));
  CHECK_THROWS_AS(far.validate(20.0, 5.0), std::invalid_argument);
  CHECK_NOTHROW(shaped.validate(20.0, 5.0));
}

TEST_CASE("gradient grid of an empty field is flat") {
  const EnvironmentField env = no_swarm({});
  const Bounds2 b{Point2(-60, -60), Point2(60, 60)};
  GradientGridOptions opt;
  opt.required_reach = 50.0;
  const GradientGrid g = build_gradient_grid(env, Point2(0, 0), b, 1.0, opt);
  for (std::size_t i = 0; i < g.binary.size(); ++i) {
    REQUIRE(g.binary[i] == 1.0);
    REQUIRE(g.edge[i] == 0.0);
    REQUIRE(g.grad_x[i] == 0.0);
    REQUIRE(g.grad_y[i] == 0.0);
  }
  CHECK_THROWS_AS(build_gradient_grid(env, Point2(20, 0), b, 1.0, opt), std::invalid_argument);
}

TEST_CASE("edge of the binary field sits on the contour through p0") {
  const EnvironmentField env = no_swarm({mass_point(Point2(0, 0))});
  const Bounds2 b{Point2(-70, -70), Point2(70, 70)};
  const Point2 p0(30, 0);
  const GradientGrid g = build_gradient_grid(env, p0, b, 1.0);

  for (double v : g.binary) REQUIRE((v == 1.0 || v == -1.0));
  for (double v : g.edge) REQUIRE(v <= 0.0);

  // The node at p0 has exactly the reference intensity and maps to +1.
  const int i0 = static_cast<int>(std::lround((p0.x() - g.spec.origin.x()) / g.spec.cell));
  const int j0 = static_cast<int>(std::lround((p0.y() - g.spec.origin.y()) / g.spec.cell));
  CHECK(g.binary[g.spec.index(i0, j0)] == 1.0);

  for (int k = 0; k < 16; ++k) {
    const double a = 2.0 * kPi * k / 16.0;
    double best_r = 0.0, best_e = 1.0;
    for (double r = 20.0; r <= 45.0; r += 0.05) {
      const double e = sample_external(g, Point2(r * std::cos(a), r * std::sin(a))).energy;
      if (e < best_e) best_e = e, best_r = r;
    }
    CHECK(std::abs(best_r - 30.0) <= 1.0);
  }

  SUBCASE("stored gradient is the central difference of E_s") {
    for (int j = 1; j < g.spec.ny - 1; j += 7)
      for (int i = 1; i < g.spec.nx - 1; i += 7) {
        const double gx = (g.edge[g.spec.index(i + 1, j)] - g.edge[g.spec.index(i - 1, j)]) / 2.0;
        const double gy = (g.edge[g.spec.index(i, j + 1)] - g.edge[g.spec.index(i, j - 1)]) / 2.0;
        REQUIRE(std::abs(g.grad_x[g.spec.index(i, j)] - gx) <= 1e-9);
        REQUIRE(std::abs(g.grad_y[g.spec.index(i, j)] - gy) <= 1e-9);
      }
  }

  SUBCASE("interpolated gradient is bilinear in the stored nodes") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int n = 0; n < 100; ++n) {
      const Point2 q(u(rng), u(rng));
      const int i = static_cast<int>(std::floor((q.x() - g.spec.origin.x()) / g.spec.cell));
      const int j = static_cast<int>(std::floor((q.y() - g.spec.origin.y()) / g.spec.cell));
      const double tx = (q.x() - g.spec.origin.x()) / g.spec.cell - i;
      const double ty = (q.y() - g.spec.origin.y()) / g.spec.cell - j;
      auto lerp2 = [&](const std::vector<double>& f) {
        return (1 - tx) * (1 - ty) * f[g.spec.index(i, j)] + tx * (1 - ty) * f[g.spec.index(i + 1, j)] +
               (1 - tx) * ty * f[g.spec.index(i, j + 1)] + tx * ty * f[g.spec.index(i + 1, j + 1)];
      };
      const auto s = sample_external(g, q);
      REQUIRE(s.gradient.x() == doctest::Approx(lerp2(g.grad_x)).epsilon(1e-9));
      REQUIRE(s.gradient.y() == doctest::Approx(lerp2(g.grad_y)).epsilon(1e-9));
      REQUIRE(s.energy == doctest::Approx(lerp2(g.edge)).epsilon(1e-9));
    }
    const Point2 node = g.spec.origin + Vec2(40 * g.spec.cell, 55 * g.spec.cell);
    CHECK(sample_external(g, node).gradient.x() == doctest::Approx(g.grad_x[g.spec.index(40, 55)]));
  }
}

TEST_CASE("bilinear lookup") {
  IntensitySamples s;
  s.spec = GridSpec{Point2(0, 0), 1.0, 3, 3};
  s.phi = {0, 0, 0, 0, 1, 0, 0, 0, 0};
  const GradientGrid g = binarize_and_smooth(s, 0.5, {0.0, 0.0});
  const auto at = sample_external(g, Point2(1, 1));
  CHECK(at.energy == g.edge[g.spec.index(1, 1)]);
  CHECK_FALSE(at.out_of_bounds);
  const auto mid = sample_external(g, Point2(0.5, 1));
  CHECK(mid.energy ==
        doctest::Approx(0.5 * (g.edge[g.spec.index(0, 1)] + g.edge[g.spec.index(1, 1)])));
  const auto out = sample_external(g, Point2(-3, 1));
  CHECK(out.out_of_bounds);
  CHECK(out.energy == g.edge[g.spec.index(0, 1)]);
}

TEST_CASE("layer CSV export") {
  GridSpec spec{Point2(-1, 2), 0.5, 2, 2};
  std::ostringstream os;
  write_layer_csv(os, spec, std::vector<double>{1, 2, 3, 4});
  CHECK(os.str() == "# origin=-1,2 cell=0.5\n1.000000,2.000000\n3.000000,4.000000\n");
}
