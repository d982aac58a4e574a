#include <doctest.h>

#include "uavswarm/predict.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <random>

using namespace uavswarm;

namespace {

Eigen::MatrixXd dense(const PentadiagonalMatrix& m) {
  const auto n = static_cast<Eigen::Index>(m.size());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = std::max<Eigen::Index>(0, i - 2); j < std::min(n, i + 3); ++j)
      d(i, j) = m.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  return d;
}

EnvironmentField one_obstacle(Point2 at) {
  EnvironmentField env;
  env.swarm = {Point2(1e6, 0), 10.0, 5.0};
  ObstacleModel o;
  o.center = at;
  o.influence_radius = 100.0;
  env.obstacles = {o};
  return env;
}

GradientGrid flat_grid() {
  EnvironmentField env;
  env.swarm = {Point2(1e6, 0), 10.0, 5.0};
  return build_gradient_grid(env, Point2(0, 0), {Point2(-130, -130), Point2(130, 130)}, 1.0);
}

double min_distance(const Trajectory& t, const Point2& p) {
  double d = 1e18;
  for (const auto& w : t.waypoints) d = std::min(d, (w - p).norm());
  return d;
}

}  // namespace

TEST_CASE("straight initial curve") {
  auto t = init_prediction(Point2(0, 0), Vec2(10, 0), 10, 10.0, 1.0);
  REQUIRE(t.size() == 101);
  CHECK(t[100].x() == doctest::Approx(100.0));
  CHECK(t[37] == Point2(37, 0));
  t = init_prediction(Point2(0, 0), Vec2(0, 10), 10, 10.0, 1.0);
  CHECK(t[100].y() == doctest::Approx(100.0));
  CHECK(std::abs(t[100].x()) < 1e-12);
  CHECK(init_prediction(Point2(0, 0), Vec2(1, 1), 1, 10.0, 1.0).size() == 11);
  CHECK_THROWS_AS(init_prediction(Point2(0, 0), Vec2(0, 0), 10, 10.0, 1.0), std::invalid_argument);
}

TEST_CASE("EL system matrix") {
  const auto id = build_el_system(11, 0.0);
  for (std::size_t i = 0; i < 11; ++i)
    for (std::size_t j = 0; j < 11; ++j) CHECK(id.matrix.at(i, j) == (i == j ? 1.0 : 0.0));
  CHECK_THROWS_AS(build_el_system(4, 0.5), std::invalid_argument);

  const auto s = build_el_system(21, 0.3);
  const auto& row = s.matrix.row(10);
  CHECK(row[0] == doctest::Approx(0.3));
  CHECK(row[1] == doctest::Approx(-1.2));
  CHECK(row[2] == doctest::Approx(1.0 + 6 * 0.3));
  CHECK(row[3] == doctest::Approx(-1.2));
  CHECK(row[4] == doctest::Approx(0.3));

  for (std::size_t l : {11u, 51u, 101u})
    for (double lam : {0.1, 0.5, 0.9}) {
      const auto sys = build_el_system(l, lam);
      const Eigen::MatrixXd m = dense(sys.matrix);
      for (std::size_t i = 0; i < l; ++i) REQUIRE(std::abs(sys.matrix.row_sum(i) - 1.0) <= 1e-9);
      Eigen::MatrixXd inv(l, l);
      for (std::size_t c = 0; c < l; ++c) {
        std::vector<double> e(l, 0.0);
        e[c] = 1.0;
        const auto col = sys.solver.solve(e);
        for (std::size_t r = 0; r < l; ++r) inv(r, c) = col[r];
      }
      CHECK((m * inv - Eigen::MatrixXd::Identity(l, l)).cwiseAbs().maxCoeff() <= 1e-9);
      const std::vector<double> ones(l, 2.5);
      for (double v : sys.matrix.multiply(ones)) REQUIRE(std::abs(v - 2.5) <= 1e-12);
    }
}

TEST_CASE("banded solve agrees with a dense solve") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  PentadiagonalMatrix m(30);
  for (std::size_t i = 0; i < 30; ++i)
    for (std::size_t j = i >= 2 ? i - 2 : 0; j < std::min<std::size_t>(30, i + 3); ++j)
      m.set(i, j, i == j ? 6.0 + u(rng) : u(rng));
  std::vector<double> b(30);
  for (auto& v : b) v = u(rng);
  const auto x = PentadiagonalLU(m).solve(b);
  const Eigen::VectorXd ref = dense(m).partialPivLu().solve(Eigen::Map<Eigen::VectorXd>(b.data(), 30));
  for (std::size_t i = 0; i < 30; ++i) CHECK(x[i] == doctest::Approx(ref(static_cast<long>(i))));
  CHECK_THROWS_AS(m.set(0, 4, 1.0), std::out_of_range);
}

TEST_CASE("prediction without external force") {
  const GradientGrid g = flat_grid();
  const auto sys = build_el_system(101, 0.5);
  const Trajectory init = init_prediction(Point2(-20, 10), unit_from_heading(0.4), 10, 10.0, 1.0);
  const Prediction p = predict_trajectory(init, sys, g);
  CHECK(p.converged);
  CHECK_FALSE(p.failed);
  for (std::size_t i = 0; i < init.size(); ++i) REQUIRE((p.trajectory[i] - init[i]).norm() <= 1e-9);

  SUBCASE("a bent curve straightens") {
    // Short curve: the slowest bending mode decays quickly.
    const auto short_sys = build_el_system(11, 0.5);
    Trajectory bent = init_prediction(Point2(0, 0), Vec2(1, 0), 1, 10.0, 1.0);
    for (std::size_t i = 0; i < bent.size(); ++i)
      bent.waypoints[i] = Point2(double(i), 0.02 * double(i * i));
    bent.waypoints = resample_uniform(bent.waypoints, bent.size(), 1.0);
    PredictOptions o;
    o.tolerance = 1e-9;
    o.max_iter = 20000;
    o.record_costs = true;
    const Prediction q = predict_trajectory(bent, short_sys, g, o);
    CHECK(q.trajectory[0] == bent[0]);
    CHECK(f_eng(bent) > 1e-3);
    CHECK(f_eng(q.trajectory) < 1e-6);
    for (std::size_t i = 1; i < q.cost_history.size(); ++i)
      REQUIRE(q.cost_history[i] <= q.cost_history[i - 1] + 1e-6);
  }
}

TEST_CASE("prediction is pulled to the contour") {
  const Point2 obs(50, 0);
  const Point2 p0(50, -30);  // on the radius-30 contour
  const auto env = one_obstacle(obs);
  const GradientGrid g = build_gradient_grid(env, p0, {Point2(-80, -150), Point2(180, 150)}, 1.0,
                                             {2.0, 110.0});
  const auto sys = build_el_system(101, 0.5);
  PredictOptions o;
  o.record_costs = true;
  // Straight ahead cuts into the protection bubble.
  const Trajectory init = init_prediction(p0, unit_from_heading(0.5), 10, 10.0, 1.0);
  const Prediction p = predict_trajectory(init, sys, g, o);
  CHECK_FALSE(p.failed);
  CHECK(min_distance(p.trajectory, obs) > min_distance(init, obs));
  for (std::size_t i = 1; i < p.cost_history.size(); ++i)
    REQUIRE(p.cost_history[i] <= p.cost_history[i - 1] + 1e-6);
  p.trajectory.validate_spacing(1e-6);

  SUBCASE("translation equivariance") {
    const Vec2 shift(17.0, -23.0);
    auto moved = env;
    moved.obstacles[0].center += shift;
    const Bounds2 b{Point2(-80, -150) + shift, Point2(180, 150) + shift};
    const GradientGrid g2 = build_gradient_grid(moved, p0 + shift, b, 1.0, {2.0, 110.0});
    Trajectory init2 = init;
    for (auto& w : init2.waypoints) w += shift;
    const Prediction p2 = predict_trajectory(init2, sys, g2, o);
    for (std::size_t i = 0; i < init.size(); ++i)
      REQUIRE((p2.trajectory[i] - (p.trajectory[i] + shift)).norm() <= 1e-6);
  }

  SUBCASE("runtime") {
    EnvironmentField wide = env;
    const GradientGrid big = build_gradient_grid(wide, p0, {Point2(-100, -180), Point2(200, 120)}, 1.0);
    const auto t0 = std::chrono::steady_clock::now();
    const Prediction r = predict_trajectory(init, sys, big);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    CHECK(ms < 50.0);
    CHECK(r.trajectory.size() == 101);
  }
}

TEST_CASE("conflict detection") {
  const auto a = init_prediction(Point2(0, 0), Vec2(1, 0), 1, 10.0, 1.0);
  const auto b = init_prediction(Point2(0, 10), Vec2(1, 0), 1, 10.0, 1.0);
  std::vector<Trajectory> same{a, a};
  auto c = detect_conflicts(same, 5.0);
  REQUIRE(c.pairs.size() == 1);
  CHECK(c.pairs[0].distance == 0.0);
  CHECK(c.pairs[0].conflict);
  CHECK(c.involved == std::vector<std::size_t>{0, 1});

  std::vector<Trajectory> par{a, b};
  c = detect_conflicts(par, 5.0);
  CHECK(c.pairs[0].distance == doctest::Approx(10.0));
  CHECK(c.empty());

  // Passing head-on 2 m apart: closest same-index approach 2 m at l = 10.
  Trajectory x, y;
  x.spacing = y.spacing = 1.0;
  for (int l = 0; l <= 20; ++l) {
    x.waypoints.push_back(Point2(l - 10.0, 0.0));
    y.waypoints.push_back(Point2(10.0 - l, 2.0));
  }
  std::size_t best = 0;
  for (std::size_t l = 1; l <= 20; ++l)
    if ((x[l] - y[l]).norm() < (x[best] - y[best]).norm()) best = l;
  std::vector<Trajectory> cross{x, y};
  c = detect_conflicts(cross, 5.0);
  CHECK(best == 10);
  CHECK(c.pairs[0].index == best);
  CHECK(c.pairs[0].distance == doctest::Approx(2.0));
  CHECK(c.pairs[0].distance == doctest::Approx((x[best] - y[best]).norm()));
  CHECK(c.pairs[0].conflict);
  std::vector<Trajectory> swapped{y, x};
  CHECK(detect_conflicts(swapped, 5.0).pairs[0].distance == c.pairs[0].distance);

  std::vector<Trajectory> uneven{a, init_prediction(Point2(0, 0), Vec2(1, 0), 2, 10.0, 1.0)};
  CHECK_THROWS_AS(detect_conflicts(uneven, 5.0), std::invalid_argument);

  const std::vector<double> alt{100.0, 104.0};
  std::vector<Trajectory> close{a, init_prediction(Point2(0, 3), Vec2(1, 0), 1, 10.0, 1.0)};
  CHECK(detect_conflicts(close, 5.0).pairs[0].conflict);
  CHECK_FALSE(detect_conflicts(close, 5.0, alt).pairs[0].conflict);
}

TEST_CASE("resampling keeps the chord length") {
  std::vector<Point2> poly;
  for (int i = 0; i <= 40; ++i) poly.emplace_back(30.0 * std::cos(0.05 * i), 30.0 * std::sin(0.05 * i));
  const auto r = resample_uniform(poly, 80, 0.7);
  REQUIRE(r.size() == 80);
  CHECK(r.front() == poly.front());
  for (std::size_t i = 1; i < r.size(); ++i) REQUIRE((r[i] - r[i - 1]).norm() == doctest::Approx(0.7).epsilon(1e-12));
  // Points that fit on the polyline stay on it (radius 30 up to chord sag).
  for (std::size_t i = 0; i < 40; ++i) CHECK(r[i].norm() <= 30.0 + 1e-9);
  CHECK_THROWS_AS(resample_uniform(std::vector<Point2>{Point2(0, 0)}, 3, 1.0), std::invalid_argument);
}
