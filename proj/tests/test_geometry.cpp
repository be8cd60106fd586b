#include "lro/geometry.hpp"

#include <cmath>
#include <stdexcept>

#include <doctest.h>

#include "lro/rng.hpp"
#include "oracles.hpp"

using lro::PiecewiseLinearFn;
using lro::Point;
using lro::PointSet;

namespace {

PointSet diagram(std::initializer_list<Point> pts) {
  return PointSet(std::vector<Point>(pts));
}

}  // namespace

TEST_CASE("gcm of the worked diagram") {
  const PointSet d =
      diagram({{0, 0}, {0.3, 0.25}, {0.4, 0.25}, {0.9, 1.0}, {1.0, 1.0}});
  const PiecewiseLinearFn hull = lro::gcm(d);
  CHECK(std::fabs(hull(0.0)) < 1e-12);
  CHECK(std::fabs(hull(0.3) - 3.0 / 16.0) < 1e-12);
  CHECK(std::fabs(hull(0.4) - 0.25) < 1e-12);
  CHECK(std::fabs(hull(0.9) - 7.0 / 8.0) < 1e-12);
  CHECK(std::fabs(hull(1.0) - 1.0) < 1e-12);
  // collinear-free minimal vertex list
  CHECK(hull.vertices().size() == 3);
}

TEST_CASE("gcm of an already convex diagram is the identity") {
  const PointSet d = diagram({{0, 0}, {1, 0}, {2, 1}});
  const PiecewiseLinearFn hull = lro::gcm(d);
  REQUIRE(hull.vertices().size() == 3);
  for (const Point& p : d.points()) {
    CHECK(hull(p.x) == p.y);
  }
}

TEST_CASE("lcm of the worked diagram") {
  const PointSet d = diagram(
      {{0, 0}, {0.3, 1.0 / 3.0}, {0.4, 0.5}, {0.9, 5.0 / 6.0}, {1.0, 1.0}});
  const PiecewiseLinearFn hull = lro::lcm(d);
  CHECK(std::fabs(hull(0.3) - 3.0 / 8.0) < 1e-12);
  CHECK(std::fabs(hull(0.4) - 0.5) < 1e-12);
  CHECK(std::fabs(hull(0.9) - 11.0 / 12.0) < 1e-12);
  CHECK(std::fabs(hull(1.0) - 1.0) < 1e-12);
}

TEST_CASE("hulls match the brute-force supporting-line oracle") {
  lro::CounterRng rng(42);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + rng.next_below(29);
    const auto pts = oracles::random_diagram(rng, n);
    const PointSet d(pts);
    const PiecewiseLinearFn lower = lro::gcm(d);
    const PiecewiseLinearFn upper = lro::lcm(d);
    for (const Point& p : pts) {
      CHECK(std::fabs(lower(p.x) - oracles::gcm_bruteforce(pts, p.x)) < 1e-8);
      CHECK(std::fabs(upper(p.x) - oracles::lcm_bruteforce(pts, p.x)) < 1e-8);
      // minorant / majorant property at the input points
      CHECK(lower(p.x) <= p.y + 1e-12);
      CHECK(upper(p.x) >= p.y - 1e-12);
    }
    // endpoints touch
    CHECK(lower(pts.front().x) == pts.front().y);
    CHECK(lower(pts.back().x) == pts.back().y);
    CHECK(upper(pts.front().x) == pts.front().y);
    CHECK(upper(pts.back().x) == pts.back().y);
    // convexity / concavity of the vertex slopes
    const auto& v = lower.vertices();
    for (std::size_t i = 2; i < v.size(); ++i) {
      const double s1 = (v[i - 1].y - v[i - 2].y) / (v[i - 1].x - v[i - 2].x);
      const double s2 = (v[i].y - v[i - 1].y) / (v[i].x - v[i - 1].x);
      CHECK(s2 >= s1 - 1e-12);
    }
    const auto& u = upper.vertices();
    for (std::size_t i = 2; i < u.size(); ++i) {
      const double s1 = (u[i - 1].y - u[i - 2].y) / (u[i - 1].x - u[i - 2].x);
      const double s2 = (u[i].y - u[i - 1].y) / (u[i].x - u[i - 1].x);
      CHECK(s2 <= s1 + 1e-12);
    }
  }
}

TEST_CASE("lcm is the reflection of gcm") {
  lro::CounterRng rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = oracles::random_diagram(rng, 3 + rng.next_below(20));
    std::vector<Point> reflected(pts);
    for (Point& p : reflected) p.y = -p.y;
    const PiecewiseLinearFn upper = lro::lcm(PointSet(pts));
    const PiecewiseLinearFn lower = lro::gcm(PointSet(reflected));
    for (const Point& p : pts) {
      CHECK(std::fabs(upper(p.x) + lower(p.x)) < 1e-12);
    }
  }
}

TEST_CASE("gcm is idempotent on its own vertices") {
  lro::CounterRng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const auto pts = oracles::random_diagram(rng, 3 + rng.next_below(25));
    const PiecewiseLinearFn hull = lro::gcm(PointSet(pts));
    const PiecewiseLinearFn again = lro::gcm(PointSet(hull.vertices()));
    REQUIRE(again.vertices().size() == hull.vertices().size());
    for (std::size_t i = 0; i < hull.vertices().size(); ++i) {
      CHECK(again.vertices()[i].x == hull.vertices()[i].x);
      CHECK(again.vertices()[i].y == hull.vertices()[i].y);
    }
  }
}

TEST_CASE("left derivative of the worked hull") {
  const PiecewiseLinearFn f(
      std::vector<Point>{{0, 0}, {0.5, 0.25}, {1.0, 1.0}});
  CHECK(lro::left_derivative(f, 0.4) == doctest::Approx(0.5));
  CHECK(lro::left_derivative(f, 0.5) == doctest::Approx(0.5));
  CHECK(lro::left_derivative(f, 0.75) == doctest::Approx(1.5));
  CHECK(lro::left_derivative(f, 1.0) == doctest::Approx(1.5));
}

TEST_CASE("left derivative of an affine function is its slope") {
  const PiecewiseLinearFn f(std::vector<Point>{{-1, 2}, {3, 2 + 4 * 0.75}});
  for (double x : {-0.99, 0.0, 1.5, 3.0}) {
    CHECK(lro::left_derivative(f, x) == doctest::Approx(0.75));
  }
}

TEST_CASE("left derivative is non-decreasing on random convex hulls") {
  lro::CounterRng rng(13);
  for (int trial = 0; trial < 100; ++trial) {
    const auto pts = oracles::random_diagram(rng, 4 + rng.next_below(20));
    const PiecewiseLinearFn hull = lro::gcm(PointSet(pts));
    double prev = -std::numeric_limits<double>::infinity();
    const double lo = hull.domain_lo(), hi = hull.domain_hi();
    for (int i = 1; i <= 40; ++i) {
      const double x = std::min(lo + (hi - lo) * i / 40.0, hi);
      const double s = lro::left_derivative(hull, x);
      CHECK(s >= prev - 1e-12);
      prev = s;
    }
  }
}

TEST_CASE("domain and input validation") {
  CHECK_THROWS_AS(PointSet(std::vector<Point>{{0, 0}}), std::invalid_argument);
  CHECK_THROWS_AS(PointSet(std::vector<Point>{{0, 0}, {0, 1}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(PointSet(std::vector<Point>{{1, 0}, {0, 1}}),
                  std::invalid_argument);
  const PiecewiseLinearFn f(std::vector<Point>{{0, 0}, {1, 1}});
  CHECK_THROWS_AS(lro::left_derivative(f, 0.0), std::domain_error);
  CHECK_THROWS_AS(lro::left_derivative(f, -0.5), std::domain_error);
  CHECK_THROWS_AS(lro::left_derivative(f, 1.5), std::domain_error);
  CHECK_THROWS_AS(f(1.0001), std::domain_error);
}
