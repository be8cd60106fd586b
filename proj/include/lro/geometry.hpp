#pragma once

#include <cstddef>
#include <vector>

namespace lro {

struct Point {
  double x;
  double y;
};

// Finite planar diagram with strictly increasing x coordinates.
class PointSet {
 public:
  explicit PointSet(std::vector<Point> points);

  const std::vector<Point>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }

 private:
  std::vector<Point> points_;
};

// Piecewise-linear function through an ordered vertex list.
// Domain is [vertices.front().x, vertices.back().x]; the function passes
// through its vertices exactly and interpolates linearly in between.
class PiecewiseLinearFn {
 public:
  explicit PiecewiseLinearFn(std::vector<Point> vertices);

  const std::vector<Point>& vertices() const { return vertices_; }
  double domain_lo() const { return vertices_.front().x; }
  double domain_hi() const { return vertices_.back().x; }

  // Evaluation; throws std::domain_error outside [domain_lo, domain_hi].
  double operator()(double x) const;

 private:
  std::vector<Point> vertices_;
};

// Greatest convex minorant of the diagram over [x_first, x_last].
// Vertices are a subset of the input points; collinear interior points are
// dropped so the vertex list is minimal.
PiecewiseLinearFn gcm(const PointSet& diagram);

// Least concave majorant, the mirror of gcm.
PiecewiseLinearFn lcm(const PointSet& diagram);

// Slope of the segment immediately left of x; at a vertex, the incoming
// segment's slope. Requires domain_lo < x <= domain_hi.
double left_derivative(const PiecewiseLinearFn& f, double x);

}  // namespace lro
