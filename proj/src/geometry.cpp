#include "lro/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lro {

namespace {

void check_diagram(const std::vector<Point>& pts) {
  if (pts.size() < 2) {
    throw std::invalid_argument("diagram needs at least 2 points");
  }
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    if (!(pts[i].x < pts[i + 1].x)) {
      throw std::invalid_argument("diagram x coordinates must be strictly increasing");
    }
  }
  for (const Point& p : pts) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) {
      throw std::invalid_argument("diagram coordinates must be finite");
    }
  }
}

// Lower (convex) or upper (concave) monotone-chain scan. Slope comparisons
// use the cross-product form so no divisions are performed; the middle point
// is popped on ties, keeping collinear points off the vertex list.
template <bool Convex>
std::vector<Point> chain(const std::vector<Point>& pts) {
  std::vector<Point> hull;
  hull.reserve(pts.size());
  for (const Point& q : pts) {
    while (hull.size() >= 2) {
      const Point& a = hull[hull.size() - 2];
      const Point& b = hull.back();
      const double lhs = (b.y - a.y) * (q.x - b.x);
      const double rhs = (q.y - b.y) * (b.x - a.x);
      const bool pop = Convex ? (lhs >= rhs) : (lhs <= rhs);
      if (pop) {
        hull.pop_back();
      } else {
        break;
      }
    }
    hull.push_back(q);
  }
  return hull;
}

}  // namespace

PointSet::PointSet(std::vector<Point> points) : points_(std::move(points)) {
  check_diagram(points_);
}

PiecewiseLinearFn::PiecewiseLinearFn(std::vector<Point> vertices)
    : vertices_(std::move(vertices)) {
  check_diagram(vertices_);
}

double PiecewiseLinearFn::operator()(double x) const {
  if (x < domain_lo() || x > domain_hi()) {
    throw std::domain_error("evaluation outside the function domain");
  }
  auto it = std::lower_bound(vertices_.begin(), vertices_.end(), x,
                             [](const Point& p, double v) { return p.x < v; });
  if (it->x == x) {
    return it->y;
  }
  const Point& hi = *it;
  const Point& lo = *(it - 1);
  const double t = (x - lo.x) / (hi.x - lo.x);
  return lo.y + t * (hi.y - lo.y);
}

PiecewiseLinearFn gcm(const PointSet& diagram) {
  return PiecewiseLinearFn(chain<true>(diagram.points()));
}

PiecewiseLinearFn lcm(const PointSet& diagram) {
  return PiecewiseLinearFn(chain<false>(diagram.points()));
}

double left_derivative(const PiecewiseLinearFn& f, double x) {
  const auto& v = f.vertices();
  if (!(x > f.domain_lo()) || x > f.domain_hi()) {
    throw std::domain_error("left derivative defined on (x_first, x_last] only");
  }
  auto it = std::lower_bound(v.begin(), v.end(), x,
                             [](const Point& p, double q) { return p.x < q; });
  const Point& hi = *it;
  const Point& lo = *(it - 1);
  return (hi.y - lo.y) / (hi.x - lo.x);
}

}  // namespace lro
