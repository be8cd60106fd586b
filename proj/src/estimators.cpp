#include "lro/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "lro/errors.hpp"

namespace lro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Grouped {
  std::vector<double> values;       // distinct, sorted
  std::vector<std::int64_t> counts;
};

Grouped group(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  Grouped g;
  for (double x : v) {
    if (!g.values.empty() && g.values.back() == x) {
      ++g.counts.back();
    } else {
      g.values.push_back(x);
      g.counts.push_back(1);
    }
  }
  return g;
}

void check_finite(const std::vector<double>& v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) {
      throw std::invalid_argument(std::string(what) + " contains a non-finite value");
    }
  }
}

}  // namespace

void validate_two_sample(const TwoSample& ts) {
  if (ts.x.empty() || ts.y.empty()) {
    throw std::invalid_argument("both samples must be non-empty");
  }
  check_finite(ts.x, "x sample");
  check_finite(ts.y, "y sample");
  const double x_min = *std::min_element(ts.x.begin(), ts.x.end());
  const double y_max = *std::max_element(ts.y.begin(), ts.y.end());
  if (y_max <= x_min) {
    throw degenerate_order_error(
        "degenerate order: largest y value lies at or below smallest x value");
  }
}

StepDistribution::StepDistribution(std::vector<double> knots,
                                   std::vector<double> cdf_values)
    : knots_(std::move(knots)), cdf_(std::move(cdf_values)) {
  if (knots_.empty() || knots_.size() != cdf_.size()) {
    throw std::invalid_argument("knots/values size mismatch or empty");
  }
  double prev_knot = -kInf;
  double prev_cdf = 0.0;
  for (std::size_t i = 0; i < knots_.size(); ++i) {
    if (!std::isfinite(knots_[i]) || knots_[i] <= prev_knot) {
      throw std::invalid_argument("knots must be finite and strictly increasing");
    }
    if (cdf_[i] < prev_cdf - 1e-12 || cdf_[i] > 1.0 + 1e-9) {
      throw std::invalid_argument("cdf values must be non-decreasing and within [0,1]");
    }
    prev_knot = knots_[i];
    prev_cdf = cdf_[i];
  }
  if (std::fabs(cdf_.back() - 1.0) > 1e-9) {
    throw std::invalid_argument("final cdf value must equal 1");
  }
}

StepDistribution StepDistribution::from_masses(std::vector<double> knots,
                                               const std::vector<double>& masses) {
  std::vector<double> cdf(masses.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (masses[i] < -1e-12) {
      throw std::invalid_argument("negative mass");
    }
    acc += masses[i];
    cdf[i] = acc;
  }
  return StepDistribution(std::move(knots), std::move(cdf));
}

std::vector<double> StepDistribution::masses() const {
  std::vector<double> m(cdf_.size());
  double prev = 0.0;
  for (std::size_t i = 0; i < cdf_.size(); ++i) {
    m[i] = cdf_[i] - prev;
    prev = cdf_[i];
  }
  return m;
}

double StepDistribution::cdf(double z) const {
  auto it = std::upper_bound(knots_.begin(), knots_.end(), z);
  if (it == knots_.begin()) return 0.0;
  return cdf_[static_cast<std::size_t>(it - knots_.begin()) - 1];
}

double StepDistribution::mass_at(double z) const {
  auto it = std::lower_bound(knots_.begin(), knots_.end(), z);
  if (it == knots_.end() || *it != z) return 0.0;
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin());
  return i == 0 ? cdf_[0] : cdf_[i] - cdf_[i - 1];
}

MonotoneStepFn::MonotoneStepFn(std::vector<double> breakpoints,
                               std::vector<double> levels)
    : breakpoints_(std::move(breakpoints)), levels_(std::move(levels)) {
  if (levels_.empty() || breakpoints_.size() + 1 != levels_.size()) {
    throw std::invalid_argument("need one more level than breakpoints");
  }
  for (std::size_t i = 0; i + 1 < breakpoints_.size(); ++i) {
    if (!(breakpoints_[i] < breakpoints_[i + 1])) {
      throw std::invalid_argument("breakpoints must be strictly increasing");
    }
  }
  for (std::size_t i = 0; i < levels_.size(); ++i) {
    if (std::isnan(levels_[i]) || levels_[i] < 0.0) {
      throw std::invalid_argument("levels must be non-negative");
    }
    if (i > 0 && levels_[i] < levels_[i - 1]) {
      throw std::invalid_argument("levels must be non-decreasing");
    }
  }
}

double MonotoneStepFn::operator()(double z) const {
  auto it = std::lower_bound(breakpoints_.begin(), breakpoints_.end(), z);
  return levels_[static_cast<std::size_t>(it - breakpoints_.begin())];
}

double LroFit::mu_at(double z) const {
  auto it = std::lower_bound(pooled_z.begin(), pooled_z.end(), z);
  if (it == pooled_z.end()) return mu_star.fitted.back();
  return mu_star.fitted[static_cast<std::size_t>(it - pooled_z.begin())];
}

StepDistribution ecdf(const std::vector<double>& sample) {
  if (sample.empty()) {
    throw std::invalid_argument("empty sample");
  }
  check_finite(sample, "sample");
  Grouped g = group(sample);
  const double n = static_cast<double>(sample.size());
  std::vector<double> cdf(g.values.size());
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < g.values.size(); ++i) {
    acc += g.counts[i];
    cdf[i] = static_cast<double>(acc) / n;
  }
  return StepDistribution(std::move(g.values), std::move(cdf));
}

PooledSample pool(const TwoSample& ts) {
  validate_two_sample(ts);
  Grouped gx = group(ts.x);
  Grouped gy = group(ts.y);
  PooledSample p;
  p.n1 = static_cast<std::int64_t>(ts.x.size());
  p.n2 = static_cast<std::int64_t>(ts.y.size());
  std::size_t i = 0, j = 0;
  while (i < gx.values.size() || j < gy.values.size()) {
    const bool take_x = j == gy.values.size() ||
                        (i < gx.values.size() && gx.values[i] <= gy.values[j]);
    const bool take_y = i == gx.values.size() ||
                        (j < gy.values.size() && gy.values[j] <= gx.values[i]);
    double z;
    std::int64_t d = 0, s = 0;
    if (take_x) {
      z = gx.values[i];
      d = gx.counts[i];
      ++i;
    }
    if (take_y) {
      z = gy.values[j];
      s = gy.counts[j];
      ++j;
    }
    p.z.push_back(z);
    p.d_count.push_back(d);
    p.total_count.push_back(d + s);
  }
  return p;
}

double odds(double u) {
  if (u >= 1.0) return kInf;
  return u / (1.0 - u);
}

namespace {

// Shared precomputation at the distinct y values.
struct YGrid {
  Grouped gx, gy;
  std::vector<std::int64_t> cum_x_at_y;  // #x <= y_k
  std::vector<std::int64_t> cum_y_at_y;  // #y <= y_k
  std::vector<double> h, f_n, g_n;       // pooled, x and y ecdfs at y_k
};

YGrid y_grid(const TwoSample& ts) {
  YGrid g;
  g.gx = group(ts.x);
  g.gy = group(ts.y);
  const double n1 = static_cast<double>(ts.x.size());
  const double n2 = static_cast<double>(ts.y.size());
  const double n = n1 + n2;
  const std::size_t m2 = g.gy.values.size();
  g.cum_x_at_y.resize(m2);
  g.cum_y_at_y.resize(m2);
  g.h.resize(m2);
  g.f_n.resize(m2);
  g.g_n.resize(m2);
  std::size_t i = 0;
  std::int64_t cx = 0, cy = 0;
  for (std::size_t k = 0; k < m2; ++k) {
    const double yk = g.gy.values[k];
    while (i < g.gx.values.size() && g.gx.values[i] <= yk) {
      cx += g.gx.counts[i];
      ++i;
    }
    cy += g.gy.counts[k];
    g.cum_x_at_y[k] = cx;
    g.cum_y_at_y[k] = cy;
    g.f_n[k] = static_cast<double>(cx) / n1;
    g.g_n[k] = static_cast<double>(cy) / n2;
    g.h[k] = static_cast<double>(cx + cy) / n;
  }
  return g;
}

std::vector<double> hull_values_at(const PiecewiseLinearFn& hull,
                                   const std::vector<double>& xs) {
  std::vector<double> out(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) out[i] = hull(xs[i]);
  return out;
}

// Left derivative of the GCM of the ordinal dominance diagram at the
// distinct y values, given the ecdf arrays of y_grid.
std::vector<double> odc_slopes(const YGrid& grid) {
  std::vector<Point> pts;
  pts.reserve(grid.g_n.size() + 1);
  pts.push_back({0.0, 0.0});
  for (std::size_t k = 0; k < grid.g_n.size(); ++k) {
    pts.push_back({grid.g_n[k], grid.f_n[k]});
  }
  const PiecewiseLinearFn hull = gcm(PointSet(std::move(pts)));
  std::vector<double> slopes(grid.g_n.size());
  for (std::size_t k = 0; k < grid.g_n.size(); ++k) {
    slopes[k] = left_derivative(hull, grid.g_n[k]);
  }
  return slopes;
}

MonotoneStepFn step_fn_from_knot_levels(const std::vector<double>& knots,
                                        const std::vector<double>& levels) {
  std::vector<double> bps;
  std::vector<double> lvl;
  for (std::size_t k = 0; k < knots.size(); ++k) {
    if (lvl.empty() || levels[k] != lvl.back()) {
      lvl.push_back(levels[k]);
      if (k > 0) bps.push_back(knots[k - 1]);
    }
  }
  return MonotoneStepFn(std::move(bps), std::move(lvl));
}

}  // namespace

LroFit fit_lro(const TwoSample& ts) {
  validate_two_sample(ts);
  const YGrid grid = y_grid(ts);
  const std::int64_t n1 = static_cast<std::int64_t>(ts.x.size());
  const std::int64_t n2 = static_cast<std::int64_t>(ts.y.size());
  const std::size_t m2 = grid.gy.values.size();
  const double pi_n = static_cast<double>(n1) / static_cast<double>(n1 + n2);

  // Hulls of the pooled-vs-F and pooled-vs-G diagrams, origin prepended.
  std::vector<Point> df, dg;
  df.reserve(m2 + 1);
  dg.reserve(m2 + 1);
  df.push_back({0.0, 0.0});
  dg.push_back({0.0, 0.0});
  for (std::size_t k = 0; k < m2; ++k) {
    df.push_back({grid.h[k], grid.f_n[k]});
    dg.push_back({grid.h[k], grid.g_n[k]});
  }
  const std::vector<double> a = hull_values_at(gcm(PointSet(std::move(df))), grid.h);
  const std::vector<double> b = hull_values_at(lcm(PointSet(std::move(dg))), grid.h);

  StepDistribution g_star(grid.gy.values, b);

  // F* masses: within each interval (y_{j-1}, y_j], split the hull increment
  // across the x values there in proportion to their empirical masses; an
  // x-free interval carries its mass at y_j. Mass above the last y value is
  // split the same way.
  std::map<double, double> mass;
  std::size_t xi = 0;
  double prev_a = 0.0;
  for (std::size_t j = 0; j < m2; ++j) {
    const double yj = grid.gy.values[j];
    double increment = a[j] - prev_a;
    prev_a = a[j];
    if (increment < 0.0) {
      if (increment < -1e-9) throw std::logic_error("non-monotone convex minorant");
      increment = 0.0;
    }
    const std::size_t xi_begin = xi;
    std::int64_t in_interval = 0;
    while (xi < grid.gx.values.size() && grid.gx.values[xi] <= yj) {
      in_interval += grid.gx.counts[xi];
      ++xi;
    }
    if (in_interval > 0) {
      for (std::size_t i = xi_begin; i < xi; ++i) {
        mass[grid.gx.values[i]] += increment * static_cast<double>(grid.gx.counts[i]) /
                                   static_cast<double>(in_interval);
      }
    } else if (increment > 0.0) {
      mass[yj] += increment;
    }
  }
  std::int64_t tail_count = 0;
  for (std::size_t i = xi; i < grid.gx.values.size(); ++i) {
    tail_count += grid.gx.counts[i];
  }
  if (tail_count > 0) {
    const double tail_mass = 1.0 - a[m2 - 1];
    for (std::size_t i = xi; i < grid.gx.values.size(); ++i) {
      mass[grid.gx.values[i]] += tail_mass * static_cast<double>(grid.gx.counts[i]) /
                                 static_cast<double>(tail_count);
    }
  }
  std::vector<double> f_knots, f_masses;
  f_knots.reserve(mass.size());
  f_masses.reserve(mass.size());
  for (const auto& [z, m] : mass) {
    if (m > 0.0) {
      f_knots.push_back(z);
      f_masses.push_back(m);
    }
  }
  StepDistribution f_star = StepDistribution::from_masses(std::move(f_knots), f_masses);

  // theta* on the pooled sample through the isotonic route.
  PooledSample pooled = pool(ts);
  WeightedSeries series;
  series.values.resize(pooled.z.size());
  series.weights.resize(pooled.z.size());
  for (std::size_t k = 0; k < pooled.z.size(); ++k) {
    series.weights[k] = static_cast<double>(pooled.total_count[k]);
    series.values[k] = static_cast<double>(pooled.d_count[k]) / series.weights[k];
  }
  IsotonicFit mu = pava(series);

  const double odds_pi = odds(pi_n);
  std::vector<double> theta_levels(pooled.z.size());
  for (std::size_t k = 0; k < pooled.z.size(); ++k) {
    theta_levels[k] = odds(mu.fitted[k]) / odds_pi;
  }
  MonotoneStepFn theta = step_fn_from_knot_levels(pooled.z, theta_levels);

  // Route agreement at the distinct y values (tolerance scaled by slope size).
  const std::vector<double> slopes = odc_slopes(grid);
  for (std::size_t k = 0; k < m2; ++k) {
    const double tol = 1e-9 * std::max(1.0, std::fabs(slopes[k]));
    if (std::fabs(slopes[k] - theta(grid.gy.values[k])) > tol) {
      throw std::logic_error("isotonic and ordinal-dominance routes disagree");
    }
  }

  LroFit fit{std::move(f_star), std::move(g_star), std::move(theta),
             pi_n,              std::move(mu),     std::move(pooled.z),
             n1,                n2};
  return fit;
}

double log_likelihood(const TwoSample& ts, const StepDistribution& F,
                      const StepDistribution& G) {
  double ll = 0.0;
  for (double xi : ts.x) {
    const double m = F.mass_at(xi);
    if (m <= 0.0) return -kInf;
    ll += std::log(m);
  }
  for (double yj : ts.y) {
    const double m = G.mass_at(yj);
    if (m <= 0.0) return -kInf;
    ll += std::log(m);
  }
  return ll;
}

MonotoneStepFn theta_via_odc(const TwoSample& ts) {
  validate_two_sample(ts);
  const YGrid grid = y_grid(ts);
  return step_fn_from_knot_levels(grid.gy.values, odc_slopes(grid));
}

OdcDiagram odc_diagram(const TwoSample& ts) {
  validate_two_sample(ts);
  const YGrid grid = y_grid(ts);
  OdcDiagram d;
  d.points.push_back({0.0, 0.0});
  for (std::size_t k = 0; k < grid.g_n.size(); ++k) {
    d.points.push_back({grid.g_n[k], grid.f_n[k]});
  }
  d.gcm_vertices = gcm(PointSet(d.points)).vertices();
  return d;
}

}  // namespace lro
