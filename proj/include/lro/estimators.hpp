#pragma once

#include <cstdint>
#include <vector>

#include "lro/geometry.hpp"
#include "lro/isotonic.hpp"

namespace lro {

// Two independent samples; x drawn from the numerator distribution, y from
// the denominator one. Requires some x to lie strictly below some y in the
// distinct-value sense (largest distinct y above smallest distinct x).
struct TwoSample {
  std::vector<double> x;
  std::vector<double> y;
};

// Throws degenerate_order_error / std::invalid_argument on violation.
void validate_two_sample(const TwoSample& ts);

// Distinct sorted pooled values with per-value origin counts.
struct PooledSample {
  std::vector<double> z;
  std::vector<std::int64_t> d_count;      // observations of x origin at z
  std::vector<std::int64_t> total_count;  // all observations at z
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;

  std::int64_t n() const { return n1 + n2; }
  double pi_n() const { return static_cast<double>(n1) / static_cast<double>(n()); }
};

// Right-continuous step CDF with jumps at its knots.
class StepDistribution {
 public:
  StepDistribution(std::vector<double> knots, std::vector<double> cdf_values);
  static StepDistribution from_masses(std::vector<double> knots,
                                      const std::vector<double>& masses);

  const std::vector<double>& knots() const { return knots_; }
  const std::vector<double>& cdf_values() const { return cdf_; }
  std::vector<double> masses() const;

  double cdf(double z) const;      // P(X <= z)
  double mass_at(double z) const;  // jump at z, 0 off the knot set

 private:
  std::vector<double> knots_;
  std::vector<double> cdf_;
};

// Non-decreasing, non-negative step function. levels[i] applies on the
// left-open right-closed interval (breakpoints[i-1], breakpoints[i]] with
// the first level extending to -infinity and the last level past the last
// breakpoint; there is one breakpoint fewer than levels. Levels may be
// +infinity at the top.
class MonotoneStepFn {
 public:
  MonotoneStepFn(std::vector<double> breakpoints, std::vector<double> levels);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& levels() const { return levels_; }
  double operator()(double z) const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> levels_;
};

// Result bundle of the order-restricted maximum likelihood fit.
struct LroFit {
  StepDistribution f_star;
  StepDistribution g_star;
  MonotoneStepFn theta_star;
  double pi_n = 0.0;
  IsotonicFit mu_star;           // keyed to pooled_z
  std::vector<double> pooled_z;  // distinct pooled values
  std::int64_t n1 = 0;
  std::int64_t n2 = 0;

  std::int64_t n() const { return n1 + n2; }
  double theta_at(double z) const { return theta_star(z); }
  // Fitted success probability at z, same step convention as theta_star.
  double mu_at(double z) const;
};

// Empirical distribution function; knots are the distinct sample values.
StepDistribution ecdf(const std::vector<double>& sample);

// Distinct sorted pooled values with origin counts; order invariant.
PooledSample pool(const TwoSample& ts);

// Odds transform u -> u/(1-u); +infinity at u = 1.
double odds(double u);

// Maximum likelihood estimator of (F, G, theta) under the constraint that
// the ratio of the two distributions' masses is non-decreasing.
//
// G* comes from the least concave majorant of the pooled-vs-G diagram at the
// distinct y values; F* from the greatest convex minorant of the pooled-vs-F
// diagram, with within-interval mass split proportionally to the empirical
// masses (mass of an x-free interval sits at the interval's right end).
// theta* is computed on the pooled sample as odds(mu*)/odds(pi_n) for mu*
// the isotonic regression of origin indicators on pooled values; it is
// defined between data points by the step convention of MonotoneStepFn,
// which is a choice (the two construction routes agree at distinct y
// values, where both are defined, and this is re-checked on every fit).
LroFit fit_lro(const TwoSample& ts);

// log L = sum_i log dF(X_i) + sum_j log dG(Y_j); -infinity when any
// observation sits at a zero-mass point.
double log_likelihood(const TwoSample& ts, const StepDistribution& F,
                      const StepDistribution& G);

// Plug-in estimator route: left derivative of the GCM of the empirical
// ordinal dominance diagram, composed with the empirical y-sample CDF.
// Used as the cross-check partner of fit_lro.
MonotoneStepFn theta_via_odc(const TwoSample& ts);

// Empirical ordinal dominance diagram {(G_n(y_k), F_n(y_k))} with the
// origin prepended, plus its GCM vertices. Exposed for reporting.
struct OdcDiagram {
  std::vector<Point> points;
  std::vector<Point> gcm_vertices;
};
OdcDiagram odc_diagram(const TwoSample& ts);

}  // namespace lro
