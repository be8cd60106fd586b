#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "lro/estimators.hpp"
#include "lro/quantiles.hpp"

namespace lro {

// Pointwise confidence interval with method tag and nuisance diagnostics.
// upper may be +infinity; lower is clamped at 0.
struct IntervalEstimate {
  double z = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double level = 0.0;
  std::string method;
  std::map<std::string, double> nuisances;
};

// Knobs for the nuisance estimators the limit theory leaves open. The slope
// of the fitted step function is taken as a symmetric difference quotient
// over [z-b, z+b] with b = slope_window_constant * n^{-1/5} * data range;
// density estimates use Gaussian kernels with Silverman bandwidths unless
// overridden.
struct NuisanceConfig {
  double slope_window_constant = 0.5;
  double kde_bandwidth_f = 0.0;
  double kde_bandwidth_g = 0.0;
  double kde_bandwidth_h = 0.0;
};

// Wald interval for the square-root-rate regime (finite-support data),
// built around the log of the estimate and exponentiated. The plug-in
// variance is theta*[pi*dF + (1-pi)*dG - dF*dG] / [pi*(1-pi)*dG^2] / n.
IntervalEstimate discrete_wald_ci(const LroFit& fit, double z, double level);

// Plug-in scale kappa(z) = theta(z)*[pi*f + (1-pi)*g] / [pi*(1-pi)*g^2]
// with kernel density estimates for f and g.
double estimate_kappa(const LroFit& fit, const PooledSample& pooled, double z,
                      const NuisanceConfig& cfg = {});

// Symmetric difference quotient of the fitted ratio function.
double estimate_theta_prime(const LroFit& fit, double z,
                            const NuisanceConfig& cfg = {});

// tau(z) = kappa(z) * theta'(z), the cube-root-rate scale parameter.
double estimate_tau(const LroFit& fit, const PooledSample& pooled, double z,
                    const NuisanceConfig& cfg = {});

// Wald interval in the cube-root regime: theta(z) -+ (4 tau / n)^{1/3} q,
// with q the requested quantile of the argmax law.
IntervalEstimate theta_wald_ci(const LroFit& fit, double z, double level,
                               double tau_n,
                               const QuantileTable& table = QuantileTable::embedded());

// Interval built on the success-probability scale mu, clamped to [0,1], and
// mapped through u -> odds(u)/odds(pi_n); an upper endpoint of 1 on the mu
// scale maps to +infinity.
IntervalEstimate mu_wald_transformed_ci(const LroFit& fit, const PooledSample& pooled,
                                        double z, double level,
                                        const NuisanceConfig& cfg = {},
                                        const QuantileTable& table = QuantileTable::embedded());

// Inversion of the pointwise likelihood-ratio test: the set of hypothesized
// values whose constrained refit stays within the pivotal-limit quantile.
// Endpoints are found by bisection; supported strictly inside the pooled
// data range only.
IntervalEstimate lrt_ci(const LroFit& fit, const PooledSample& pooled, double z,
                        double level,
                        const QuantileTable& table = QuantileTable::embedded());

// Sample-splitting estimate: per-split fits on a random equipartition of the
// pooled observations, their mean, and the between-split standard deviation.
struct SplitEstimate {
  int m = 0;
  double z = 0.0;
  std::vector<double> theta_values;
  double mean = 0.0;
  double sigma_nm = 0.0;
  std::int64_t n_total = 0;
};

SplitEstimate split_fit(const TwoSample& ts, double z, int m, std::uint64_t seed);

// t-interval around the split mean with m-1 degrees of freedom and the
// cube-root sample-size scaling.
IntervalEstimate split_ci(const SplitEstimate& se, double level);

}  // namespace lro
