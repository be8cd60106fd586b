#include "lro/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "lro/errors.hpp"
#include "lro/kde.hpp"
#include "lro/rng.hpp"

namespace lro {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_level(double level) {
  if (!(level > 0.0 && level < 1.0)) {
    throw std::invalid_argument("confidence level must lie in (0,1)");
  }
}

void check_interior(const LroFit& fit, double z) {
  if (!(z > fit.pooled_z.front() && z < fit.pooled_z.back())) {
    throw unsupported_point_error(
        "point lies at or beyond the pooled data range");
  }
}

double slope_window(const LroFit& fit, const NuisanceConfig& cfg) {
  const double range = fit.pooled_z.back() - fit.pooled_z.front();
  return cfg.slope_window_constant *
         std::pow(static_cast<double>(fit.n()), -0.2) * range;
}

WeightedSeries pooled_series(const PooledSample& pooled) {
  WeightedSeries s;
  s.values.resize(pooled.z.size());
  s.weights.resize(pooled.z.size());
  for (std::size_t k = 0; k < pooled.z.size(); ++k) {
    s.weights[k] = static_cast<double>(pooled.total_count[k]);
    s.values[k] = static_cast<double>(pooled.d_count[k]) / s.weights[k];
  }
  return s;
}

}  // namespace

IntervalEstimate discrete_wald_ci(const LroFit& fit, double z, double level) {
  check_level(level);
  const double df = fit.f_star.mass_at(z);
  const double dg = fit.g_star.mass_at(z);
  if (!(dg > 0.0)) {
    throw undefined_nuisance_error(
        "variance undefined: zero fitted denominator mass at z");
  }
  const double theta = fit.theta_at(z);
  if (!(theta > 0.0) || !std::isfinite(theta)) {
    throw undefined_nuisance_error(
        "log-scale interval undefined at a zero or infinite estimate");
  }
  const double pi = fit.pi_n;
  const double var =
      theta * (pi * df + (1.0 - pi) * dg - df * dg) / (pi * (1.0 - pi) * dg * dg);
  const double se_log = std::sqrt(var / static_cast<double>(fit.n())) / theta;
  const boost::math::normal_distribution<double> normal;
  const double q = boost::math::quantile(normal, 1.0 - (1.0 - level) / 2.0);
  IntervalEstimate ci;
  ci.z = z;
  ci.level = level;
  ci.method = "discrete-wald";
  ci.lower = theta * std::exp(-q * se_log);
  ci.upper = theta * std::exp(q * se_log);
  ci.nuisances = {{"var_theta", var},
                  {"se_log", se_log},
                  {"delta_f", df},
                  {"delta_g", dg},
                  {"theta_hat", theta}};
  return ci;
}

double estimate_theta_prime(const LroFit& fit, double z, const NuisanceConfig& cfg) {
  const double b = slope_window(fit, cfg);
  const double hi = fit.theta_at(z + b);
  const double lo = fit.theta_at(z - b);
  if (!std::isfinite(hi) || !std::isfinite(lo)) {
    throw undefined_nuisance_error("slope undefined: infinite fitted level in window");
  }
  return (hi - lo) / (2.0 * b);
}

double estimate_kappa(const LroFit& fit, const PooledSample& pooled, double z,
                      const NuisanceConfig& cfg) {
  std::vector<double> wf(pooled.z.size()), wg(pooled.z.size());
  for (std::size_t k = 0; k < pooled.z.size(); ++k) {
    wf[k] = static_cast<double>(pooled.d_count[k]);
    wg[k] = static_cast<double>(pooled.total_count[k] - pooled.d_count[k]);
  }
  const WeightedKde fhat(pooled.z, wf, cfg.kde_bandwidth_f);
  const WeightedKde ghat(pooled.z, wg, cfg.kde_bandwidth_g);
  const double f = fhat(z);
  const double g = ghat(z);
  if (!(g > 0.0)) {
    throw undefined_nuisance_error("denominator density estimate vanishes at z");
  }
  const double theta = fit.theta_at(z);
  if (!std::isfinite(theta)) {
    throw undefined_nuisance_error("infinite fitted ratio at z");
  }
  const double pi = fit.pi_n;
  return theta * (pi * f + (1.0 - pi) * g) / (pi * (1.0 - pi) * g * g);
}

double estimate_tau(const LroFit& fit, const PooledSample& pooled, double z,
                    const NuisanceConfig& cfg) {
  check_interior(fit, z);
  const double theta_prime = estimate_theta_prime(fit, z, cfg);
  if (theta_prime == 0.0) return 0.0;
  return estimate_kappa(fit, pooled, z, cfg) * theta_prime;
}

IntervalEstimate theta_wald_ci(const LroFit& fit, double z, double level,
                               double tau_n, const QuantileTable& table) {
  check_level(level);
  if (!(tau_n >= 0.0)) {
    throw std::invalid_argument("tau must be non-negative");
  }
  const double q = table.chernoff(1.0 - (1.0 - level) / 2.0);
  const double theta = fit.theta_at(z);
  const double half = std::cbrt(4.0 * tau_n / static_cast<double>(fit.n())) * q;
  IntervalEstimate ci;
  ci.z = z;
  ci.level = level;
  ci.method = "theta-wald";
  ci.lower = std::max(0.0, theta - half);
  ci.upper = theta + half;
  ci.nuisances = {{"tau_n", tau_n}, {"quantile", q}, {"theta_hat", theta}};
  return ci;
}

IntervalEstimate mu_wald_transformed_ci(const LroFit& fit, const PooledSample& pooled,
                                        double z, double level,
                                        const NuisanceConfig& cfg,
                                        const QuantileTable& table) {
  check_level(level);
  check_interior(fit, z);
  const double q = table.chernoff(1.0 - (1.0 - level) / 2.0);
  const double b = slope_window(fit, cfg);
  const double mu = fit.mu_at(z);
  const double mu_prime = (fit.mu_at(z + b) - fit.mu_at(z - b)) / (2.0 * b);
  std::vector<double> wh(pooled.total_count.size());
  for (std::size_t k = 0; k < wh.size(); ++k) {
    wh[k] = static_cast<double>(pooled.total_count[k]);
  }
  const WeightedKde hhat(pooled.z, wh, cfg.kde_bandwidth_h);
  const double h = hhat(z);
  if (!(h > 0.0)) {
    throw undefined_nuisance_error("pooled density estimate vanishes at z");
  }
  const double scale = std::cbrt(std::max(0.0, 4.0 * mu_prime * mu * (1.0 - mu) / h));
  const double half = scale * q / std::cbrt(static_cast<double>(fit.n()));
  const double lo_mu = std::clamp(mu - half, 0.0, 1.0);
  const double hi_mu = std::clamp(mu + half, 0.0, 1.0);
  const double odds_pi = odds(fit.pi_n);
  IntervalEstimate ci;
  ci.z = z;
  ci.level = level;
  ci.method = "mu-wald-transformed";
  ci.lower = odds(lo_mu) / odds_pi;
  ci.upper = hi_mu >= 1.0 ? kInf : odds(hi_mu) / odds_pi;
  ci.nuisances = {{"mu_hat", mu},       {"mu_prime_n", mu_prime},
                  {"h_n", h},           {"window", b},
                  {"quantile", q},      {"mu_lower", lo_mu},
                  {"mu_upper", hi_mu}};
  return ci;
}

IntervalEstimate lrt_ci(const LroFit& fit, const PooledSample& pooled, double z,
                        double level, const QuantileTable& table) {
  check_level(level);
  check_interior(fit, z);
  const double d = table.lrt(level);
  const WeightedSeries series = pooled_series(pooled);
  const double ll_free = binomial_log_likelihood(series, fit.mu_star.fitted);
  const std::size_t split = static_cast<std::size_t>(
      std::upper_bound(pooled.z.begin(), pooled.z.end(), z) - pooled.z.begin());
  const double odds_pi = odds(fit.pi_n);

  const auto statistic = [&](double theta_dagger) {
    double bound;
    if (!std::isfinite(theta_dagger)) {
      bound = 1.0;
    } else {
      const double v = theta_dagger * odds_pi;
      bound = v / (1.0 + v);
    }
    const IsotonicFit constrained = pava_bounded(series, split, bound);
    return 2.0 * (ll_free - binomial_log_likelihood(series, constrained.fitted));
  };

  const double theta_hat = fit.theta_at(z);
  if (!std::isfinite(theta_hat)) {
    throw undefined_nuisance_error("infinite fitted ratio at z");
  }

  constexpr double tol = 1e-6;
  constexpr int max_iter = 100;

  double lower = 0.0;
  if (statistic(0.0) > d) {
    double lo = 0.0, hi = theta_hat;
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
      const double mid = 0.5 * (lo + hi);
      (statistic(mid) > d ? lo : hi) = mid;
    }
    lower = hi;
  }

  double upper;
  double hi = std::max(2.0 * theta_hat, theta_hat + 1.0);
  double stat_hi = statistic(hi);
  while (stat_hi <= d && hi < 1e12) {
    hi *= 4.0;
    stat_hi = statistic(hi);
  }
  if (stat_hi <= d) {
    upper = kInf;
  } else {
    double lo = theta_hat;
    for (int i = 0; i < max_iter && hi - lo > tol; ++i) {
      const double mid = 0.5 * (lo + hi);
      (statistic(mid) <= d ? lo : hi) = mid;
    }
    upper = lo;
  }

  IntervalEstimate ci;
  ci.z = z;
  ci.level = level;
  ci.method = "lrt";
  ci.lower = lower;
  ci.upper = upper;
  ci.nuisances = {{"d_quantile", d},
                  {"theta_hat", theta_hat},
                  {"mu_hat", fit.mu_at(z)},
                  {"split_index", static_cast<double>(split)}};
  return ci;
}

SplitEstimate split_fit(const TwoSample& ts, double z, int m, std::uint64_t seed) {
  if (m < 2) {
    throw std::invalid_argument("need at least 2 splits");
  }
  validate_two_sample(ts);
  const std::int64_t n = static_cast<std::int64_t>(ts.x.size() + ts.y.size());
  if (n < 2 * static_cast<std::int64_t>(m)) {
    throw std::invalid_argument("sample too small for the requested splits");
  }
  std::vector<std::pair<double, bool>> obs;
  obs.reserve(static_cast<std::size_t>(n));
  for (double v : ts.x) obs.emplace_back(v, true);
  for (double v : ts.y) obs.emplace_back(v, false);

  CounterRng rng(seed, 0x73706C69ULL);
  constexpr int max_attempts = 20;
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    for (std::size_t i = obs.size() - 1; i > 0; --i) {
      std::swap(obs[i], obs[rng.next_below(i + 1)]);
    }
    std::vector<TwoSample> parts(static_cast<std::size_t>(m));
    const std::size_t base = obs.size() / static_cast<std::size_t>(m);
    const std::size_t extra = obs.size() % static_cast<std::size_t>(m);
    std::size_t pos = 0;
    for (std::size_t j = 0; j < static_cast<std::size_t>(m); ++j) {
      const std::size_t len = base + (j < extra ? 1 : 0);
      for (std::size_t i = 0; i < len; ++i, ++pos) {
        (obs[pos].second ? parts[j].x : parts[j].y).push_back(obs[pos].first);
      }
    }
    bool ok = true;
    for (const TwoSample& part : parts) {
      try {
        validate_two_sample(part);
      } catch (const std::invalid_argument&) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;

    SplitEstimate se;
    se.m = m;
    se.z = z;
    se.n_total = n;
    se.theta_values.reserve(static_cast<std::size_t>(m));
    for (const TwoSample& part : parts) {
      se.theta_values.push_back(fit_lro(part).theta_at(z));
    }
    const bool finite = std::all_of(se.theta_values.begin(), se.theta_values.end(),
                                    [](double v) { return std::isfinite(v); });
    if (!finite) {
      se.mean = kInf;
      se.sigma_nm = kInf;
      return se;
    }
    double mean = 0.0;
    for (double v : se.theta_values) mean += v;
    mean /= static_cast<double>(m);
    double ss = 0.0;
    for (double v : se.theta_values) ss += (v - mean) * (v - mean);
    se.mean = mean;
    // spread of the cube-root-rescaled per-split estimates, so that
    // sigma_nm / (sqrt(m) n^{1/3}) is the standard error of the mean
    se.sigma_nm = std::cbrt(static_cast<double>(n)) *
                  std::sqrt(ss / static_cast<double>(m - 1));
    return se;
  }
  throw degenerate_order_error(
      "no valid equipartition found: repeated splits violate the ordering assumption");
}

IntervalEstimate split_ci(const SplitEstimate& se, double level) {
  check_level(level);
  if (se.m < 2) {
    throw std::invalid_argument("split estimate needs at least 2 splits");
  }
  const boost::math::students_t_distribution<double> t_dist(se.m - 1);
  const double t = boost::math::quantile(t_dist, 1.0 - (1.0 - level) / 2.0);
  const double half = se.sigma_nm * t /
                      (std::sqrt(static_cast<double>(se.m)) *
                       std::cbrt(static_cast<double>(se.n_total)));
  IntervalEstimate ci;
  ci.z = se.z;
  ci.level = level;
  ci.method = "split";
  ci.lower = std::max(0.0, se.mean - half);
  ci.upper = se.mean + half;
  ci.nuisances = {{"sigma_nm", se.sigma_nm},
                  {"t_quantile", t},
                  {"m", static_cast<double>(se.m)},
                  {"theta_bar", se.mean}};
  return ci;
}

}  // namespace lro
