#include "lro/inference.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <doctest.h>

#include "lro/errors.hpp"
#include "lro/kde.hpp"
#include "lro/rng.hpp"
#include "lro/simulation.hpp"
#include "oracles.hpp"

using lro::IntervalEstimate;
using lro::LroFit;
using lro::PooledSample;
using lro::TwoSample;

namespace {

// x and y identical: pi = 1/2, both fitted masses 1/2 at each knot, flat
// unit ratio.
const TwoSample kSymmetric{{0, 1}, {0, 1}};

TwoSample repeat(const TwoSample& ts, int k) {
  TwoSample out;
  for (int i = 0; i < k; ++i) {
    out.x.insert(out.x.end(), ts.x.begin(), ts.x.end());
    out.y.insert(out.y.end(), ts.y.begin(), ts.y.end());
  }
  return out;
}

}  // namespace

TEST_CASE("square-root-rate interval in the symmetric case") {
  const LroFit fit = lro::fit_lro(kSymmetric);
  const IntervalEstimate ci = lro::discrete_wald_ci(fit, 0.0, 0.95);
  // masses are both 1/2, estimate 1, so the variance reduces to 4(1-p)/p
  CHECK(ci.nuisances.at("delta_f") == doctest::Approx(0.5));
  CHECK(ci.nuisances.at("delta_g") == doctest::Approx(0.5));
  CHECK(ci.nuisances.at("theta_hat") == doctest::Approx(1.0));
  CHECK(ci.nuisances.at("var_theta") == doctest::Approx(4.0 * 0.5 / 0.5));
  CHECK(ci.lower < 1.0);
  CHECK(ci.upper > 1.0);
  CHECK(ci.lower > 0.0);

  // interval contains its own point estimate and shrinks with n
  double prev_width = std::numeric_limits<double>::infinity();
  for (int k : {1, 4, 16, 64}) {
    const LroFit big = lro::fit_lro(repeat(kSymmetric, k));
    const IntervalEstimate c = lro::discrete_wald_ci(big, 0.0, 0.95);
    CHECK(c.lower <= 1.0);
    CHECK(c.upper >= 1.0);
    const double width = c.upper - c.lower;
    CHECK(width < prev_width);
    prev_width = width;
  }
}

TEST_CASE("square-root-rate interval error cases") {
  const LroFit fit = lro::fit_lro(kSymmetric);
  CHECK_THROWS_AS(lro::discrete_wald_ci(fit, 0.5, 0.95),
                  lro::undefined_nuisance_error);
  CHECK_THROWS_AS(lro::discrete_wald_ci(fit, 0.0, 1.2), std::invalid_argument);
}

TEST_CASE("cube-root-rate interval formula") {
  const LroFit fit = lro::fit_lro(repeat(kSymmetric, 250));  // n = 1000
  REQUIRE(fit.n() == 1000);
  const double theta = fit.theta_at(0.0);

  const IntervalEstimate degenerate = lro::theta_wald_ci(fit, 0.0, 0.95, 0.0);
  CHECK(degenerate.lower == theta);
  CHECK(degenerate.upper == theta);

  const IntervalEstimate ci = lro::theta_wald_ci(fit, 0.0, 0.95, 1.0);
  const double q = lro::QuantileTable::embedded().chernoff(0.975);
  CHECK(std::fabs(q - 0.9982) < 0.01);
  const double half = std::cbrt(4.0 / 1000.0) * q;
  CHECK(ci.upper - ci.lower == doctest::Approx(2.0 * half));
  CHECK(ci.upper == doctest::Approx(theta + half));

  // deterministic width scaling in n: doubling n scales by 2^{-1/3}
  const LroFit fit2 = lro::fit_lro(repeat(kSymmetric, 500));
  const IntervalEstimate ci2 = lro::theta_wald_ci(fit2, 0.0, 0.95, 1.0);
  CHECK((ci2.upper - ci2.lower) / (ci.upper - ci.lower) ==
        doctest::Approx(std::pow(2.0, -1.0 / 3.0)));

  CHECK_THROWS_AS(lro::theta_wald_ci(fit, 0.0, 0.9412, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(lro::theta_wald_ci(fit, 0.0, 0.95, -1.0), std::invalid_argument);
}

TEST_CASE("slope and scale nuisance estimates") {
  // flat ratio: slope zero, tau zero
  const LroFit flat = lro::fit_lro(repeat(kSymmetric, 50));
  const PooledSample pooled = lro::pool(repeat(kSymmetric, 50));
  CHECK(lro::estimate_theta_prime(flat, 0.5) == 0.0);
  CHECK(lro::estimate_tau(flat, pooled, 0.5) == 0.0);

  // symmetric samples: fhat = ghat and pi = 1/2 reduce kappa to 4/ghat
  lro::CounterRng rng(31);
  TwoSample ts;
  for (int i = 0; i < 400; ++i) {
    const double v = rng.next_normal();
    ts.x.push_back(v);
    ts.y.push_back(v);
  }
  const LroFit fit = lro::fit_lro(ts);
  const PooledSample p = lro::pool(ts);
  std::vector<double> wg(p.z.size());
  for (std::size_t k = 0; k < p.z.size(); ++k) {
    wg[k] = static_cast<double>(p.total_count[k] - p.d_count[k]);
  }
  const lro::WeightedKde ghat(p.z, wg);
  const double kappa = lro::estimate_kappa(fit, p, 0.3);
  CHECK(kappa == doctest::Approx(4.0 / ghat(0.3)).epsilon(1e-9));
}

TEST_CASE("scale estimate approaches its analytic value") {
  // exponential design: the analytic tau at z = 1 follows from the density
  // ratio theta(z) = exp(z)/2 and kappa written out with the two densities.
  const lro::Scenario s = lro::Scenario::continuous_exponential();
  const double z = 1.0;
  const double f0 = std::exp(-z);
  const double g0 = 2.0 * std::exp(-2.0 * z);
  const double theta0 = 0.5 * std::exp(z);
  const double theta0_prime = 0.5 * std::exp(z);
  const double kappa0 =
      theta0 * (0.4 * f0 + 0.6 * g0) / (0.4 * 0.6 * g0 * g0);
  const double tau0 = kappa0 * theta0_prime;

  std::vector<double> estimates;
  for (int rep = 0; rep < 100; ++rep) {
    const TwoSample ts = lro::sample_scenario(s, 10000, 9000 + rep);
    const LroFit fit = lro::fit_lro(ts);
    const PooledSample pooled = lro::pool(ts);
    estimates.push_back(lro::estimate_tau(fit, pooled, z));
  }
  std::sort(estimates.begin(), estimates.end());
  const double median = 0.5 * (estimates[49] + estimates[50]);
  CHECK(std::fabs(median - tau0) / tau0 < 0.3);
}

TEST_CASE("transformed interval degenerates when the fit is flat") {
  // flat fitted regression: zero slope, zero half-width, both endpoints at
  // the point estimate
  const lro::TwoSample ts = repeat(kSymmetric, 40);
  const LroFit fit = lro::fit_lro(ts);
  const PooledSample pooled = lro::pool(ts);
  const IntervalEstimate ci = lro::mu_wald_transformed_ci(fit, pooled, 0.5, 0.95);
  CHECK(ci.lower == fit.theta_at(0.5));
  CHECK(ci.upper == fit.theta_at(0.5));
}

TEST_CASE("transformed interval maps mu endpoints monotonically") {
  lro::CounterRng rng(37);
  for (int trial = 0; trial < 50; ++trial) {
    const TwoSample ts = oracles::random_two_sample(rng, 60);
    const LroFit fit = lro::fit_lro(ts);
    const PooledSample pooled = lro::pool(ts);
    const double lo = fit.pooled_z.front();
    const double hi = fit.pooled_z.back();
    const double z = lo + 0.5 * (hi - lo);
    IntervalEstimate ci;
    try {
      ci = lro::mu_wald_transformed_ci(fit, pooled, z, 0.95);
    } catch (const lro::undefined_nuisance_error&) {
      continue;
    }
    const double mu = ci.nuisances.at("mu_hat");
    const double theta = fit.theta_at(z);
    CHECK(ci.nuisances.at("mu_lower") <= mu + 1e-12);
    CHECK(ci.nuisances.at("mu_upper") >= mu - 1e-12);
    if (std::isfinite(theta)) {
      CHECK(ci.lower <= theta + 1e-9);
      CHECK(ci.upper >= theta - 1e-9);
    }
    CHECK(ci.lower >= 0.0);
    CHECK(ci.lower <= ci.upper);
  }
}

TEST_CASE("transformed interval hits infinity when the mu bound reaches 1") {
  // large jump right at the evaluation point pushes mu + half past 1
  TwoSample ts;
  for (int i = 0; i < 30; ++i) ts.y.push_back(0.1 * i);
  for (int i = 0; i < 200; ++i) ts.x.push_back(2.0 + 0.001 * i);
  ts.y.push_back(2.05);
  const LroFit fit = lro::fit_lro(ts);
  const PooledSample pooled = lro::pool(ts);
  const IntervalEstimate ci = lro::mu_wald_transformed_ci(fit, pooled, 2.1, 0.95);
  CHECK(ci.nuisances.at("mu_upper") == 1.0);
  CHECK(std::isinf(ci.upper));
}

TEST_CASE("likelihood-ratio interval basics") {
  const lro::Scenario s = lro::Scenario::discrete_poisson();
  const TwoSample ts = lro::sample_scenario(s, 2000, 77);
  const LroFit fit = lro::fit_lro(ts);
  const PooledSample pooled = lro::pool(ts);

  const IntervalEstimate ci = lro::lrt_ci(fit, pooled, 5.0, 0.95);
  const double theta_hat = fit.theta_at(5.0);
  CHECK(ci.lower <= theta_hat);
  CHECK(ci.upper >= theta_hat);
  CHECK(ci.lower >= 0.0);

  // boundary points unsupported
  CHECK_THROWS_AS(lro::lrt_ci(fit, pooled, fit.pooled_z.front(), 0.95),
                  lro::unsupported_point_error);
  CHECK_THROWS_AS(lro::lrt_ci(fit, pooled, fit.pooled_z.back() + 1, 0.95),
                  lro::unsupported_point_error);
}

TEST_CASE("likelihood-ratio statistic grows away from the fit") {
  const lro::Scenario s = lro::Scenario::discrete_poisson();
  const TwoSample ts = lro::sample_scenario(s, 500, 78);
  const LroFit fit = lro::fit_lro(ts);
  const PooledSample pooled = lro::pool(ts);
  lro::WeightedSeries series;
  for (std::size_t k = 0; k < pooled.z.size(); ++k) {
    series.weights.push_back(static_cast<double>(pooled.total_count[k]));
    series.values.push_back(static_cast<double>(pooled.d_count[k]) /
                            series.weights.back());
  }
  const double ll_free = lro::binomial_log_likelihood(series, fit.mu_star.fitted);
  const double z = 4.0;
  const std::size_t split = static_cast<std::size_t>(
      std::upper_bound(pooled.z.begin(), pooled.z.end(), z) - pooled.z.begin());
  const double mu_hat = fit.mu_at(z);

  const auto stat_at = [&](double bound) {
    const lro::IsotonicFit c = lro::pava_bounded(series, split, bound);
    return 2.0 * (ll_free - lro::binomial_log_likelihood(series, c.fitted));
  };

  CHECK(stat_at(mu_hat) <= 1e-9);
  double prev = 0.0;
  for (double delta = 0.02; mu_hat + delta < 1.0; delta += 0.02) {
    const double stat = stat_at(mu_hat + delta);
    CHECK(stat >= prev - 1e-9);
    prev = stat;
  }
  prev = 0.0;
  for (double delta = 0.02; mu_hat - delta > 0.0; delta += 0.02) {
    const double stat = stat_at(mu_hat - delta);
    CHECK(stat >= prev - 1e-9);
    prev = stat;
  }
}

TEST_CASE("sample splitting basics") {
  const lro::Scenario s = lro::Scenario::mixed();
  const TwoSample ts = lro::sample_scenario(s, 800, 91);

  CHECK_THROWS_AS(lro::split_fit(ts, 0.5, 1, 7), std::invalid_argument);

  const lro::SplitEstimate se = lro::split_fit(ts, 0.5, 5, 7);
  CHECK(se.theta_values.size() == 5);
  double mean = 0.0;
  for (double v : se.theta_values) mean += v;
  mean /= 5.0;
  CHECK(se.mean == doctest::Approx(mean));

  // deterministic given the seed
  const lro::SplitEstimate se2 = lro::split_fit(ts, 0.5, 5, 7);
  CHECK(se2.theta_values == se.theta_values);
  const lro::SplitEstimate se3 = lro::split_fit(ts, 0.5, 5, 8);
  CHECK(se3.theta_values != se.theta_values);
}

TEST_CASE("split interval formula") {
  lro::SplitEstimate se;
  se.m = 5;
  se.z = 0.5;
  se.theta_values = {1.0, 1.1, 0.9, 1.05, 0.95};
  se.mean = 1.0;
  se.sigma_nm = 0.2;
  se.n_total = 1000;

  const IntervalEstimate ci = lro::split_ci(se, 0.95);
  // frozen Student-t multiplier with 4 degrees of freedom
  CHECK(ci.nuisances.at("t_quantile") == doctest::Approx(2.776445).epsilon(1e-5));
  const double half = 0.2 * 2.7764451052 / (std::sqrt(5.0) * std::cbrt(1000.0));
  CHECK(ci.upper - ci.lower == doctest::Approx(2 * half).epsilon(1e-5));

  // degenerate spread gives a degenerate interval
  se.sigma_nm = 0.0;
  const IntervalEstimate deg = lro::split_ci(se, 0.95);
  CHECK(deg.lower == 1.0);
  CHECK(deg.upper == 1.0);

  // width scales as n^{-1/3} exactly
  se.sigma_nm = 0.2;
  se.n_total = 2000;
  const IntervalEstimate ci2 = lro::split_ci(se, 0.95);
  CHECK((ci2.upper - ci2.lower) / (ci.upper - ci.lower) ==
        doctest::Approx(std::pow(2.0, -1.0 / 3.0)));
}

TEST_CASE("quantile table sanity") {
  const lro::QuantileTable& t = lro::QuantileTable::embedded();
  CHECK(std::fabs(t.chernoff(0.975) - 0.9982) < 0.01);
  CHECK(std::fabs(t.chernoff(0.5)) < 0.01);
  CHECK(t.chernoff(0.9) < t.chernoff(0.975));
  CHECK(t.lrt(0.95) > t.lrt(0.5));
  CHECK(t.lrt(0.5) > 0.0);
  double prev = -1.0;
  for (const auto& [level, q] : t.lrt_map()) {
    CHECK(q > prev);
    prev = q;
  }
  CHECK_THROWS_AS(t.chernoff(0.942), std::invalid_argument);
}

TEST_CASE("table file serialization round-trips and matches the embedded values") {
  const lro::QuantileTable& t = lro::QuantileTable::embedded();
  std::stringstream buf;
  lro::write_quantile_table(buf, t, lro::ChernoffOracleParams{},
                            lro::LrtOracleParams{});
  const lro::QuantileTable back = lro::read_quantile_table(buf);
  CHECK(back.chernoff(0.975) == t.chernoff(0.975));
  CHECK(back.lrt(0.95) == t.lrt(0.95));
  CHECK(back.chernoff_sd() == t.chernoff_sd());

  std::ifstream committed(std::string(LRO_DATA_DIR) + "/quantile_table.txt");
  REQUIRE(committed.good());
  const lro::QuantileTable file = lro::read_quantile_table(committed);
  for (const auto& [level, q] : t.chernoff_map()) {
    CHECK(std::fabs(file.chernoff(level) - q) < 5e-7);  // %.6f in the file
  }
  for (const auto& [level, d] : t.lrt_map()) {
    CHECK(std::fabs(file.lrt(level) - d) < 5e-7);
  }

  std::stringstream bad("chernoff.q.0.5=0\nbogus.key=1\n");
  CHECK_THROWS_AS(lro::read_quantile_table(bad), std::invalid_argument);
}

TEST_CASE("small regenerated table stays near the embedded one") {
  lro::ChernoffOracleParams cp;
  cp.replications = 4000;
  cp.grid_step = 0.005;
  cp.threads = 2;
  const auto cq = lro::simulate_chernoff_quantiles({0.5, 0.975}, cp);
  CHECK(std::fabs(cq.at(0.975) - 0.998) < 0.05);
  CHECK(std::fabs(cq.at(0.5)) < 0.03);

  lro::LrtOracleParams lp;
  lp.replications = 3000;
  lp.grid_step = 0.01;
  lp.truncation = 4.0;
  lp.threads = 2;
  const auto ld = lro::simulate_lrt_quantiles({0.95}, lp);
  CHECK(std::fabs(ld.at(0.95) - lro::QuantileTable::embedded().lrt(0.95)) < 0.25);
}
