#include "lro/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "lro/errors.hpp"
#include "lro/kde.hpp"
#include "lro/rng.hpp"

namespace lro {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

double poisson_pmf(double rate, double z) {
  const double k = std::round(z);
  if (z < 0.0 || std::fabs(z - k) > 1e-9) {
    throw std::invalid_argument("point outside the support of a counting law");
  }
  return std::exp(k * std::log(rate) - rate - std::lgamma(k + 1.0));
}

std::vector<double> arange(double lo, double hi, double step) {
  std::vector<double> g;
  for (double v = lo; v <= hi + 1e-9; v += step) g.push_back(v);
  return g;
}

const double kMixedAtoms[3] = {0.0, 0.5, 1.0};
const double kMixedMassF[3] = {1.0 / 18.0, 1.0 / 9.0, 3.0 / 18.0};
const double kMixedMassG[3] = {1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0};

int mixed_atom_index(double z) {
  for (int i = 0; i < 3; ++i) {
    if (z == kMixedAtoms[i]) return i;
  }
  return -1;
}

}  // namespace

Scenario Scenario::discrete_poisson() {
  Scenario s;
  s.kind = Kind::discrete_poisson;
  s.name = "discrete-poisson";
  s.pi0 = 0.4;
  s.rate_f = 6.0;
  s.rate_g = 4.0;
  s.eval_grid = arange(0.0, 10.0, 1.0);
  s.boundary_points = {0.0};
  return s;
}

Scenario Scenario::continuous_exponential() {
  Scenario s;
  s.kind = Kind::continuous_exponential;
  s.name = "continuous-exponential";
  s.pi0 = 0.4;
  s.rate_f = 1.0;
  s.rate_g = 2.0;
  s.eval_grid = arange(0.0, 2.0, 0.1);
  s.boundary_points = {0.0};
  return s;
}

Scenario Scenario::mixed() {
  Scenario s;
  s.kind = Kind::mixed;
  s.name = "mixed";
  s.pi0 = 0.4;
  s.eval_grid = arange(0.0, 1.0, 0.05);
  s.boundary_points = {0.0, 1.0};
  return s;
}

Scenario Scenario::from_spec(const std::string& name_or_path) {
  if (name_or_path == "mixed") return mixed();
  if (name_or_path == "discrete-poisson") return discrete_poisson();
  if (name_or_path == "continuous-exponential") return continuous_exponential();

  std::ifstream in(name_or_path);
  if (!in) {
    throw std::invalid_argument("unknown scenario kind or unreadable config: " +
                                name_or_path);
  }
  std::string kind;
  double pi0 = kNan, rate_f = kNan, rate_g = kNan;
  std::vector<double> grid;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("malformed scenario config line: " + line);
    }
    auto trim = [](std::string v) {
      const auto b = v.find_first_not_of(" \t");
      const auto e = v.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : v.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "kind") {
      kind = value;
    } else if (key == "pi0") {
      pi0 = std::stod(value);
    } else if (key == "rate_f") {
      rate_f = std::stod(value);
    } else if (key == "rate_g") {
      rate_g = std::stod(value);
    } else if (key == "grid") {
      std::stringstream ss(value);
      std::string tok;
      while (std::getline(ss, tok, ',')) grid.push_back(std::stod(tok));
    } else {
      throw std::invalid_argument("unknown scenario config key: " + key);
    }
  }
  Scenario s = from_spec(kind);  // throws on unknown kind
  if (!std::isnan(pi0)) {
    if (!(pi0 > 0.0 && pi0 < 1.0)) {
      throw std::invalid_argument("pi0 must lie in (0,1)");
    }
    s.pi0 = pi0;
  }
  if (!std::isnan(rate_f)) s.rate_f = rate_f;
  if (!std::isnan(rate_g)) s.rate_g = rate_g;
  if (!grid.empty()) s.eval_grid = grid;
  return s;
}

bool Scenario::has_mass_at(double z) const {
  switch (kind) {
    case Kind::discrete_poisson:
      return z >= 0.0 && std::fabs(z - std::round(z)) < 1e-9;
    case Kind::continuous_exponential:
      return false;
    case Kind::mixed:
      return mixed_atom_index(z) >= 0;
  }
  return false;
}

double Scenario::mass_f(double z) const {
  switch (kind) {
    case Kind::discrete_poisson:
      return poisson_pmf(rate_f, z);
    case Kind::continuous_exponential:
      return 0.0;
    case Kind::mixed: {
      const int i = mixed_atom_index(z);
      return i >= 0 ? kMixedMassF[i] : 0.0;
    }
  }
  return 0.0;
}

double Scenario::mass_g(double z) const {
  switch (kind) {
    case Kind::discrete_poisson:
      return poisson_pmf(rate_g, z);
    case Kind::continuous_exponential:
      return 0.0;
    case Kind::mixed: {
      const int i = mixed_atom_index(z);
      return i >= 0 ? kMixedMassG[i] : 0.0;
    }
  }
  return 0.0;
}

double Scenario::density_f(double z) const {
  switch (kind) {
    case Kind::discrete_poisson:
      return 0.0;
    case Kind::continuous_exponential:
      return z >= 0.0 ? rate_f * std::exp(-rate_f * z) : 0.0;
    case Kind::mixed:
      return (z >= 0.0 && z <= 1.0) ? (2.0 / 3.0) * (0.5 + z) : 0.0;
  }
  return 0.0;
}

double Scenario::density_g(double z) const {
  switch (kind) {
    case Kind::discrete_poisson:
      return 0.0;
    case Kind::continuous_exponential:
      return z >= 0.0 ? rate_g * std::exp(-rate_g * z) : 0.0;
    case Kind::mixed:
      return (z >= 0.0 && z <= 1.0) ? 2.0 / 3.0 : 0.0;
  }
  return 0.0;
}

double Scenario::discrete_sd(double z) const {
  const double df = mass_f(z);
  const double dg = mass_g(z);
  if (!(dg > 0.0)) {
    throw std::invalid_argument("no atom of the denominator law at z");
  }
  const double theta = df / dg;
  const double var =
      theta * (pi0 * df + (1.0 - pi0) * dg - df * dg) / (pi0 * (1.0 - pi0) * dg * dg);
  return std::sqrt(var);
}

double Scenario::continuous_tau(double z) const {
  double theta_prime;
  switch (kind) {
    case Kind::discrete_poisson:
      throw std::invalid_argument("no continuous part in the counting design");
    case Kind::continuous_exponential:
      theta_prime = (rate_f / rate_g) * (rate_g - rate_f) *
                    std::exp((rate_g - rate_f) * z);
      break;
    case Kind::mixed:
      theta_prime = 1.0;
      break;
  }
  const double f = density_f(z);
  const double g = density_g(z);
  if (!(g > 0.0)) {
    throw std::invalid_argument("denominator density vanishes at z");
  }
  const double theta = true_theta(*this, z);
  const double kappa = theta * (pi0 * f + (1.0 - pi0) * g) / (pi0 * (1.0 - pi0) * g * g);
  return kappa * theta_prime;
}

double true_theta(const Scenario& s, double z) {
  switch (s.kind) {
    case Scenario::Kind::discrete_poisson:
      return poisson_pmf(s.rate_f, z) / poisson_pmf(s.rate_g, z);
    case Scenario::Kind::continuous_exponential:
      if (z < 0.0) throw std::invalid_argument("point outside the support");
      return (s.rate_f / s.rate_g) * std::exp((s.rate_g - s.rate_f) * z);
    case Scenario::Kind::mixed: {
      if (z < 0.0 || z > 1.0) throw std::invalid_argument("point outside the support");
      const int i = mixed_atom_index(z);
      if (i >= 0) return kMixedMassF[i] / kMixedMassG[i];
      return 0.5 + z;
    }
  }
  throw std::logic_error("unreachable");
}

namespace {

double draw_mixed_f(CounterRng& rng) {
  const double u = rng.next_double();
  if (u < 1.0 / 18.0) return 0.0;
  if (u < 1.0 / 18.0 + 1.0 / 9.0) return 0.5;
  if (u < 1.0 / 3.0) return 1.0;
  // density 0.5 + x on [0,1], sampled by inverting x/2 + x^2/2.
  const double v = rng.next_double();
  return 0.5 * (std::sqrt(1.0 + 8.0 * v) - 1.0);
}

double draw_mixed_g(CounterRng& rng) {
  const double u = rng.next_double();
  if (u < 1.0 / 9.0) return 0.0;
  if (u < 2.0 / 9.0) return 0.5;
  if (u < 1.0 / 3.0) return 1.0;
  return rng.next_double();
}

}  // namespace

TwoSample sample_scenario(const Scenario& s, long n, std::uint64_t seed) {
  if (n < 2) {
    throw std::invalid_argument("need at least 2 observations");
  }
  CounterRng rng(seed, 0x53414D50ULL);
  for (int attempt = 0; attempt < 100; ++attempt) {
    const long n1 = rng.next_binomial(n, s.pi0);
    if (n1 == 0 || n1 == n) continue;
    TwoSample ts;
    ts.x.reserve(static_cast<std::size_t>(n1));
    ts.y.reserve(static_cast<std::size_t>(n - n1));
    for (long i = 0; i < n1; ++i) {
      switch (s.kind) {
        case Scenario::Kind::discrete_poisson:
          ts.x.push_back(static_cast<double>(rng.next_poisson(s.rate_f)));
          break;
        case Scenario::Kind::continuous_exponential:
          ts.x.push_back(rng.next_exponential(s.rate_f));
          break;
        case Scenario::Kind::mixed:
          ts.x.push_back(draw_mixed_f(rng));
          break;
      }
    }
    for (long j = 0; j < n - n1; ++j) {
      switch (s.kind) {
        case Scenario::Kind::discrete_poisson:
          ts.y.push_back(static_cast<double>(rng.next_poisson(s.rate_g)));
          break;
        case Scenario::Kind::continuous_exponential:
          ts.y.push_back(rng.next_exponential(s.rate_g));
          break;
        case Scenario::Kind::mixed:
          ts.y.push_back(draw_mixed_g(rng));
          break;
      }
    }
    const double x_min = *std::min_element(ts.x.begin(), ts.x.end());
    const double y_max = *std::max_element(ts.y.begin(), ts.y.end());
    if (y_max <= x_min) continue;
    return ts;
  }
  throw degenerate_order_error("could not draw a non-degenerate data set");
}

double kde_ratio_estimator(const TwoSample& ts, double z, const NuisanceConfig& cfg) {
  validate_two_sample(ts);
  const WeightedKde fhat(ts.x, std::vector<double>(ts.x.size(), 1.0),
                         cfg.kde_bandwidth_f);
  const WeightedKde ghat(ts.y, std::vector<double>(ts.y.size(), 1.0),
                         cfg.kde_bandwidth_g);
  const double g = ghat(z);
  if (!(g > 0.0)) {
    throw undefined_nuisance_error("denominator density estimate vanishes at z");
  }
  return fhat(z) / g;
}

const std::vector<std::string> kStudyMethods = {
    "mle", "kde", "split", "discrete-wald", "theta-wald", "mu-wald-transformed",
    "lrt"};

namespace {

bool is_ci_method(const std::string& m) {
  return m == "discrete-wald" || m == "theta-wald" || m == "mu-wald-transformed" ||
         m == "lrt";
}

// Exact-match sup distance between the fitted and empirical numerator CDFs.
double fstar_sup_diff(const LroFit& fit, const std::vector<double>& x_sample) {
  const StepDistribution fn = ecdf(x_sample);
  double sup = 0.0;
  for (double k : fit.f_star.knots()) {
    sup = std::max(sup, std::fabs(fit.f_star.cdf(k) - fn.cdf(k)));
  }
  for (double k : fn.knots()) {
    sup = std::max(sup, std::fabs(fit.f_star.cdf(k) - fn.cdf(k)));
  }
  return sup;
}

struct RepData {
  bool fit_ok = false;
  std::vector<double> mle;
  double fstar_diff = kNan;
  std::vector<double> kde;
  std::vector<double> split_val, split_lo, split_hi;
  std::vector<std::vector<double>> ci_lo, ci_hi;  // [ci index][z index]
};

struct Accum {
  // Means/medians over finite values with failure accounting.
  static double mean(const std::vector<double>& v) {
    if (v.empty()) return kNan;
    double acc = 0.0;
    for (double x : v) acc += x;
    return acc / static_cast<double>(v.size());
  }
  static double sd(const std::vector<double>& v) {
    if (v.size() < 2) return kNan;
    const double m = mean(v);
    double acc = 0.0;
    for (double x : v) acc += (x - m) * (x - m);
    return std::sqrt(acc / static_cast<double>(v.size() - 1));
  }
  static double median(std::vector<double> v) {
    if (v.empty()) return kNan;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  }
};

}  // namespace

double MonteCarloReport::get(long n, double z, const std::string& method,
                             const std::string& metric) const {
  for (const ReportRow& r : rows) {
    if (r.n == n && r.method == method && r.metric == metric &&
        std::fabs(r.z - z) < 1e-12) {
      return r.value;
    }
  }
  return kNan;
}

namespace {

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

}  // namespace

void MonteCarloReport::write_csv(std::ostream& os) const {
  os << "scenario,n,z,method,metric,value\n";
  for (const ReportRow& r : rows) {
    os << scenario << ',' << r.n << ',' << format_value(r.z) << ',' << r.method
       << ',' << r.metric << ',' << format_value(r.value) << '\n';
  }
}

void MonteCarloReport::write_json(std::ostream& os) const {
  nlohmann::json rows_json = nlohmann::json::array();
  for (const ReportRow& r : rows) {
    nlohmann::json row = {{"n", r.n},
                          {"z", r.z},
                          {"method", r.method},
                          {"metric", r.metric}};
    if (std::isfinite(r.value)) {
      row["value"] = r.value;
    } else {
      row["value"] = format_value(r.value);
    }
    rows_json.push_back(std::move(row));
  }
  const nlohmann::json doc = {
      {"version", 1},
      {"report",
       {{"scenario", scenario},
        {"seed", seed},
        {"replications", replications},
        {"rows", std::move(rows_json)}}}};
  os << doc.dump(2) << '\n';
}

MonteCarloReport run_study(const Scenario& s, const StudyConfig& cfg) {
  if (cfg.replications < 1) {
    throw std::invalid_argument("need at least one replication");
  }
  for (const std::string& m : cfg.methods) {
    if (std::find(kStudyMethods.begin(), kStudyMethods.end(), m) ==
        kStudyMethods.end()) {
      throw std::invalid_argument("unknown study method: " + m);
    }
  }
  const std::vector<double> zs = cfg.z_points.empty() ? s.eval_grid : cfg.z_points;
  const bool want_mle = true;
  const bool want_kde =
      std::find(cfg.methods.begin(), cfg.methods.end(), "kde") != cfg.methods.end();
  const bool want_split =
      std::find(cfg.methods.begin(), cfg.methods.end(), "split") != cfg.methods.end();
  std::vector<std::string> ci_methods;
  for (const std::string& m : cfg.methods) {
    if (is_ci_method(m)) ci_methods.push_back(m);
  }

  MonteCarloReport report;
  report.scenario = s.name;
  report.seed = cfg.seed;
  report.replications = cfg.replications;

  for (std::size_t ni = 0; ni < cfg.n_list.size(); ++ni) {
    const long n = cfg.n_list[ni];
    std::vector<RepData> reps(static_cast<std::size_t>(cfg.replications));

    const auto run_rep = [&](long r) {
      RepData& out = reps[static_cast<std::size_t>(r)];
      CounterRng seeder(cfg.seed, (static_cast<std::uint64_t>(ni) << 32) ^
                                      static_cast<std::uint64_t>(r));
      const std::uint64_t data_seed = seeder.next_u64();
      const std::uint64_t split_seed = seeder.next_u64();
      try {
        const TwoSample ts = sample_scenario(s, n, data_seed);
        const LroFit fit = fit_lro(ts);
        const PooledSample pooled = pool(ts);
        out.fit_ok = true;
        out.mle.resize(zs.size());
        for (std::size_t zi = 0; zi < zs.size(); ++zi) {
          out.mle[zi] = fit.theta_at(zs[zi]);
        }
        out.fstar_diff = fstar_sup_diff(fit, ts.x);
        if (want_kde) {
          out.kde.assign(zs.size(), kNan);
          for (std::size_t zi = 0; zi < zs.size(); ++zi) {
            try {
              out.kde[zi] = kde_ratio_estimator(ts, zs[zi], cfg.nuisance);
            } catch (const std::exception&) {
            }
          }
        }
        if (want_split) {
          out.split_val.assign(zs.size(), kNan);
          out.split_lo.assign(zs.size(), kNan);
          out.split_hi.assign(zs.size(), kNan);
          for (std::size_t zi = 0; zi < zs.size(); ++zi) {
            try {
              const SplitEstimate se = split_fit(ts, zs[zi], cfg.split_m, split_seed);
              const IntervalEstimate ci = split_ci(se, cfg.level);
              out.split_val[zi] = se.mean;
              out.split_lo[zi] = ci.lower;
              out.split_hi[zi] = ci.upper;
            } catch (const std::exception&) {
            }
          }
        }
        out.ci_lo.assign(ci_methods.size(), std::vector<double>(zs.size(), kNan));
        out.ci_hi.assign(ci_methods.size(), std::vector<double>(zs.size(), kNan));
        for (std::size_t mi = 0; mi < ci_methods.size(); ++mi) {
          for (std::size_t zi = 0; zi < zs.size(); ++zi) {
            try {
              IntervalEstimate ci;
              const std::string& method = ci_methods[mi];
              if (method == "discrete-wald") {
                ci = discrete_wald_ci(fit, zs[zi], cfg.level);
              } else if (method == "theta-wald") {
                const double tau = estimate_tau(fit, pooled, zs[zi], cfg.nuisance);
                ci = theta_wald_ci(fit, zs[zi], cfg.level, tau);
              } else if (method == "mu-wald-transformed") {
                ci = mu_wald_transformed_ci(fit, pooled, zs[zi], cfg.level,
                                            cfg.nuisance);
              } else {
                ci = lrt_ci(fit, pooled, zs[zi], cfg.level);
              }
              out.ci_lo[mi][zi] = ci.lower;
              out.ci_hi[mi][zi] = ci.upper;
            } catch (const std::exception&) {
            }
          }
        }
      } catch (const std::exception&) {
        out.fit_ok = false;
      }
    };

    if (cfg.threads <= 1) {
      for (long r = 0; r < cfg.replications; ++r) run_rep(r);
    } else {
      std::vector<std::thread> pool_threads;
      pool_threads.reserve(static_cast<std::size_t>(cfg.threads));
      for (int t = 0; t < cfg.threads; ++t) {
        pool_threads.emplace_back([&, t]() {
          for (long r = t; r < cfg.replications; r += cfg.threads) run_rep(r);
        });
      }
      for (auto& th : pool_threads) th.join();
    }

    // Deterministic reduction in replication order.
    long fit_failures = 0;
    for (const RepData& rd : reps) {
      if (!rd.fit_ok) ++fit_failures;
    }
    report.rows.push_back({n, 0.0, "fit", "failures",
                           static_cast<double>(fit_failures)});

    const double root_n = std::sqrt(static_cast<double>(n));
    const double cbrt_n = std::cbrt(static_cast<double>(n));
    long fstar_equal = 0, fstar_valid = 0;
    for (const RepData& rd : reps) {
      if (!rd.fit_ok) continue;
      ++fstar_valid;
      if (rd.fstar_diff <= 1e-12) ++fstar_equal;
    }
    if (fstar_valid > 0) {
      report.rows.push_back({n, 0.0, "mle", "fstar_eq_fn_frac",
                             static_cast<double>(fstar_equal) /
                                 static_cast<double>(fstar_valid)});
    }

    for (std::size_t zi = 0; zi < zs.size(); ++zi) {
      const double z = zs[zi];
      const double theta0 = true_theta(s, z);

      if (want_mle) {
        std::vector<double> est, abs_err;
        long nonfinite = 0;
        for (const RepData& rd : reps) {
          if (!rd.fit_ok) continue;
          const double v = rd.mle[zi];
          if (std::isfinite(v)) {
            est.push_back(v);
            abs_err.push_back(std::fabs(v - theta0));
          } else {
            ++nonfinite;
          }
        }
        const double bias = Accum::mean(est) - theta0;
        const double sd = Accum::sd(est);
        double mse = kNan;
        if (!est.empty()) {
          mse = 0.0;
          for (double v : est) mse += (v - theta0) * (v - theta0);
          mse /= static_cast<double>(est.size());
        }
        report.rows.push_back({n, z, "mle", "mean", Accum::mean(est)});
        report.rows.push_back({n, z, "mle", "bias", bias});
        report.rows.push_back({n, z, "mle", "sd", sd});
        report.rows.push_back({n, z, "mle", "mse", mse});
        report.rows.push_back({n, z, "mle", "median_abs_error", Accum::median(abs_err)});
        report.rows.push_back({n, z, "mle", "nonfinite", static_cast<double>(nonfinite)});
        if (s.has_mass_at(z) && std::isfinite(sd)) {
          report.rows.push_back(
              {n, z, "mle", "sd_ratio_discrete", root_n * sd / s.discrete_sd(z)});
        }
        if (!s.has_mass_at(z) && s.kind != Scenario::Kind::discrete_poisson &&
            std::isfinite(sd)) {
          const double tau0 = s.continuous_tau(z);
          const double limit_sd =
              std::cbrt(4.0 * tau0) * QuantileTable::embedded().chernoff_sd();
          report.rows.push_back(
              {n, z, "mle", "sd_ratio_continuous", cbrt_n * sd / limit_sd});
        }
      }

      const auto estimator_rows = [&](const std::string& method,
                                      const std::function<double(const RepData&)>& pick) {
        std::vector<double> est;
        std::vector<double> mle_paired;
        long failures = 0;
        for (const RepData& rd : reps) {
          if (!rd.fit_ok) continue;
          const double v = pick(rd);
          if (std::isfinite(v)) {
            est.push_back(v);
            if (std::isfinite(rd.mle[zi])) mle_paired.push_back(rd.mle[zi]);
          } else {
            ++failures;
          }
        }
        const double bias = Accum::mean(est) - theta0;
        double mse = kNan, mse_mle = kNan;
        if (!est.empty()) {
          mse = 0.0;
          for (double v : est) mse += (v - theta0) * (v - theta0);
          mse /= static_cast<double>(est.size());
        }
        if (!mle_paired.empty()) {
          mse_mle = 0.0;
          for (double v : mle_paired) mse_mle += (v - theta0) * (v - theta0);
          mse_mle /= static_cast<double>(mle_paired.size());
        }
        report.rows.push_back({n, z, method, "bias", bias});
        report.rows.push_back({n, z, method, "sd", Accum::sd(est)});
        report.rows.push_back({n, z, method, "mse", mse});
        if (std::isfinite(mse) && std::isfinite(mse_mle) && mse_mle > 0.0) {
          report.rows.push_back({n, z, method, "mse_ratio_vs_mle", mse / mse_mle});
        }
        report.rows.push_back({n, z, method, "failures", static_cast<double>(failures)});
      };

      if (want_kde) {
        estimator_rows("kde", [&](const RepData& rd) { return rd.kde[zi]; });
      }
      if (want_split) {
        estimator_rows("split", [&](const RepData& rd) { return rd.split_val[zi]; });
        long hits = 0, valid = 0, inf_width = 0;
        double width_acc = 0.0;
        long width_count = 0;
        for (const RepData& rd : reps) {
          if (!rd.fit_ok || std::isnan(rd.split_lo[zi])) continue;
          ++valid;
          if (rd.split_lo[zi] <= theta0 && theta0 <= rd.split_hi[zi]) ++hits;
          if (std::isinf(rd.split_hi[zi])) {
            ++inf_width;
          } else {
            width_acc += rd.split_hi[zi] - rd.split_lo[zi];
            ++width_count;
          }
        }
        report.rows.push_back({n, z, "split", "coverage",
                               valid > 0 ? static_cast<double>(hits) / valid : kNan});
        report.rows.push_back({n, z, "split", "mean_width",
                               width_count > 0 ? width_acc / width_count : kNan});
        report.rows.push_back({n, z, "split", "inf_width_frac",
                               valid > 0 ? static_cast<double>(inf_width) / valid : kNan});
      }
      for (std::size_t mi = 0; mi < ci_methods.size(); ++mi) {
        long hits = 0, valid = 0, inf_width = 0, failures = 0;
        double width_acc = 0.0;
        long width_count = 0;
        for (const RepData& rd : reps) {
          if (!rd.fit_ok) continue;
          if (std::isnan(rd.ci_lo[mi][zi])) {
            ++failures;
            continue;
          }
          ++valid;
          if (rd.ci_lo[mi][zi] <= theta0 && theta0 <= rd.ci_hi[mi][zi]) ++hits;
          if (std::isinf(rd.ci_hi[mi][zi])) {
            ++inf_width;
          } else {
            width_acc += rd.ci_hi[mi][zi] - rd.ci_lo[mi][zi];
            ++width_count;
          }
        }
        report.rows.push_back({n, z, ci_methods[mi], "coverage",
                               valid > 0 ? static_cast<double>(hits) / valid : kNan});
        report.rows.push_back({n, z, ci_methods[mi], "mean_width",
                               width_count > 0 ? width_acc / width_count : kNan});
        report.rows.push_back({n, z, ci_methods[mi], "inf_width_frac",
                               valid > 0 ? static_cast<double>(inf_width) / valid : kNan});
        report.rows.push_back({n, z, ci_methods[mi], "failures",
                               static_cast<double>(failures)});
      }
    }
  }
  return report;
}

}  // namespace lro
