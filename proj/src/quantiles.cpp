#include "lro/quantiles.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lro/geometry.hpp"
#include "lro/rng.hpp"

namespace lro {

namespace {

double lookup(const std::map<double, double>& m, double level, const char* what) {
  auto it = m.lower_bound(level - 1e-9);
  if (it == m.end() || std::fabs(it->first - level) > 1e-9) {
    throw std::invalid_argument(std::string("level not tabulated for ") + what);
  }
  return it->second;
}

std::map<double, double> quantiles_of(std::vector<double>& draws,
                                      const std::vector<double>& levels) {
  std::sort(draws.begin(), draws.end());
  std::map<double, double> out;
  for (double p : levels) {
    if (!(p > 0.0 && p < 1.0)) {
      throw std::invalid_argument("quantile levels must lie in (0,1)");
    }
    const double pos = p * static_cast<double>(draws.size() - 1);
    const std::size_t i = static_cast<std::size_t>(pos);
    const double frac = pos - static_cast<double>(i);
    const double q = (i + 1 < draws.size())
                         ? draws[i] + frac * (draws[i + 1] - draws[i])
                         : draws.back();
    out[p] = q;
  }
  return out;
}

void parallel_reps(long replications, int threads,
                   const std::function<void(long)>& body) {
  if (threads <= 1) {
    for (long r = 0; r < replications; ++r) body(r);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&, t]() {
      for (long r = t; r < replications; r += threads) body(r);
    });
  }
  for (auto& th : pool) th.join();
}

// One argmax draw of the drifted two-sided random walk.
double chernoff_statistic(CounterRng& rng, double truncation, double step) {
  const long k = static_cast<long>(std::llround(truncation / step));
  const double s = std::sqrt(step);
  double best = 0.0;
  double best_u = 0.0;
  double w = 0.0;
  for (long i = 1; i <= k; ++i) {
    const double u = static_cast<double>(i) * step;
    w += s * rng.next_normal();
    const double v = w - u * u;
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  w = 0.0;
  for (long i = 1; i <= k; ++i) {
    const double u = -static_cast<double>(i) * step;
    w += s * rng.next_normal();
    const double v = w - u * u;
    if (v > best) {
      best = v;
      best_u = u;
    }
  }
  return best_u;
}

// Integral of squared hull slopes over the grid span, slopes optionally
// clamped from one side.
enum class Clamp { none, above_zero, below_zero };

double squared_slope_integral(const std::vector<Point>& pts, Clamp clamp) {
  const PiecewiseLinearFn hull = gcm(PointSet(pts));
  const auto& v = hull.vertices();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    double slope = (v[i + 1].y - v[i].y) / (v[i + 1].x - v[i].x);
    if (clamp == Clamp::above_zero) slope = std::min(slope, 0.0);
    if (clamp == Clamp::below_zero) slope = std::max(slope, 0.0);
    acc += slope * slope * (v[i + 1].x - v[i].x);
  }
  return acc;
}

double lrt_statistic(CounterRng& rng, double truncation, double step) {
  const long k = static_cast<long>(std::llround(truncation / step));
  const long n = 2 * k + 1;
  const double s = std::sqrt(step);
  std::vector<Point> pts(static_cast<std::size_t>(n));
  const auto t_at = [&](long i) { return static_cast<double>(i - k) * step; };
  pts[static_cast<std::size_t>(k)] = {0.0, 0.0};
  double w = 0.0;
  for (long i = k + 1; i < n; ++i) {
    w += s * rng.next_normal();
    const double t = t_at(i);
    pts[static_cast<std::size_t>(i)] = {t, w + t * t};
  }
  w = 0.0;
  for (long i = k - 1; i >= 0; --i) {
    w += s * rng.next_normal();
    const double t = t_at(i);
    pts[static_cast<std::size_t>(i)] = {t, w + t * t};
  }
  const std::vector<Point> left(pts.begin(), pts.begin() + k + 1);
  const std::vector<Point> right(pts.begin() + k, pts.end());
  const double unconstrained = squared_slope_integral(pts, Clamp::none);
  const double constrained = squared_slope_integral(left, Clamp::above_zero) +
                             squared_slope_integral(right, Clamp::below_zero);
  return std::max(0.0, unconstrained - constrained);
}

}  // namespace

QuantileTable::QuantileTable(std::map<double, double> chernoff_q,
                             std::map<double, double> lrt_d, double chernoff_sd)
    : chernoff_q_(std::move(chernoff_q)),
      lrt_d_(std::move(lrt_d)),
      chernoff_sd_(chernoff_sd) {}

double QuantileTable::chernoff(double level) const {
  return lookup(chernoff_q_, level, "the argmax law");
}

double QuantileTable::lrt(double level) const {
  return lookup(lrt_d_, level, "the likelihood-ratio limit");
}

const std::vector<double>& default_quantile_levels() {
  static const std::vector<double> levels = {0.5,  0.75, 0.8,   0.85, 0.9,
                                             0.95, 0.975, 0.99, 0.995};
  return levels;
}

// Values produced by the two oracles above at the default parameters; the
// maintenance command regenerates data/quantile_table.txt with the same
// numbers.
const QuantileTable& QuantileTable::embedded() {
  static const QuantileTable table(
      {{0.5, 0.000000},
       {0.75, 0.354000},
       {0.8, 0.440000},
       {0.85, 0.540000},
       {0.9, 0.664000},
       {0.95, 0.844000},
       {0.975, 0.998000},
       {0.99, 1.172000},
       {0.995, 1.284000}},
      {{0.5, 0.279770},
       {0.75, 0.789217},
       {0.8, 0.974325},
       {0.85, 1.223478},
       {0.9, 1.586340},
       {0.95, 2.242857},
       {0.975, 2.927814},
       {0.99, 3.849646},
       {0.995, 4.604967}},
      0.513423);
  return table;
}

std::map<double, double> simulate_chernoff_quantiles(
    const std::vector<double>& levels, const ChernoffOracleParams& params,
    double* sd_out) {
  std::vector<double> draws(static_cast<std::size_t>(params.replications));
  parallel_reps(params.replications, params.threads, [&](long r) {
    CounterRng rng(params.seed, static_cast<std::uint64_t>(r));
    draws[static_cast<std::size_t>(r)] =
        chernoff_statistic(rng, params.truncation, params.grid_step);
  });
  if (sd_out != nullptr) {
    double mean = 0.0;
    for (double d : draws) mean += d;
    mean /= static_cast<double>(draws.size());
    double var = 0.0;
    for (double d : draws) var += (d - mean) * (d - mean);
    var /= static_cast<double>(draws.size() - 1);
    *sd_out = std::sqrt(var);
  }
  return quantiles_of(draws, levels);
}

std::map<double, double> simulate_lrt_quantiles(const std::vector<double>& levels,
                                                const LrtOracleParams& params) {
  std::vector<double> draws(static_cast<std::size_t>(params.replications));
  parallel_reps(params.replications, params.threads, [&](long r) {
    CounterRng rng(params.seed, static_cast<std::uint64_t>(r));
    draws[static_cast<std::size_t>(r)] =
        lrt_statistic(rng, params.truncation, params.grid_step);
  });
  return quantiles_of(draws, levels);
}

void write_quantile_table(std::ostream& os, const QuantileTable& table,
                          const ChernoffOracleParams& cp, const LrtOracleParams& lp) {
  char buf[256];
  os << "# quantile table, key=value\n";
  std::snprintf(buf, sizeof(buf),
                "# generator: argmax-law truncation=%g grid_step=%g replications=%ld seed=%llu\n",
                cp.truncation, cp.grid_step, cp.replications,
                static_cast<unsigned long long>(cp.seed));
  os << buf;
  std::snprintf(buf, sizeof(buf),
                "# generator: lrt-limit truncation=%g grid_step=%g replications=%ld seed=%llu\n",
                lp.truncation, lp.grid_step, lp.replications,
                static_cast<unsigned long long>(lp.seed));
  os << buf;
  const ChernoffOracleParams default_cp;
  const LrtOracleParams default_lp;
  const bool reduced = cp.replications < default_cp.replications ||
                       lp.replications < default_lp.replications;
  os << "# precision: " << (reduced ? "reduced (fewer replications than default; "
                                      "expect wider Monte Carlo tolerance)"
                                    : "full")
     << "\n";
  os << "version=1\n";
  std::snprintf(buf, sizeof(buf), "chernoff.sd=%.6f\n", table.chernoff_sd());
  os << buf;
  for (const auto& [level, q] : table.chernoff_map()) {
    std::snprintf(buf, sizeof(buf), "chernoff.q.%g=%.6f\n", level, q);
    os << buf;
  }
  for (const auto& [level, d] : table.lrt_map()) {
    std::snprintf(buf, sizeof(buf), "lrt.d.%g=%.6f\n", level, d);
    os << buf;
  }
}

QuantileTable read_quantile_table(std::istream& is) {
  std::map<double, double> cq, ld;
  double sd = 0.0;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("malformed table line: " + line);
    }
    const std::string key = line.substr(0, eq);
    const double value = std::stod(line.substr(eq + 1));
    if (key == "version") {
      continue;
    } else if (key == "chernoff.sd") {
      sd = value;
    } else if (key.rfind("chernoff.q.", 0) == 0) {
      cq[std::stod(key.substr(11))] = value;
    } else if (key.rfind("lrt.d.", 0) == 0) {
      ld[std::stod(key.substr(6))] = value;
    } else {
      throw std::invalid_argument("unknown table key: " + key);
    }
  }
  if (cq.empty() || ld.empty()) {
    throw std::invalid_argument("quantile table missing entries");
  }
  return QuantileTable(std::move(cq), std::move(ld), sd);
}

}  // namespace lro
