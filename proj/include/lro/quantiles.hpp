#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace lro {

// Quantiles of the two pivotal limit laws used by the interval methods:
// chernoff_q holds quantiles of the location of the maximum of a two-sided
// standard Brownian motion minus a parabola; lrt_d holds quantiles of the
// pivotal limit of twice a log likelihood ratio for a pointwise monotone
// hypothesis. Both are Monte Carlo build artifacts with recorded generator
// parameters.
class QuantileTable {
 public:
  QuantileTable() = default;
  QuantileTable(std::map<double, double> chernoff_q, std::map<double, double> lrt_d,
                double chernoff_sd);

  // Lookup with exact level match (1e-9 slack); throws std::invalid_argument
  // for levels that are not tabulated.
  double chernoff(double level) const;
  double lrt(double level) const;
  double chernoff_sd() const { return chernoff_sd_; }

  const std::map<double, double>& chernoff_map() const { return chernoff_q_; }
  const std::map<double, double>& lrt_map() const { return lrt_d_; }

  // Table compiled into the library; matches data/quantile_table.txt.
  static const QuantileTable& embedded();

 private:
  std::map<double, double> chernoff_q_;
  std::map<double, double> lrt_d_;
  double chernoff_sd_ = 0.0;
};

struct ChernoffOracleParams {
  double truncation = 3.0;   // simulate the process on [-truncation, truncation]
  double grid_step = 0.002;
  long replications = 300000;
  std::uint64_t seed = 811210201;
  int threads = 1;
};

struct LrtOracleParams {
  double truncation = 5.0;
  double grid_step = 0.005;
  long replications = 150000;
  std::uint64_t seed = 811210202;
  int threads = 1;
};

// Monte Carlo oracle for the argmax law: per path, a two-sided Brownian
// motion from zero on a grid, drifted by -u^2; the statistic is the argmax
// location. Returns quantiles at the requested levels; optionally reports
// the sampled standard deviation.
std::map<double, double> simulate_chernoff_quantiles(
    const std::vector<double>& levels, const ChernoffOracleParams& params,
    double* sd_out = nullptr);

// Monte Carlo oracle for the pivotal likelihood-ratio limit: per path,
// slope processes of the convex minorant of W(t) + t^2 with and without the
// sign constraint at zero; the statistic is the integrated difference of
// squared slopes.
std::map<double, double> simulate_lrt_quantiles(const std::vector<double>& levels,
                                                const LrtOracleParams& params);

// Default levels tabulated by the maintenance command and the embedded table.
const std::vector<double>& default_quantile_levels();

// Plain-text key=value serialization with a commented header recording the
// generator parameters. `reduced_precision` flags tables generated with
// fewer replications than the defaults.
void write_quantile_table(std::ostream& os, const QuantileTable& table,
                          const ChernoffOracleParams& cp, const LrtOracleParams& lp);
QuantileTable read_quantile_table(std::istream& is);

}  // namespace lro
