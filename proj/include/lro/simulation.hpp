#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lro/estimators.hpp"
#include "lro/inference.hpp"

namespace lro {

// Data-generating design for the numerical studies. The three built-in
// designs: a pair of Poisson laws (rates 6 and 4), a pair of exponential
// laws (rates 1 and 2), and a mixed design with atoms at {0, 0.5, 1} plus a
// continuous part on [0,1] whose ratio of densities is 0.5 + x.
struct Scenario {
  enum class Kind { discrete_poisson, continuous_exponential, mixed };

  Kind kind = Kind::mixed;
  std::string name = "mixed";
  double pi0 = 0.4;
  double rate_f = 0.0;  // Poisson / exponential designs
  double rate_g = 0.0;
  std::vector<double> eval_grid;
  std::vector<double> boundary_points;  // reported but excluded from pass/fail

  static Scenario discrete_poisson();
  static Scenario continuous_exponential();
  static Scenario mixed();
  // Builtin name or a key=value config file path.
  static Scenario from_spec(const std::string& name_or_path);

  bool has_mass_at(double z) const;
  double mass_f(double z) const;   // atom masses (0 at continuity points)
  double mass_g(double z) const;
  double density_f(double z) const;  // continuous-part densities
  double density_g(double z) const;

  // Square-root-rate asymptotic standard deviation from the finite-support
  // theory at an atom z.
  double discrete_sd(double z) const;
  // Cube-root-rate scale tau0 = kappa0 * theta0' at a continuity point.
  double continuous_tau(double z) const;
};

// Analytic ratio function of the design (mass ratio at atoms, density ratio
// at continuity points).
double true_theta(const Scenario& s, double z);

// One synthetic data set: group sizes binomial(n, pi0), then iid draws from
// each group's law. Degenerate draws (an empty group, or an ordering
// violation) are resampled a bounded number of times.
TwoSample sample_scenario(const Scenario& s, long n, std::uint64_t seed);

// Unconstrained comparator: ratio of Gaussian kernel density estimates.
double kde_ratio_estimator(const TwoSample& ts, double z,
                           const NuisanceConfig& cfg = {});

struct StudyConfig {
  std::vector<long> n_list;
  std::vector<std::string> methods;  // subset of the tokens below
  long replications = 500;
  std::uint64_t seed = 1;
  int threads = 1;
  double level = 0.95;
  int split_m = 5;
  std::vector<double> z_points;  // empty = scenario eval_grid
  NuisanceConfig nuisance;
};

// Method tokens understood by run_study.
extern const std::vector<std::string> kStudyMethods;

struct ReportRow {
  long n;
  double z;
  std::string method;
  std::string metric;
  double value;
};

// Long-format results, one row per (n, z, method, metric); deterministic
// for fixed (scenario, seed, n, replications) regardless of thread count.
struct MonteCarloReport {
  std::string scenario;
  std::uint64_t seed = 0;
  long replications = 0;
  std::vector<ReportRow> rows;

  double get(long n, double z, const std::string& method,
             const std::string& metric) const;  // NaN if absent
  void write_csv(std::ostream& os) const;
  void write_json(std::ostream& os) const;
};

MonteCarloReport run_study(const Scenario& s, const StudyConfig& cfg);

}  // namespace lro
