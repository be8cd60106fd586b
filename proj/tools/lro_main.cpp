// Command-line front end: data ingestion, estimation, confidence intervals,
// simulation studies, and quantile-table maintenance.

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lro/errors.hpp"
#include "lro/estimators.hpp"
#include "lro/inference.hpp"
#include "lro/quantiles.hpp"
#include "lro/simulation.hpp"

namespace {

using nlohmann::json;

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

bool use_color() {
  return isatty(fileno(stderr)) != 0 && std::getenv("NO_COLOR") == nullptr;
}

void progress(const std::string& msg) {
  if (use_color()) {
    std::cerr << "\x1b[1m" << msg << "\x1b[0m\n";
  } else {
    std::cerr << msg << "\n";
  }
}

// Two-column CSV: header value,group; group labels configurable.
lro::TwoSample read_two_sample_csv(const std::string& path,
                                   const std::string& x_label,
                                   const std::string& y_label) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open input file: " + path);
  }
  lro::TwoSample ts;
  std::string line;
  long line_no = 0;
  bool saw_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto comma = stripped.find(',');
    if (comma == std::string::npos) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": expected value,group");
    }
    const std::string first = trim(stripped.substr(0, comma));
    const std::string second = trim(stripped.substr(comma + 1));
    if (!saw_header) {
      if (lower(first) != "value" || lower(second) != "group") {
        throw std::runtime_error("line " + std::to_string(line_no) +
                                 ": expected header value,group");
      }
      saw_header = true;
      continue;
    }
    double v;
    try {
      std::size_t used = 0;
      v = std::stod(first, &used);
      if (used != first.size()) throw std::invalid_argument(first);
    } catch (const std::exception&) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": unparseable value '" + first + "'");
    }
    if (!std::isfinite(v)) {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": missing or non-finite value rejected");
    }
    const std::string g = lower(second);
    if (g == lower(x_label)) {
      ts.x.push_back(v);
    } else if (g == lower(y_label)) {
      ts.y.push_back(v);
    } else {
      throw std::runtime_error("line " + std::to_string(line_no) +
                               ": unknown group '" + second + "'");
    }
  }
  if (!saw_header) {
    throw std::runtime_error("no observations: input is empty");
  }
  if (ts.x.empty() && ts.y.empty()) {
    throw std::runtime_error("no observations: file has a header but no rows");
  }
  return ts;
}

json value_or_inf(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

double parse_value_or_inf(const json& j) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
    throw std::runtime_error("unexpected string value: " + s);
  }
  return j.get<double>();
}

std::string fmt17(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

json fit_to_json(const lro::LroFit& fit, const lro::OdcDiagram& odc) {
  json theta_levels = json::array();
  for (double l : fit.theta_star.levels()) theta_levels.push_back(value_or_inf(l));
  json odc_points = json::array();
  for (const lro::Point& p : odc.points) odc_points.push_back({p.x, p.y});
  json odc_vertices = json::array();
  for (const lro::Point& p : odc.gcm_vertices) odc_vertices.push_back({p.x, p.y});
  return json{
      {"version", 1},
      {"fit",
       {{"n1", fit.n1},
        {"n2", fit.n2},
        {"pi_n", fit.pi_n},
        {"f_star",
         {{"knots", fit.f_star.knots()},
          {"cdf", fit.f_star.cdf_values()},
          {"masses", fit.f_star.masses()}}},
        {"g_star",
         {{"knots", fit.g_star.knots()},
          {"cdf", fit.g_star.cdf_values()},
          {"masses", fit.g_star.masses()}}},
        {"theta",
         {{"breakpoints", fit.theta_star.breakpoints()},
          {"levels", std::move(theta_levels)}}},
        {"mu", {{"z", fit.pooled_z}, {"fitted", fit.mu_star.fitted}}},
        {"odc",
         {{"points", std::move(odc_points)},
          {"gcm_vertices", std::move(odc_vertices)}}}}}};
}

std::string fit_to_csv(const lro::LroFit& fit, const lro::OdcDiagram& odc) {
  std::ostringstream os;
  os << "component,key,value\n";
  os << "pi_n,," << fmt17(fit.pi_n) << '\n';
  os << "n1,," << fit.n1 << '\n';
  os << "n2,," << fit.n2 << '\n';
  const auto f_masses = fit.f_star.masses();
  for (std::size_t i = 0; i < fit.f_star.knots().size(); ++i) {
    os << "f_star_cdf," << fmt17(fit.f_star.knots()[i]) << ','
       << fmt17(fit.f_star.cdf_values()[i]) << '\n';
    os << "f_star_mass," << fmt17(fit.f_star.knots()[i]) << ','
       << fmt17(f_masses[i]) << '\n';
  }
  const auto g_masses = fit.g_star.masses();
  for (std::size_t i = 0; i < fit.g_star.knots().size(); ++i) {
    os << "g_star_cdf," << fmt17(fit.g_star.knots()[i]) << ','
       << fmt17(fit.g_star.cdf_values()[i]) << '\n';
    os << "g_star_mass," << fmt17(fit.g_star.knots()[i]) << ','
       << fmt17(g_masses[i]) << '\n';
  }
  for (std::size_t i = 0; i < fit.theta_star.levels().size(); ++i) {
    os << "theta_level," << i << ',' << fmt17(fit.theta_star.levels()[i]) << '\n';
  }
  for (std::size_t i = 0; i < fit.theta_star.breakpoints().size(); ++i) {
    os << "theta_breakpoint," << i << ','
       << fmt17(fit.theta_star.breakpoints()[i]) << '\n';
  }
  for (const lro::Point& p : odc.points) {
    os << "odc_point," << fmt17(p.x) << ',' << fmt17(p.y) << '\n';
  }
  for (const lro::Point& p : odc.gcm_vertices) {
    os << "odc_gcm_vertex," << fmt17(p.x) << ',' << fmt17(p.y) << '\n';
  }
  return os.str();
}

void write_output(const std::string& text, const std::string& output) {
  if (output.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(output, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write output file: " + output);
  out << text;
}

// Re-read an emitted fit and compare the ratio-function representation.
void verify_fit_roundtrip(const std::string& text, const std::string& format,
                          const lro::LroFit& fit) {
  std::vector<double> levels, breakpoints;
  if (format == "json") {
    const json doc = json::parse(text);
    for (const json& l : doc.at("fit").at("theta").at("levels")) {
      levels.push_back(parse_value_or_inf(l));
    }
    for (const json& b : doc.at("fit").at("theta").at("breakpoints")) {
      breakpoints.push_back(b.get<double>());
    }
  } else {
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
      std::stringstream row(line);
      std::string component, key, value;
      std::getline(row, component, ',');
      std::getline(row, key, ',');
      std::getline(row, value, ',');
      if (component == "theta_level") {
        levels.push_back(value == "inf" ? std::numeric_limits<double>::infinity()
                                        : std::stod(value));
      } else if (component == "theta_breakpoint") {
        breakpoints.push_back(std::stod(value));
      }
    }
  }
  if (levels != fit.theta_star.levels() ||
      breakpoints != fit.theta_star.breakpoints()) {
    throw std::runtime_error("round-trip check failed: re-read ratio differs");
  }
}

std::vector<double> parse_points(const std::string& csv) {
  std::vector<double> pts;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    pts.push_back(std::stod(trim(tok)));
  }
  return pts;
}

std::vector<long> parse_longs(const std::string& csv) {
  std::vector<long> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    out.push_back(std::stol(trim(tok)));
  }
  return out;
}

std::vector<std::string> parse_tokens(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    out.push_back(trim(tok));
  }
  return out;
}

json interval_to_json(const lro::IntervalEstimate& ci) {
  json nuisances = json::object();
  for (const auto& [k, v] : ci.nuisances) nuisances[k] = value_or_inf(v);
  return json{{"z", ci.z},          {"method", ci.method},
              {"level", ci.level},  {"lower", value_or_inf(ci.lower)},
              {"upper", value_or_inf(ci.upper)}, {"nuisances", std::move(nuisances)}};
}

int cmd_fit(const std::string& input, const std::string& output,
            const std::string& format, const std::string& group_x,
            const std::string& group_y, bool verify) {
  const lro::TwoSample ts = read_two_sample_csv(input, group_x, group_y);
  if (ts.x.empty() || ts.y.empty()) {
    throw std::runtime_error("need observations in both groups");
  }
  const lro::LroFit fit = lro::fit_lro(ts);
  const lro::OdcDiagram odc = lro::odc_diagram(ts);
  const std::string text = format == "json" ? fit_to_json(fit, odc).dump(2) + "\n"
                                            : fit_to_csv(fit, odc);
  if (verify) verify_fit_roundtrip(text, format, fit);
  write_output(text, output);
  return 0;
}

int cmd_ci(const std::string& input, const std::string& output,
           const std::string& format, const std::string& group_x,
           const std::string& group_y, const std::string& method, double level,
           const std::string& points_csv, std::uint64_t seed, int splits,
           const lro::NuisanceConfig& nuisance) {
  const lro::TwoSample ts = read_two_sample_csv(input, group_x, group_y);
  const std::vector<double> points = parse_points(points_csv);
  if (points.empty()) {
    throw std::runtime_error("no evaluation points given");
  }
  const lro::LroFit fit = lro::fit_lro(ts);
  const lro::PooledSample pooled = lro::pool(ts);

  json rows = json::array();
  std::ostringstream csv;
  csv << "z,method,level,lower,upper,note\n";
  for (double z : points) {
    try {
      lro::IntervalEstimate ci;
      if (method == "discrete-wald") {
        ci = lro::discrete_wald_ci(fit, z, level);
      } else if (method == "theta-wald") {
        const double tau = lro::estimate_tau(fit, pooled, z, nuisance);
        ci = lro::theta_wald_ci(fit, z, level, tau);
      } else if (method == "mu-wald-transformed") {
        ci = lro::mu_wald_transformed_ci(fit, pooled, z, level, nuisance);
      } else if (method == "lrt") {
        ci = lro::lrt_ci(fit, pooled, z, level);
      } else {
        const lro::SplitEstimate se = lro::split_fit(ts, z, splits, seed);
        ci = lro::split_ci(se, level);
      }
      rows.push_back(interval_to_json(ci));
      csv << fmt17(z) << ',' << ci.method << ',' << level << ','
          << fmt17(ci.lower) << ',' << fmt17(ci.upper) << ",\n";
    } catch (const lro::unsupported_point_error& e) {
      rows.push_back(json{{"z", z}, {"method", method}, {"unsupported", e.what()}});
      csv << fmt17(z) << ',' << method << ',' << level << ",,,unsupported: "
          << e.what() << '\n';
    }
  }
  const json doc = {{"version", 1}, {"intervals", std::move(rows)}};
  write_output(format == "json" ? doc.dump(2) + "\n" : csv.str(), output);
  return 0;
}

int cmd_simulate(const std::string& scenario_spec, const std::string& n_csv,
                 long reps, std::uint64_t seed, const std::string& methods_csv,
                 double level, int splits, int threads,
                 const std::string& points_csv, const std::string& output) {
  const lro::Scenario scenario = lro::Scenario::from_spec(scenario_spec);
  lro::StudyConfig cfg;
  cfg.n_list = parse_longs(n_csv);
  cfg.methods = parse_tokens(methods_csv);
  cfg.replications = reps;
  cfg.seed = seed;
  cfg.level = level;
  cfg.split_m = splits;
  cfg.threads = threads;
  if (!points_csv.empty()) cfg.z_points = parse_points(points_csv);

  const auto t0 = std::chrono::steady_clock::now();
  progress("[simulate] scenario=" + scenario.name + " reps=" +
           std::to_string(reps) + " n={" + n_csv + "}");
  const lro::MonteCarloReport report = lro::run_study(scenario, cfg);
  const auto dt =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0);
  progress("[simulate] done in " + std::to_string(dt.count()) + " s");

  std::ofstream csv(output + ".csv", std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + output + ".csv");
  report.write_csv(csv);
  std::ofstream js(output + ".json", std::ios::binary);
  if (!js) throw std::runtime_error("cannot write " + output + ".json");
  report.write_json(js);
  return 0;
}

int cmd_quantile_table(const std::string& output, long chernoff_reps,
                       long lrt_reps, std::uint64_t seed, int threads) {
  lro::ChernoffOracleParams cp;
  lro::LrtOracleParams lp;
  if (chernoff_reps > 0) cp.replications = chernoff_reps;
  if (lrt_reps > 0) lp.replications = lrt_reps;
  if (seed != 0) {
    cp.seed = seed;
    lp.seed = seed + 1;
  }
  cp.threads = threads;
  lp.threads = threads;

  progress("[quantile-table] argmax law: " + std::to_string(cp.replications) +
           " paths");
  double sd = 0.0;
  const auto cq =
      lro::simulate_chernoff_quantiles(lro::default_quantile_levels(), cp, &sd);
  progress("[quantile-table] likelihood-ratio limit: " +
           std::to_string(lp.replications) + " paths");
  const auto ld = lro::simulate_lrt_quantiles(lro::default_quantile_levels(), lp);
  const lro::QuantileTable table(cq, ld, sd);

  std::ostringstream os;
  lro::write_quantile_table(os, table, cp, lp);
  write_output(os.str(), output);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Order-restricted two-sample distribution and density-ratio "
               "estimation with pointwise confidence intervals"};
  app.require_subcommand(1);

  std::string input, output, format = "json", group_x = "x", group_y = "y";
  std::string method = "lrt", points_csv, scenario_spec = "mixed";
  std::string n_csv = "1000", methods_csv = "mle";
  double level = 0.95;
  std::uint64_t seed = 1;
  int splits = 5;
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  long reps = 500, chernoff_reps = 0, lrt_reps = 0;
  bool verify = false;
  lro::NuisanceConfig nuisance;

  CLI::App* fit = app.add_subcommand("fit", "estimate the ordered model from a CSV");
  fit->add_option("--input", input, "CSV with header value,group")->required();
  fit->add_option("--output", output, "output path (default stdout)");
  fit->add_option("--format", format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  fit->add_option("--group-x", group_x, "group label of the numerator sample");
  fit->add_option("--group-y", group_y, "group label of the denominator sample");
  fit->add_flag("--verify-roundtrip", verify,
                "re-read the emitted output and check the ratio survives");

  CLI::App* ci = app.add_subcommand("ci", "pointwise confidence intervals");
  ci->add_option("--input", input)->required();
  ci->add_option("--output", output);
  ci->add_option("--format", format)->check(CLI::IsMember({"json", "csv"}));
  ci->add_option("--group-x", group_x);
  ci->add_option("--group-y", group_y);
  ci->add_option("--method", method,
                 "discrete-wald | theta-wald | mu-wald-transformed | lrt | split")
      ->check(CLI::IsMember({"discrete-wald", "theta-wald", "mu-wald-transformed",
                             "lrt", "split"}));
  ci->add_option("--level", level)->check(CLI::Range(1e-9, 1.0 - 1e-9));
  ci->add_option("--points", points_csv, "comma-separated evaluation points")
      ->required();
  ci->add_option("--seed", seed);
  ci->add_option("--splits", splits)->check(CLI::Range(2, 1000));
  ci->add_option("--slope-constant", nuisance.slope_window_constant,
                 "difference-quotient window constant");
  ci->add_option("--bandwidth-f", nuisance.kde_bandwidth_f);
  ci->add_option("--bandwidth-g", nuisance.kde_bandwidth_g);
  ci->add_option("--bandwidth-h", nuisance.kde_bandwidth_h);

  CLI::App* sim = app.add_subcommand("simulate", "Monte Carlo study");
  sim->add_option("--scenario", scenario_spec,
                  "mixed | discrete-poisson | continuous-exponential | config path");
  sim->add_option("--n", n_csv, "comma-separated sample sizes");
  sim->add_option("--reps", reps)->check(CLI::PositiveNumber);
  sim->add_option("--seed", seed);
  sim->add_option("--methods", methods_csv,
                  "comma-separated: mle,kde,split,discrete-wald,theta-wald,"
                  "mu-wald-transformed,lrt");
  sim->add_option("--level", level)->check(CLI::Range(1e-9, 1.0 - 1e-9));
  sim->add_option("--splits", splits)->check(CLI::Range(2, 1000));
  sim->add_option("--threads", threads)->check(CLI::PositiveNumber);
  sim->add_option("--points", points_csv, "override the scenario grid");
  sim->add_option("--output", output, "output prefix for .csv and .json")
      ->required();

  CLI::App* qt =
      app.add_subcommand("quantile-table", "regenerate the quantile table");
  qt->add_option("--output", output, "table path (default stdout)");
  qt->add_option("--chernoff-reps", chernoff_reps, "0 = default");
  qt->add_option("--lrt-reps", lrt_reps, "0 = default");
  qt->add_option("--seed", seed, "0 = committed default seeds")
      ->default_val(std::uint64_t{0});
  qt->add_option("--threads", threads)->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) {
      return cmd_fit(input, output, format, group_x, group_y, verify);
    }
    if (ci->parsed()) {
      return cmd_ci(input, output, format, group_x, group_y, method, level,
                    points_csv, seed, splits, nuisance);
    }
    if (sim->parsed()) {
      return cmd_simulate(scenario_spec, n_csv, reps, seed, methods_csv, level,
                          splits, threads, points_csv, output);
    }
    if (qt->parsed()) {
      return cmd_quantile_table(output, chernoff_reps, lrt_reps, seed, threads);
    }
  } catch (const lro::degenerate_order_error& e) {
    std::cerr << "error: " << e.what()
              << " (the model assumes some x lies strictly below some y)\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
