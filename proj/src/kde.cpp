#include "lro/kde.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lro/errors.hpp"

namespace lro {

namespace {

// Weighted quantile of sorted (point, weight) data, lower interpolation.
double weighted_quantile(const std::vector<double>& pts,
                         const std::vector<double>& w, double total, double p) {
  const double target = p * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    acc += w[i];
    if (acc >= target) return pts[i];
  }
  return pts.back();
}

}  // namespace

WeightedKde::WeightedKde(std::vector<double> points, std::vector<double> weights,
                         double bandwidth)
    : points_(std::move(points)), weights_(std::move(weights)) {
  if (points_.empty() || points_.size() != weights_.size()) {
    throw std::invalid_argument("kde needs matching non-empty points and weights");
  }
  std::vector<std::size_t> order(points_.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return points_[a] < points_[b]; });
  std::vector<double> sp(points_.size()), sw(points_.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    sp[i] = points_[order[i]];
    sw[i] = weights_[order[i]];
    if (!(sw[i] >= 0.0)) throw std::invalid_argument("kde weights must be non-negative");
  }
  points_ = std::move(sp);
  weights_ = std::move(sw);
  total_weight_ = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  if (!(total_weight_ > 0.0)) {
    throw std::invalid_argument("kde needs positive total weight");
  }

  if (bandwidth > 0.0) {
    bandwidth_ = bandwidth;
    return;
  }
  double mean = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) mean += weights_[i] * points_[i];
  mean /= total_weight_;
  double var = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double d = points_[i] - mean;
    var += weights_[i] * d * d;
  }
  var /= total_weight_;
  const double sd = std::sqrt(var);
  const double iqr = weighted_quantile(points_, weights_, total_weight_, 0.75) -
                     weighted_quantile(points_, weights_, total_weight_, 0.25);
  double spread = std::min(sd, iqr / 1.34);
  if (!(spread > 0.0)) spread = std::max(sd, iqr / 1.34);
  if (!(spread > 0.0)) {
    throw undefined_nuisance_error("degenerate sample: zero spread, no usable bandwidth");
  }
  bandwidth_ = 0.9 * spread * std::pow(total_weight_, -0.2);
}

double WeightedKde::operator()(double z) const {
  static const double inv_sqrt_2pi = 0.3989422804014327;
  double acc = 0.0;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double u = (z - points_[i]) / bandwidth_;
    acc += weights_[i] * std::exp(-0.5 * u * u);
  }
  return acc * inv_sqrt_2pi / (total_weight_ * bandwidth_);
}

}  // namespace lro
