#include "lro/isotonic.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace lro {

namespace {

void check_series(const WeightedSeries& s) {
  if (s.values.empty()) {
    throw std::invalid_argument("empty series");
  }
  if (s.values.size() != s.weights.size()) {
    throw std::invalid_argument("values and weights differ in length");
  }
  for (std::size_t k = 0; k < s.values.size(); ++k) {
    if (!(s.weights[k] > 0.0)) {
      throw std::invalid_argument("weights must be positive");
    }
    if (!(s.values[k] >= 0.0 && s.values[k] <= 1.0)) {
      throw std::invalid_argument("values must lie in [0,1]");
    }
  }
}

struct RawBlock {
  std::size_t begin;
  std::size_t end;
  double sum_wt;  // sum of w*t
  double sum_w;
};

// Means compared via cross-multiplication; a violation is a strictly
// decreasing pair, so equal means merge into one block.
std::vector<RawBlock> pava_blocks(const WeightedSeries& s, std::size_t lo,
                                  std::size_t hi) {
  std::vector<RawBlock> stack;
  for (std::size_t k = lo; k < hi; ++k) {
    RawBlock b{k, k + 1, s.weights[k] * s.values[k], s.weights[k]};
    while (!stack.empty() &&
           stack.back().sum_wt * b.sum_w >= b.sum_wt * stack.back().sum_w) {
      b.begin = stack.back().begin;
      b.sum_wt += stack.back().sum_wt;
      b.sum_w += stack.back().sum_w;
      stack.pop_back();
    }
    stack.push_back(b);
  }
  return stack;
}

IsotonicFit fit_from_levels(const std::vector<RawBlock>& raw,
                            const std::vector<double>& levels,
                            std::size_t n) {
  IsotonicFit fit;
  fit.fitted.resize(n);
  fit.blocks.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const RawBlock& b = raw[i];
    for (std::size_t k = b.begin; k < b.end; ++k) fit.fitted[k] = levels[i];
    if (!fit.blocks.empty() && fit.blocks.back().mean == levels[i]) {
      fit.blocks.back().end = b.end;
      fit.blocks.back().weight += b.sum_w;
    } else {
      fit.blocks.push_back({b.begin, b.end, levels[i], b.sum_w});
    }
  }
  return fit;
}

}  // namespace

IsotonicFit pava(const WeightedSeries& series) {
  check_series(series);
  const auto raw = pava_blocks(series, 0, series.values.size());
  std::vector<double> levels(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    levels[i] = raw[i].sum_wt / raw[i].sum_w;
  }
  return fit_from_levels(raw, levels, series.values.size());
}

IsotonicFit pava_bounded(const WeightedSeries& series, std::size_t split,
                         double bound) {
  check_series(series);
  const std::size_t n = series.values.size();
  if (split > n) {
    throw std::invalid_argument("split out of range");
  }
  if (!(bound >= 0.0 && bound <= 1.0)) {
    throw std::invalid_argument("bound must lie in [0,1]");
  }
  auto left = pava_blocks(series, 0, split);
  auto right = pava_blocks(series, split, n);
  std::vector<RawBlock> raw;
  std::vector<double> levels;
  raw.reserve(left.size() + right.size());
  levels.reserve(left.size() + right.size());
  for (const RawBlock& b : left) {
    raw.push_back(b);
    levels.push_back(std::min(b.sum_wt / b.sum_w, bound));
  }
  for (const RawBlock& b : right) {
    raw.push_back(b);
    levels.push_back(std::max(b.sum_wt / b.sum_w, bound));
  }
  return fit_from_levels(raw, levels, n);
}

double binomial_log_likelihood(const WeightedSeries& series,
                               const std::vector<double>& fitted) {
  check_series(series);
  if (fitted.size() != series.values.size()) {
    throw std::invalid_argument("fitted length mismatch");
  }
  double ll = 0.0;
  for (std::size_t k = 0; k < fitted.size(); ++k) {
    const double t = series.values[k];
    const double w = series.weights[k];
    const double r = fitted[k];
    if (t > 0.0) {
      if (r <= 0.0) return -std::numeric_limits<double>::infinity();
      ll += w * t * std::log(r);
    }
    if (t < 1.0) {
      if (r >= 1.0) return -std::numeric_limits<double>::infinity();
      ll += w * (1.0 - t) * std::log(1.0 - r);
    }
  }
  return ll;
}

}  // namespace lro
