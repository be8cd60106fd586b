#pragma once

#include <cstddef>
#include <vector>

namespace lro {

// Responses in [0,1] with positive weights, ordered by an implicit strictly
// increasing predictor.
struct WeightedSeries {
  std::vector<double> values;
  std::vector<double> weights;
};

// Maximal constant level set [begin, end) of an isotonic fit.
struct IsotonicBlock {
  std::size_t begin;
  std::size_t end;
  double mean;    // fitted level
  double weight;  // total weight of the block
};

struct IsotonicFit {
  std::vector<double> fitted;
  std::vector<IsotonicBlock> blocks;
};

// Weighted isotonic regression of the series: the unique minimizer of
// sum w_k (t_k - r_k)^2 over non-decreasing r, equivalently the binomial
// likelihood maximizer for responses in [0,1]. Pool-adjacent-violators with
// a block stack; adjacent blocks with equal means are merged.
IsotonicFit pava(const WeightedSeries& series);

// Isotonic regression constrained to r_k <= bound for k < split and
// r_k >= bound for k >= split: each side is fitted unconstrained and then
// clamped at the bound, which is the exact constrained projection.
IsotonicFit pava_bounded(const WeightedSeries& series, std::size_t split,
                         double bound);

// Binomial log likelihood sum w_k [t_k log r_k + (1-t_k) log(1-r_k)] of
// fitted values against the series, with the 0 log 0 = 0 convention.
// Returns -infinity if an impossible value is assigned positive response.
double binomial_log_likelihood(const WeightedSeries& series,
                               const std::vector<double>& fitted);

}  // namespace lro
