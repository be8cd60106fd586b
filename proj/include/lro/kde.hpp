#pragma once

#include <vector>

namespace lro {

// Gaussian kernel density estimate over weighted support points. A zero
// bandwidth request selects Silverman's rule of thumb
// 0.9 * min(sd, iqr/1.34) * n^{-1/5} with n the total weight.
class WeightedKde {
 public:
  WeightedKde(std::vector<double> points, std::vector<double> weights,
              double bandwidth = 0.0);

  double operator()(double z) const;
  double bandwidth() const { return bandwidth_; }

 private:
  std::vector<double> points_;
  std::vector<double> weights_;
  double total_weight_ = 0.0;
  double bandwidth_ = 0.0;
};

}  // namespace lro
