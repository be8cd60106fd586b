#pragma once

#include <stdexcept>
#include <string>

namespace lro {

// The two-sample ordering assumption fails: the largest distinct y value
// lies at or below the smallest distinct x value, so no ordered fit exists.
class degenerate_order_error : public std::invalid_argument {
 public:
  explicit degenerate_order_error(const std::string& msg)
      : std::invalid_argument(msg) {}
};

// A nuisance quantity needed by an interval method is undefined at the
// requested point (zero fitted mass, zero density estimate, ...).
class undefined_nuisance_error : public std::runtime_error {
 public:
  explicit undefined_nuisance_error(const std::string& msg)
      : std::runtime_error(msg) {}
};

// The requested evaluation point lies outside the region the method supports.
class unsupported_point_error : public std::runtime_error {
 public:
  explicit unsupported_point_error(const std::string& msg)
      : std::runtime_error(msg) {}
};

}  // namespace lro
