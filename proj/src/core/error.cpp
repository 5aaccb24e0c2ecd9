#include "sparsemt/error.hpp"

#include <cmath>

namespace sparsemt::detail {

void fail_argument(const std::string& message) {
  throw std::invalid_argument(message);
}

void fail_domain(const std::string& message) {
  throw std::domain_error(message);
}

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    fail_argument(std::string(name) + " must be finite");
  }
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || std::isnan(x)) {
    fail_argument(std::string(name) + " must be > 0");
  }
}

void require_open_unit(double x, const char* name) {
  if (!(x > 0.0 && x < 1.0)) {
    fail_argument(std::string(name) + " must lie in (0, 1)");
  }
}

}  // namespace sparsemt::detail
