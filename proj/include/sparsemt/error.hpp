#pragma once

#include <stdexcept>
#include <string>

namespace sparsemt {

/// Raised when a requested error-rate level lies outside what any
/// threshold can attain. `supremum()` is the bound callers may clamp to.
class LevelOutOfRange : public std::out_of_range {
 public:
  LevelOutOfRange(const std::string& what, double supremum)
      : std::out_of_range(what), supremum_(supremum) {}

  double supremum() const noexcept { return supremum_; }

 private:
  double supremum_;
};

namespace detail {

[[noreturn]] void fail_argument(const std::string& message);
[[noreturn]] void fail_domain(const std::string& message);

void require_finite(double x, const char* name);
void require_positive(double x, const char* name);
void require_open_unit(double x, const char* name);

}  // namespace detail
}  // namespace sparsemt
