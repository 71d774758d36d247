#pragma once

#include <stdexcept>
#include <string>

namespace covtest {

// Thrown by the Cholesky factorization when a pivot falls below the
// positive-definiteness threshold.  For pooled scatter matrices this is the
// signal that p >= n1 + n2 (or that centering collapsed the rank).
class NotPositiveDefinite : public std::runtime_error {
 public:
  NotPositiveDefinite(int pivot_index, double pivot_value)
      : std::runtime_error("matrix not positive definite at pivot " +
                           std::to_string(pivot_index + 1) +
                           " (value " + std::to_string(pivot_value) + ")"),
        pivot(pivot_index),
        value(pivot_value) {}

  int pivot;     // 0-based index of the failing pivot
  double value;  // the offending pivot value
};

// Thrown when an iterative routine exhausts its iteration budget.
class NonConvergence : public std::runtime_error {
 public:
  explicit NonConvergence(const std::string& what)
      : std::runtime_error(what) {}
};

}  // namespace covtest
