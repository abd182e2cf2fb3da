#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace rovar {

/// Malformed or out-of-contract input (bad node data, odd grid sizes, ...).
class invalid_input : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A function was asked for a value outside the domain where it is positive
/// and finite (e.g. 1 + log t at t < 1/e, an envelope past its zero crossing).
class eval_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numeric routine could not reach its accuracy contract (singular solve,
/// iteration cap, ...). The message carries a condition or residual estimate.
class numerical_failure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();
inline constexpr double pos_inf = std::numeric_limits<double>::infinity();

/// log(e^a + e^b), safe for widely separated magnitudes and -inf inputs.
inline double log_add_exp(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  const double hi = a > b ? a : b;
  const double lo = a > b ? b : a;
  return hi + std::log1p(std::exp(lo - hi));
}

/// Neumaier-compensated accumulator. Keeps long norm sums at O(eps) relative
/// error independent of term count and ordering magnitude spread.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace rovar
