#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "rovar/logspace.hpp"

namespace rovar {

/// Sample abscissae in x = log t. Two spacings: uniform in x (geometric in t,
/// the default for ranges up to a few hundred) and log-compressed in x for
/// the very large ranges the oscillating appendix parameter needs
/// (x_max ~ 1e6), where a uniform x grid would be hopeless.
struct LogGrid {
  std::vector<double> x;

  static LogGrid uniform(double lo, double hi, int count) {
    check(lo, hi, count);
    LogGrid g;
    g.x.resize(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i)
      g.x[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (count - 1);
    g.x.back() = hi;
    return g;
  }

  /// Uniform in log(1 + x - lo): dense near lo, geometric toward hi.
  static LogGrid compressed(double lo, double hi, int count) {
    check(lo, hi, count);
    LogGrid g;
    g.x.resize(static_cast<std::size_t>(count));
    const double span = std::log1p(hi - lo);
    for (int i = 0; i < count; ++i)
      g.x[static_cast<std::size_t>(i)] = lo + std::expm1(span * i / (count - 1));
    g.x.back() = hi;
    return g;
  }

  /// Merge extra abscissae (deduplicated, kept sorted).
  void add_points(const std::vector<double>& extra) {
    x.insert(x.end(), extra.begin(), extra.end());
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
  }

 private:
  static void check(double lo, double hi, int count) {
    if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi))
      throw invalid_input("grid range must be finite with hi > lo");
    if (count < 2) throw invalid_input("grid needs at least two points");
  }
};

}  // namespace rovar
