#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "rovar/log_grid.hpp"
#include "rovar/param_expr.hpp"
#include "rovar/ro_analysis.hpp"

namespace rovar {

/// psi(tau) = tau^{-s0/(s1-s0)} phi(tau^{1/(s1-s0)}) for tau >= 1, frozen at
/// phi(1) below 1. Inverse of phi_from_psi on t >= 1.
inline ParamExpr psi_from_phi(const ParamExpr& phi, double s0, double s1) {
  if (!(s0 < s1)) throw invalid_input("psi_from_phi needs s0 < s1");
  const double gap = s1 - s0;
  ParamExpr core = ParamExpr::product(
      ParamExpr::power(-s0 / gap),
      ParamExpr::compose(phi, ParamExpr::power(1.0 / gap)));
  return ParamExpr::extend_below_one(std::move(core));
}

/// phi(t) = t^{s0} psi(t^{s1-s0}) on t >= 1.
inline ParamExpr phi_from_psi(const ParamExpr& psi, double s0, double s1) {
  if (!(s0 < s1)) throw invalid_input("phi_from_psi needs s0 < s1");
  return ParamExpr::product(
      ParamExpr::power(s0),
      ParamExpr::compose(psi, ParamExpr::power(s1 - s0)));
}

/// omega(t) = f(t) psi(g(t)/f(t)). The quotient g/f is spelled with a
/// reciprocal power so the whole composition stays a plain expression.
struct ComposedParam {
  ParamExpr expr;
  std::vector<std::string> warnings;
};

inline ComposedParam reiteration_compose(const ParamExpr& f, const ParamExpr& g,
                                         const ParamExpr& psi) {
  ParamExpr ratio = ParamExpr::product(g, ParamExpr::power_of(f, -1.0));
  ComposedParam out{ParamExpr::product(f, ParamExpr::compose(psi, ratio)), {}};

  // f/g must stay bounded for the derived couple to make sense. A finite
  // sample cannot prove unboundedness, so probe the trend of log(f/g): if it
  // is still climbing across the top decades, flag it.
  const LogGrid grid = LogGrid::uniform(0.0, std::log(1e8), 257);
  double lower_max = neg_inf, upper_max = neg_inf;
  for (std::size_t i = 0; i < grid.x.size(); ++i) {
    const double d = f.log_eval(grid.x[i]) - g.log_eval(grid.x[i]);
    if (grid.x[i] < 0.75 * grid.x.back())
      lower_max = std::max(lower_max, d);
    else
      upper_max = std::max(upper_max, d);
  }
  if (upper_max > lower_max + 0.5)
    out.warnings.push_back("f/g appears unbounded on the sampled range (log ratio still climbing)");
  return out;
}

/// Least concave majorant of a finite sample set: the upper hull (collinear
/// points kept), linear between vertices, end slopes continued outward. Left
/// of the first vertex the tangent is continued; if that tangent is negative
/// at t = 0 the extension (only) is lifted by |value at 0| + 1 so the
/// expression stays positive near 0 while hull vertices keep their sample
/// values. With no lift the result is concave on all of (0, inf); with a
/// lift, concavity holds from the first vertex on.
inline ParamExpr concave_majorant(const std::vector<std::pair<double, double>>& samples) {
  if (samples.size() < 2) throw invalid_input("concave majorant needs at least two samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].first > 0.0) || !(samples[i].second > 0.0))
      throw invalid_input("concave majorant needs positive samples");
    if (i > 0 && !(samples[i].first > samples[i - 1].first))
      throw invalid_input("concave majorant needs strictly increasing abscissae");
  }

  // Upper hull, scanning left to right. A previous point b is discarded only
  // when the new point c lies strictly above chord(a, c); collinear stays.
  std::vector<std::pair<double, double>> hull;
  for (const auto& p : samples) {
    while (hull.size() >= 2) {
      const auto& a = hull[hull.size() - 2];
      const auto& b = hull[hull.size() - 1];
      const double cross = (b.first - a.first) * (p.second - a.second) -
                           (b.second - a.second) * (p.first - a.first);
      if (cross > 0.0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(p);
  }

  std::vector<double> t, v;
  t.reserve(hull.size());
  v.reserve(hull.size());
  for (const auto& p : hull) {
    t.push_back(p.first);
    v.push_back(p.second);
  }
  const double m = t.size() >= 2 ? (v[1] - v[0]) / (t[1] - t[0]) : 0.0;
  const double at_zero = v[0] - m * t[0];
  const double lift = at_zero < 0.0 ? -at_zero + 1.0 : 0.0;
  return ParamExpr::concave_envelope(std::move(t), std::move(v), m, lift);
}

/// Peetre-type sharpness scan: smallest c with
/// psi(t)/psi(tau) <= c max{1, t/tau} over all ordered sampled pairs.
/// Constants live in logs; c_best = exp(log_c_best) may overflow for the
/// appendix sequences (log c ~ 1e3 at k = 5).
struct PseudoconcavityReport {
  double r = 0.0;
  double log_c_best = 0.0;
  double c_best = 1.0;
  double worst_log_t = 0.0, worst_log_tau = 0.0;
  bool passes = true;
  double cap = 0.0;
};

struct PcScanConfig {
  double r = 0.0;       //!< left end of the scanned interval (r, t_max]
  double x_max = 0.0;   //!< log t_max
  int samples = 0;      //!< 0 = automatic
  double cap = 1e6;
  std::vector<double> extra_log_points;  //!< merged into the grid (e.g. sequence pairs)
  double x_floor = std::log(1e-6);       //!< sampling start when r = 0

  static PcScanConfig for_t_max(double r, double t_max, double cap = 1e6) {
    if (!(t_max > 0.0) || !(t_max > r)) throw invalid_input("pseudoconcavity scan needs t_max > r");
    PcScanConfig cfg;
    cfg.r = r;
    cfg.x_max = std::log(t_max);
    cfg.cap = cap;
    return cfg;
  }
};

inline PseudoconcavityReport pseudoconcavity_test(const ParamExpr& psi, const PcScanConfig& cfg) {
  if (!(cfg.r >= 0.0)) throw invalid_input("pseudoconcavity scan needs r >= 0");
  const double x_min = cfg.r > 0.0 ? std::log(cfg.r) : cfg.x_floor;
  if (!(cfg.x_max > x_min)) throw invalid_input("pseudoconcavity scan range is empty");

  int n = cfg.samples;
  if (n == 0) n = (cfg.x_max - x_min) > 200.0 ? 769 : 513;
  LogGrid grid = (cfg.x_max - x_min) > 200.0 ? LogGrid::compressed(x_min, cfg.x_max, n)
                                             : LogGrid::uniform(x_min, cfg.x_max, n);
  if (!cfg.extra_log_points.empty()) {
    for (double p : cfg.extra_log_points)
      if (!(p > x_min) || !(p <= cfg.x_max))
        throw invalid_input("extra scan point outside (r, t_max]");
    grid.add_points(cfg.extra_log_points);
  }

  const std::size_t count = grid.x.size();
  std::vector<double> L(count);
  for (std::size_t i = 0; i < count; ++i) L[i] = psi.log_eval(grid.x[i]);

  PseudoconcavityReport rep;
  rep.r = cfg.r;
  rep.cap = cfg.cap;
  rep.log_c_best = neg_inf;
  for (std::size_t i = 0; i < count; ++i)
    for (std::size_t j = 0; j < count; ++j) {
      const double gap = grid.x[i] - grid.x[j];         // log(t/tau)
      const double excess = L[i] - L[j] - std::max(0.0, gap);
      if (excess > rep.log_c_best) {
        rep.log_c_best = excess;
        rep.worst_log_t = grid.x[i];
        rep.worst_log_tau = grid.x[j];
      }
    }
  rep.c_best = std::exp(rep.log_c_best);
  rep.passes = rep.log_c_best <= std::log(cfg.cap);
  return rep;
}

inline PseudoconcavityReport pseudoconcavity_test(const ParamExpr& psi, double r, double t_max,
                                                  double cap = 1e6) {
  return pseudoconcavity_test(psi, PcScanConfig::for_t_max(r, t_max, cap));
}

}  // namespace rovar
