#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "rovar/log_grid.hpp"
#include "rovar/param_expr.hpp"

namespace rovar {

/// Scan layout for growth-envelope analysis. The range is held in
/// x = log t so that appendix-scale ranges (log t up to 1e6) are expressible;
/// for_t_max() is sugar for the common materializable case.
struct RoScanConfig {
  double x_min = 0.0;
  double x_max = std::log(1e8);
  int samples = 0;                //!< 0 = automatic density (64 per decade of t)
  double lambda_min = 2.0;        //!< smallest ratio step entering index slopes
  double anchor_fraction = 0.5;   //!< slope anchors restricted to the top part of the range
  double log_cap = std::log(1e8);  //!< admissible log of the envelope constant
  bool compressed = false;        //!< log-compressed spacing (set for huge ranges)

  static RoScanConfig for_t_max(double t_max, int samples = 0) {
    if (!(t_max >= 10.0)) throw invalid_input("scan needs t_max >= 10");
    RoScanConfig cfg;
    cfg.x_max = std::log(t_max);
    cfg.samples = samples;
    return cfg;
  }

  static RoScanConfig for_log_range(double x_max, int samples = 0) {
    if (!(x_max >= std::log(10.0))) throw invalid_input("scan needs log t_max >= log 10");
    RoScanConfig cfg;
    cfg.x_max = x_max;
    cfg.samples = samples;
    cfg.compressed = x_max > 200.0;
    return cfg;
  }

  LogGrid build_grid() const {
    int n = samples;
    if (n == 0) {
      if (compressed) {
        n = 1025;
      } else {
        const double decades = (x_max - x_min) / std::log(10.0);
        n = static_cast<int>(std::lround(64.0 * decades)) + 1;
        n = std::max(129, std::min(2049, n));
      }
    }
    if (n < 64) throw invalid_input("scan needs at least 64 samples");
    return compressed ? LogGrid::compressed(x_min, x_max, n)
                      : LogGrid::uniform(x_min, x_max, n);
  }

  std::string describe() const {
    char buf[160];
    std::snprintf(buf, sizeof buf, "x in [%.6g, %.6g], %s spacing, lambda_min %.3g, anchors above %.6g",
                  x_min, x_max, compressed ? "log-compressed" : "uniform", lambda_min,
                  x_min + anchor_fraction * (x_max - x_min));
    return buf;
  }
};

/// A sampled (t, lambda) pair, stored in logs because appendix-scale points
/// are far beyond double range; the linear fields overflow to +inf there.
struct RoWitness {
  double log_t = 0.0, log_lambda = 0.0;
  double t = 0.0, lambda = 0.0;
};

/// Certificate for the two-sided growth envelope
/// c^{-1} lambda^{s0} <= phi(lambda t)/phi(t) <= c lambda^{s1}.
struct ROReport {
  bool is_member = false;
  double s0 = 0.0, s1 = 0.0;
  double c = 0.0;      //!< exp(log_c); may overflow for extreme parameters
  double log_c = 0.0;  //!< authoritative value
  std::optional<RoWitness> witness;  //!< worst pair when the cap is exceeded
  std::string grid_spec;
};

/// Growth indices estimated as inf/sup of log-ratio slopes over anchored
/// sampled pairs. bracket reports the sensitivity to halving the grid;
/// attainment is decided by re-testing the envelope at the estimates.
struct IndexEstimate {
  double sigma0 = 0.0, sigma1 = 0.0;
  double bracket = 0.0;
  bool attained_within_grid = false;
  double attainment_log_c = 0.0;
};

struct WeightCondition {
  double l = 0.0;  //!< exponent max{0, -s0, s1}
  double c = 1.0;  //!< largest ratio observed over the sampled frequency pairs
};

namespace detail {

struct RoScan {
  std::vector<double> x, L;
  double y_min = 0.0;      // log(lambda_min)
  double anchor_lo = 0.0;  // anchors at or above this x
};

inline RoScan run_scan(const ParamExpr& phi, const RoScanConfig& cfg) {
  RoScan s;
  LogGrid g = cfg.build_grid();
  s.x = std::move(g.x);
  s.L.resize(s.x.size());
  for (std::size_t i = 0; i < s.x.size(); ++i) s.L[i] = phi.log_eval(s.x[i]);
  if (!(cfg.lambda_min > 1.0)) throw invalid_input("lambda_min must exceed 1");
  s.y_min = std::log(cfg.lambda_min);
  s.anchor_lo = cfg.x_min + cfg.anchor_fraction * (cfg.x_max - cfg.x_min);
  return s;
}

// inf/sup of (L_j - L_i)/(x_j - x_i) over anchored pairs, taking every
// stride-th grid point (stride 2 gives the halved-grid bracket).
inline bool window_slopes(const RoScan& s, std::size_t stride, double& lo, double& hi) {
  lo = pos_inf;
  hi = neg_inf;
  bool seen = false;
  for (std::size_t i = 0; i < s.x.size(); i += stride) {
    if (s.x[i] < s.anchor_lo) continue;
    for (std::size_t j = i + stride; j < s.x.size(); j += stride) {
      const double y = s.x[j] - s.x[i];
      if (y < s.y_min) continue;
      const double q = (s.L[j] - s.L[i]) / y;
      lo = std::min(lo, q);
      hi = std::max(hi, q);
      seen = true;
    }
  }
  return seen;
}

// Smallest log c making the envelope with exponents (s0, s1) hold at every
// sampled pair; optionally reports the worst pair.
inline double required_log_c(const RoScan& s, double s0, double s1,
                             std::size_t* wi = nullptr, std::size_t* wj = nullptr) {
  double worst = 0.0;
  for (std::size_t i = 0; i < s.x.size(); ++i) {
    for (std::size_t j = i + 1; j < s.x.size(); ++j) {
      const double y = s.x[j] - s.x[i];
      const double d = s.L[j] - s.L[i];
      const double need = std::max(s0 * y - d, d - s1 * y);
      if (need > worst) {
        worst = need;
        if (wi) *wi = i;
        if (wj) *wj = j;
      }
    }
  }
  return worst;
}

}  // namespace detail

inline IndexEstimate matuszewska_indices(const ParamExpr& phi, const RoScanConfig& cfg) {
  const auto scan = detail::run_scan(phi, cfg);
  IndexEstimate est;
  if (!detail::window_slopes(scan, 1, est.sigma0, est.sigma1))
    throw invalid_input("scan range too small: no pairs with lambda >= lambda_min in the anchor window");
  double lo2, hi2;
  if (detail::window_slopes(scan, 2, lo2, hi2))
    est.bracket = std::max(std::abs(est.sigma0 - lo2), std::abs(est.sigma1 - hi2));
  est.attainment_log_c = detail::required_log_c(scan, est.sigma0, est.sigma1);
  est.attained_within_grid = est.attainment_log_c <= cfg.log_cap;
  return est;
}

inline IndexEstimate matuszewska_indices(const ParamExpr& phi, double t_max) {
  return matuszewska_indices(phi, RoScanConfig::for_t_max(t_max));
}

inline ROReport ro_membership(const ParamExpr& phi, const RoScanConfig& cfg) {
  const auto scan = detail::run_scan(phi, cfg);
  ROReport rep;
  rep.grid_spec = cfg.describe();
  if (!detail::window_slopes(scan, 1, rep.s0, rep.s1))
    throw invalid_input("scan range too small: no pairs with lambda >= lambda_min in the anchor window");
  std::size_t wi = 0, wj = 0;
  rep.log_c = detail::required_log_c(scan, rep.s0, rep.s1, &wi, &wj);
  rep.c = std::exp(rep.log_c);
  rep.is_member = rep.log_c <= cfg.log_cap;
  if (!rep.is_member) {
    RoWitness w;
    w.log_t = scan.x[wi];
    w.log_lambda = scan.x[wj] - scan.x[wi];
    w.t = std::exp(w.log_t);
    w.lambda = std::exp(w.log_lambda);
    rep.witness = w;
  }
  return rep;
}

inline ROReport ro_membership(const ParamExpr& phi, double t_max, int samples = 0) {
  return ro_membership(phi, RoScanConfig::for_t_max(t_max, samples));
}

/// Certifies phi(<xi>)/phi(<eta>) <= c (1 + |xi - eta|)^l over sampled radial
/// frequency pairs. The exponent comes from the envelope certificate
/// (l = max{0, -s0, s1}); the constant is the worst observed ratio, so the
/// returned pair is never violated by any sampled pair.
inline WeightCondition check_weight_condition(const ParamExpr& phi, const RoScanConfig& cfg,
                                              const ROReport* precomputed = nullptr) {
  ROReport local;
  const ROReport* ro = precomputed;
  if (!ro) {
    local = ro_membership(phi, cfg);
    ro = &local;
  }
  if (!ro->is_member)
    throw invalid_input("weight condition needs an envelope-certified parameter (cap exceeded)");
  WeightCondition out;
  out.l = std::max({0.0, -ro->s0, ro->s1});

  // Radially aligned pairs are worst-case: |xi - eta| >= | |xi| - |eta| | with
  // equality on a ray, and the weight only depends on <xi>, <eta>.
  RoScanConfig wcfg = cfg;
  wcfg.x_max = std::min(cfg.x_max, 80.0);  // materialized |xi| needs linear doubles
  wcfg.compressed = false;
  LogGrid g = wcfg.build_grid();
  const std::size_t n = g.x.size();
  std::vector<double> L(n), rho(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double u = g.x[i];
    L[i] = phi.log_eval(u);
    // |xi| for <xi> = e^u: sqrt(e^{2u} - 1), safe against overflow.
    rho[i] = u > 0.0 ? std::exp(u + 0.5 * std::log1p(-std::exp(-2.0 * u))) : 0.0;
  }
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const double gap = std::abs(rho[i] - rho[j]);
      best = std::max(best, L[i] - L[j] - out.l * std::log1p(gap));
    }
  out.c = std::exp(best);
  return out;
}

inline WeightCondition check_weight_condition(const ParamExpr& phi) {
  return check_weight_condition(phi, RoScanConfig{});
}

}  // namespace rovar
