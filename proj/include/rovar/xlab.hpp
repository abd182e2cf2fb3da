#pragma once

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <string>
#include <vector>

#include "rovar/grid.hpp"
#include "rovar/logspace.hpp"
#include "rovar/param_expr.hpp"
#include "rovar/ro_analysis.hpp"
#include "rovar/spectral.hpp"
#include "rovar/transforms.hpp"

namespace rovar::xlab {

// Sequence exponents live in log coordinates throughout: t_1 ~ exp(3805)
// cannot be materialized in any binary float.
inline double log_t_k(int k) {
  if (k < 1) throw invalid_input("sequence index must be >= 1");
  const double a = 2.0 * std::numbers::pi * k + std::numbers::pi / 2.0;
  return a * a * a * a;
}

inline double log_s_k(int k) {
  if (k < 1) throw invalid_input("sequence index must be >= 1");
  const double a = 2.0 * std::numbers::pi * k + std::numbers::pi;
  return a * a * a * a;
}

/// Closed-form lower bound for log[phi(t_k)/phi(s_k)]: (2pi k + pi/2)^2
/// - log(1 + (2pi k + pi)^4). Cross-checked against direct evaluation.
inline double ratio_log_lower_bound(int k) {
  if (k < 1) throw invalid_input("sequence index must be >= 1");
  const double a = 2.0 * std::numbers::pi * k + std::numbers::pi / 2.0;
  const double b = 2.0 * std::numbers::pi * k + std::numbers::pi;
  const double bound = a * a - std::log1p(b * b * b * b);
  const double direct = appendix_log_phi(log_t_k(k)) - appendix_log_phi(log_s_k(k));
  if (direct < bound - 1e-9) throw numerical_failure("ratio bound cross-check failed");
  return bound;
}

struct SlowVariationRow {
  double x = 0.0;                  // log t
  std::vector<double> deviations;  // |phi(lambda t)/phi(t) - 1| per lambda
  double max_deviation = 0.0;
};

struct SlowVariationTable {
  std::vector<double> lambdas;
  std::vector<SlowVariationRow> rows;
};

/// Deviation profile |phi(lambda t)/phi(t) - 1| for lambda in [1, 2] at the
/// requested log-abscissas; the per-row summary is the max over lambda.
inline SlowVariationTable slow_variation_profile(const std::vector<double>& lambda_set,
                                                 const std::vector<double>& x_list) {
  if (lambda_set.empty() || x_list.empty())
    throw invalid_input("slow variation profile: empty input");
  for (double l : lambda_set)
    if (!(l >= 1.0 && l <= 2.0))
      throw invalid_input("slow variation profile: lambda must lie in [1, 2]");
  const double x_lo = std::log(3.0);
  for (double x : x_list)
    if (!(x >= x_lo)) throw invalid_input("slow variation profile: x must be >= log 3");

  SlowVariationTable table;
  table.lambdas = lambda_set;
  table.rows.reserve(x_list.size());
  for (double x : x_list) {
    SlowVariationRow row;
    row.x = x;
    row.deviations.reserve(lambda_set.size());
    const double base = appendix_log_phi(x);
    for (double l : lambda_set) {
      const double dev = std::abs(std::expm1(appendix_log_phi(x + std::log(l)) - base));
      row.deviations.push_back(dev);
      row.max_deviation = std::max(row.max_deviation, dev);
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

struct NonInterpolationRow {
  int k = 0;
  double bound = 0.0;    // closed-form log lower bound
  double witness = 0.0;  // rank-one witness log ratio
};

/// With (s0, s1) = (0, 1) the derived parameter equals phi on tau >= 1; the
/// rank-one map e_{s_k} -> e_{t_k} then certifies log[npsi/max(n0,n1)] >=
/// ratio_log_lower_bound(k), growing without bound along k.
inline std::vector<NonInterpolationRow> non_interpolation_demo(int k_max) {
  if (k_max < 1) throw invalid_input("non-interpolation demo: k_max must be >= 1");
  const ParamExpr psi = psi_from_phi(ParamExpr::appendix(), 0.0, 1.0);
  std::vector<NonInterpolationRow> rows;
  rows.reserve(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k) {
    NonInterpolationRow row;
    row.k = k;
    row.bound = ratio_log_lower_bound(k);
    row.witness = rank_one_witness(psi, log_s_k(k), log_t_k(k));
    rows.push_back(row);
  }
  return rows;
}

inline void write_noninterp_csv(std::ostream& os, const std::vector<NonInterpolationRow>& rows) {
  os << "k,bound,witness\n";
  char buf[96];
  for (const NonInterpolationRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g\n", r.k, r.bound, r.witness);
    os << buf;
  }
}

inline void write_slow_variation_csv(std::ostream& os, const SlowVariationTable& table) {
  os << "x,lambda,deviation\n";
  char buf[96];
  for (const SlowVariationRow& row : table.rows)
    for (std::size_t i = 0; i < table.lambdas.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g\n", row.x, table.lambdas[i],
                    row.deviations[i]);
      os << buf;
    }
}

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

namespace xdetail {

inline CheckResult make_check(const std::string& name, bool pass, const std::string& detail) {
  return CheckResult{name, pass, detail};
}

}  // namespace xdetail

/// The counterexample invariants as named pass/fail results: witness bounds,
/// growth along k, flat regular-variation indices at huge scale, failure of
/// pseudoconcavity on pair-bearing grids, slow variation, and the two-sided
/// power envelope.
inline std::vector<CheckResult> standard_checks(int k_max) {
  if (k_max < 1) throw invalid_input("standard checks: k_max must be >= 1");
  std::vector<CheckResult> out;
  char buf[192];

  const std::vector<NonInterpolationRow> rows = non_interpolation_demo(k_max);
  bool dominates = true, grows = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    dominates = dominates && rows[i].witness >= rows[i].bound - 1e-9;
    if (i > 0) grows = grows && rows[i].witness > rows[i - 1].witness;
  }
  std::snprintf(buf, sizeof buf, "k=1 witness %.6g vs bound %.6g", rows[0].witness,
                rows[0].bound);
  out.push_back(xdetail::make_check("witness-dominates-bound", dominates, buf));
  out.push_back(xdetail::make_check("witness-grows-with-k", grows,
                                    "log ratios strictly increase along k"));

  const ParamExpr phi = ParamExpr::appendix();
  const IndexEstimate idx = matuszewska_indices(phi, RoScanConfig::for_log_range(1e4));
  const bool flat = std::abs(idx.sigma0) <= 0.1 && std::abs(idx.sigma1) <= 0.1;
  std::snprintf(buf, sizeof buf, "sigma0 %.4f sigma1 %.4f over log t <= 1e4", idx.sigma0,
                idx.sigma1);
  out.push_back(xdetail::make_check("indices-are-zero", flat, buf));

  const ParamExpr psi = psi_from_phi(phi, 0.0, 1.0);
  const int pairs = std::min(k_max, 5);
  bool fails_everywhere = true;
  double least_log_c = pos_inf;
  for (double r : {1.0, 10.0, 1e3}) {
    PcScanConfig cfg;
    cfg.r = r;
    cfg.x_max = log_s_k(pairs);
    for (int k = 1; k <= pairs; ++k) {
      cfg.extra_log_points.push_back(log_t_k(k));
      cfg.extra_log_points.push_back(log_s_k(k));
    }
    const PseudoconcavityReport rep = pseudoconcavity_test(psi, cfg);
    fails_everywhere = fails_everywhere && rep.log_c_best >= 52.0;
    least_log_c = std::min(least_log_c, rep.log_c_best);
  }
  std::snprintf(buf, sizeof buf, "least log c over r in {1,10,1e3}: %.4f (needs >= 52)",
                least_log_c);
  out.push_back(xdetail::make_check("pseudoconcavity-fails", fails_everywhere, buf));

  const SlowVariationTable sv =
      slow_variation_profile({1.25, 1.5, 2.0}, {1e2, 1e3, 1e4, 1e5});
  bool decreasing = true;
  for (std::size_t i = 1; i < sv.rows.size(); ++i)
    decreasing = decreasing && sv.rows[i].max_deviation < sv.rows[i - 1].max_deviation;
  std::snprintf(buf, sizeof buf, "max deviations %.3g %.3g %.3g %.3g",
                sv.rows[0].max_deviation, sv.rows[1].max_deviation, sv.rows[2].max_deviation,
                sv.rows[3].max_deviation);
  out.push_back(xdetail::make_check("slow-variation-improves", decreasing, buf));

  const EmbeddingScanReport emb =
      embedding_scan(phi, 0.0, 1.0, RoScanConfig::for_log_range(1e4));
  std::snprintf(buf, sizeof buf, "log c0 %.4f log c1 %.4f", emb.log_c0, emb.log_c1);
  out.push_back(xdetail::make_check("power-envelope-bounded", emb.bounded, buf));

  return out;
}

}  // namespace rovar::xlab
