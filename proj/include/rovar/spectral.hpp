#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "rovar/linalg.hpp"
#include "rovar/logspace.hpp"
#include "rovar/param_expr.hpp"
#include "rovar/transforms.hpp"

namespace rovar {

/// Finite-dimensional diagonal model of a weighted Hilbert couple.
/// X0 norm^2 = sum w_j^2 |u_j|^2, X1 norm^2 = sum w_j^2 lambda_j^2 |u_j|^2,
/// and for a parameter psi the intermediate norm uses weights w_j psi(lambda_j).
struct DiagonalCouple {
  std::vector<double> weights;   // w_j > 0
  std::vector<double> spectrum;  // lambda_j >= m > 0
  double m = 0.0;                // lower spectral bound

  std::size_t size() const { return weights.size(); }

  static DiagonalCouple create(std::vector<double> weights, std::vector<double> spectrum) {
    if (weights.empty() || weights.size() != spectrum.size())
      throw invalid_input("couple: weights and spectrum must be nonempty and equal length");
    double m = pos_inf;
    for (std::size_t j = 0; j < weights.size(); ++j) {
      if (!(std::isfinite(weights[j]) && weights[j] > 0.0))
        throw invalid_input("couple: weights must be positive and finite");
      if (!(std::isfinite(spectrum[j]) && spectrum[j] > 0.0))
        throw invalid_input("couple: spectrum must be positive and finite");
      m = std::min(m, spectrum[j]);
    }
    return DiagonalCouple{std::move(weights), std::move(spectrum), m};
  }
};

/// Sobolev-type couple over a frequency grid: w_j = <xi_j>^{s0},
/// lambda_j = <xi_j>^{s1-s0}, with <xi> = sqrt(1+|xi|^2) and m = 1.
inline DiagonalCouple make_sobolev_couple(const std::vector<std::vector<double>>& freqs,
                                          double s0, double s1) {
  if (!(s0 < s1)) throw invalid_input("sobolev couple: requires s0 < s1");
  if (freqs.empty()) throw invalid_input("sobolev couple: empty frequency grid");
  std::vector<double> w(freqs.size()), lam(freqs.size());
  for (std::size_t j = 0; j < freqs.size(); ++j) {
    double q = 1.0;
    for (double c : freqs[j]) q += c * c;
    const double bracket = std::sqrt(q);
    w[j] = std::pow(bracket, s0);
    lam[j] = std::pow(bracket, s1 - s0);
  }
  DiagonalCouple out = DiagonalCouple::create(std::move(w), std::move(lam));
  out.m = 1.0;  // <xi> >= 1 makes this exact, independent of grid roundoff
  return out;
}

/// Linear operator on the coefficient space. Tagged forms carry closed-form
/// weighted operator norms; dense maps fall back to singular values.
class LinearMap {
 public:
  enum class Kind { diagonal, rank_one, dense, convolution };

  static LinearMap diagonal(std::vector<cdouble> taus) {
    if (taus.empty()) throw invalid_input("linear map: empty diagonal");
    LinearMap m;
    m.kind_ = Kind::diagonal;
    m.dim_ = taus.size();
    m.taus_ = std::move(taus);
    return m;
  }

  // Convolution by a multiplier sequence: diagonal in the coefficient basis
  // (the couple's coefficients are already frequency-side), kept as its own
  // tag so reports name the operator the way it was built.
  static LinearMap convolution(std::vector<cdouble> symbol) {
    LinearMap m = diagonal(std::move(symbol));
    m.kind_ = Kind::convolution;
    return m;
  }

  static LinearMap rank_one(cdouble alpha, std::size_t src, std::size_t dst, std::size_t dim) {
    if (dim == 0 || src >= dim || dst >= dim)
      throw invalid_input("linear map: rank-one indices out of range");
    LinearMap m;
    m.kind_ = Kind::rank_one;
    m.dim_ = dim;
    m.alpha_ = alpha;
    m.src_ = src;
    m.dst_ = dst;
    return m;
  }

  static LinearMap dense(std::vector<cdouble> a, std::size_t n) {
    if (n == 0 || a.size() != n * n) throw invalid_input("linear map: bad dense dimensions");
    LinearMap m;
    m.kind_ = Kind::dense;
    m.dim_ = n;
    m.a_ = std::move(a);
    return m;
  }

  Kind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }
  const std::vector<cdouble>& taus() const { return taus_; }
  const std::vector<cdouble>& matrix() const { return a_; }
  cdouble alpha() const { return alpha_; }
  std::size_t src() const { return src_; }
  std::size_t dst() const { return dst_; }

  std::vector<cdouble> apply(const std::vector<cdouble>& u) const {
    if (u.size() != dim_) throw invalid_input("linear map: dimension mismatch");
    std::vector<cdouble> out(dim_, cdouble{0.0, 0.0});
    switch (kind_) {
      case Kind::diagonal:
      case Kind::convolution:
        for (std::size_t j = 0; j < dim_; ++j) out[j] = taus_[j] * u[j];
        break;
      case Kind::rank_one:
        out[dst_] = alpha_ * u[src_];
        break;
      case Kind::dense:
        detail::mat_vec(a_, dim_, u, out);
        break;
    }
    return out;
  }

 private:
  Kind kind_ = Kind::diagonal;
  std::size_t dim_ = 0;
  std::vector<cdouble> taus_;
  std::vector<cdouble> a_;
  cdouble alpha_{0.0, 0.0};
  std::size_t src_ = 0, dst_ = 0;
};

struct OperatorNormTriple {
  double n0 = 0.0;
  double n1 = 0.0;
  double npsi = 0.0;
  std::string method;  // exact-closed-form | singular-value | power-iteration
  double tol = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;
};

struct NormOptions {
  std::size_t dense_svd_limit = 512;
  double power_tol = 1e-10;
  int power_cap = 100000;
  std::uint64_t seed = 0x2545F4914F6CDD1DULL;
};

namespace detail {

// psi evaluated at a spectral point; failures must name the point.
inline double eval_param_at(const ParamExpr& psi, double lambda) {
  double v;
  try {
    v = psi.eval(lambda);
  } catch (const std::exception& e) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "parameter evaluation failed at spectral point %.17g: %s",
                  lambda, e.what());
    throw eval_error(buf);
  }
  if (!(std::isfinite(v) && v > 0.0)) {
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "parameter evaluation at spectral point %.17g gave nonpositive value", lambda);
    throw eval_error(buf);
  }
  return v;
}

inline std::vector<double> psi_weights(const DiagonalCouple& couple, const ParamExpr& psi) {
  std::vector<double> d(couple.size());
  for (std::size_t j = 0; j < couple.size(); ++j)
    d[j] = couple.weights[j] * eval_param_at(psi, couple.spectrum[j]);
  return d;
}

// Largest singular value of D T D^{-1} for a dense T.
inline double weighted_dense_norm(const LinearMap& t, const std::vector<double>& d,
                                  const NormOptions& opts, std::string& method, double& tol,
                                  std::uint64_t& seed, int& iterations) {
  const std::size_t n = t.dim();
  std::vector<cdouble> b(n * n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) b[i * n + j] = t.matrix()[i * n + j] * (d[i] / d[j]);
  if (n <= opts.dense_svd_limit) {
    method = "singular-value";
    return spectral_norm_jacobi(b, n);
  }
  method = "power-iteration";
  PowerIterResult r = spectral_norm_power(b, n, opts.power_tol, opts.power_cap, opts.seed);
  if (!r.converged) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "power iteration did not converge after %d iterations (residual %.3g)",
                  r.iterations, r.residual);
    throw numerical_failure(buf);
  }
  tol = r.tol;
  seed = r.seed;
  iterations = std::max(iterations, r.iterations);
  return r.sigma;
}

}  // namespace detail

/// ||u||_{X_psi} = (sum w_j^2 psi(lambda_j)^2 |u_j|^2)^{1/2}, compensated.
inline double interp_norm(const std::vector<cdouble>& u, const DiagonalCouple& couple,
                          const ParamExpr& psi) {
  if (u.size() != couple.size()) throw invalid_input("interp_norm: dimension mismatch");
  CompensatedSum acc;
  for (std::size_t j = 0; j < couple.size(); ++j) {
    const double d = couple.weights[j] * detail::eval_param_at(psi, couple.spectrum[j]);
    acc.add(d * d * std::norm(u[j]));
  }
  const double s = acc.value();
  return s > 0.0 ? std::sqrt(s) : 0.0;
}

/// Operator norms of T in the X0 / X1 / X_psi geometries.
inline OperatorNormTriple operator_norms(const LinearMap& t, const DiagonalCouple& couple,
                                         const ParamExpr& psi, const NormOptions& opts = {}) {
  if (t.dim() != couple.size()) throw invalid_input("operator_norms: dimension mismatch");
  OperatorNormTriple out;

  switch (t.kind()) {
    case LinearMap::Kind::diagonal:
    case LinearMap::Kind::convolution: {
      // Diagonal conjugation leaves a diagonal matrix unchanged.
      double mx = 0.0;
      for (const cdouble& tau : t.taus()) mx = std::max(mx, std::abs(tau));
      for (std::size_t j = 0; j < couple.size(); ++j)
        detail::eval_param_at(psi, couple.spectrum[j]);  // surface evaluation failures
      out.n0 = out.n1 = out.npsi = mx;
      out.method = "exact-closed-form";
      return out;
    }
    case LinearMap::Kind::rank_one: {
      const std::size_t i = t.dst(), j = t.src();
      const double a = std::abs(t.alpha());
      const double pi_ = detail::eval_param_at(psi, couple.spectrum[i]);
      const double pj = detail::eval_param_at(psi, couple.spectrum[j]);
      out.n0 = a * couple.weights[i] / couple.weights[j];
      out.n1 = a * (couple.weights[i] * couple.spectrum[i]) /
               (couple.weights[j] * couple.spectrum[j]);
      out.npsi = a * (couple.weights[i] * pi_) / (couple.weights[j] * pj);
      out.method = "exact-closed-form";
      return out;
    }
    case LinearMap::Kind::dense: {
      const std::vector<double> dpsi = detail::psi_weights(couple, psi);
      std::vector<double> d0(couple.weights), d1(couple.size());
      for (std::size_t j = 0; j < couple.size(); ++j)
        d1[j] = couple.weights[j] * couple.spectrum[j];
      out.n0 = detail::weighted_dense_norm(t, d0, opts, out.method, out.tol, out.seed,
                                           out.iterations);
      out.n1 = detail::weighted_dense_norm(t, d1, opts, out.method, out.tol, out.seed,
                                           out.iterations);
      out.npsi = detail::weighted_dense_norm(t, dpsi, opts, out.method, out.tol, out.seed,
                                             out.iterations);
      return out;
    }
  }
  throw numerical_failure("operator_norms: unreachable");
}

/// npsi / max(n0, n1); zero operator maps to ratio 0.
inline double interpolation_bound_check(const LinearMap& t, const DiagonalCouple& couple,
                                        const ParamExpr& psi, const NormOptions& opts = {}) {
  const OperatorNormTriple n = operator_norms(t, couple, psi, opts);
  const double denom = std::max(n.n0, n.n1);
  if (denom == 0.0) return 0.0;
  return n.npsi / denom;
}

/// log[npsi / max(n0, n1)] for the rank-one map e_src -> alpha e_dst in the
/// w == 1 geometry, entirely in log coordinates: spectral points up to
/// exp(1e6) are fine because lambda itself is never materialized.
inline double rank_one_witness(const ParamExpr& psi, double log_lambda_src,
                               double log_lambda_dst) {
  if (!std::isfinite(log_lambda_src) || !std::isfinite(log_lambda_dst))
    throw invalid_input("rank_one_witness: spectral points must be finite in log domain");
  const double lp_dst = psi.log_eval(log_lambda_dst);
  const double lp_src = psi.log_eval(log_lambda_src);
  return lp_dst - lp_src - std::max(0.0, log_lambda_dst - log_lambda_src);
}

/// Reiteration identity at norm level: ||u|| over the derived couple
/// (weights w f(lambda), spectrum g/f) with parameter psi, against ||u||
/// over the original couple with omega = f * psi(g/f). Returns the relative
/// discrepancy between the two routes.
inline double reiteration_norm_check(const DiagonalCouple& couple, const ParamExpr& f,
                                     const ParamExpr& g, const ParamExpr& psi,
                                     const std::vector<cdouble>& u) {
  std::vector<double> w2(couple.size()), lam2(couple.size());
  for (std::size_t j = 0; j < couple.size(); ++j) {
    const double fv = detail::eval_param_at(f, couple.spectrum[j]);
    const double gv = detail::eval_param_at(g, couple.spectrum[j]);
    w2[j] = couple.weights[j] * fv;
    lam2[j] = gv / fv;
    if (!(std::isfinite(lam2[j]) && lam2[j] > 0.0))
      throw invalid_input("invalid-couple: derived spectrum not bounded below by a positive m");
  }
  const DiagonalCouple derived = DiagonalCouple::create(std::move(w2), std::move(lam2));
  const double a = interp_norm(u, derived, psi);

  const ComposedParam omega = reiteration_compose(f, g, psi);
  const double b = interp_norm(u, couple, omega.expr);

  const double mx = std::max(a, b);
  return mx == 0.0 ? 0.0 : std::abs(a - b) / mx;
}

struct EmbeddingConstants {
  double c0 = 0.0;  // ||u||_{X0}   <= c0 ||u||_{X_psi}
  double c1 = 0.0;  // ||u||_{X_psi} <= c1 ||u||_{X1}
};

/// Per-spectral-point weight comparison for the embedding chain
/// X1 -> X_psi -> X0: c0 = max 1/psi(lambda_j), c1 = max psi(lambda_j)/lambda_j.
inline EmbeddingConstants embedding_constants(const DiagonalCouple& couple,
                                              const ParamExpr& psi) {
  EmbeddingConstants out;
  for (std::size_t j = 0; j < couple.size(); ++j) {
    const double p = detail::eval_param_at(psi, couple.spectrum[j]);
    out.c0 = std::max(out.c0, 1.0 / p);
    out.c1 = std::max(out.c1, p / couple.spectrum[j]);
  }
  return out;
}

}  // namespace rovar
