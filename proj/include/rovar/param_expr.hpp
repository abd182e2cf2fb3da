#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "rovar/logspace.hpp"

namespace rovar {

/// Bounded function sampled on a strictly increasing abscissa grid in
/// x = log t. Evaluation interpolates linearly in x and clamps to the end
/// values outside the sampled range; the running integral extends with the
/// clamped value so that the function stays defined on the whole line.
class SampledCurve {
 public:
  SampledCurve() = default;

  SampledCurve(std::vector<double> xs, std::vector<double> vs)
      : x_(std::move(xs)), v_(std::move(vs)) {
    if (x_.size() != v_.size() || x_.size() < 2)
      throw invalid_input("sampled curve needs matching x/value arrays with at least two nodes");
    for (std::size_t i = 0; i < x_.size(); ++i) {
      if (!std::isfinite(x_[i]) || !std::isfinite(v_[i]))
        throw invalid_input("sampled curve values must be finite");
      if (i > 0 && !(x_[i] > x_[i - 1]))
        throw invalid_input("sampled curve abscissae must be strictly increasing");
    }
    if (!(x_.back() > x_.front()))
      throw invalid_input("sampled curve range must have positive length");
    cum_.assign(x_.size(), 0.0);
    for (std::size_t i = 1; i < x_.size(); ++i)
      cum_[i] = cum_[i - 1] + 0.5 * (v_[i] + v_[i - 1]) * (x_[i] - x_[i - 1]);
  }

  static SampledCurve constant(double v, double x_lo = 0.0, double x_hi = 32.0) {
    return SampledCurve({x_lo, x_hi}, {v, v});
  }

  /// Clamped piecewise-linear value at x.
  double at(double x) const {
    if (x <= x_.front()) return v_.front();
    if (x >= x_.back()) return v_.back();
    const std::size_t i = segment(x);
    const double w = (x - x_[i]) / (x_[i + 1] - x_[i]);
    return v_[i] + w * (v_[i + 1] - v_[i]);
  }

  /// Trapezoid integral of the interpolant from 0 to x (signed for x < 0).
  double integral_from_zero(double x) const {
    return raw_integral(x) - raw_integral(0.0);
  }

  double min_value() const { return *std::min_element(v_.begin(), v_.end()); }
  double max_value() const { return *std::max_element(v_.begin(), v_.end()); }
  const std::vector<double>& xs() const { return x_; }
  const std::vector<double>& values() const { return v_; }

 private:
  // Integral of the clamp-extended interpolant from x_.front() to x.
  double raw_integral(double x) const {
    if (x <= x_.front()) return (x - x_.front()) * v_.front();
    if (x >= x_.back()) return cum_.back() + (x - x_.back()) * v_.back();
    const std::size_t i = segment(x);
    const double d = x - x_[i];
    const double m = (v_[i + 1] - v_[i]) / (x_[i + 1] - x_[i]);
    return cum_[i] + d * v_[i] + 0.5 * m * d * d;
  }

  std::size_t segment(double x) const {
    const auto it = std::upper_bound(x_.begin(), x_.end(), x);
    std::size_t i = static_cast<std::size_t>(it - x_.begin());
    if (i == 0) return 0;
    if (i >= x_.size()) return x_.size() - 2;
    return i - 1;
  }

  std::vector<double> x_, v_, cum_;
};

/// log phi(e^x) for the oscillating slowly varying parameter
/// phi(t) = t^{h(t)} + log t (t >= 3), phi = 1 below, h(t) =
/// (log t)^{-1/2} sin((log t)^{1/4}). Entirely log-domain: safe for x ~ 1e6.
inline double appendix_log_phi(double x) {
  if (x < 0.0 || !std::isfinite(x))
    throw eval_error("appendix parameter requires x = log t >= 0, got x = " + std::to_string(x));
  static const double x_break = std::log(3.0);
  if (x < x_break) return 0.0;
  const double q = std::pow(x, 0.25);
  const double exponent = std::sqrt(x) * std::sin(q);  // h(t) * log t
  return log_add_exp(exponent, std::log(x));
}

class ParamExpr;

namespace detail {

struct PowerK { double s; };
struct LogShiftK {};
struct ConstantK { double v; double log_v; };
struct SumK {};
struct ProductK {};
struct PowerOfK { double e; };
struct ComposeK {};  // children[0] = outer, children[1] = inner
struct AppendixK {};
struct RepresentationK { SampledCurve beta, eps; };
struct TableK { std::vector<double> lx, lv; };  // log t, log value
struct ExtendBelowOneK {};                      // inner frozen at t = 1 below 1
struct EnvelopeK {
  std::vector<double> t, v;  // hull vertices, t strictly increasing
  double left_slope;         // tangent continued left of t.front()
  double left_lift;          // positivity lift applied to the left extension
};

using Kind = std::variant<PowerK, LogShiftK, ConstantK, SumK, ProductK, PowerOfK,
                          ComposeK, AppendixK, RepresentationK, TableK,
                          ExtendBelowOneK, EnvelopeK>;

struct ExprNode {
  Kind kind;
  std::vector<ParamExpr> children;
};

}  // namespace detail

/// Immutable positive-function expression. Every node supports two genuinely
/// independent evaluation routes: eval(t) with linear-domain arithmetic and
/// log_eval(x) with log-domain arithmetic (x = log t), so that magnitudes up
/// to exp(1e6) stay exactly representable through the log route.
class ParamExpr {
 public:
  static ParamExpr power(double s) {
    require_finite(s, "power exponent");
    return make({detail::PowerK{s}, {}});
  }

  static ParamExpr log_shift() { return make({detail::LogShiftK{}, {}}); }

  static ParamExpr constant(double v) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw invalid_input("constant node needs a positive finite value");
    return make({detail::ConstantK{v, std::log(v)}, {}});
  }

  static ParamExpr sum(std::vector<ParamExpr> terms) {
    if (terms.empty()) throw invalid_input("sum node needs at least one term");
    return make({detail::SumK{}, std::move(terms)});
  }
  static ParamExpr sum(ParamExpr a, ParamExpr b) { return sum(std::vector<ParamExpr>{std::move(a), std::move(b)}); }

  static ParamExpr product(std::vector<ParamExpr> factors) {
    if (factors.empty()) throw invalid_input("product node needs at least one factor");
    return make({detail::ProductK{}, std::move(factors)});
  }
  static ParamExpr product(ParamExpr a, ParamExpr b) { return product(std::vector<ParamExpr>{std::move(a), std::move(b)}); }

  static ParamExpr power_of(ParamExpr base, double e) {
    require_finite(e, "power_of exponent");
    return make({detail::PowerOfK{e}, {std::move(base)}});
  }

  static ParamExpr compose(ParamExpr outer, ParamExpr inner) {
    return make({detail::ComposeK{}, {std::move(outer), std::move(inner)}});
  }

  static ParamExpr appendix() { return make({detail::AppendixK{}, {}}); }

  static ParamExpr representation(SampledCurve beta, SampledCurve eps) {
    return make({detail::RepresentationK{std::move(beta), std::move(eps)}, {}});
  }

  /// Sorted (t, value) pairs, interpolated linearly in log-log coordinates;
  /// extrapolates with the end-segment slopes (power functions stay exact).
  static ParamExpr table(const std::vector<std::pair<double, double>>& points) {
    if (points.empty()) throw invalid_input("table node needs at least one point");
    detail::TableK k;
    k.lx.reserve(points.size());
    k.lv.reserve(points.size());
    for (const auto& [t, v] : points) {
      if (!(t > 0.0) || !(v > 0.0) || !std::isfinite(t) || !std::isfinite(v))
        throw invalid_input("table points must have positive finite t and value");
      if (!k.lx.empty() && !(std::log(t) > k.lx.back()))
        throw invalid_input("table abscissae must be strictly increasing");
      k.lx.push_back(std::log(t));
      k.lv.push_back(std::log(v));
    }
    return make({std::move(k), {}});
  }

  /// inner(max(t, 1)): constant continuation below t = 1.
  static ParamExpr extend_below_one(ParamExpr inner) {
    return make({detail::ExtendBelowOneK{}, {std::move(inner)}});
  }

  /// Piecewise-linear concave hull with a tangent extension left of the first
  /// vertex. Built by concave_majorant(); exposed for (de)serialization.
  static ParamExpr concave_envelope(std::vector<double> t, std::vector<double> v,
                                    double left_slope, double left_lift) {
    if (t.size() != v.size() || t.empty())
      throw invalid_input("envelope needs matching nonempty vertex arrays");
    for (std::size_t i = 0; i < t.size(); ++i) {
      if (!(t[i] > 0.0) || !(v[i] > 0.0))
        throw invalid_input("envelope vertices must be positive");
      if (i > 0 && !(t[i] > t[i - 1]))
        throw invalid_input("envelope abscissae must be strictly increasing");
    }
    if (!std::isfinite(left_slope) || !(left_lift >= 0.0))
      throw invalid_input("envelope extension parameters must be finite, lift >= 0");
    return make({detail::EnvelopeK{std::move(t), std::move(v), left_slope, left_lift}, {}});
  }

  /// Linear-domain value phi(t).
  double eval(double t) const;

  /// Log-domain value log phi(e^x).
  double log_eval(double x) const;

  const detail::ExprNode& node() const { return *node_; }

 private:
  static void require_finite(double s, const char* what) {
    if (!std::isfinite(s)) throw invalid_input(std::string(what) + " must be finite");
  }
  static ParamExpr make(detail::ExprNode n) {
    return ParamExpr(std::make_shared<const detail::ExprNode>(std::move(n)));
  }
  explicit ParamExpr(std::shared_ptr<const detail::ExprNode> n) : node_(std::move(n)) {}

  std::shared_ptr<const detail::ExprNode> node_;
};

namespace detail {

inline double interp_with_end_slopes(const std::vector<double>& xs,
                                     const std::vector<double>& ys, double x) {
  const std::size_t n = xs.size();
  if (n == 1) return ys[0];
  std::size_t i;
  if (x <= xs.front()) {
    i = 0;
  } else if (x >= xs.back()) {
    i = n - 2;
  } else {
    i = static_cast<std::size_t>(std::upper_bound(xs.begin(), xs.end(), x) - xs.begin()) - 1;
  }
  const double m = (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
  return ys[i] + m * (x - xs[i]);
}

// Envelope value in linear coordinates; throws once the extension leaves the
// positive range.
inline double envelope_value(const EnvelopeK& k, double t) {
  if (!(t > 0.0)) throw eval_error("envelope is defined for t > 0");
  double val;
  if (t < k.t.front()) {
    val = k.v.front() + k.left_slope * (t - k.t.front()) + k.left_lift;
  } else if (k.t.size() == 1 || t >= k.t.back()) {
    const std::size_t n = k.t.size();
    const double m = n >= 2 ? (k.v[n - 1] - k.v[n - 2]) / (k.t[n - 1] - k.t[n - 2]) : 0.0;
    val = k.v.back() + m * (t - k.t.back());
  } else {
    const std::size_t i =
        static_cast<std::size_t>(std::upper_bound(k.t.begin(), k.t.end(), t) - k.t.begin()) - 1;
    const double m = (k.v[i + 1] - k.v[i]) / (k.t[i + 1] - k.t[i]);
    val = k.v[i] + m * (t - k.t[i]);
  }
  if (!(val > 0.0))
    throw eval_error("envelope left the positive range at t = " + std::to_string(t));
  return val;
}

// Envelope log-value; switches to the asymptotic linear pieces when e^x does
// not fit in a double.
inline double envelope_log_value(const EnvelopeK& k, double x) {
  if (x <= 690.0 && x >= -690.0) return std::log(envelope_value(k, std::exp(x)));
  if (x > 690.0) {
    const std::size_t n = k.t.size();
    const double m = n >= 2 ? (k.v[n - 1] - k.v[n - 2]) / (k.t[n - 1] - k.t[n - 2]) : 0.0;
    if (m > 0.0) return std::log(m) + x;  // intercept negligible at this scale
    if (m == 0.0) return std::log(k.v.back());
    throw eval_error("envelope left the positive range at log t = " + std::to_string(x));
  }
  // x < -690: value at 0+ is the extension intercept.
  const double intercept = k.v.front() - k.left_slope * k.t.front() + k.left_lift;
  if (intercept > 0.0) return std::log(intercept);
  if (intercept == 0.0 && k.left_slope > 0.0) return std::log(k.left_slope) + x;
  throw eval_error("envelope left the positive range near t = 0");
}

}  // namespace detail

inline double ParamExpr::eval(double t) const {
  struct V {
    double t;
    double operator()(const detail::PowerK& k) const {
      if (!(t > 0.0)) throw eval_error("power node needs t > 0");
      return std::pow(t, k.s);
    }
    double operator()(const detail::LogShiftK&) const {
      if (!(t > 0.0)) throw eval_error("log-shift node needs t > 0");
      const double v = 1.0 + std::log(t);
      if (!(v > 0.0))
        throw eval_error("1 + log t is not positive at t = " + std::to_string(t));
      return v;
    }
    double operator()(const detail::ConstantK& k) const { return k.v; }
    double operator()(const detail::SumK&) const { return 0.0; }      // handled below
    double operator()(const detail::ProductK&) const { return 0.0; }  // handled below
    double operator()(const detail::PowerOfK&) const { return 0.0; }  // handled below
    double operator()(const detail::ComposeK&) const { return 0.0; }  // handled below
    double operator()(const detail::AppendixK&) const {
      if (!(t > 0.0)) throw eval_error("appendix parameter needs t > 0");
      if (t < 3.0) return 1.0;
      const double x = std::log(t);
      const double h = std::sin(std::pow(x, 0.25)) / std::sqrt(x);
      return std::pow(t, h) + x;
    }
    double operator()(const detail::RepresentationK& k) const {
      if (!(t > 0.0)) throw eval_error("representation node needs t > 0");
      const double x = std::log(t);
      return std::exp(k.beta.at(x) + k.eps.integral_from_zero(x));
    }
    double operator()(const detail::TableK& k) const {
      if (!(t > 0.0)) throw eval_error("table node needs t > 0");
      return std::exp(detail::interp_with_end_slopes(k.lx, k.lv, std::log(t)));
    }
    double operator()(const detail::ExtendBelowOneK&) const { return 0.0; }  // handled below
    double operator()(const detail::EnvelopeK& k) const { return detail::envelope_value(k, t); }
  };

  const auto& n = node();
  if (std::holds_alternative<detail::SumK>(n.kind)) {
    double acc = 0.0;
    for (const auto& c : n.children) acc += c.eval(t);
    return acc;
  }
  if (std::holds_alternative<detail::ProductK>(n.kind)) {
    double acc = 1.0;
    for (const auto& c : n.children) acc *= c.eval(t);
    return acc;
  }
  if (const auto* p = std::get_if<detail::PowerOfK>(&n.kind))
    return std::pow(n.children[0].eval(t), p->e);
  if (std::holds_alternative<detail::ComposeK>(n.kind))
    return n.children[0].eval(n.children[1].eval(t));
  if (std::holds_alternative<detail::ExtendBelowOneK>(n.kind))
    return n.children[0].eval(t < 1.0 ? 1.0 : t);
  return std::visit(V{t}, n.kind);
}

inline double ParamExpr::log_eval(double x) const {
  struct V {
    double x;
    double operator()(const detail::PowerK& k) const { return k.s * x; }
    double operator()(const detail::LogShiftK&) const {
      const double u = 1.0 + x;
      if (!(u > 0.0))
        throw eval_error("1 + log t is not positive at log t = " + std::to_string(x));
      return std::log(u);
    }
    double operator()(const detail::ConstantK& k) const { return k.log_v; }
    double operator()(const detail::SumK&) const { return 0.0; }
    double operator()(const detail::ProductK&) const { return 0.0; }
    double operator()(const detail::PowerOfK&) const { return 0.0; }
    double operator()(const detail::ComposeK&) const { return 0.0; }
    double operator()(const detail::AppendixK&) const { return appendix_log_phi(x); }
    double operator()(const detail::RepresentationK& k) const {
      return k.beta.at(x) + k.eps.integral_from_zero(x);
    }
    double operator()(const detail::TableK& k) const {
      return detail::interp_with_end_slopes(k.lx, k.lv, x);
    }
    double operator()(const detail::ExtendBelowOneK&) const { return 0.0; }
    double operator()(const detail::EnvelopeK& k) const { return detail::envelope_log_value(k, x); }
  };

  const auto& n = node();
  if (std::holds_alternative<detail::SumK>(n.kind)) {
    double acc = neg_inf;
    for (const auto& c : n.children) acc = log_add_exp(acc, c.log_eval(x));
    return acc;
  }
  if (std::holds_alternative<detail::ProductK>(n.kind)) {
    double acc = 0.0;
    for (const auto& c : n.children) acc += c.log_eval(x);
    return acc;
  }
  if (const auto* p = std::get_if<detail::PowerOfK>(&n.kind))
    return p->e * n.children[0].log_eval(x);
  if (std::holds_alternative<detail::ComposeK>(n.kind))
    return n.children[0].log_eval(n.children[1].log_eval(x));
  if (std::holds_alternative<detail::ExtendBelowOneK>(n.kind))
    return n.children[0].log_eval(x < 0.0 ? 0.0 : x);
  return std::visit(V{x}, n.kind);
}

}  // namespace rovar
