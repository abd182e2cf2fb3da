#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"

#include "rovar/grid.hpp"
#include "rovar/param_expr.hpp"
#include "rovar/ro_analysis.hpp"
#include "rovar/spectral.hpp"
#include "rovar/transforms.hpp"

namespace rovar {

using ojson = nlohmann::ordered_json;

namespace serdetail {

// JSON has no inf/nan; log-domain companions carry the information instead.
inline ojson finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

inline std::vector<double> reals(const std::vector<cdouble>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].real();
  return out;
}

inline std::vector<double> imags(const std::vector<cdouble>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i].imag();
  return out;
}

inline std::vector<cdouble> zip_complex(const std::vector<double>& re,
                                        const std::vector<double>& im) {
  if (re.size() != im.size()) throw invalid_input("json: re/im arrays differ in length");
  std::vector<cdouble> out(re.size());
  for (std::size_t i = 0; i < re.size(); ++i) out[i] = {re[i], im[i]};
  return out;
}

inline ojson curve_to_json(const SampledCurve& c) {
  return ojson{{"x", c.xs()}, {"value", c.values()}};
}

inline SampledCurve curve_from_json(const ojson& j) {
  return SampledCurve(j.at("x").get<std::vector<double>>(),
                      j.at("value").get<std::vector<double>>());
}

inline std::vector<double> exp_all(const std::vector<double>& v) {
  std::vector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = std::exp(v[i]);
  return out;
}

}  // namespace serdetail

inline ojson expr_to_json(const ParamExpr& e) {
  struct V {
    const ParamExpr& e;
    ojson operator()(const detail::PowerK& k) const {
      return ojson{{"kind", "power"}, {"exponent", k.s}};
    }
    ojson operator()(const detail::LogShiftK&) const { return ojson{{"kind", "log_shift"}}; }
    ojson operator()(const detail::ConstantK& k) const {
      return ojson{{"kind", "constant"}, {"value", k.v}};
    }
    ojson operator()(const detail::SumK&) const {
      ojson terms = ojson::array();
      for (const ParamExpr& c : e.node().children) terms.push_back(expr_to_json(c));
      return ojson{{"kind", "sum"}, {"terms", std::move(terms)}};
    }
    ojson operator()(const detail::ProductK&) const {
      ojson factors = ojson::array();
      for (const ParamExpr& c : e.node().children) factors.push_back(expr_to_json(c));
      return ojson{{"kind", "product"}, {"factors", std::move(factors)}};
    }
    ojson operator()(const detail::PowerOfK& k) const {
      return ojson{{"kind", "power_of"},
                   {"base", expr_to_json(e.node().children[0])},
                   {"exponent", k.e}};
    }
    ojson operator()(const detail::ComposeK&) const {
      return ojson{{"kind", "compose"},
                   {"outer", expr_to_json(e.node().children[0])},
                   {"inner", expr_to_json(e.node().children[1])}};
    }
    ojson operator()(const detail::AppendixK&) const { return ojson{{"kind", "appendix"}}; }
    ojson operator()(const detail::RepresentationK& k) const {
      return ojson{{"kind", "representation"},
                   {"beta", serdetail::curve_to_json(k.beta)},
                   {"eps", serdetail::curve_to_json(k.eps)}};
    }
    ojson operator()(const detail::TableK& k) const {
      return ojson{{"kind", "table"},
                   {"t", serdetail::exp_all(k.lx)},
                   {"value", serdetail::exp_all(k.lv)}};
    }
    ojson operator()(const detail::ExtendBelowOneK&) const {
      return ojson{{"kind", "extend_below_one"}, {"inner", expr_to_json(e.node().children[0])}};
    }
    ojson operator()(const detail::EnvelopeK& k) const {
      return ojson{{"kind", "concave_envelope"},
                   {"t", k.t},
                   {"value", k.v},
                   {"left_slope", k.left_slope},
                   {"left_lift", k.left_lift}};
    }
  };
  return std::visit(V{e}, e.node().kind);
}

inline ParamExpr expr_from_json(const ojson& j) {
  if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
    throw invalid_input("expression json: every node needs a string 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "power") return ParamExpr::power(j.at("exponent").get<double>());
  if (kind == "log_shift") return ParamExpr::log_shift();
  if (kind == "constant") return ParamExpr::constant(j.at("value").get<double>());
  if (kind == "sum") {
    std::vector<ParamExpr> terms;
    for (const ojson& t : j.at("terms")) terms.push_back(expr_from_json(t));
    return ParamExpr::sum(std::move(terms));
  }
  if (kind == "product") {
    std::vector<ParamExpr> factors;
    for (const ojson& f : j.at("factors")) factors.push_back(expr_from_json(f));
    return ParamExpr::product(std::move(factors));
  }
  if (kind == "power_of")
    return ParamExpr::power_of(expr_from_json(j.at("base")), j.at("exponent").get<double>());
  if (kind == "compose")
    return ParamExpr::compose(expr_from_json(j.at("outer")), expr_from_json(j.at("inner")));
  if (kind == "appendix") return ParamExpr::appendix();
  if (kind == "representation")
    return ParamExpr::representation(serdetail::curve_from_json(j.at("beta")),
                                     serdetail::curve_from_json(j.at("eps")));
  if (kind == "table") {
    const auto t = j.at("t").get<std::vector<double>>();
    const auto v = j.at("value").get<std::vector<double>>();
    if (t.size() != v.size()) throw invalid_input("table json: t/value length mismatch");
    std::vector<std::pair<double, double>> points(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) points[i] = {t[i], v[i]};
    return ParamExpr::table(points);
  }
  if (kind == "extend_below_one") return ParamExpr::extend_below_one(expr_from_json(j.at("inner")));
  if (kind == "concave_envelope")
    return ParamExpr::concave_envelope(
        j.at("t").get<std::vector<double>>(), j.at("value").get<std::vector<double>>(),
        j.at("left_slope").get<double>(), j.at("left_lift").get<double>());
  throw invalid_input("expression json: unknown kind '" + kind + "'");
}

inline ojson to_json(const RoWitness& w) {
  return ojson{{"log_t", w.log_t},
               {"log_lambda", w.log_lambda},
               {"t", serdetail::finite_or_null(w.t)},
               {"lambda", serdetail::finite_or_null(w.lambda)}};
}

inline ojson to_json(const ROReport& r) {
  ojson j{{"is_member", r.is_member},
          {"s0", r.s0},
          {"s1", r.s1},
          {"c", serdetail::finite_or_null(r.c)},
          {"log_c", r.log_c},
          {"grid", r.grid_spec}};
  j["witness"] = r.witness ? to_json(*r.witness) : ojson(nullptr);
  return j;
}

inline ojson to_json(const IndexEstimate& e) {
  return ojson{{"sigma0", e.sigma0},
               {"sigma1", e.sigma1},
               {"bracket", e.bracket},
               {"attained_within_grid", e.attained_within_grid},
               {"attainment_log_c", e.attainment_log_c}};
}

inline ojson to_json(const WeightCondition& w) {
  return ojson{{"l", w.l}, {"c", w.c}};
}

inline ojson to_json(const PseudoconcavityReport& p) {
  return ojson{{"r", p.r},
               {"log_c_best", p.log_c_best},
               {"c_best", serdetail::finite_or_null(p.c_best)},
               {"worst_log_t", p.worst_log_t},
               {"worst_log_tau", p.worst_log_tau},
               {"passes", p.passes},
               {"cap", p.cap}};
}

inline ojson to_json(const EmbeddingScanReport& e) {
  ojson j{{"c0", serdetail::finite_or_null(e.c0)},
          {"c1", serdetail::finite_or_null(e.c1)},
          {"log_c0", e.log_c0},
          {"log_c1", e.log_c1},
          {"bounded", e.bounded},
          {"log_cap", e.log_cap}};
  if (!e.bounded) j["witness_log_t"] = e.witness_log_t;
  return j;
}

inline ojson to_json(const OperatorNormTriple& n) {
  ojson j{{"n0", n.n0}, {"n1", n.n1}, {"npsi", n.npsi}, {"method", n.method}};
  if (n.method == "power-iteration") {
    j["tol"] = n.tol;
    j["seed"] = n.seed;
    j["iterations"] = n.iterations;
  }
  return j;
}

inline ojson to_json(const DiagonalCouple& c) {
  return ojson{{"weights", c.weights}, {"spectrum", c.spectrum}, {"m", c.m}};
}

inline DiagonalCouple couple_from_json(const ojson& j) {
  return DiagonalCouple::create(j.at("weights").get<std::vector<double>>(),
                                j.at("spectrum").get<std::vector<double>>());
}

inline ojson map_to_json(const LinearMap& m) {
  switch (m.kind()) {
    case LinearMap::Kind::diagonal:
    case LinearMap::Kind::convolution: {
      const char* kind = m.kind() == LinearMap::Kind::diagonal ? "diagonal" : "convolution";
      return ojson{{"kind", kind},
                   {"re", serdetail::reals(m.taus())},
                   {"im", serdetail::imags(m.taus())}};
    }
    case LinearMap::Kind::rank_one:
      return ojson{{"kind", "rank_one"},
                   {"dim", m.dim()},
                   {"src", m.src()},
                   {"dst", m.dst()},
                   {"alpha_re", m.alpha().real()},
                   {"alpha_im", m.alpha().imag()}};
    case LinearMap::Kind::dense: {
      if (m.dim() > 512) throw invalid_input("map json: dense matrices limited to 512 x 512");
      return ojson{{"kind", "dense"},
                   {"n", m.dim()},
                   {"re", serdetail::reals(m.matrix())},
                   {"im", serdetail::imags(m.matrix())}};
    }
  }
  throw invalid_input("map json: unknown kind");
}

inline LinearMap map_from_json(const ojson& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "diagonal" || kind == "convolution") {
    std::vector<cdouble> taus = serdetail::zip_complex(j.at("re").get<std::vector<double>>(),
                                                       j.at("im").get<std::vector<double>>());
    return kind == "diagonal" ? LinearMap::diagonal(std::move(taus))
                              : LinearMap::convolution(std::move(taus));
  }
  if (kind == "rank_one")
    return LinearMap::rank_one(
        cdouble{j.at("alpha_re").get<double>(), j.at("alpha_im").get<double>()},
        j.at("src").get<std::size_t>(), j.at("dst").get<std::size_t>(),
        j.at("dim").get<std::size_t>());
  if (kind == "dense") {
    const std::size_t n = j.at("n").get<std::size_t>();
    if (n > 512) throw invalid_input("map json: dense matrices limited to 512 x 512");
    return LinearMap::dense(serdetail::zip_complex(j.at("re").get<std::vector<double>>(),
                                                   j.at("im").get<std::vector<double>>()),
                            n);
  }
  throw invalid_input("map json: unknown kind '" + kind + "'");
}

inline ojson grid_to_json(const GridDistribution& g) {
  return ojson{{"n", g.dim()},
               {"shape", g.shape},
               {"box", g.box},
               {"re", serdetail::reals(g.samples)},
               {"im", serdetail::imags(g.samples)}};
}

inline GridDistribution grid_from_json(const ojson& j) {
  GridDistribution g = GridDistribution::create(
      j.at("shape").get<std::vector<std::size_t>>(), j.at("box").get<std::vector<double>>(),
      serdetail::zip_complex(j.at("re").get<std::vector<double>>(),
                             j.at("im").get<std::vector<double>>()));
  if (j.contains("n") && j.at("n").get<std::size_t>() != g.dim())
    throw invalid_input("grid json: 'n' disagrees with shape rank");
  return g;
}

}  // namespace rovar
