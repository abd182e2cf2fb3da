#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <istream>
#include <ostream>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "rovar/fft.hpp"
#include "rovar/logspace.hpp"
#include "rovar/param_expr.hpp"
#include "rovar/ro_analysis.hpp"
#include "rovar/spectral.hpp"
#include "rovar/transforms.hpp"

namespace rovar {

/// Complex samples on a uniform periodic grid in n <= 3 dimensions,
/// row-major, at points x = (L/N) * k per axis.
struct GridDistribution {
  std::vector<std::size_t> shape;  // N per axis, even
  std::vector<double> box;         // L per axis, > 0
  std::vector<cdouble> samples;    // row-major, size = prod(N)

  std::size_t dim() const { return shape.size(); }
  std::size_t total() const {
    std::size_t t = 1;
    for (std::size_t s : shape) t *= s;
    return t;
  }

  static GridDistribution create(std::vector<std::size_t> shape, std::vector<double> box,
                                 std::vector<cdouble> samples) {
    if (shape.empty() || shape.size() > 3)
      throw invalid_input("grid: dimension must be 1, 2, or 3");
    if (box.size() != shape.size()) throw invalid_input("grid: box/shape rank mismatch");
    std::size_t total = 1;
    for (std::size_t n : shape) {
      if (n == 0 || n % 2 != 0) throw invalid_input("grid: axis sizes must be positive and even");
      total *= n;
    }
    for (double l : box)
      if (!(std::isfinite(l) && l > 0.0)) throw invalid_input("grid: box lengths must be positive");
    if (samples.size() != total) throw invalid_input("grid: sample count does not match shape");
    for (const cdouble& s : samples)
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw invalid_input("grid: samples must be finite");
    return GridDistribution{std::move(shape), std::move(box), std::move(samples)};
  }
};

/// Boolean mask over a grid marking the Omega-points of a quotient norm.
struct DomainMask {
  std::vector<std::size_t> shape;
  std::vector<double> box;
  std::vector<bool> bits;  // row-major, at least one set

  std::size_t total() const {
    std::size_t t = 1;
    for (std::size_t s : shape) t *= s;
    return t;
  }
  std::size_t count() const {
    std::size_t c = 0;
    for (bool b : bits) c += b ? 1 : 0;
    return c;
  }

  static DomainMask create(std::vector<std::size_t> shape, std::vector<double> box,
                           std::vector<bool> bits) {
    GridDistribution::create(shape, box,
                             std::vector<cdouble>(bits.size()));  // reuse geometry checks
    bool any = false;
    for (bool b : bits) any = any || b;
    if (!any) throw invalid_input("mask: must mark at least one point");
    return DomainMask{std::move(shape), std::move(box), std::move(bits)};
  }

  static DomainMask full(const GridDistribution& g) {
    return create(g.shape, g.box, std::vector<bool>(g.total(), true));
  }
};

namespace griddetail {

// Signed frequency index of DFT bin b on an axis of even length n: bins
// 0..n/2-1 are k = b, bins n/2..n-1 are k = b - n, so k in [-n/2, n/2).
inline long signed_index(std::size_t b, std::size_t n) {
  return b < n / 2 ? static_cast<long>(b) : static_cast<long>(b) - static_cast<long>(n);
}

// <xi> = sqrt(1 + |xi|^2) at each DFT bin, row-major over the full grid.
inline std::vector<double> bracket_per_bin(const std::vector<std::size_t>& shape,
                                           const std::vector<double>& box) {
  std::size_t total = 1;
  for (std::size_t s : shape) total *= s;
  std::vector<double> out(total);
  std::vector<std::size_t> idx(shape.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    double q = 1.0;
    for (std::size_t ax = 0; ax < shape.size(); ++ax) {
      const double xi =
          2.0 * std::numbers::pi * static_cast<double>(signed_index(idx[ax], shape[ax])) /
          box[ax];
      q += xi * xi;
    }
    out[flat] = std::sqrt(q);
    for (std::size_t ax = shape.size(); ax-- > 0;) {
      if (++idx[ax] < shape[ax]) break;
      idx[ax] = 0;
    }
  }
  return out;
}

inline std::vector<std::vector<double>> frequency_vectors(const std::vector<std::size_t>& shape,
                                                          const std::vector<double>& box) {
  std::size_t total = 1;
  for (std::size_t s : shape) total *= s;
  std::vector<std::vector<double>> out(total);
  std::vector<std::size_t> idx(shape.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    std::vector<double> xi(shape.size());
    for (std::size_t ax = 0; ax < shape.size(); ++ax)
      xi[ax] = 2.0 * std::numbers::pi *
               static_cast<double>(signed_index(idx[ax], shape[ax])) / box[ax];
    out[flat] = std::move(xi);
    for (std::size_t ax = shape.size(); ax-- > 0;) {
      if (++idx[ax] < shape[ax]) break;
      idx[ax] = 0;
    }
  }
  return out;
}

inline double cell_volume(const GridDistribution& g) {
  double s = 1.0;
  for (std::size_t ax = 0; ax < g.dim(); ++ax)
    s *= g.box[ax] / static_cast<double>(g.shape[ax]);
  return s;
}

}  // namespace griddetail

/// Unitary DFT of the samples: forward unnormalized transform divided by
/// sqrt(prod N), so that sum |u_x|^2 = sum |u_hat_k|^2 exactly (Parseval).
inline std::vector<cdouble> unitary_dft(const GridDistribution& g) {
  std::vector<cdouble> hat = g.samples;
  dft_nd(hat, g.shape, false);
  const double scale = 1.0 / std::sqrt(static_cast<double>(g.total()));
  for (cdouble& c : hat) c *= scale;
  return hat;
}

/// ((L/N)^n sum phi(<xi>)^2 |u_hat|^2)^{1/2}; phi == 1 reproduces the
/// Riemann-sum L2 box norm by Parseval.
inline double hormander_norm(const GridDistribution& g, const ParamExpr& phi) {
  for (std::size_t n : g.shape)
    if (n % 2 != 0) throw invalid_input("hormander_norm: axis sizes must be even");
  const std::vector<cdouble> hat = unitary_dft(g);
  const std::vector<double> bracket = griddetail::bracket_per_bin(g.shape, g.box);
  CompensatedSum acc;
  for (std::size_t b = 0; b < hat.size(); ++b) {
    const double w = detail::eval_param_at(phi, bracket[b]);
    acc.add(w * w * std::norm(hat[b]));
  }
  const double s2 = griddetail::cell_volume(g) * acc.value();
  return s2 > 0.0 ? std::sqrt(s2) : 0.0;
}

struct QuotientResult {
  double norm = 0.0;
  GridDistribution minimizer;  // the extension realizing the infimum
  double condition_estimate = 0.0;
};

/// Minimum of hormander_norm(u, phi) over all u agreeing with v on the
/// masked points. With A = s F* Phi^2 F (s = cell volume, F unitary) the
/// minimizer is u = A^{-1} M^T mu where (M A^{-1} M^T) mu = v; the Gram
/// matrix M A^{-1} M^T is a real symmetric positive-definite convolution
/// table, assembled from one inverse DFT of the phi^{-2} symbol.
inline QuotientResult quotient_solve(const std::vector<cdouble>& v, const DomainMask& mask,
                                     const ParamExpr& phi) {
  const std::size_t total = mask.total();
  if (total > 4096) throw invalid_input("quotient norm: grid size cap is 4096 points");
  const std::size_t p = mask.count();
  if (v.size() != p) throw invalid_input("quotient norm: data size does not match mask");

  const std::size_t rank = mask.shape.size();
  double s = 1.0;
  for (std::size_t ax = 0; ax < rank; ++ax)
    s *= mask.box[ax] / static_cast<double>(mask.shape[ax]);

  // Inverse-symbol kernel g[d] = sum_k phi^{-2}(<xi_k>) e^{+2pi i k.d/N}:
  // real because the symbol is even under k -> -k on the even grid.
  const std::vector<double> bracket = griddetail::bracket_per_bin(mask.shape, mask.box);
  std::vector<cdouble> kernel(total);
  for (std::size_t b = 0; b < total; ++b) {
    const double w = detail::eval_param_at(phi, bracket[b]);
    kernel[b] = cdouble{1.0 / (w * w), 0.0};
  }
  dft_nd(kernel, mask.shape, true);

  std::vector<std::size_t> masked;
  masked.reserve(p);
  for (std::size_t i = 0; i < total; ++i)
    if (mask.bits[i]) masked.push_back(i);

  // Row-major strides and per-point multi-indices for wrapped differences.
  std::vector<std::size_t> stride(rank, 1);
  for (std::size_t ax = rank - 1; ax-- > 0;) stride[ax] = stride[ax + 1] * mask.shape[ax + 1];
  std::vector<std::vector<std::size_t>> coords(p, std::vector<std::size_t>(rank));
  for (std::size_t j = 0; j < p; ++j) {
    std::size_t rem = masked[j];
    for (std::size_t ax = 0; ax < rank; ++ax) {
      coords[j][ax] = rem / stride[ax];
      rem %= stride[ax];
    }
  }

  const double gram_scale = 1.0 / (static_cast<double>(total) * s);
  std::vector<double> gram(p * p);
  for (std::size_t j = 0; j < p; ++j)
    for (std::size_t l = 0; l < p; ++l) {
      std::size_t flat = 0;
      for (std::size_t ax = 0; ax < rank; ++ax) {
        const std::size_t d =
            (coords[j][ax] + mask.shape[ax] - coords[l][ax]) % mask.shape[ax];
        flat += d * stride[ax];
      }
      gram[j * p + l] = kernel[flat].real() * gram_scale;
    }

  QuotientResult out;
  std::vector<cdouble> mu = v;
  try {
    LuFactor lu(std::move(gram), p);
    out.condition_estimate = lu.condition_estimate();
    lu.solve(mu);
  } catch (const numerical_failure& e) {
    char buf[192];
    std::snprintf(buf, sizeof buf, "quotient norm: singular constraint system (%s)", e.what());
    throw numerical_failure(buf);
  }

  CompensatedSum acc;  // norm^2 = Re <mu, v>
  for (std::size_t j = 0; j < p; ++j)
    acc.add(mu[j].real() * v[j].real() + mu[j].imag() * v[j].imag());
  out.norm = acc.value() > 0.0 ? std::sqrt(acc.value()) : 0.0;

  // Minimizer u = s^{-1} F* Phi^{-2} F (M^T mu), with unnormalized
  // transforms contributing an extra 1/total.
  std::vector<cdouble> z(total, cdouble{0.0, 0.0});
  for (std::size_t j = 0; j < p; ++j) z[masked[j]] = mu[j];
  dft_nd(z, mask.shape, false);
  for (std::size_t b = 0; b < total; ++b) {
    const double w = detail::eval_param_at(phi, bracket[b]);
    z[b] /= w * w;
  }
  dft_nd(z, mask.shape, true);
  const double inv = 1.0 / (static_cast<double>(total) * s);
  for (cdouble& c : z) c *= inv;
  out.minimizer = GridDistribution::create(mask.shape, mask.box, std::move(z));
  return out;
}

inline double quotient_norm(const std::vector<cdouble>& v, const DomainMask& mask,
                            const ParamExpr& phi) {
  return quotient_solve(v, mask, phi).norm;
}

/// Samples of a distribution at the masked points, row-major order.
inline std::vector<cdouble> restrict_to_mask(const GridDistribution& g, const DomainMask& mask) {
  if (g.shape != mask.shape) throw invalid_input("restrict: mask/grid shape mismatch");
  std::vector<cdouble> v;
  v.reserve(mask.count());
  for (std::size_t i = 0; i < g.total(); ++i)
    if (mask.bits[i]) v.push_back(g.samples[i]);
  return v;
}

/// Relative discrepancy between the grid phi-norm of u and the interpolation
/// norm of its Fourier coefficients on the matching Sobolev couple with the
/// parameter derived from phi at (s0, s1). The two routes share only the
/// sample data; per frequency they agree by w_j psi(lambda_j) = phi(<xi_j>).
inline double norm_identity_check(const GridDistribution& u, const ParamExpr& phi, double s0,
                                  double s1) {
  if (!(s0 < s1)) throw invalid_input("norm identity: requires s0 < s1");
  const double a = hormander_norm(u, phi);

  const ParamExpr psi = psi_from_phi(phi, s0, s1);
  const DiagonalCouple couple =
      make_sobolev_couple(griddetail::frequency_vectors(u.shape, u.box), s0, s1);
  std::vector<cdouble> coeffs = unitary_dft(u);
  const double root_s = std::sqrt(griddetail::cell_volume(u));
  for (cdouble& c : coeffs) c *= root_s;
  const double b = interp_norm(coeffs, couple, psi);

  const double mx = std::max(a, b);
  return mx == 0.0 ? 0.0 : std::abs(a - b) / mx;
}

struct EmbeddingScanReport {
  double c0 = 0.0;  // largest constant with c0 t^{s0} <= phi(t) on the scan
  double c1 = 0.0;  // smallest constant with phi(t) <= c1 t^{s1}
  double log_c0 = 0.0;
  double log_c1 = 0.0;
  bool bounded = false;
  double witness_log_t = 0.0;  // extremal t when a constant escapes the cap
  double log_cap = 0.0;
};

/// Scans t in [1, t_max] geometrically for the two-sided power envelope
/// c0 t^{s0} <= phi(t) <= c1 t^{s1}; constants escaping the cap yield a
/// counterwitness instead of a bounded report.
inline EmbeddingScanReport embedding_scan(const ParamExpr& phi, double s0, double s1,
                                          const RoScanConfig& cfg) {
  if (!(s0 < s1)) throw invalid_input("embedding scan: requires s0 < s1");
  const std::vector<double> x = cfg.build_grid().x;
  EmbeddingScanReport out;
  out.log_cap = cfg.log_cap;
  double lo = pos_inf, hi = neg_inf, lo_x = 0.0, hi_x = 0.0;
  for (double xi : x) {
    const double lv = phi.log_eval(xi);
    const double d0 = lv - s0 * xi;
    const double d1 = lv - s1 * xi;
    if (d0 < lo) {
      lo = d0;
      lo_x = xi;
    }
    if (d1 > hi) {
      hi = d1;
      hi_x = xi;
    }
  }
  out.log_c0 = lo;
  out.log_c1 = hi;
  out.c0 = std::exp(lo);
  out.c1 = std::exp(hi);
  out.bounded = hi <= cfg.log_cap && lo >= -cfg.log_cap;
  if (!out.bounded) out.witness_log_t = hi > cfg.log_cap ? hi_x : lo_x;
  return out;
}

inline EmbeddingScanReport embedding_scan(const ParamExpr& phi, double s0, double s1,
                                          double t_max) {
  return embedding_scan(phi, s0, s1, RoScanConfig::for_t_max(t_max));
}

// ---------------------------------------------------------------------------
// Binary container I/O. Header: [n, N_1..N_n, L_1..L_n] as little-endian
// IEEE doubles (counts stored exactly); payload: interleaved re/im doubles
// row-major for distributions, packed bits LSB-first for masks.

namespace griddetail {

inline void put_double_le(std::ostream& os, double v) {
  std::uint64_t bits;
  static_assert(sizeof bits == sizeof v);
  std::memcpy(&bits, &v, sizeof bits);
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((bits >> (8 * i)) & 0xFF);
  os.write(reinterpret_cast<const char*>(b), 8);
}

inline double get_double_le(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  if (!is) throw invalid_input("grid io: truncated file");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  double v;
  std::memcpy(&v, &bits, sizeof v);
  return v;
}

inline std::size_t get_count(std::istream& is, const char* what) {
  const double v = get_double_le(is);
  if (!(v >= 1.0 && v <= 1e9 && v == std::floor(v))) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "grid io: bad %s in header", what);
    throw invalid_input(buf);
  }
  return static_cast<std::size_t>(v);
}

inline void write_header(std::ostream& os, const std::vector<std::size_t>& shape,
                         const std::vector<double>& box) {
  put_double_le(os, static_cast<double>(shape.size()));
  for (std::size_t n : shape) put_double_le(os, static_cast<double>(n));
  for (double l : box) put_double_le(os, l);
}

inline void read_header(std::istream& is, std::vector<std::size_t>& shape,
                        std::vector<double>& box) {
  const std::size_t n = get_count(is, "dimension");
  if (n > 3) throw invalid_input("grid io: dimension must be 1, 2, or 3");
  shape.resize(n);
  box.resize(n);
  for (std::size_t ax = 0; ax < n; ++ax) shape[ax] = get_count(is, "axis size");
  for (std::size_t ax = 0; ax < n; ++ax) box[ax] = get_double_le(is);
}

}  // namespace griddetail

inline void write_distribution(std::ostream& os, const GridDistribution& g) {
  griddetail::write_header(os, g.shape, g.box);
  for (const cdouble& c : g.samples) {
    griddetail::put_double_le(os, c.real());
    griddetail::put_double_le(os, c.imag());
  }
  if (!os) throw numerical_failure("grid io: write failed");
}

inline GridDistribution read_distribution(std::istream& is) {
  std::vector<std::size_t> shape;
  std::vector<double> box;
  griddetail::read_header(is, shape, box);
  std::size_t total = 1;
  for (std::size_t n : shape) total *= n;
  std::vector<cdouble> samples(total);
  for (std::size_t i = 0; i < total; ++i) {
    const double re = griddetail::get_double_le(is);
    const double im = griddetail::get_double_le(is);
    samples[i] = {re, im};
  }
  return GridDistribution::create(std::move(shape), std::move(box), std::move(samples));
}

inline void write_mask(std::ostream& os, const DomainMask& mask) {
  griddetail::write_header(os, mask.shape, mask.box);
  unsigned char byte = 0;
  int fill = 0;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    if (mask.bits[i]) byte = static_cast<unsigned char>(byte | (1u << fill));
    if (++fill == 8) {
      os.put(static_cast<char>(byte));
      byte = 0;
      fill = 0;
    }
  }
  if (fill != 0) os.put(static_cast<char>(byte));
  if (!os) throw numerical_failure("grid io: write failed");
}

inline DomainMask read_mask(std::istream& is) {
  std::vector<std::size_t> shape;
  std::vector<double> box;
  griddetail::read_header(is, shape, box);
  std::size_t total = 1;
  for (std::size_t n : shape) total *= n;
  std::vector<bool> bits(total);
  unsigned char byte = 0;
  for (std::size_t i = 0; i < total; ++i) {
    if (i % 8 == 0) {
      int c = is.get();
      if (c == EOF) throw invalid_input("grid io: truncated file");
      byte = static_cast<unsigned char>(c);
    }
    bits[i] = ((byte >> (i % 8)) & 1u) != 0;
  }
  return DomainMask::create(std::move(shape), std::move(box), std::move(bits));
}

}  // namespace rovar
