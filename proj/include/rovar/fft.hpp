#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstddef>
#include <numbers>
#include <vector>

#include "rovar/logspace.hpp"
#include "rovar/linalg.hpp"

namespace rovar {
namespace fftdetail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative radix-2 Cooley-Tukey, unnormalized. sign = -1 forward, +1 inverse.
inline void fft_pow2(std::vector<cdouble>& a, int sign) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
    const cdouble wl(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cdouble w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cdouble u = a[i + k];
        const cdouble v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

// Bluestein chirp transform for arbitrary length, unnormalized.
// Quadratic phases are reduced mod 2n in exact integer arithmetic so the
// twiddle arguments stay small for large indices.
inline void fft_bluestein(std::vector<cdouble>& a, int sign) {
  const std::size_t n = a.size();
  const std::size_t m = next_pow2(2 * n - 1);
  std::vector<cdouble> chirp(n);
  for (std::size_t j = 0; j < n; ++j) {
    const std::uint64_t j2 = (static_cast<std::uint64_t>(j) * j) % (2 * n);
    const double ang = sign * std::numbers::pi * static_cast<double>(j2) / static_cast<double>(n);
    chirp[j] = cdouble(std::cos(ang), std::sin(ang));
  }
  std::vector<cdouble> u(m, cdouble{0.0, 0.0}), v(m, cdouble{0.0, 0.0});
  for (std::size_t j = 0; j < n; ++j) u[j] = a[j] * chirp[j];
  for (std::size_t j = 0; j < n; ++j) {
    v[j] = std::conj(chirp[j]);
    if (j != 0) v[m - j] = std::conj(chirp[j]);
  }
  fft_pow2(u, -1);
  fft_pow2(v, -1);
  for (std::size_t j = 0; j < m; ++j) u[j] *= v[j];
  fft_pow2(u, +1);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = u[k] * scale * chirp[k];
}

}  // namespace fftdetail

/// In-place unnormalized DFT of any length: X_k = sum_j x_j e^{sign i 2pi jk/n}
/// with sign = -1 (forward) or +1 (inverse; divide by n outside if needed).
inline void dft_inplace(std::vector<cdouble>& a, bool inverse) {
  if (a.empty()) throw invalid_input("dft: empty input");
  if (a.size() == 1) return;
  if (fftdetail::is_pow2(a.size()))
    fftdetail::fft_pow2(a, inverse ? +1 : -1);
  else
    fftdetail::fft_bluestein(a, inverse ? +1 : -1);
}

/// Row-major n-dimensional unnormalized DFT, applied axis by axis.
inline void dft_nd(std::vector<cdouble>& data, const std::vector<std::size_t>& shape,
                   bool inverse) {
  std::size_t total = 1;
  for (std::size_t s : shape) {
    if (s == 0) throw invalid_input("dft: zero axis length");
    total *= s;
  }
  if (data.size() != total) throw invalid_input("dft: data size does not match shape");

  std::size_t stride_after = 1;  // product of axis lengths after the current one
  for (std::size_t axis = shape.size(); axis-- > 0;) {
    const std::size_t len = shape[axis];
    const std::size_t blocks = total / (len * stride_after);
    std::vector<cdouble> line(len);
    for (std::size_t b = 0; b < blocks; ++b) {
      for (std::size_t off = 0; off < stride_after; ++off) {
        const std::size_t base = b * len * stride_after + off;
        for (std::size_t k = 0; k < len; ++k) line[k] = data[base + k * stride_after];
        dft_inplace(line, inverse);
        for (std::size_t k = 0; k < len; ++k) data[base + k * stride_after] = line[k];
      }
    }
    stride_after *= len;
  }
}

}  // namespace rovar
