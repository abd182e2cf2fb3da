#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <cstddef>
#include <string>
#include <vector>

#include "rovar/logspace.hpp"

namespace rovar {

using cdouble = std::complex<double>;

/// Dense real LU factorization with partial pivoting, row-major storage.
class LuFactor {
 public:
  LuFactor(std::vector<double> a, std::size_t n) : a_(std::move(a)), n_(n), piv_(n) {
    if (a_.size() != n * n) throw invalid_input("LU: matrix size mismatch");
    double max_pivot = 0.0, min_pivot = pos_inf;
    for (std::size_t k = 0; k < n_; ++k) {
      std::size_t p = k;
      double best = std::abs(a_[k * n_ + k]);
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double cand = std::abs(a_[i * n_ + k]);
        if (cand > best) {
          best = cand;
          p = i;
        }
      }
      piv_[k] = p;
      if (p != k)
        for (std::size_t j = 0; j < n_; ++j) std::swap(a_[k * n_ + j], a_[p * n_ + j]);
      const double pivot = a_[k * n_ + k];
      if (pivot == 0.0)
        throw numerical_failure("LU: singular matrix at column " + std::to_string(k));
      max_pivot = std::max(max_pivot, std::abs(pivot));
      min_pivot = std::min(min_pivot, std::abs(pivot));
      for (std::size_t i = k + 1; i < n_; ++i) {
        const double f = a_[i * n_ + k] / pivot;
        a_[i * n_ + k] = f;
        for (std::size_t j = k + 1; j < n_; ++j) a_[i * n_ + j] -= f * a_[k * n_ + j];
      }
    }
    cond_ = min_pivot > 0.0 ? max_pivot / min_pivot : pos_inf;
  }

  /// Crude condition indicator: ratio of extreme pivot magnitudes.
  double condition_estimate() const { return cond_; }

  void solve(std::vector<double>& b) const {
    if (b.size() != n_) throw invalid_input("LU solve: rhs size mismatch");
    // Rows were swapped in full during factorization, so all interchanges
    // must be applied to b before the triangular sweeps, not interleaved.
    for (std::size_t k = 0; k < n_; ++k)
      if (piv_[k] != k) std::swap(b[k], b[piv_[k]]);
    for (std::size_t k = 0; k < n_; ++k)
      for (std::size_t i = k + 1; i < n_; ++i) b[i] -= a_[i * n_ + k] * b[k];
    for (std::size_t k = n_; k-- > 0;) {
      for (std::size_t j = k + 1; j < n_; ++j) b[k] -= a_[k * n_ + j] * b[j];
      b[k] /= a_[k * n_ + k];
    }
  }

  void solve(std::vector<cdouble>& b) const {
    std::vector<double> re(n_), im(n_);
    for (std::size_t i = 0; i < n_; ++i) {
      re[i] = b[i].real();
      im[i] = b[i].imag();
    }
    solve(re);
    solve(im);
    for (std::size_t i = 0; i < n_; ++i) b[i] = {re[i], im[i]};
  }

 private:
  std::vector<double> a_;
  std::size_t n_;
  std::vector<std::size_t> piv_;
  double cond_ = 0.0;
};

namespace detail {

// y = A x for row-major dense complex A.
inline void mat_vec(const std::vector<cdouble>& a, std::size_t n,
                    const std::vector<cdouble>& x, std::vector<cdouble>& y) {
  for (std::size_t i = 0; i < n; ++i) {
    cdouble acc = 0.0;
    const cdouble* row = a.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) acc += row[j] * x[j];
    y[i] = acc;
  }
}

// y = A^H x.
inline void mat_vec_adj(const std::vector<cdouble>& a, std::size_t n,
                        const std::vector<cdouble>& x, std::vector<cdouble>& y) {
  for (std::size_t j = 0; j < n; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cdouble* row = a.data() + i * n;
    for (std::size_t j = 0; j < n; ++j) y[j] += std::conj(row[j]) * x[i];
  }
}

}  // namespace detail

/// Largest eigenvalue of a Hermitian matrix by cyclic complex Jacobi
/// rotations. Deterministic; off-diagonal mass is driven below
/// tol * frobenius.
inline double hermitian_max_eigen_jacobi(std::vector<cdouble> h, std::size_t n,
                                         double tol = 1e-14) {
  if (n == 0) throw invalid_input("jacobi: empty matrix");
  if (n == 1) return h[0].real();
  double fro = 0.0;
  for (std::size_t i = 0; i < n * n; ++i) fro += std::norm(h[i]);
  fro = std::sqrt(fro);
  if (fro == 0.0) return 0.0;

  const int max_sweeps = 60;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * std::norm(h[p * n + q]);
    if (std::sqrt(off) <= tol * fro) break;

    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const cdouble hpq = h[p * n + q];
        const double apq = std::abs(hpq);
        if (apq == 0.0) continue;
        const cdouble phase = hpq / apq;  // e^{i arg}
        const double app = h[p * n + p].real();
        const double aqq = h[q * n + q].real();
        const double tau = (aqq - app) / (2.0 * apq);
        const double tt = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
        const double cc = 1.0 / std::sqrt(1.0 + tt * tt);
        const cdouble ss = tt * cc * phase;

        for (std::size_t k = 0; k < n; ++k) {
          const cdouble hkp = h[k * n + p];
          const cdouble hkq = h[k * n + q];
          h[k * n + p] = cc * hkp - std::conj(ss) * hkq;
          h[k * n + q] = ss * hkp + cc * hkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const cdouble hpk = h[p * n + k];
          const cdouble hqk = h[q * n + k];
          h[p * n + k] = cc * hpk - ss * hqk;
          h[q * n + k] = std::conj(ss) * hpk + cc * hqk;
        }
      }
  }
  double best = h[0].real();
  for (std::size_t i = 1; i < n; ++i) best = std::max(best, h[i * n + i].real());
  return best;
}

/// Largest singular value via Jacobi on A^H A. Deterministic reference route
/// for moderate dimensions.
inline double spectral_norm_jacobi(const std::vector<cdouble>& a, std::size_t n) {
  std::vector<cdouble> h(n * n, cdouble{0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      cdouble acc = 0.0;
      for (std::size_t k = 0; k < n; ++k) acc += std::conj(a[k * n + i]) * a[k * n + j];
      h[i * n + j] = acc;
    }
  const double lam = hermitian_max_eigen_jacobi(std::move(h), n);
  return lam > 0.0 ? std::sqrt(lam) : 0.0;
}

struct PowerIterResult {
  double sigma = 0.0;
  int iterations = 0;
  double tol = 0.0;
  std::uint64_t seed = 0;
  bool converged = false;
  double residual = 0.0;  // last |sigma_k - sigma_{k-1}|
};

/// Largest singular value by power iteration on A^H A with a seeded start
/// vector. Relative tolerance on successive estimates; iteration capped.
inline PowerIterResult spectral_norm_power(const std::vector<cdouble>& a, std::size_t n,
                                           double tol = 1e-10, int cap = 100000,
                                           std::uint64_t seed = 0x2545F4914F6CDD1DULL) {
  if (n == 0) throw invalid_input("power iteration: empty matrix");
  PowerIterResult out;
  out.tol = tol;
  out.seed = seed;

  // splitmix64 start vector: cheap, reproducible, no <random> engine state.
  std::uint64_t state = seed;
  auto next_unit = [&state]() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
    return static_cast<double>(z >> 11) / 9007199254740992.0 - 0.5;
  };
  std::vector<cdouble> v(n), av(n), u(n);
  for (auto& e : v) e = {next_unit(), next_unit()};

  double norm = 0.0;
  for (const auto& e : v) norm += std::norm(e);
  norm = std::sqrt(norm);
  if (norm == 0.0) throw numerical_failure("power iteration: degenerate start");
  for (auto& e : v) e /= norm;

  double sigma_prev = -1.0;
  for (int it = 1; it <= cap; ++it) {
    detail::mat_vec(a, n, v, av);
    detail::mat_vec_adj(a, n, av, u);
    double unorm = 0.0;
    for (const auto& e : u) unorm += std::norm(e);
    unorm = std::sqrt(unorm);
    if (unorm == 0.0) {
      out.sigma = 0.0;
      out.iterations = it;
      out.converged = true;
      return out;
    }
    const double sigma = std::sqrt(unorm);  // ||A^H A v|| -> sigma^2
    for (std::size_t i = 0; i < n; ++i) v[i] = u[i] / unorm;
    out.iterations = it;
    if (sigma_prev >= 0.0) out.residual = std::abs(sigma - sigma_prev);
    if (sigma_prev >= 0.0 && out.residual <= tol * std::max(sigma, 1e-300)) {
      out.sigma = sigma;
      out.converged = true;
      return out;
    }
    sigma_prev = sigma;
  }
  out.sigma = sigma_prev;
  return out;  // cap reached; caller decides whether that is fatal
}

}  // namespace rovar
