#pragma once

// Dense Golub-Kahan-Reinsch SVD: Householder bidiagonalization followed by
// implicit-shift QR sweeps on the bidiagonal, in the layout of LINPACK dsvdc.
// Only right singular vectors are accumulated.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

#include "svloc/matrix.hpp"

namespace svloc::detail {

// Column-major working copy; column j occupies [j*rows, (j+1)*rows).
struct ColumnMajor {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;

  double* col(std::size_t j) noexcept { return a.data() + j * rows; }
  const double* col(std::size_t j) const noexcept { return a.data() + j * rows; }
};

inline ColumnMajor to_column_major(const Matrix& x) {
  ColumnMajor cm{x.rows(), x.cols(), std::vector<double>(x.size())};
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < x.cols(); ++j) cm.a[j * x.rows() + i] = r[j];
  }
  return cm;
}

// Four independent partial sums; keeps the add chain from serializing.
inline double dot_range(const double* x, const double* y, std::size_t len) noexcept {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= len; i += 4) {
    s0 += x[i] * y[i];
    s1 += x[i + 1] * y[i + 1];
    s2 += x[i + 2] * y[i + 2];
    s3 += x[i + 3] * y[i + 3];
  }
  for (; i < len; ++i) s0 += x[i] * y[i];
  return (s0 + s1) + (s2 + s3);
}

inline void axpy_range(double alpha, const double* x, double* y, std::size_t len) noexcept {
  for (std::size_t i = 0; i < len; ++i) y[i] += alpha * x[i];
}

inline double norm_range(const double* x, std::size_t len) noexcept {
  double scale = 0.0;
  double ssq = 1.0;
  for (std::size_t i = 0; i < len; ++i) {
    if (x[i] == 0.0) continue;
    const double v = std::abs(x[i]);
    if (scale < v) {
      ssq = 1.0 + ssq * (scale / v) * (scale / v);
      scale = v;
    } else {
      ssq += (v / scale) * (v / scale);
    }
  }
  return scale * std::sqrt(ssq);
}

inline void rotate(double* x, double* y, std::size_t len, double cs, double sn) noexcept {
  for (std::size_t i = 0; i < len; ++i) {
    const double t = cs * x[i] + sn * y[i];
    y[i] = -sn * x[i] + cs * y[i];
    x[i] = t;
  }
}

struct BidiagonalSvd {
  std::vector<double> s;  // descending, nonnegative
  ColumnMajor v;          // n x n right singular vectors (column k pairs with s[k]); empty unless requested
  bool converged = true;
};

// Requires rows >= cols >= 1. Consumes the working copy.
inline BidiagonalSvd golub_kahan_svd(ColumnMajor a, bool want_v, std::size_t max_sweeps_per_value = 75) {
  const std::size_t m = a.rows;
  const std::size_t n = a.cols;
  BidiagonalSvd out;
  if (n == 0) return out;

  std::vector<double> s(n + 1, 0.0);
  std::vector<double> e(n, 0.0);
  std::vector<double> work(m, 0.0);
  ColumnMajor v;
  if (want_v) v = ColumnMajor{n, n, std::vector<double>(n * n, 0.0)};

  const std::size_t nct = std::min(m - 1, n);
  const std::size_t nrt = n >= 2 ? std::min(n - 2, m) : 0;
  const std::size_t kmax = std::max(nct, nrt);

  // Householder reduction to upper bidiagonal form: diagonal in s, superdiagonal in e.
  for (std::size_t k = 0; k < kmax; ++k) {
    double* ak = a.col(k);
    if (k < nct) {
      s[k] = norm_range(ak + k, m - k);
      if (s[k] != 0.0) {
        if (ak[k] < 0.0) s[k] = -s[k];
        const double inv = 1.0 / s[k];
        for (std::size_t i = k; i < m; ++i) ak[i] *= inv;
        ak[k] += 1.0;
      }
      s[k] = -s[k];
    }
    for (std::size_t j = k + 1; j < n; ++j) {
      double* aj = a.col(j);
      if (k < nct && s[k] != 0.0) {
        const double t = -dot_range(ak + k, aj + k, m - k) / ak[k];
        axpy_range(t, ak + k, aj + k, m - k);
      }
      e[j] = aj[k];
    }
    if (k < nrt) {
      e[k] = norm_range(e.data() + k + 1, n - k - 1);
      if (e[k] != 0.0) {
        if (e[k + 1] < 0.0) e[k] = -e[k];
        const double inv = 1.0 / e[k];
        for (std::size_t i = k + 1; i < n; ++i) e[i] *= inv;
        e[k + 1] += 1.0;
      }
      e[k] = -e[k];
      if (k + 1 < m && e[k] != 0.0) {
        std::fill(work.begin() + static_cast<std::ptrdiff_t>(k + 1), work.end(), 0.0);
        for (std::size_t j = k + 1; j < n; ++j) axpy_range(e[j], a.col(j) + k + 1, work.data() + k + 1, m - k - 1);
        for (std::size_t j = k + 1; j < n; ++j)
          axpy_range(-e[j] / e[k + 1], work.data() + k + 1, a.col(j) + k + 1, m - k - 1);
      }
      if (want_v)
        for (std::size_t i = k + 1; i < n; ++i) v.col(k)[i] = e[i];
    }
  }

  // Final bidiagonal of order p.
  std::size_t p = std::min(n, m + 1);
  if (nct < n) s[nct] = a.col(nct)[nct];
  if (m < p) s[p - 1] = 0.0;
  if (nrt + 1 < p) e[nrt] = a.col(p - 1)[nrt];
  e[p - 1] = 0.0;

  if (want_v) {
    for (std::size_t kk = n; kk-- > 0;) {
      double* vk = v.col(kk);
      if (kk < nrt && e[kk] != 0.0) {
        for (std::size_t j = kk + 1; j < n; ++j) {
          double* vj = v.col(j);
          const double t = -dot_range(vk + kk + 1, vj + kk + 1, n - kk - 1) / vk[kk + 1];
          axpy_range(t, vk + kk + 1, vj + kk + 1, n - kk - 1);
        }
      }
      std::fill(vk, vk + n, 0.0);
      vk[kk] = 1.0;
    }
  }

  // Implicit-shift QR iterations on the bidiagonal.
  const std::size_t pp = p - 1;
  const double eps = std::numeric_limits<double>::epsilon();
  const double tiny = std::ldexp(1.0, -966);
  std::size_t total_sweeps = 0;
  const std::size_t sweep_cap = max_sweeps_per_value * n + 10;

  while (p > 0) {
    if (total_sweeps > sweep_cap) {
      out.converged = false;
      break;
    }
    // Find the largest k < p-1 with negligible e[k]; k = -1 when none.
    std::ptrdiff_t k = static_cast<std::ptrdiff_t>(p) - 2;
    for (; k >= 0; --k) {
      if (std::abs(e[k]) <= tiny + eps * (std::abs(s[k]) + std::abs(s[k + 1]))) {
        e[k] = 0.0;
        break;
      }
    }
    int kase = 0;
    if (k == static_cast<std::ptrdiff_t>(p) - 2) {
      kase = 4;
    } else {
      std::ptrdiff_t ks = static_cast<std::ptrdiff_t>(p) - 1;
      for (; ks > k; --ks) {
        const double t = (ks != static_cast<std::ptrdiff_t>(p) ? std::abs(e[ks]) : 0.0) +
                         (ks != k + 1 ? std::abs(e[ks - 1]) : 0.0);
        if (std::abs(s[ks]) <= tiny + eps * t) {
          s[ks] = 0.0;
          break;
        }
      }
      if (ks == k) {
        kase = 3;
      } else if (ks == static_cast<std::ptrdiff_t>(p) - 1) {
        kase = 1;
      } else {
        kase = 2;
        k = ks;
      }
    }
    ++k;
    const auto kk = static_cast<std::size_t>(k);

    switch (kase) {
      case 1: {  // deflate negligible s[p-1]
        double f = e[p - 2];
        e[p - 2] = 0.0;
        for (std::size_t j = p - 1; j-- > kk;) {
          double t = std::hypot(s[j], f);
          const double cs = s[j] / t;
          const double sn = f / t;
          s[j] = t;
          if (j != kk) {
            f = -sn * e[j - 1];
            e[j - 1] = cs * e[j - 1];
          }
          if (want_v) rotate(v.col(j), v.col(p - 1), n, cs, sn);
        }
        break;
      }
      case 2: {  // split at negligible s[k-1]
        double f = e[kk - 1];
        e[kk - 1] = 0.0;
        for (std::size_t j = kk; j < p; ++j) {
          const double t = std::hypot(s[j], f);
          const double cs = s[j] / t;
          const double sn = f / t;
          s[j] = t;
          f = -sn * e[j];
          e[j] = cs * e[j];
        }
        break;
      }
      case 3: {  // one QR sweep with Wilkinson-type shift
        const double scale = std::max({std::abs(s[p - 1]), std::abs(s[p - 2]), std::abs(e[p - 2]),
                                       std::abs(s[kk]), std::abs(e[kk])});
        const double sp = s[p - 1] / scale;
        const double spm1 = s[p - 2] / scale;
        const double epm1 = e[p - 2] / scale;
        const double sk = s[kk] / scale;
        const double ek = e[kk] / scale;
        const double b = ((spm1 + sp) * (spm1 - sp) + epm1 * epm1) / 2.0;
        const double c = (sp * epm1) * (sp * epm1);
        double shift = 0.0;
        if (b != 0.0 || c != 0.0) {
          shift = std::sqrt(b * b + c);
          if (b < 0.0) shift = -shift;
          shift = c / (b + shift);
        }
        double f = (sk + sp) * (sk - sp) + shift;
        double g = sk * ek;
        for (std::size_t j = kk; j < p - 1; ++j) {
          double t = std::hypot(f, g);
          double cs = f / t;
          double sn = g / t;
          if (j != kk) e[j - 1] = t;
          f = cs * s[j] + sn * e[j];
          e[j] = cs * e[j] - sn * s[j];
          g = sn * s[j + 1];
          s[j + 1] = cs * s[j + 1];
          if (want_v) rotate(v.col(j), v.col(j + 1), n, cs, sn);
          t = std::hypot(f, g);
          cs = f / t;
          sn = g / t;
          s[j] = t;
          f = cs * e[j] + sn * s[j + 1];
          s[j + 1] = -sn * e[j] + cs * s[j + 1];
          g = sn * e[j + 1];
          e[j + 1] = cs * e[j + 1];
        }
        e[p - 2] = f;
        ++total_sweeps;
        break;
      }
      case 4: {  // convergence of s[k]
        std::size_t idx = kk;
        if (s[idx] <= 0.0) {
          s[idx] = s[idx] < 0.0 ? -s[idx] : 0.0;
          if (want_v) {
            double* vc = v.col(idx);
            for (std::size_t i = 0; i <= pp && i < n; ++i) vc[i] = -vc[i];
          }
        }
        while (idx < pp) {
          if (s[idx] >= s[idx + 1]) break;
          std::swap(s[idx], s[idx + 1]);
          if (want_v && idx < n - 1) std::swap_ranges(v.col(idx), v.col(idx) + n, v.col(idx + 1));
          ++idx;
        }
        --p;
        break;
      }
      default: break;
    }
  }

  s.resize(n);
  out.s = std::move(s);
  if (want_v) out.v = std::move(v);
  return out;
}

}  // namespace svloc::detail
