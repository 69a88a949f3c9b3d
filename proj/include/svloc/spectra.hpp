#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "svloc/matrix.hpp"
#include "svloc/svd.hpp"

namespace svloc {

// Raised when the SVD fails to converge or a returned pair misses the residual bound.
struct SvdNonConvergence : std::runtime_error {
  SvdNonConvergence(const std::string& what, double worst)
      : std::runtime_error(what), worst_residual(worst) {}
  double worst_residual;
};

// Raised when power iteration hits its cap; carries a certified bracket for the norm.
struct NormNonConvergence : std::runtime_error {
  NormNonConvergence(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lower(lo), upper(hi) {}
  double lower;
  double upper;
};

inline constexpr double kDefaultResidualTolerance = 1e-10;
inline constexpr double kDegenerateGapTolerance = 1e-8;

struct SingularPair {
  double value = 0.0;
  std::vector<double> vector;  // unit right singular vector
  double residual = 0.0;       // ||X^T X u - s^2 u||_2
  bool degenerate = false;     // neighbouring singular value within 1e-8 * s1
};

// bottom[k-1] pairs with the k-th smallest singular value (bottom[0] is the
// bottom singular vector). Singular values are in descending order.
struct SpectralResult {
  std::vector<double> singular_values;
  std::vector<SingularPair> bottom;
  SingularPair top;
  double tolerance_used = kDefaultResidualTolerance;

  double s_max() const { return singular_values.empty() ? 0.0 : singular_values.front(); }
  double s_min() const { return singular_values.empty() ? 0.0 : singular_values.back(); }
};

// Flip sign so the largest-magnitude component is positive. Components within
// a few ulps of the maximum count as tied; the lowest index wins.
inline void apply_sign_convention(std::vector<double>& u) {
  double mx = 0.0;
  for (double x : u) mx = std::max(mx, std::abs(x));
  if (mx == 0.0) return;
  const double tie = mx * (1.0 - 64.0 * std::numeric_limits<double>::epsilon());
  for (double x : u) {
    if (std::abs(x) >= tie) {
      if (x < 0.0)
        for (double& y : u) y = -y;
      return;
    }
  }
}

// ||X^T (X u) - s^2 u||_2
inline double gram_residual(const Matrix& x, std::span<const double> u, double s) {
  const auto xu = multiply(x, u);
  auto r = multiply_transposed(x, xu);
  for (std::size_t i = 0; i < r.size(); ++i) r[i] -= s * s * u[i];
  return norm2(r);
}

// All singular values, descending. Any nonempty shape.
inline std::vector<double> singular_values(const Matrix& x) {
  if (x.empty()) throw std::invalid_argument("singular_values: empty matrix");
  auto work = x.rows() >= x.cols() ? detail::to_column_major(x) : detail::to_column_major(x.transposed());
  auto res = detail::golub_kahan_svd(std::move(work), false);
  if (!res.converged) throw SvdNonConvergence("singular_values: QR iteration cap reached", std::numeric_limits<double>::infinity());
  return std::move(res.s);
}

inline double spectral_norm(const Matrix& x) { return singular_values(x).front(); }

// Full singular value list plus the bottom k_bottom and top right singular
// vectors, each checked against the residual bound tolerance * s1^2.
inline SpectralResult full_svd(const Matrix& x, std::size_t k_bottom,
                               double tolerance = kDefaultResidualTolerance) {
  const std::size_t n = x.cols();
  if (x.rows() < n || n < 2)
    throw std::invalid_argument("full_svd: requires rows >= cols >= 2 (got " + std::to_string(x.rows()) +
                                "x" + std::to_string(n) + ")");
  if (k_bottom < 1 || k_bottom > n)
    throw std::invalid_argument("full_svd: k_bottom must lie in [1, " + std::to_string(n) + "]");

  auto res = detail::golub_kahan_svd(detail::to_column_major(x), true);
  if (!res.converged)
    throw SvdNonConvergence("full_svd: QR iteration cap reached", std::numeric_limits<double>::infinity());

  SpectralResult out;
  out.tolerance_used = tolerance;
  out.singular_values = res.s;
  const double s1 = res.s.front();
  const double gap_tol = kDegenerateGapTolerance * s1;

  auto make_pair = [&](std::size_t idx) {
    SingularPair p;
    p.value = res.s[idx];
    const double* col = res.v.col(idx);
    p.vector.assign(col, col + n);
    apply_sign_convention(p.vector);
    p.residual = gram_residual(x, p.vector, p.value);
    const bool near_prev = idx > 0 && res.s[idx - 1] - res.s[idx] <= gap_tol;
    const bool near_next = idx + 1 < n && res.s[idx] - res.s[idx + 1] <= gap_tol;
    p.degenerate = near_prev || near_next;
    return p;
  };

  out.top = make_pair(0);
  out.bottom.reserve(k_bottom);
  for (std::size_t k = 1; k <= k_bottom; ++k) out.bottom.push_back(make_pair(n - k));

  double worst = out.top.residual;
  for (const auto& p : out.bottom) worst = std::max(worst, p.residual);
  if (!(worst <= tolerance * s1 * s1)) {
    std::ostringstream msg;
    msg << "full_svd: residual " << worst << " exceeds " << tolerance << " * s1^2 = " << tolerance * s1 * s1;
    throw SvdNonConvergence(msg.str(), worst);
  }
  return out;
}

// s_n, the smallest of the n singular values of a tall matrix.
inline double smallest_singular_value(const Matrix& x) {
  if (x.rows() < x.cols() || x.cols() < 1)
    throw std::invalid_argument("smallest_singular_value: requires rows >= cols >= 1");
  return singular_values(x).back();
}

// k = 1 is the bottom pair; k = 2 the second smallest, and so on.
inline std::pair<double, std::vector<double>> kth_smallest(const Matrix& x, std::size_t k) {
  if (k < 1 || k > x.cols())
    throw std::invalid_argument("kth_smallest: k must lie in [1, " + std::to_string(x.cols()) + "]");
  auto res = full_svd(x, k);
  auto& p = res.bottom[k - 1];
  return {p.value, std::move(p.vector)};
}

// Largest singular value by power iteration on X^T X from the normalized
// all-ones start vector.
inline double operator_norm(const Matrix& x, double rel_tol = 1e-10, std::size_t max_iter = 20000) {
  if (x.empty()) throw std::invalid_argument("operator_norm: empty matrix");
  const std::size_t n = x.cols();
  double max_col = 0.0;
  for (std::size_t j = 0; j < n; ++j) max_col = std::max(max_col, column_norm(x, j));
  if (max_col == 0.0) return 0.0;

  std::vector<double> v(n, 1.0 / std::sqrt(static_cast<double>(n)));
  for (std::size_t it = 0; it < max_iter; ++it) {
    auto w = multiply_transposed(x, multiply(x, v));
    const double lambda = dot(v, w);  // Rayleigh quotient of X^T X
    const double nw = norm2(w);
    if (nw == 0.0) break;
    double res2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) res2 += (w[i] - lambda * v[i]) * (w[i] - lambda * v[i]);
    for (std::size_t i = 0; i < n; ++i) v[i] = w[i] / nw;
    if (std::sqrt(res2) <= rel_tol * lambda) {
      // Rounding can leave the estimate an ulp under a column norm, which is a lower bound.
      return std::max(std::sqrt(lambda), max_col);
    }
  }
  // ||X|| <= ||X||_F <= sqrt(cols) * max column norm.
  throw NormNonConvergence("operator_norm: power iteration cap reached", max_col,
                           std::sqrt(static_cast<double>(n)) * max_col);
}

}  // namespace svloc
