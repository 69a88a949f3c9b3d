#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "svloc/ensemble.hpp"
#include "svloc/matrix.hpp"
#include "svloc/random.hpp"
#include "svloc/spectra.hpp"

namespace svloc {

inline constexpr double kCertificateSlack = 1e-9;

struct TauParams {
  double b_frak = 0.5;
  double a_frak = 1.0001;
};

// tau = N^{1/alpha - eps} with N^{alpha eps} = b ln N / (a C_u),
// i.e. tau = (N a C_u / (b ln N))^{1/alpha}.
inline double default_tau(std::size_t big_n, double alpha, const TauParams& p, double c_upper) {
  if (!(alpha > 0.0 && alpha < 2.0)) throw std::invalid_argument("default_tau: requires 0 < alpha < 2");
  if (!(p.b_frak > 0.0 && p.b_frak < 1.0)) throw std::invalid_argument("default_tau: b_frak must lie in (0,1)");
  if (!(p.a_frak > 1.0)) throw std::invalid_argument("default_tau: a_frak must exceed 1");
  if (!(c_upper > 0.0)) throw std::invalid_argument("default_tau: C_u must be positive");
  if (big_n < 2) throw std::invalid_argument("default_tau: requires N >= 2");
  const double nn = static_cast<double>(big_n);
  const double growth = p.b_frak * std::log(nn) / (p.a_frak * c_upper);
  if (!(growth > 1.0)) {
    std::ostringstream msg;
    msg << "default_tau: b ln N / (a C_u) = " << growth << " <= 1, so the cutoff exponent is not positive";
    throw std::invalid_argument(msg.str());
  }
  return std::pow(nn / growth, 1.0 / alpha);
}

// {j : max_i |x_ij| <= tau}
inline IndexSet small_column_set(const Matrix& x, double tau) {
  if (!(tau > 0.0)) throw std::invalid_argument("small_column_set: tau must be positive");
  std::vector<double> col_max(x.cols(), 0.0);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const auto r = x.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) col_max[j] = std::max(col_max[j], std::abs(r[j]));
  }
  IndexSet out;
  for (std::size_t j = 0; j < x.cols(); ++j)
    if (col_max[j] <= tau) out.push_back(j);
  return out;
}

struct CertificateReport {
  double tau = 0.0;
  IndexSet J;
  std::size_t J_size = 0;
  double norm_XJ = 0.0;
  double smin_XJ = 0.0;
  double certified_upper = std::numeric_limits<double>::infinity();
  double observed_smin = 0.0;
  double s_max = 0.0;
  bool valid = false;
  std::string note;
};

// Certificate against precomputed s_min(X) and s_1(X).
inline CertificateReport upper_certificate(const Matrix& x, double tau, double observed_smin, double s_max) {
  CertificateReport r;
  r.tau = tau;
  r.J = small_column_set(x, tau);
  r.J_size = r.J.size();
  r.observed_smin = observed_smin;
  r.s_max = s_max;
  if (r.J.empty()) {
    r.valid = false;
    r.note = "no small columns at this tau";
    return r;
  }
  const Matrix xj = take_minor(x, MinorSpec::columns(x, r.J));
  const auto sv = singular_values(xj);
  r.norm_XJ = sv.front();
  // With more columns than rows s_min(X_J) would be 0 by convention; J <= n < N here.
  r.smin_XJ = xj.rows() >= xj.cols() ? sv.back() : 0.0;
  r.certified_upper = std::min(r.norm_XJ, r.smin_XJ);
  r.valid = r.certified_upper >= observed_smin - kCertificateSlack * s_max;
  if (!r.valid) r.note = "certificate below observed s_min";
  return r;
}

inline CertificateReport upper_certificate(const Matrix& x, double tau) {
  if (x.rows() < x.cols()) throw std::invalid_argument("upper_certificate: requires rows >= cols");
  const auto sv = singular_values(x);
  return upper_certificate(x, tau, sv.back(), sv.front());
}

// |{(i,j) : |x_ij| > N^{1/2 - c}}| with N = rows.
inline std::size_t heavy_census(const Matrix& x, double c) {
  const double thr = std::pow(static_cast<double>(x.rows()), 0.5 - c);
  std::size_t count = 0;
  for (double v : x.data())
    if (std::abs(v) > thr) ++count;
  return count;
}

// eps_N solving N^{alpha eps} = c' ln N.
inline double epsilon_from_cprime(std::size_t big_n, double alpha, double c_prime) {
  const double ln_n = std::log(static_cast<double>(big_n));
  const double target = c_prime * ln_n;
  const double eps = std::log(target) / (alpha * ln_n);
  if (!(eps > 0.0 && eps < 1.0 / alpha))
    throw std::invalid_argument("epsilon_from_cprime: c' ln N must lie in (1, N)");
  return eps;
}

// Smallest M with C_l / 2^{alpha+1} >= C_u / M^alpha; admissible M must exceed it.
inline double minimal_window_m(double alpha, const TailConstants& tc) {
  return std::pow(std::pow(2.0, alpha + 1.0) * tc.c_upper / tc.c_lower, 1.0 / alpha);
}

inline double default_window_m(double alpha, const TailConstants& tc) {
  const double m = minimal_window_m(alpha, tc);
  return m < 5.0 ? 5.0 : 1.25 * m;
}

inline bool in_window(double v, double m) {
  const double a = std::abs(v);
  return a <= 1.0 || (a > 2.0 && a <= m);
}

struct WindowSplit {
  std::size_t big_n = 0;
  double alpha = 0.0;
  double epsilon_N = 0.0;
  double M = 0.0;
  double scale = 0.0;  // N^{-1/alpha + eps_N}
  Matrix X_tilde;
  Matrix X_D;
  Matrix X_Dc;
  double norm_X_D = 0.0;
};

// X~ = N^{-1/alpha + eps} X split into entries inside D = [-1,1] u [-M,-2) u (2,M] and the rest.
inline WindowSplit window_split(const Matrix& x, double alpha, double epsilon_n, double m, const TailConstants& tc) {
  if (!(alpha > 0.0)) throw std::invalid_argument("window_split: alpha must be positive");
  if (!(epsilon_n > 0.0 && epsilon_n < 1.0 / alpha))
    throw std::invalid_argument("window_split: epsilon_N must lie in (0, 1/alpha)");
  const double m_min = std::max(2.0, minimal_window_m(alpha, tc));
  if (!(m > 2.0) || !(tc.c_lower / std::pow(2.0, alpha + 1.0) > tc.c_upper / std::pow(m, alpha))) {
    std::ostringstream msg;
    msg << "window_split: M = " << m << " violates C_l/2^(alpha+1) > C_u/M^alpha; M must exceed " << m_min;
    throw std::invalid_argument(msg.str());
  }
  WindowSplit w;
  w.big_n = x.rows();
  w.alpha = alpha;
  w.epsilon_N = epsilon_n;
  w.M = m;
  w.scale = std::pow(static_cast<double>(x.rows()), -1.0 / alpha + epsilon_n);
  w.X_tilde = Matrix(x.rows(), x.cols());
  w.X_D = Matrix(x.rows(), x.cols());
  w.X_Dc = Matrix(x.rows(), x.cols());
  const auto src = x.data();
  auto xt = w.X_tilde.data();
  auto d = w.X_D.data();
  auto dc = w.X_Dc.data();
  for (std::size_t k = 0; k < src.size(); ++k) {
    xt[k] = w.scale * src[k];
    (in_window(xt[k], m) ? d[k] : dc[k]) = xt[k];
  }
  w.norm_X_D = x.empty() ? 0.0 : spectral_norm(w.X_D);
  return w;
}

struct SparseNormDiagnostic {
  double norm_X_D = 0.0;
  double reference_scale = 0.0;  // N^{alpha eps_N / 2}
  double ratio = 0.0;
  bool regime_ok = true;  // N^{alpha eps_N} >= c' ln N
};

inline SparseNormDiagnostic sparse_norm_diagnostic(const WindowSplit& w, double c_prime) {
  SparseNormDiagnostic d;
  const double nn = static_cast<double>(w.big_n);
  const double growth = std::pow(nn, w.alpha * w.epsilon_N);
  d.norm_X_D = w.norm_X_D;
  d.reference_scale = std::sqrt(growth);
  d.ratio = d.norm_X_D / d.reference_scale;
  d.regime_ok = growth >= c_prime * std::log(nn) * (1.0 - 1e-12);
  return d;
}

struct SeginerDiagnostic {
  double max_row_norm = 0.0;
  double max_col_norm = 0.0;
  double op_norm = 0.0;
  double ratio = 0.0;  // op_norm / max(max_row_norm, max_col_norm)
};

inline SeginerDiagnostic seginer_diagnostic(const Matrix& a) {
  if (a.empty()) throw std::invalid_argument("seginer_diagnostic: empty matrix");
  SeginerDiagnostic d;
  for (std::size_t i = 0; i < a.rows(); ++i) d.max_row_norm = std::max(d.max_row_norm, norm2(a.row(i)));
  for (std::size_t j = 0; j < a.cols(); ++j) d.max_col_norm = std::max(d.max_col_norm, column_norm(a, j));
  const double floor = std::max(d.max_row_norm, d.max_col_norm);
  // ||A|| >= ||A e_j|| and ||A^T e_i||; clamp away rounding below that floor.
  d.op_norm = std::max(spectral_norm(a), floor);
  d.ratio = floor == 0.0 ? 0.0 : d.op_norm / floor;
  return d;
}

struct TruncatedMatrix {
  Matrix X_trunc;
  double shift = 0.0;               // E[y 1{|y| <= M}]
  double theta_second_moment = 0.0;  // E[y^2 1{|y| > M}] (+inf when it diverges)
};

// y 1{|y| <= M} - E[y 1{|y| <= M}] entrywise. Every supported law is symmetric,
// so the truncated mean is zero.
inline TruncatedMatrix truncate_recenter(const Matrix& x, const TailLaw& law, double m) {
  if (!(m > 0.0)) throw std::invalid_argument("truncate_recenter: M must be positive");
  TruncatedMatrix t;
  t.shift = 0.0;
  t.X_trunc = Matrix(x.rows(), x.cols());
  const auto src = x.data();
  auto dst = t.X_trunc.data();
  for (std::size_t k = 0; k < src.size(); ++k) dst[k] = (std::abs(src[k]) <= m ? src[k] : 0.0) - t.shift;
  t.theta_second_moment = law.tail_second_moment(m);
  return t;
}

// Q^(t) = max over sample points v of the fraction of the sample within t of v.
inline double empirical_concentration(std::span<const double> sample, double t) {
  if (!(t > 0.0)) throw std::invalid_argument("empirical_concentration: t must be positive");
  if (sample.size() < 100) throw std::invalid_argument("empirical_concentration: needs at least 100 samples");
  std::vector<double> xs(sample.begin(), sample.end());
  std::sort(xs.begin(), xs.end());
  std::size_t lo = 0;
  std::size_t hi = 0;
  std::size_t best = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    while (xs[i] - xs[lo] > t) ++lo;
    if (hi < i) hi = i;
    while (hi + 1 < xs.size() && xs[hi + 1] - xs[i] <= t) ++hi;
    best = std::max(best, hi - lo + 1);
  }
  return static_cast<double>(best) / static_cast<double>(xs.size());
}

inline double empirical_concentration(const TailLaw& law, double t, std::size_t m_samples, std::uint64_t seed) {
  auto rng = derive_stream(seed, 0);
  std::vector<double> xs(m_samples);
  for (double& v : xs) v = law.sample(rng);
  return empirical_concentration(xs, t);
}

}  // namespace svloc
