#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "svloc/matrix.hpp"

namespace svloc {

inline constexpr double kUnitTolerance = 1e-10;

namespace detail {

inline void require_unit(std::span<const double> u, const char* who) {
  const double nrm = norm2(u);
  if (std::abs(nrm - 1.0) > kUnitTolerance)
    throw std::invalid_argument(std::string(who) + ": vector is not unit (norm " + std::to_string(nrm) + ")");
}

// Indices ordered by ascending |u_i|, ties by ascending index.
inline std::vector<std::size_t> ascending_magnitude_order(std::span<const double> u) {
  std::vector<std::size_t> order(u.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return std::abs(u[a]) < std::abs(u[b]); });
  return order;
}

}  // namespace detail

// Natural-log threshold sqrt(c ln n / n).
inline double hat_threshold(double c, std::size_t n) {
  const double nn = static_cast<double>(n);
  return std::sqrt(c * std::log(nn) / nn);
}

// {i : |u_i| > sqrt(c ln n / n)}, strict inequality.
inline IndexSet hat_set(std::span<const double> u, double c) {
  if (u.size() < 2) throw std::invalid_argument("hat_set: requires n >= 2");
  if (!(c > 0.0)) throw std::invalid_argument("hat_set: c must be positive");
  detail::require_unit(u, "hat_set");
  const double thr = hat_threshold(c, u.size());
  IndexSet out;
  for (std::size_t i = 0; i < u.size(); ++i)
    if (std::abs(u[i]) > thr) out.push_back(i);
  return out;
}

// ||u_I||_2
inline double subset_mass(std::span<const double> u, const IndexSet& idx) {
  std::vector<double> part;
  part.reserve(idx.size());
  for (std::size_t i : idx) {
    if (i >= u.size())
      throw std::out_of_range("subset_mass: index " + std::to_string(i) + " out of range " +
                              std::to_string(u.size()));
    part.push_back(u[i]);
  }
  return norm2(part);
}

inline IndexSet complement(const IndexSet& idx, std::size_t n) {
  IndexSet out;
  out.reserve(n - std::min(n, idx.size()));
  std::size_t k = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (k < idx.size() && idx[k] == i) {
      ++k;
      continue;
    }
    out.push_back(i);
  }
  return out;
}

// Markov bound n / (c ln n) on |hat_set|.
inline double cardinality_bound(double c, std::size_t n) {
  if (n < 3) throw std::invalid_argument("cardinality_bound: requires n >= 3");
  if (!(c > 0.0)) throw std::invalid_argument("cardinality_bound: c must be positive");
  const double nn = static_cast<double>(n);
  return nn / (c * std::log(nn));
}

struct MassProfilePoint {
  double epsilon = 0.0;
  std::size_t kept = 0;  // ceil((1 - epsilon) n)
  double value = 0.0;    // min over |I| = kept of ||u_I||_2
};

inline std::size_t kept_count(double epsilon, std::size_t n) {
  // ceil with a guard against representation error, e.g. (1 - 0.1) * 10.
  const double p = (1.0 - epsilon) * static_cast<double>(n);
  const double r = std::round(p);
  const double kept = std::abs(p - r) <= 1e-9 ? r : std::ceil(p);
  return kept < 0.0 ? 0 : static_cast<std::size_t>(kept);
}

// Exact min over |I| = ceil((1-eps) n) of ||u_I||_2: keep the smallest
// magnitudes and sum their squares in ascending order.
inline std::vector<MassProfilePoint> min_mass_profile(std::span<const double> u,
                                                      std::span<const double> epsilons) {
  detail::require_unit(u, "min_mass_profile");
  const auto order = detail::ascending_magnitude_order(u);
  std::vector<double> prefix(u.size() + 1, 0.0);
  for (std::size_t r = 0; r < order.size(); ++r) prefix[r + 1] = prefix[r] + u[order[r]] * u[order[r]];

  std::vector<MassProfilePoint> out;
  out.reserve(epsilons.size());
  for (double eps : epsilons) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("min_mass_profile: epsilon must lie in (0,1)");
    const std::size_t kept = kept_count(eps, u.size());
    if (kept < 1) throw std::invalid_argument("min_mass_profile: ceil((1-eps) n) < 1");
    out.push_back({eps, kept, std::sqrt(prefix[kept])});
  }
  return out;
}

struct ComplementWitness {
  IndexSet indices;
  double mass = 0.0;  // ||u_J||_2 < sqrt(delta)
};

// Largest J (filled smallest magnitudes first) with ||u_J||_2 < sqrt(delta).
inline ComplementWitness complement_witness(std::span<const double> u, double delta) {
  detail::require_unit(u, "complement_witness");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("complement_witness: delta must lie in (0,1)");
  const auto order = detail::ascending_magnitude_order(u);
  const double bound = std::sqrt(delta);
  double acc = 0.0;
  std::size_t m = 0;
  for (; m < order.size(); ++m) {
    const double next = acc + u[order[m]] * u[order[m]];
    if (!(std::sqrt(next) < bound)) break;
    acc = next;
  }
  ComplementWitness w;
  w.indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(m));
  std::sort(w.indices.begin(), w.indices.end());
  w.mass = std::sqrt(acc);
  return w;
}

// Inverse participation ratio sum u_i^4.
inline double ipr(std::span<const double> u) {
  detail::require_unit(u, "ipr");
  double acc = 0.0;
  for (double x : u) acc += x * x * x * x;
  return acc;
}

// Squared mass on the m largest-magnitude coordinates.
inline double top_mass_fraction(std::span<const double> u, std::size_t m) {
  const auto order = detail::ascending_magnitude_order(u);
  m = std::min(m, u.size());
  double acc = 0.0;
  for (std::size_t r = u.size() - m; r < u.size(); ++r) acc += u[order[r]] * u[order[r]];
  return acc;
}

// floor(n / ln n), the localization length used by the top-mass statistic.
inline std::size_t localization_length(std::size_t n) {
  const double nn = static_cast<double>(n);
  return static_cast<std::size_t>(std::floor(nn / std::log(nn)));
}

struct LocalizationReport {
  std::size_t n = 0;
  double c_threshold = 0.0;
  double threshold = 0.0;  // sqrt(c ln n / n)
  IndexSet hat_I;
  double hat_I_mass = 0.0;  // ||u_hatI||_2^2
  double cardinality_bound = 0.0;
  std::vector<MassProfilePoint> min_mass_profile;
  double ipr = 0.0;
  double top_mass_nlogn = 0.0;  // squared mass on the floor(n/ln n) largest coordinates
  bool degenerate_flag = false;
};

inline LocalizationReport localize(std::span<const double> u, double c, std::span<const double> epsilons,
                                   bool degenerate = false) {
  LocalizationReport r;
  r.n = u.size();
  r.c_threshold = c;
  r.threshold = hat_threshold(c, u.size());
  r.hat_I = hat_set(u, c);
  const double m = subset_mass(u, r.hat_I);
  r.hat_I_mass = m * m;
  r.cardinality_bound = cardinality_bound(c, u.size());
  r.min_mass_profile = min_mass_profile(u, epsilons);
  r.ipr = ipr(u);
  r.top_mass_nlogn = top_mass_fraction(u, localization_length(u.size()));
  r.degenerate_flag = degenerate;
  return r;
}

}  // namespace svloc
