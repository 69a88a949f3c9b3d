#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <boost/math/distributions/students_t.hpp>
#include <boost/math/quadrature/exp_sinh.hpp>

#include "svloc/matrix.hpp"
#include "svloc/random.hpp"

namespace svloc {

enum class LawKind { SymmetricPareto, StudentT, Gaussian };

inline std::string_view to_string(LawKind k) {
  switch (k) {
    case LawKind::SymmetricPareto: return "SymmetricPareto";
    case LawKind::StudentT: return "StudentT";
    case LawKind::Gaussian: return "Gaussian";
  }
  return "?";
}

inline LawKind parse_law_kind(std::string_view s) {
  if (s == "SymmetricPareto" || s == "pareto") return LawKind::SymmetricPareto;
  if (s == "StudentT" || s == "student-t" || s == "studentt") return LawKind::StudentT;
  if (s == "Gaussian" || s == "gaussian" || s == "normal") return LawKind::Gaussian;
  throw std::invalid_argument("unknown law kind '" + std::string(s) +
                              "' (expected pareto, student-t or gaussian)");
}

// Constants of the two-sided tail bound
//   c_lower * t^-alpha <= P{|x| > t} <= c_upper * t^-alpha   for t >= t0.
struct TailConstants {
  double c_lower = 0.0;
  double c_upper = 0.0;
  double t0 = 0.0;
};

// Symmetric entry distribution with certified power-law tail constants.
// Immutable after construction; construction validates every invariant.
class TailLaw {
 public:
  // Relative slack used when certifying Student-t constants.
  static constexpr double kStudentSlack = 0.1;

  TailLaw(LawKind kind, double alpha, double scale = 1.0, bool normalize_variance = false)
      : kind_(kind), alpha_(alpha), scale_(scale), normalize_(normalize_variance) {
    if (kind_ != LawKind::Gaussian) {
      if (!(alpha_ > 0.0) || !std::isfinite(alpha_))
        throw std::invalid_argument("tail index alpha must satisfy alpha > 0 (got " +
                                    std::to_string(alpha_) + ")");
    }
    if (!(scale_ > 0.0) || !std::isfinite(scale_))
      throw std::invalid_argument("law scale must be positive");
    if (kind_ != LawKind::SymmetricPareto && scale_ != 1.0)
      throw std::invalid_argument("scale is the Pareto cutoff; other laws require scale = 1");
    if (normalize_ && kind_ != LawKind::Gaussian && !(alpha_ > 2.0))
      throw std::invalid_argument("normalize_variance requires a finite variance (alpha > 2)");
    if (kind_ == LawKind::Gaussian) alpha_ = std::numeric_limits<double>::infinity();
    output_factor_ = normalize_ ? 1.0 / std::sqrt(raw_variance()) : 1.0;
    constants_ = certify_constants();
  }

  static TailLaw pareto(double alpha, double scale = 1.0, bool normalize = false) {
    return TailLaw(LawKind::SymmetricPareto, alpha, scale, normalize);
  }
  static TailLaw student_t(double dof, bool normalize = false) {
    return TailLaw(LawKind::StudentT, dof, 1.0, normalize);
  }
  static TailLaw gaussian() { return TailLaw(LawKind::Gaussian, 0.0); }

  LawKind kind() const noexcept { return kind_; }
  // +infinity for the Gaussian law.
  double alpha() const noexcept { return alpha_; }
  double scale() const noexcept { return scale_; }
  bool normalize_variance() const noexcept { return normalize_; }
  bool has_power_tail() const noexcept { return kind_ != LawKind::Gaussian; }
  // Multiplier applied to a raw draw (1/sd when normalizing).
  double output_factor() const noexcept { return output_factor_; }
  // Absent for the Gaussian law, whose tail is lighter than any power.
  const std::optional<TailConstants>& constants() const noexcept { return constants_; }

  // Variance of the law as sampled (after any normalization); +inf if it does not exist.
  double variance() const {
    if (kind_ == LawKind::Gaussian) return 1.0;
    if (!(alpha_ > 2.0)) return std::numeric_limits<double>::infinity();
    return raw_variance() * output_factor_ * output_factor_;
  }

  // Exact P{|x| > t} for the law as sampled.
  double tail_probability(double t) const {
    if (t < 0.0) return 1.0;
    const double raw_t = t / output_factor_;
    switch (kind_) {
      case LawKind::SymmetricPareto:
        return raw_t < scale_ ? 1.0 : std::pow(raw_t / scale_, -alpha_);
      case LawKind::StudentT: {
        boost::math::students_t_distribution<double> dist(alpha_);
        return 2.0 * boost::math::cdf(boost::math::complement(dist, raw_t));
      }
      case LawKind::Gaussian:
        return std::erfc(t / std::numbers::sqrt2);
    }
    return 0.0;
  }

  // E[x^2 1{|x| > m}] for the law as sampled; +inf when the second moment diverges.
  double tail_second_moment(double m) const {
    if (m < 0.0) m = 0.0;
    const double f = output_factor_;
    switch (kind_) {
      case LawKind::SymmetricPareto: {
        if (!(alpha_ > 2.0)) return std::numeric_limits<double>::infinity();
        // density alpha s^alpha t^{-alpha-1} on t >= s for |x_raw|
        const double raw_m = std::max(m / f, scale_);
        const double raw = alpha_ * std::pow(scale_, alpha_) * std::pow(raw_m, 2.0 - alpha_) /
                           (alpha_ - 2.0);
        return raw * f * f;
      }
      case LawKind::Gaussian: {
        const double phi = std::exp(-0.5 * m * m) / std::sqrt(2.0 * std::numbers::pi);
        const double tail = 0.5 * std::erfc(m / std::numbers::sqrt2);
        return 2.0 * (m * phi + tail);
      }
      case LawKind::StudentT: {
        if (!(alpha_ > 2.0)) return std::numeric_limits<double>::infinity();
        const double nu = alpha_;
        const double c = std::exp(std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)) /
                         std::sqrt(nu * std::numbers::pi);
        auto integrand = [&](double t) { return t * t * c * std::pow(1.0 + t * t / nu, -0.5 * (nu + 1.0)); };
        boost::math::quadrature::exp_sinh<double> integrator;
        const double raw = 2.0 * integrator.integrate(
                                     [&](double s) { return integrand(m / f + s); }, 0.0,
                                     std::numeric_limits<double>::infinity());
        return raw * f * f;
      }
    }
    return 0.0;
  }

  // One draw from the law.
  double sample(RandomStream& rng) const {
    switch (kind_) {
      case LawKind::SymmetricPareto: {
        const double u = rng.uniform_open_closed();
        const double s = rng.sign();
        return s * scale_ * std::pow(u, -1.0 / alpha_) * output_factor_;
      }
      case LawKind::StudentT: {
        // Bailey's polar method, exact for real degrees of freedom.
        for (;;) {
          const double u = rng.uniform_symmetric();
          const double v = rng.uniform_symmetric();
          const double w = u * u + v * v;
          if (w > 1.0 || w == 0.0) continue;
          return u * std::sqrt(alpha_ * (std::pow(w, -2.0 / alpha_) - 1.0) / w) * output_factor_;
        }
      }
      case LawKind::Gaussian: {
        // Box-Muller, cosine branch only, so every draw consumes exactly two outputs.
        const double u1 = rng.uniform_open_closed();
        const double u2 = rng.uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2) * output_factor_;
      }
    }
    return 0.0;
  }

 private:
  double raw_variance() const {
    switch (kind_) {
      case LawKind::SymmetricPareto: return alpha_ * scale_ * scale_ / (alpha_ - 2.0);
      case LawKind::StudentT: return alpha_ / (alpha_ - 2.0);
      case LawKind::Gaussian: return 1.0;
    }
    return 1.0;
  }

  // Leading constant K of P{|T| > t} ~ K t^-nu for Student's t with nu dof.
  static double student_tail_constant(double nu) {
    const double log_c = std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
                         0.5 * std::log(nu * std::numbers::pi);
    return 2.0 * std::exp(log_c + 0.5 * (nu - 1.0) * std::log(nu));
  }

  std::optional<TailConstants> certify_constants() const {
    switch (kind_) {
      case LawKind::Gaussian: return std::nullopt;
      case LawKind::SymmetricPareto: {
        // P{|x| > t} = (s f)^alpha t^-alpha exactly for t >= s f
        const double c = std::pow(scale_ * output_factor_, alpha_);
        return TailConstants{c, c, scale_ * output_factor_};
      }
      case LawKind::StudentT: {
        const double nu = alpha_;
        const double k = student_tail_constant(nu);
        boost::math::students_t_distribution<double> dist(nu);
        auto ratio = [&](double t) {
          return 2.0 * boost::math::cdf(boost::math::complement(dist, t)) * std::pow(t, nu) / k;
        };
        auto inside = [&](double t) {
          const double r = ratio(t);
          return r >= 1.0 - kStudentSlack && r <= 1.0 + kStudentSlack;
        };
        // Walk down a geometric grid until the bound first fails, then bisect.
        double hi = 1e6;
        while (!inside(hi)) hi *= 2.0;
        double lo = hi;
        while (lo > 1e-8 && inside(lo)) {
          hi = lo;
          lo *= 0.9;
        }
        for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
          const double mid = 0.5 * (lo + hi);
          (inside(mid) ? hi : lo) = mid;
        }
        const double f = output_factor_;
        const double cf = std::pow(f, nu);
        return TailConstants{(1.0 - kStudentSlack) * k * cf, (1.0 + kStudentSlack) * k * cf, hi * f};
      }
    }
    return std::nullopt;
  }

  LawKind kind_;
  double alpha_;
  double scale_;
  bool normalize_;
  double output_factor_ = 1.0;
  std::optional<TailConstants> constants_;
};

// Recipe for one N x n draw.
struct EnsembleConfig {
  std::size_t n = 0;
  double aspect = 2.0;
  TailLaw law = TailLaw::gaussian();
  std::uint64_t seed = 0;

  // N = ceil(aspect * n). Products within 1e-12 (relative) of an integer are
  // snapped to it so that e.g. 1.1 * 10 gives 11 rather than 12.
  std::size_t rows() const {
    const double p = aspect * static_cast<double>(n);
    const double r = std::round(p);
    auto big_n = static_cast<std::size_t>(std::abs(p - r) <= 1e-12 * p ? r : std::ceil(p));
    return std::max(big_n, n + 1);
  }

  void validate() const {
    if (n < 2) throw std::invalid_argument("column count n must be at least 2");
    if (!(aspect > 1.0) || !std::isfinite(aspect))
      throw std::invalid_argument("aspect ratio must satisfy aspect > 1");
  }
};

inline double sample_entry(const TailLaw& law, RandomStream& rng) { return law.sample(rng); }

// Entries drawn left-to-right, top-to-bottom from derive_stream(cfg.seed, trial_index).
inline Matrix sample_matrix(const EnsembleConfig& cfg, std::uint64_t trial_index = 0) {
  cfg.validate();
  const std::size_t big_n = cfg.rows();
  Matrix x(big_n, cfg.n);
  RandomStream rng = derive_stream(cfg.seed, trial_index);
  for (double& v : x.data()) v = cfg.law.sample(rng);
  return x;
}

}  // namespace svloc
