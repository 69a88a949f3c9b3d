#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "svloc/ensemble.hpp"

using namespace svloc;

namespace {

std::vector<double> draws(const TailLaw& law, std::size_t m, std::uint64_t seed) {
  auto rng = derive_stream(seed, 0);
  std::vector<double> out(m);
  for (double& v : out) v = sample_entry(law, rng);
  return out;
}

constexpr std::size_t kMillion = 1000000;

}  // namespace

TEST(Ensemble, ShapeUsesCeiling) {
  EXPECT_EQ((EnsembleConfig{10, 1.5, TailLaw::gaussian(), 0}).rows(), 15u);
  EXPECT_EQ((EnsembleConfig{4, 2.0, TailLaw::gaussian(), 0}).rows(), 8u);
  EXPECT_EQ((EnsembleConfig{10, 1.1, TailLaw::gaussian(), 0}).rows(), 11u);
  EXPECT_EQ((EnsembleConfig{10, 1.25, TailLaw::gaussian(), 0}).rows(), 13u);
  const Matrix x = sample_matrix({10, 1.5, TailLaw::pareto(1.5), 3});
  EXPECT_EQ(x.rows(), 15u);
  EXPECT_EQ(x.cols(), 10u);
}

TEST(Ensemble, SampleMatrixIsDeterministic) {
  const EnsembleConfig cfg{20, 2.0, TailLaw::student_t(1.5), 77};
  EXPECT_EQ(sample_matrix(cfg), sample_matrix(cfg));
  EXPECT_EQ(sample_matrix(cfg, 4), sample_matrix(cfg, 4));
  EXPECT_FALSE(sample_matrix(cfg, 0) == sample_matrix(cfg, 1));
}

TEST(Ensemble, MatrixEntriesFollowStreamOrder) {
  const TailLaw law = TailLaw::pareto(1.2);
  const EnsembleConfig cfg{3, 2.0, law, 5};
  const Matrix x = sample_matrix(cfg, 2);
  auto rng = derive_stream(5, 2);
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) EXPECT_EQ(x(i, j), sample_entry(law, rng));
}

TEST(Ensemble, RejectsBadConfigs) {
  EXPECT_THROW(sample_matrix({1, 2.0, TailLaw::gaussian(), 0}), std::invalid_argument);
  EXPECT_THROW(sample_matrix({5, 1.0, TailLaw::gaussian(), 0}), std::invalid_argument);
  try {
    TailLaw::pareto(0.0);
    FAIL();
  } catch (const std::invalid_argument& e) {
    EXPECT_NE(std::string(e.what()).find("alpha > 0"), std::string::npos);
  }
  EXPECT_THROW(TailLaw::pareto(-1.0), std::invalid_argument);
  EXPECT_THROW(TailLaw::pareto(1.5, 1.0, true), std::invalid_argument);
  EXPECT_THROW(TailLaw::student_t(2.0, true), std::invalid_argument);
  EXPECT_THROW(TailLaw(LawKind::StudentT, 3.0, 2.0), std::invalid_argument);
  EXPECT_THROW(TailLaw::pareto(1.0, 0.0), std::invalid_argument);
}

TEST(Pareto, UnitScaleConstantsAreExact) {
  const auto c = TailLaw::pareto(1.7).constants();
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->c_lower, 1.0);
  EXPECT_EQ(c->c_upper, 1.0);
  EXPECT_EQ(c->t0, 1.0);
  EXPECT_FALSE(TailLaw::gaussian().constants().has_value());
}

TEST(Pareto, SupportStartsAtCutoff) {
  const auto xs = draws(TailLaw::pareto(1.0), 100000, 1);
  double mn = INFINITY;
  for (double v : xs) mn = std::min(mn, std::abs(v));
  EXPECT_GE(mn, 1.0);
  EXPECT_LT(mn, 1.001);
}

TEST(Pareto, MedianOfAbsIsTwoForUnitIndex) {
  auto xs = draws(TailLaw::pareto(1.0), kMillion, 2);
  for (double& v : xs) v = std::abs(v);
  std::nth_element(xs.begin(), xs.begin() + kMillion / 2, xs.end());
  // Sample median SE: sqrt(p(1-p)/m) / f(2), with density 1/t^2 = 1/4 at t = 2.
  const double se = std::sqrt(0.25 / kMillion) / 0.25;
  EXPECT_NEAR(xs[kMillion / 2], 2.0, 3.0 * se);
}

TEST(Pareto, EmpiricalTailsMatchPowerLaw) {
  for (double alpha : {0.8, 1.5, 3.0}) {
    const auto xs = draws(TailLaw::pareto(alpha), kMillion, 100 + static_cast<std::uint64_t>(alpha * 10));
    for (double t : {2.0, 4.0, 8.0}) {
      const double p = std::pow(t, -alpha);
      const double freq =
          static_cast<double>(std::count_if(xs.begin(), xs.end(), [&](double v) { return std::abs(v) > t; })) /
          kMillion;
      EXPECT_NEAR(freq, p, 3.0 * std::sqrt(p * (1 - p) / kMillion)) << "alpha " << alpha << " t " << t;
    }
  }
}

TEST(Gaussian, SecondMomentIsOne) {
  const auto xs = draws(TailLaw::gaussian(), kMillion, 3);
  double acc = 0.0;
  for (double v : xs) acc += v * v;
  EXPECT_NEAR(acc / kMillion, 1.0, 3.0 * std::sqrt(2.0 / kMillion));
}

TEST(Laws, SignsAreBalanced) {
  for (const TailLaw& law : {TailLaw::pareto(1.5), TailLaw::student_t(3.0), TailLaw::gaussian(), TailLaw::pareto(0.6)}) {
    const auto xs = draws(law, kMillion, 4);
    double acc = 0.0;
    for (double v : xs) acc += v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
    EXPECT_NEAR(acc / kMillion, 0.0, 3.0 / std::sqrt(static_cast<double>(kMillion))) << to_string(law.kind());
  }
}

TEST(Laws, VarianceNormalization) {
  for (const TailLaw& law : {TailLaw::pareto(5.0, 1.0, true), TailLaw::student_t(6.0, true)}) {
    EXPECT_NEAR(law.variance(), 1.0, 1e-14);
    const auto xs = draws(law, kMillion, 5);
    double acc = 0.0;
    for (double v : xs) acc += v * v;
    EXPECT_NEAR(acc / kMillion, 1.0, 0.01) << to_string(law.kind());
  }
}

TEST(Laws, ExactTailProbability) {
  const TailLaw p = TailLaw::pareto(1.5);
  EXPECT_DOUBLE_EQ(p.tail_probability(4.0), 0.125);
  EXPECT_EQ(p.tail_probability(0.5), 1.0);
  // Student t with 1 dof is Cauchy: P{|x| > 1} = 1/2.
  EXPECT_NEAR(TailLaw::student_t(1.0).tail_probability(1.0), 0.5, 1e-14);
  EXPECT_NEAR(TailLaw::gaussian().tail_probability(1.959963984540054), 0.05, 1e-12);
}

TEST(StudentT, CertifiedConstantsHoldBeyondT0) {
  for (double nu : {0.8, 1.5, 3.0, 6.0}) {
    const TailLaw law = TailLaw::student_t(nu);
    const auto c = *law.constants();
    EXPECT_LT(c.c_lower, c.c_upper);
    for (double t = c.t0; t < c.t0 * 1e4; t *= 1.07) {
      const double p = law.tail_probability(t);
      EXPECT_LE(c.c_lower * std::pow(t, -nu), p * (1 + 1e-12)) << "nu " << nu << " t " << t;
      EXPECT_GE(c.c_upper * std::pow(t, -nu), p * (1 - 1e-12)) << "nu " << nu << " t " << t;
    }
    // T0 is the smallest such point: slightly below it one bound fails.
    const double below = c.t0 * 0.98;
    const double p = law.tail_probability(below);
    const bool holds = c.c_lower * std::pow(below, -nu) <= p && p <= c.c_upper * std::pow(below, -nu);
    EXPECT_FALSE(holds) << "nu " << nu;
  }
}

TEST(StudentT, CauchyTailConstant) {
  // P{|x| > t} ~ 2/(pi t) for the Cauchy law.
  const auto c = *TailLaw::student_t(1.0).constants();
  EXPECT_NEAR(c.c_lower, 0.9 * 2.0 / M_PI, 1e-12);
  EXPECT_NEAR(c.c_upper, 1.1 * 2.0 / M_PI, 1e-12);
}

TEST(Laws, TailSecondMoment) {
  // alpha/(alpha-2) M^{2-alpha} for the unit Pareto law.
  EXPECT_DOUBLE_EQ(TailLaw::pareto(3.0).tail_second_moment(2.0), 1.5);
  EXPECT_LT(TailLaw::pareto(3.0).tail_second_moment(1e6), 1e-5);
  EXPECT_TRUE(std::isinf(TailLaw::pareto(1.5).tail_second_moment(10.0)));
  EXPECT_NEAR(TailLaw::gaussian().tail_second_moment(0.0), 1.0, 1e-14);
  EXPECT_NEAR(TailLaw::student_t(3.0).tail_second_moment(0.0), 3.0, 1e-9);
  EXPECT_NEAR(TailLaw::student_t(6.0, true).tail_second_moment(0.0), 1.0, 1e-9);
  // Gaussian: E[x^2 1{|x|>1}] = 2(phi(1) + Phi-bar(1)).
  EXPECT_NEAR(TailLaw::gaussian().tail_second_moment(1.0), 0.8012519569012008, 1e-13);
}
