#include <gtest/gtest.h>

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <vector>

#include "svloc/ensemble.hpp"
#include "svloc/localization.hpp"

using namespace svloc;

namespace {

std::vector<double> basis(std::size_t n, std::size_t i) {
  std::vector<double> u(n, 0.0);
  u[i] = 1.0;
  return u;
}

std::vector<double> uniform(std::size_t n) { return std::vector<double>(n, 1.0 / std::sqrt(static_cast<double>(n))); }

std::vector<double> random_unit(std::size_t n, std::uint64_t seed, const TailLaw& law = TailLaw::gaussian()) {
  auto rng = derive_stream(seed, 17);
  std::vector<double> u(n);
  for (double& v : u) v = law.sample(rng);
  const double nrm = norm2(u);
  for (double& v : u) v /= nrm;
  return u;
}

// Exhaustive minimum of ||u_I||_2 over |I| = k; each subset sums its squares
// smallest first.
double brute_min_mass(const std::vector<double>& u, std::size_t k) {
  const std::size_t n = u.size();
  double best = INFINITY;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(std::popcount(mask)) != k) continue;
    std::vector<double> sq;
    for (std::size_t i = 0; i < n; ++i)
      if (mask >> i & 1u) sq.push_back(u[i] * u[i]);
    std::sort(sq.begin(), sq.end());
    double acc = 0.0;
    for (double v : sq) acc += v;
    best = std::min(best, acc);
  }
  return std::sqrt(best);
}

}  // namespace

TEST(HatSet, Examples) {
  EXPECT_NEAR(hat_threshold(1.0, 100), 0.21460, 1e-5);
  EXPECT_EQ(hat_set(basis(100, 0), 1.0), (IndexSet{0}));
  EXPECT_TRUE(hat_set(uniform(100), 1.0).empty());
  std::vector<double> u(100, std::sqrt((1.0 - 0.09 - 0.04) / 98.0));
  u[0] = 0.3;
  u[1] = 0.2;
  EXPECT_EQ(hat_set(u, 1.0), (IndexSet{0}));
}

TEST(HatSet, StrictInequalityAndPreconditions) {
  const std::size_t n = 50;
  const double t = hat_threshold(1.0, n);
  std::vector<double> u(n, std::sqrt((1.0 - 2.0 * t * t) / static_cast<double>(n - 2)));
  u[3] = t;                           // on the threshold: excluded
  u[7] = std::nextafter(t, 1.0);      // just above: included
  EXPECT_EQ(hat_set(u, 1.0), (IndexSet{7}));
  EXPECT_THROW(hat_set(std::vector<double>{1.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(hat_set(std::vector<double>{1.0, 1.0}, 1.0), std::invalid_argument);
  EXPECT_THROW(hat_set(uniform(9), 0.0), std::invalid_argument);
}

TEST(SubsetMass, Examples) {
  const std::vector<double> u{0.6, 0.8};
  EXPECT_NEAR(subset_mass(u, {0, 1}), 1.0, 1e-15);
  EXPECT_EQ(subset_mass(u, {}), 0.0);
  EXPECT_NEAR(subset_mass(u, {1}), 0.8, 1e-15);
  EXPECT_THROW(subset_mass(u, {2}), std::out_of_range);
}

TEST(CardinalityBound, Examples) {
  EXPECT_NEAR(cardinality_bound(1.0, 20), 6.676, 1e-3);
  EXPECT_NEAR(cardinality_bound(2.0, 100), 10.857, 1e-3);
  EXPECT_DOUBLE_EQ(cardinality_bound(2.0, 500) * 2.0, cardinality_bound(1.0, 500));
  EXPECT_THROW(cardinality_bound(1.0, 2), std::invalid_argument);
}

TEST(MinMassProfile, Examples) {
  const std::vector<double> eps{0.25};
  const auto p = min_mass_profile(basis(4, 0), eps);
  EXPECT_EQ(p[0].kept, 3u);
  EXPECT_EQ(p[0].value, 0.0);
  const std::vector<double> grid{0.1, 0.25, 0.5, 0.9};
  for (const auto& pt : min_mass_profile(uniform(10), grid))
    EXPECT_NEAR(pt.value, std::sqrt(static_cast<double>(pt.kept) / 10.0), 1e-15);
  EXPECT_EQ(kept_count(0.1, 10), 9u);
  EXPECT_EQ(kept_count(0.25, 10), 8u);
  EXPECT_THROW(min_mass_profile(uniform(4), std::vector<double>{0.0}), std::invalid_argument);
  EXPECT_THROW(min_mass_profile(uniform(4), std::vector<double>{1.0}), std::invalid_argument);
}

TEST(MinMassProfile, EqualsExhaustiveEnumeration) {
  const std::vector<double> eps{0.3};
  const auto u = random_unit(10, 1);
  const auto p = min_mass_profile(u, eps);
  EXPECT_EQ(p[0].kept, 7u);
  EXPECT_EQ(p[0].value, brute_min_mass(u, 7));
  for (std::uint64_t seed = 2; seed < 60; ++seed) {
    const std::size_t n = 2 + seed % 10;
    const auto v = random_unit(n, seed, seed % 2 ? TailLaw::pareto(0.7) : TailLaw::gaussian());
    const std::vector<double> grid{0.05, 0.3, 0.5, 0.8};
    for (const auto& pt : min_mass_profile(v, grid)) EXPECT_EQ(pt.value, brute_min_mass(v, pt.kept));
  }
}

TEST(MinMassProfile, TiesBrokenByIndex) {
  const std::vector<double> u{0.5, -0.5, 0.5, 0.5};
  const std::vector<double> eps{0.5};
  EXPECT_NEAR(min_mass_profile(u, eps)[0].value, std::sqrt(0.5), 1e-15);
}

TEST(ComplementWitness, Examples) {
  const auto w = complement_witness(basis(10, 0), 0.5);
  IndexSet rest(9);
  std::iota(rest.begin(), rest.end(), std::size_t{1});
  EXPECT_EQ(w.indices, rest);
  EXPECT_EQ(w.mass, 0.0);
  EXPECT_EQ(complement_witness(uniform(100), 0.25).indices.size(), 24u);
  const auto u = random_unit(50, 3);
  std::size_t prev = 0;
  for (double d = 0.05; d < 1.0; d += 0.05) {
    const auto cw = complement_witness(u, d);
    EXPECT_GE(cw.indices.size(), prev);
    EXPECT_LT(cw.mass, std::sqrt(d));
    prev = cw.indices.size();
  }
}

TEST(Ipr, Examples) {
  EXPECT_EQ(ipr(basis(7, 3)), 1.0);
  EXPECT_NEAR(ipr(uniform(50)), 1.0 / 50, 1e-16);
  std::vector<double> u(5, 0.0);
  u[0] = u[1] = std::sqrt(0.5);
  EXPECT_NEAR(ipr(u), 0.5, 1e-15);
}

TEST(TopMass, LocalizationLength) {
  EXPECT_EQ(localization_length(400), 66u);
  EXPECT_NEAR(top_mass_fraction(uniform(400), 66), 66.0 / 400.0, 1e-12);
  EXPECT_EQ(top_mass_fraction(basis(400, 9), 66), 1.0);
}

TEST(Localization, RejectsNonUnitVectors) {
  const std::vector<double> u{0.5, 0.5, 0.5};
  const std::vector<double> eps{0.1};
  EXPECT_THROW(hat_set(u, 1.0), std::invalid_argument);
  EXPECT_THROW(min_mass_profile(u, eps), std::invalid_argument);
  EXPECT_THROW(complement_witness(u, 0.5), std::invalid_argument);
  EXPECT_THROW(ipr(u), std::invalid_argument);
}

TEST(LocalizationProperties, MarkovComplementAndDichotomy) {
  const std::vector<double> eps{0.1, 0.2};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const std::size_t n = 3 + seed % 200;
    const auto u = random_unit(n, seed, seed % 3 ? TailLaw::pareto(0.5 + seed % 5 * 0.4) : TailLaw::gaussian());
    for (double c : {0.25, 0.5, 1.0, 2.0, 4.0}) {
      const auto r = localize(u, c, eps);
      EXPECT_LT(static_cast<double>(r.hat_I.size()), r.cardinality_bound);
      const double rest = subset_mass(u, complement(r.hat_I, n));
      EXPECT_NEAR(r.hat_I_mass + rest * rest, 1.0, 1e-12);
      EXPECT_GE(r.ipr, 1.0 / n - 1e-15);
      EXPECT_LE(r.ipr, 1.0 + 1e-15);
      for (double delta : {0.05, 0.3, 0.7}) {
        const bool a = std::sqrt(r.hat_I_mass) >= std::sqrt(1.0 - delta);
        const bool b = rest * rest > delta;
        // Complementary up to rounding at the exact boundary.
        if (std::abs(r.hat_I_mass - (1.0 - delta)) > 1e-12) {
          EXPECT_NE(a, b);
        }
      }
      for (std::size_t i = 1; i < r.min_mass_profile.size(); ++i) {
        // Larger epsilon keeps fewer coordinates.
        EXPECT_LE(r.min_mass_profile[i].value, r.min_mass_profile[i - 1].value);
      }
      for (const auto& pt : r.min_mass_profile) {
        EXPECT_GE(pt.value, 0.0);
        EXPECT_LE(pt.value, 1.0 + 1e-15);
      }
    }
  }
}

TEST(LocalizationProperties, SignAndPermutationInvariance) {
  const std::vector<double> eps{0.1, 0.3};
  const auto u = random_unit(40, 5, TailLaw::pareto(1.0));
  std::vector<double> neg(u);
  for (double& v : neg) v = -v;
  std::vector<std::size_t> perm(40);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 7, perm.end());
  std::vector<double> pu(40);
  for (std::size_t i = 0; i < 40; ++i) pu[i] = u[perm[i]];

  const auto a = localize(u, 1.0, eps);
  const auto b = localize(neg, 1.0, eps);
  const auto c = localize(pu, 1.0, eps);
  EXPECT_EQ(a.hat_I, b.hat_I);
  EXPECT_EQ(a.hat_I_mass, b.hat_I_mass);
  EXPECT_EQ(a.ipr, b.ipr);
  IndexSet mapped;
  for (std::size_t i : c.hat_I) mapped.push_back(perm[i]);
  std::sort(mapped.begin(), mapped.end());
  EXPECT_EQ(mapped, a.hat_I);
  EXPECT_NEAR(c.hat_I_mass, a.hat_I_mass, 1e-15);
  for (std::size_t i = 0; i < eps.size(); ++i) {
    EXPECT_EQ(a.min_mass_profile[i].value, b.min_mass_profile[i].value);
    EXPECT_EQ(a.min_mass_profile[i].value, c.min_mass_profile[i].value);
  }
}
