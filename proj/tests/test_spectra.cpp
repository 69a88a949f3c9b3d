#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "svloc/ensemble.hpp"
#include "svloc/spectra.hpp"

using namespace svloc;

namespace {

Matrix gaussian(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  auto rng = derive_stream(seed, 0);
  const TailLaw g = TailLaw::gaussian();
  Matrix x(rows, cols);
  for (double& v : x.data()) v = g.sample(rng);
  return x;
}

// Cyclic Jacobi eigenvalues of a symmetric matrix, ascending. Independent of
// the bidiagonal SVD path.
std::vector<double> jacobi_eigenvalues(std::vector<std::vector<double>> a) {
  const std::size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (a[p][q] == 0.0) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
  }
  std::vector<double> ev(n);
  for (std::size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.begin(), ev.end());
  return ev;
}

std::vector<std::vector<double>> gram(const Matrix& x) {
  std::vector<std::vector<double>> g(x.cols(), std::vector<double>(x.cols(), 0.0));
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t p = 0; p < x.cols(); ++p)
      for (std::size_t q = 0; q < x.cols(); ++q) g[p][q] += x(i, p) * x(i, q);
  return g;
}

}  // namespace

TEST(FullSvd, DiagonalCase) {
  const Matrix x = Matrix::from_rows({{3, 0}, {0, 1}, {0, 0}});
  const auto r = full_svd(x, 1);
  EXPECT_NEAR(r.singular_values[0], 3.0, 1e-15);
  EXPECT_NEAR(r.singular_values[1], 1.0, 1e-15);
  EXPECT_NEAR(r.bottom[0].vector[0], 0.0, 1e-15);
  EXPECT_NEAR(r.bottom[0].vector[1], 1.0, 1e-15);
}

TEST(FullSvd, RankOneCaseAndSignConvention) {
  const Matrix x = Matrix::from_rows({{1, 1}, {1, 1}, {0, 0}});
  const auto r = full_svd(x, 1);
  EXPECT_NEAR(r.singular_values[0], 2.0, 1e-14);
  EXPECT_NEAR(r.singular_values[1], 0.0, 1e-14);
  // +-(1,-1)/sqrt2: magnitudes tie, so the lowest index is made positive.
  EXPECT_NEAR(r.bottom[0].vector[0], std::sqrt(0.5), 1e-14);
  EXPECT_NEAR(r.bottom[0].vector[1], -std::sqrt(0.5), 1e-14);
}

TEST(FullSvd, FrobeniusIdentity) {
  const Matrix x = gaussian(30, 20, 1);
  const auto r = full_svd(x, 3);
  double ss = 0.0;
  for (double s : r.singular_values) ss += s * s;
  const double f = frobenius_norm(x);
  EXPECT_NEAR(ss / (f * f), 1.0, 1e-12);
}

TEST(FullSvd, ResidualsOrthonormalityAndSigns) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = sample_matrix({25, 1.6, TailLaw::pareto(0.9 + 0.3 * seed), seed});
    const auto r = full_svd(x, 4);
    const double s1 = r.s_max();
    std::vector<const SingularPair*> pairs{&r.top};
    for (const auto& p : r.bottom) pairs.push_back(&p);
    for (const auto* p : pairs) {
      EXPECT_LE(p->residual, 1e-10 * s1 * s1);
      EXPECT_NEAR(norm2(p->vector), 1.0, 1e-12);
      const auto it = std::max_element(p->vector.begin(), p->vector.end(),
                                       [](double a, double b) { return std::abs(a) < std::abs(b); });
      EXPECT_GT(*it, 0.0);
    }
    for (std::size_t a = 0; a < pairs.size(); ++a)
      for (std::size_t b = a + 1; b < pairs.size(); ++b) EXPECT_LE(std::abs(dot(pairs[a]->vector, pairs[b]->vector)), 1e-10);
    EXPECT_TRUE(std::is_sorted(r.singular_values.rbegin(), r.singular_values.rend()));
  }
}

TEST(FullSvd, RejectsBadShapes) {
  EXPECT_THROW(full_svd(Matrix(2, 3), 1), std::invalid_argument);
  EXPECT_THROW(full_svd(Matrix(3, 1), 1), std::invalid_argument);
  EXPECT_THROW(full_svd(Matrix(4, 3, 1.0), 4), std::invalid_argument);
  EXPECT_THROW(full_svd(Matrix(4, 3, 1.0), 0), std::invalid_argument);
}

TEST(FullSvd, DegenerateFlag) {
  // Two equal singular values at the bottom.
  const Matrix x = Matrix::from_rows({{5, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 0}});
  const auto r = full_svd(x, 2);
  EXPECT_TRUE(r.bottom[0].degenerate);
  EXPECT_TRUE(r.bottom[1].degenerate);
  EXPECT_FALSE(r.top.degenerate);
}

TEST(SmallestSingularValue, Examples) {
  EXPECT_NEAR(smallest_singular_value(Matrix::from_rows({{1, 0}, {0, 1}, {0, 0}})), 1.0, 1e-15);
  EXPECT_NEAR(smallest_singular_value(Matrix::from_rows({{1, 1}, {1, 1}, {0, 0}})), 0.0, 1e-14);
  Matrix dup = gaussian(10, 4, 3);
  for (std::size_t i = 0; i < dup.rows(); ++i) dup(i, 3) = dup(i, 1);
  EXPECT_LE(smallest_singular_value(dup), 1e-10 * spectral_norm(dup));
}

TEST(KthSmallest, DiagonalCase) {
  const Matrix x = Matrix::from_rows({{3, 0}, {0, 1}, {0, 0}});
  auto [s1, u1] = kth_smallest(x, 1);
  EXPECT_NEAR(s1, 1.0, 1e-15);
  EXPECT_NEAR(u1[1], 1.0, 1e-15);
  auto [s2, u2] = kth_smallest(x, 2);
  EXPECT_NEAR(s2, 3.0, 1e-15);
  EXPECT_NEAR(u2[0], 1.0, 1e-15);
  EXPECT_THROW(kth_smallest(x, 3), std::invalid_argument);
}

TEST(KthSmallest, AgreesWithSmallestAndIsOrthogonal) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const Matrix x = gaussian(40, 25, 100 + seed);
    const double s1 = spectral_norm(x);
    const auto [v1, u1] = kth_smallest(x, 1);
    EXPECT_NEAR(v1, smallest_singular_value(x), 1e-12 * s1);
    const auto [v2, u2] = kth_smallest(x, 2);
    EXPECT_LE(std::abs(dot(u1, u2)), 1e-10);
  }
}

TEST(KthSmallest, MatchesJacobiEigenvaluesOfGram) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::size_t n = 3 + seed % 6;
    const Matrix x = sample_matrix({n, 1.5, TailLaw::pareto(1.8), seed});
    const auto ev = jacobi_eigenvalues(gram(x));
    const double s1 = spectral_norm(x);
    for (std::size_t k = 1; k <= std::min<std::size_t>(3, n); ++k) {
      const double via_eig = std::sqrt(std::max(0.0, ev[k - 1]));
      EXPECT_NEAR(kth_smallest(x, k).first, via_eig, 1e-10 * s1) << "seed " << seed << " k " << k;
    }
  }
}

TEST(KthSmallest, MaxMinProbesNeverExceed) {
  // For any subspace S of dimension n-k+1, min over unit u in S of ||Xu|| <= s_k-th smallest.
  // Probe with random subspaces spanned by random vectors; their minima are lower bounds.
  auto rng = derive_stream(9, 9);
  const TailLaw g = TailLaw::gaussian();
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const std::size_t n = 6;
    const Matrix x = gaussian(10, n, 200 + seed);
    for (std::size_t k = 1; k <= 3; ++k) {
      const double target = kth_smallest(x, k).first;
      const std::size_t dim = n - k + 1;
      for (int probe = 0; probe < 2000; ++probe) {
        Matrix basis(n, dim);
        for (double& v : basis.data()) v = g.sample(rng);
        // min over the span = s_min(X B Q) with orthonormal Q; s_min(XB) / s_max(B) <= that.
        Matrix xb(x.rows(), dim);
        for (std::size_t i = 0; i < x.rows(); ++i)
          for (std::size_t j = 0; j < dim; ++j) {
            double acc = 0.0;
            for (std::size_t l = 0; l < n; ++l) acc += x(i, l) * basis(l, j);
            xb(i, j) = acc;
          }
        const double lower = smallest_singular_value(xb) / spectral_norm(basis);
        ASSERT_LE(lower, target * (1 + 1e-12));
      }
    }
  }
}

TEST(Interlacing, ColumnAndRowMinors) {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const Matrix x = sample_matrix({12, 2.0, TailLaw::pareto(1.2), seed});
    const double s1 = spectral_norm(x);
    const double smin = smallest_singular_value(x);
    IndexSet cols;
    for (std::size_t j = 0; j < x.cols(); ++j)
      if ((seed >> (j % 6)) & 1 || j % 3 == 0) cols.push_back(j);
    const Matrix xj = take_minor(x, MinorSpec::columns(x, cols));
    const double smin_j = smallest_singular_value(xj);
    EXPECT_LE(smin, smin_j + 1e-12 * s1);
    IndexSet rows;
    for (std::size_t i = 0; i < x.rows(); ++i)
      if (i % 4 != 1) rows.push_back(i);
    const Matrix xjr = take_minor(xj, MinorSpec::rows(xj, rows));
    EXPECT_LE(smallest_singular_value(xjr), smin_j + 1e-12 * s1);
  }
}

TEST(Permutation, RightVectorsPermuteWithColumns) {
  const Matrix x = gaussian(20, 8, 77);
  std::vector<std::size_t> perm{3, 0, 7, 5, 1, 6, 2, 4};
  Matrix y(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.rows(); ++i)
    for (std::size_t j = 0; j < x.cols(); ++j) y(i, j) = x(i, perm[j]);
  const auto rx = full_svd(x, 2);
  const auto ry = full_svd(y, 2);
  for (std::size_t k = 0; k < 2; ++k) {
    std::vector<double> mapped(x.cols());
    for (std::size_t j = 0; j < x.cols(); ++j) mapped[j] = rx.bottom[k].vector[perm[j]];
    apply_sign_convention(mapped);
    for (std::size_t j = 0; j < x.cols(); ++j) EXPECT_NEAR(ry.bottom[k].vector[j], mapped[j], 1e-10);
  }
}

TEST(TakeMinor, SelectionAndErrors) {
  const Matrix x = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}, {7, 8, 9}});
  EXPECT_EQ(take_minor(x, MinorSpec::all(x)), x);
  EXPECT_EQ(take_minor(x, MinorSpec::columns(x, {0, 2})), Matrix::from_rows({{1, 3}, {4, 6}, {7, 9}}));
  const MinorSpec rc{{0, 2}, {1, 2}};
  const Matrix a = take_minor(take_minor(x, MinorSpec::rows(x, {0, 2})), MinorSpec::columns(Matrix(2, 3), {1, 2}));
  const Matrix b = take_minor(take_minor(x, MinorSpec::columns(x, {1, 2})), MinorSpec::rows(Matrix(3, 2), {0, 2}));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, take_minor(x, rc));
  EXPECT_THROW(take_minor(x, MinorSpec::columns(x, {})), std::invalid_argument);
  EXPECT_THROW(take_minor(x, MinorSpec::columns(x, {3})), std::out_of_range);
  EXPECT_THROW(take_minor(x, MinorSpec::columns(x, {1, 1})), std::invalid_argument);
}

TEST(OperatorNorm, Examples) {
  EXPECT_NEAR(operator_norm(Matrix::from_rows({{3, 0}, {0, 1}, {0, 0}})), 3.0, 3e-10);
  EXPECT_NEAR(operator_norm(Matrix(4, 3, 1.0)), std::sqrt(12.0), std::sqrt(12.0) * 1e-10);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Matrix x = sample_matrix({15, 2.0, TailLaw::pareto(1.0), seed});
    const double nrm = operator_norm(x);
    for (std::size_t j = 0; j < x.cols(); ++j) EXPECT_GE(nrm, column_norm(x, j));
    EXPECT_NEAR(nrm, spectral_norm(x), 1e-9 * nrm);
  }
}

TEST(OperatorNorm, CapGivesBracket) {
  // Two nearly equal top singular values make power iteration slow.
  Matrix x = Matrix::from_rows({{1.0, 0.0}, {0.0, 1.0 - 1e-9}, {0.0, 0.0}});
  try {
    operator_norm(x, 1e-14, 3);
    FAIL();
  } catch (const NormNonConvergence& e) {
    EXPECT_LE(e.lower, 1.0);
    EXPECT_GE(e.upper, 1.0);
  }
}

TEST(SingularValues, WideInputAndSpectralNorm) {
  const Matrix x = gaussian(7, 12, 5);
  const auto a = singular_values(x);
  const auto b = singular_values(x.transposed());
  ASSERT_EQ(a.size(), 7u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12 * a[0]);
}
