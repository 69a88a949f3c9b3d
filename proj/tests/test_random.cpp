#include <gtest/gtest.h>

#include <array>
#include <cstdint>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

#include "svloc/random.hpp"

using svloc::Philox4x64;
using svloc::RandomStream;

// Known-answer vectors, cross-checked against an independent Philox4x64-10
// implementation.
TEST(Philox, ZeroKeyZeroCounter) {
  const auto out = Philox4x64::apply({0, 0, 0, 0}, {0, 0});
  const Philox4x64::Counter want{0x16554d9eca36314cull, 0xdb20fe9d672d0fdcull, 0xd7e772cee186176bull,
                                 0x7e68b68aec7ba23bull};
  EXPECT_EQ(out, want);
}

TEST(Philox, AllOnesKey) {
  const std::uint64_t ones = ~std::uint64_t{0};
  const auto out = Philox4x64::apply({0, 0, 0, 0}, {ones, ones});
  const Philox4x64::Counter want{0x44b7493d1acfc229ull, 0x6636af8e997921ddull, 0x3f73e132b5b3780eull,
                                 0x605644dde03b01b1ull};
  EXPECT_EQ(out, want);
}

TEST(Philox, PiDigitsVector) {
  const auto out = Philox4x64::apply({0x243f6a8885a308d3ull, 0x13198a2e03707344ull, 0xa4093822299f31d0ull,
                                      0x082efa98ec4e6c89ull},
                                     {0x452821e638d01377ull, 0xbe5466cf34e90c6cull});
  const Philox4x64::Counter want{0xa528f45403e61d95ull, 0x38c72dbd566e9788ull, 0xa5a1610e72fd18b5ull,
                                 0x57bd43b5e52b7fe6ull};
  EXPECT_EQ(out, want);
  // Next counter, as reported by numpy's Philox (which increments before output).
  const auto next = Philox4x64::apply({0x243f6a8885a308d4ull, 0x13198a2e03707344ull, 0xa4093822299f31d0ull,
                                       0x082efa98ec4e6c89ull},
                                      {0x452821e638d01377ull, 0xbe5466cf34e90c6cull});
  const Philox4x64::Counter want_next{0x4c8e672094922aa3ull, 0x527061cd2884102aull, 0xf4c265b2d783d553ull,
                                      0x0556e76cb0298c8dull};
  EXPECT_EQ(next, want_next);
}

TEST(RandomStream, WalksCounterBlocks) {
  RandomStream s(0, 0);
  const std::array<std::uint64_t, 8> want{0x16554d9eca36314cull, 0xdb20fe9d672d0fdcull, 0xd7e772cee186176bull,
                                          0x7e68b68aec7ba23bull, 0x02f4ba6408e4d89bull, 0x3dd62b0b9ca8c5b2ull,
                                          0x1c8667a55d902e79ull, 0x907d7a052fd5b4dcull};
  for (auto w : want) EXPECT_EQ(s(), w);
}

TEST(RandomStream, DistinctTrialsDiffer) {
  auto a = svloc::derive_stream(7, 0);
  auto b = svloc::derive_stream(7, 1);
  int equal = 0;
  for (int i = 0; i < 100; ++i) equal += a() == b();
  EXPECT_EQ(equal, 0);
}

TEST(RandomStream, SameKeysReplay) {
  auto a = svloc::derive_stream(7, 3);
  auto b = svloc::derive_stream(7, 3);
  for (int i = 0; i < 1000; ++i) ASSERT_EQ(a(), b());
}

TEST(RandomStream, UniformChiSquare) {
  for (std::uint64_t seed : {1ull, 2ull, 12345ull}) {
    auto s = svloc::derive_stream(seed, 0);
    constexpr int kBins = 100;
    constexpr int kDraws = 10000;
    std::vector<int> counts(kBins, 0);
    for (int i = 0; i < kDraws; ++i) ++counts[static_cast<int>(s.uniform() * kBins)];
    double chi2 = 0.0;
    const double expected = static_cast<double>(kDraws) / kBins;
    for (int c : counts) chi2 += (c - expected) * (c - expected) / expected;
    const boost::math::chi_squared_distribution<double> dist(kBins - 1);
    const double p = boost::math::cdf(boost::math::complement(dist, chi2));
    EXPECT_GT(p, 0.001) << "seed " << seed << " chi2 " << chi2;
  }
}

TEST(RandomStream, RangesOfHelpers) {
  auto s = svloc::derive_stream(99, 5);
  for (int i = 0; i < 100000; ++i) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = s.uniform_open_closed();
    ASSERT_GT(v, 0.0);
    ASSERT_LE(v, 1.0);
    const double w = s.uniform_symmetric();
    ASSERT_GE(w, -1.0);
    ASSERT_LT(w, 1.0);
  }
}
