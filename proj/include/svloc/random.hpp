#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>

namespace svloc {

// Philox4x64-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ull;
  static constexpr std::uint64_t kMul1 = 0xCA5A826395121157ull;
  static constexpr std::uint64_t kWeyl0 = 0x9E3779B97F4A7C15ull;
  static constexpr std::uint64_t kWeyl1 = 0xBB67AE8584CAA73Bull;

  static Counter apply(Counter ctr, Key key) noexcept {
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kWeyl0;
        key[1] += kWeyl1;
      }
      const unsigned __int128 p0 = static_cast<unsigned __int128>(kMul0) * ctr[0];
      const unsigned __int128 p1 = static_cast<unsigned __int128>(kMul1) * ctr[2];
      const auto hi0 = static_cast<std::uint64_t>(p0 >> 64);
      const auto lo0 = static_cast<std::uint64_t>(p0);
      const auto hi1 = static_cast<std::uint64_t>(p1 >> 64);
      const auto lo1 = static_cast<std::uint64_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
  }
};

// Counter-mode stream keyed by (seed, trial_index). Output block b is
// Philox(counter = (b, 0, 0, 0), key = (seed, trial_index)), so a stream is a
// pure function of its two keys and the position in it.
// Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint64_t;

  RandomStream(std::uint64_t seed, std::uint64_t trial_index) noexcept : key_{seed, trial_index} {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (pos_ == 4) {
      buffer_ = Philox4x64::apply({block_, 0, 0, 0}, key_);
      ++block_;
      pos_ = 0;
    }
    return buffer_[pos_++];
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; never returns 0, so U^{-1/alpha} stays finite.
  double uniform_open_closed() noexcept {
    return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53;
  }

  // Uniform on [-1, 1).
  double uniform_symmetric() noexcept { return 2.0 * uniform() - 1.0; }

  // Fair sign from one output bit.
  double sign() noexcept { return ((*this)() >> 63) ? -1.0 : 1.0; }

  std::uint64_t seed() const noexcept { return key_[0]; }
  std::uint64_t trial_index() const noexcept { return key_[1]; }

 private:
  Philox4x64::Key key_;
  Philox4x64::Counter buffer_{};
  std::uint64_t block_ = 0;
  int pos_ = 4;
};

inline RandomStream derive_stream(std::uint64_t seed, std::uint64_t trial_index) noexcept {
  return RandomStream(seed, trial_index);
}

// SplitMix64 finalizer; used to fold several values into one 64-bit key.
inline std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t combine_keys(std::uint64_t acc, std::uint64_t value) noexcept {
  return mix64(acc ^ mix64(value));
}

}  // namespace svloc
