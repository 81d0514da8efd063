// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <bit>
#include <cstdint>

namespace mrflow {

/// Order-independent accumulator for sums of doubles.
///
/// Every finite addend is split into 32-bit digits and added into a wide
/// fixed-point register that spans the whole binary64 exponent range, so the
/// accumulated value is exact. Merging partial accumulators is therefore
/// associative and commutative, and value() depends only on the mathematical
/// sum, never on how the addends were partitioned across tasks or subvectors.
/// This is what makes batched/unbatched reductions and 1-task/k-task runs
/// bit-identical.
class ExactSum {
 public:
  static constexpr int kLimbs = 68;

  void add(double x) noexcept {
    const auto bits = std::bit_cast<std::uint64_t>(x);
    std::uint64_t expo = (bits >> 52) & 0x7ffu;
    std::uint64_t mant = bits & ((std::uint64_t{1} << 52) - 1);
    if (expo == 0x7ffu) {
      special_ += x;
      return;
    }
    if (expo == 0) {
      if (mant == 0) return;
      expo = 1;
    } else {
      mant |= std::uint64_t{1} << 52;
    }
    // value = mant * 2^(expo - 1075); bit 0 of mant sits at 2^-1074 * 2^(expo-1)
    const auto pos = static_cast<unsigned>(expo - 1);
    const unsigned idx = pos >> 5;
    const unsigned shift = pos & 31u;
    const unsigned __int128 wide = static_cast<unsigned __int128>(mant) << shift;
    const auto d0 = static_cast<std::int64_t>(static_cast<std::uint32_t>(wide));
    const auto d1 = static_cast<std::int64_t>(static_cast<std::uint32_t>(wide >> 32));
    const auto d2 = static_cast<std::int64_t>(wide >> 64);
    if (bits >> 63) {
      limbs_[idx] -= d0;
      limbs_[idx + 1] -= d1;
      limbs_[idx + 2] -= d2;
    } else {
      limbs_[idx] += d0;
      limbs_[idx + 1] += d1;
      limbs_[idx + 2] += d2;
    }
    if (++pending_ >= kCarryInterval) normalize();
  }

  void merge(const ExactSum& other) noexcept;

  /// Propagates carries so every limb except the top one lies in [0, 2^32).
  /// The normalized form is unique for a given exact value.
  void normalize() noexcept;

  /// Nearest double to the exact sum (ties to even).
  double value() const noexcept;

  void clear() noexcept {
    limbs_.fill(0);
    special_ = 0.0;
    pending_ = 0;
  }

  friend bool operator==(const ExactSum& a, const ExactSum& b) noexcept;

 private:
  static constexpr std::uint32_t kCarryInterval = std::uint32_t{1} << 30;

  std::array<std::int64_t, kLimbs> limbs_{};
  double special_ = 0.0;  // inf / nan addends
  std::uint32_t pending_ = 0;
};

}  // namespace mrflow
