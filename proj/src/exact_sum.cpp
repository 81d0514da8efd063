// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/exact_sum.hpp"

#include <cmath>

namespace mrflow {

void ExactSum::normalize() noexcept {
  for (int i = 0; i + 1 < kLimbs; ++i) {
    const std::int64_t carry = limbs_[i] >> 32;
    limbs_[i] -= carry * (std::int64_t{1} << 32);
    limbs_[i + 1] += carry;
  }
  pending_ = 0;
}

void ExactSum::merge(const ExactSum& other) noexcept {
  ExactSum rhs = other;
  rhs.normalize();
  normalize();
  for (int i = 0; i < kLimbs; ++i) limbs_[i] += rhs.limbs_[i];
  special_ += rhs.special_;
  normalize();
}

double ExactSum::value() const noexcept {
  if (special_ != 0.0 || std::isnan(special_)) return special_;
  ExactSum t = *this;
  t.normalize();
  const bool negative = t.limbs_[kLimbs - 1] < 0;
  if (negative) {
    for (auto& l : t.limbs_) l = -l;
    t.normalize();
  }
  int top = kLimbs - 1;
  while (top >= 0 && t.limbs_[top] == 0) --top;
  if (top < 0) return 0.0;

  const int base = top >= 2 ? top - 2 : 0;
  unsigned __int128 u = 0;
  for (int j = top; j >= base; --j) {
    u = (u << 32) | static_cast<unsigned __int128>(static_cast<std::uint64_t>(t.limbs_[j]));
  }
  for (int j = 0; j < base; ++j) {
    if (t.limbs_[j] != 0) {
      u |= 1;  // sticky bit; u carries at least 65 significant bits here
      break;
    }
  }
  const double r = std::ldexp(static_cast<double>(u), 32 * base - 1074);
  return negative ? -r : r;
}

bool operator==(const ExactSum& a, const ExactSum& b) noexcept {
  ExactSum x = a;
  ExactSum y = b;
  x.normalize();
  y.normalize();
  return x.limbs_ == y.limbs_ &&
         (x.special_ == y.special_ || (std::isnan(x.special_) && std::isnan(y.special_)));
}

}  // namespace mrflow
