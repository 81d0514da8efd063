// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace mrflow::simd::weno {

inline constexpr double kThird = 1.0 / 3.0;
inline constexpr double kSixth = 1.0 / 6.0;
inline constexpr double kMinusSixth = -1.0 / 6.0;
inline constexpr double kFiveSixths = 5.0 / 6.0;
inline constexpr double kSevenSixths = 7.0 / 6.0;
inline constexpr double kElevenSixths = 11.0 / 6.0;
inline constexpr double kThirteenTwelfths = 13.0 / 12.0;
inline constexpr double kEpsilon = 1e-6;
inline constexpr double kLinear0 = 0.1;
inline constexpr double kLinear1 = 0.6;
inline constexpr double kLinear2 = 0.3;

}  // namespace mrflow::simd::weno
