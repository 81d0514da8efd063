// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace oracle {

struct StudyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Least-squares slope of log(error) against log(step).
inline double observed_order(std::span<const double> errors, std::span<const double> steps) {
  if (errors.size() != steps.size()) throw StudyError("errors and steps differ in length");
  if (errors.size() < 3) throw StudyError("a refinement study needs at least three levels");
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(errors.size());
  for (std::size_t i = 0; i < errors.size(); ++i) {
    if (!(errors[i] > 0.0) || !(steps[i] > 0.0)) throw StudyError("errors and steps must be positive");
    const double x = std::log(steps[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) throw StudyError("steps must differ");
  return (n * sxy - sx * sy) / denom;
}

}  // namespace oracle
