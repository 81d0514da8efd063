// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Dense Gaussian elimination with partial pivoting on a full row-major
// matrix; the global-solve oracle for block factorizations.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace oracle {

inline std::vector<double> dense_solve(std::vector<double> a, std::vector<double> b) {
  const std::size_t n = b.size();
  if (a.size() != n * n) throw std::invalid_argument("matrix must be n x n");
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::fabs(a[r * n + k]) > std::fabs(a[p * n + k])) p = r;
    }
    if (a[p * n + k] == 0.0) throw std::runtime_error("singular matrix");
    if (p != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(a[k * n + c], a[p * n + c]);
      std::swap(b[k], b[p]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const double l = a[r * n + k] / a[k * n + k];
      if (l == 0.0) continue;
      for (std::size_t c = k; c < n; ++c) a[r * n + c] -= l * a[k * n + c];
      b[r] -= l * b[k];
    }
  }
  std::vector<double> x(n);
  for (std::size_t k = n; k-- > 0;) {
    double s = b[k];
    for (std::size_t c = k + 1; c < n; ++c) s -= a[k * n + c] * x[c];
    x[k] = s / a[k * n + k];
  }
  return x;
}

}  // namespace oracle
