// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Tight-tolerance Dormand-Prince 5(4) integrator on plain vectors. It shares
// no code with the library and serves as ground truth for ODE tests.

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace oracle {

using State = std::vector<double>;
using Rhs = std::function<void(double, const State&, State&)>;

struct OracleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ReferenceOptions {
  double rtol = 1e-12;
  double atol = 1e-14;
  long max_steps = 10000000;
};

inline State reference_solve(const Rhs& f, State y, double t0, double tf,
                             ReferenceOptions opt = {}) {
  static const double c[7] = {0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1, 1};
  static const double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
  };
  static const double b[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
  static const double e[7] = {71.0 / 57600, 0, -71.0 / 16695, 71.0 / 1920, -17253.0 / 339200,
                              22.0 / 525, -1.0 / 40};
  const std::size_t n = y.size();
  std::vector<State> k(7, State(n));
  State tmp(n), ynew(n);
  double t = t0;
  double h = std::min(1e-6, tf - t0);
  long steps = 0;
  while (t < tf) {
    if (++steps > opt.max_steps) throw OracleError("reference solve exceeded its step budget");
    if (t + h > tf) h = tf - t;
    f(t, y, k[0]);
    for (int s = 1; s < 7; ++s) {
      for (std::size_t i = 0; i < n; ++i) {
        double acc = y[i];
        for (int j = 0; j < s; ++j) acc += h * a[s][j] * k[j][i];
        tmp[i] = acc;
      }
      f(t + c[s] * h, tmp, k[s]);
    }
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double acc = y[i];
      double est = 0.0;
      for (int j = 0; j < 7; ++j) {
        acc += h * b[j] * k[j][i];
        est += h * e[j] * k[j][i];
      }
      ynew[i] = acc;
      const double sc = opt.atol + opt.rtol * std::max(std::fabs(y[i]), std::fabs(acc));
      err += (est / sc) * (est / sc);
    }
    err = std::sqrt(err / static_cast<double>(n));
    if (!std::isfinite(err)) throw OracleError("reference solve produced non-finite values");
    if (err <= 1.0) {
      t = (t + h >= tf) ? tf : t + h;
      y = ynew;
    }
    const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
    h *= factor;
    if (h < 1e-300) throw OracleError("reference solve step underflow");
  }
  return y;
}

}  // namespace oracle
