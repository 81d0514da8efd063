// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "mrflow/simd.hpp"
#include "weno_constants.hpp"

namespace mrflow::simd {
namespace {

void linear_sum(double a, const double* x, double b, const double* y, double* z,
                std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void scale(double c, const double* x, double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = c * x[i];
}

void accumulate(double c, const double* x, double* z, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) z[i] = z[i] + c * x[i];
}

void error_weights(const double* y, double rtol, double atol, double* w, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) w[i] = 1.0 / (rtol * std::fabs(y[i]) + atol);
}

void weighted_squares(const double* x, const double* w, std::size_t n, ExactSum& acc) {
  for (std::size_t i = 0; i < n; ++i) {
    const double t = x[i] * w[i];
    acc.add(t * t);
  }
}

void dot(const double* x, const double* y, std::size_t n, ExactSum& acc) {
  for (std::size_t i = 0; i < n; ++i) acc.add(x[i] * y[i]);
}

double max_abs(const double* x, std::size_t n, double init) {
  double m = init;
  for (std::size_t i = 0; i < n; ++i) {
    const double a = std::fabs(x[i]);
    m = a > m ? a : m;
  }
  return m;
}

void face_flux(const double* w, const double* f, double lambda, std::size_t nv, double* out) {
  detail::face_flux_components(w, f, lambda, nv, 0, nv, out);
}

constexpr VectorKernels kScalarVector{Level::scalar, linear_sum,       scale, accumulate,
                                      error_weights, weighted_squares, dot,   max_abs};
constexpr WenoKernels kScalarWeno{Level::scalar, face_flux};

}  // namespace

namespace detail {

void face_flux_components(const double* w, const double* f, double lambda, std::size_t nv,
                          std::size_t begin, std::size_t end, double* out) noexcept {
  for (std::size_t v = begin; v < end; ++v) {
    double fp[6];
    double fm[6];
    for (std::size_t k = 0; k < 6; ++k) {
      const double fk = f[k * nv + v];
      const double lw = lambda * w[k * nv + v];
      fp[k] = 0.5 * (fk + lw);
      fm[k] = 0.5 * (fk - lw);
    }
    out[v] = weno5_upwind(fp[0], fp[1], fp[2], fp[3], fp[4]) +
             weno5_upwind(fm[5], fm[4], fm[3], fm[2], fm[1]);
  }
}

double weno5_upwind(double fm2, double fm1, double f0, double fp1, double fp2) noexcept {
  using namespace weno;
  const double q0 = kThird * fm2 - kSevenSixths * fm1 + kElevenSixths * f0;
  const double q1 = kMinusSixth * fm1 + kFiveSixths * f0 + kThird * fp1;
  const double q2 = kThird * f0 + kFiveSixths * fp1 - kSixth * fp2;

  double a = fm2 - 2.0 * fm1 + f0;
  double b = fm2 - 4.0 * fm1 + 3.0 * f0;
  const double beta0 = kThirteenTwelfths * a * a + 0.25 * b * b;
  a = fm1 - 2.0 * f0 + fp1;
  b = fm1 - fp1;
  const double beta1 = kThirteenTwelfths * a * a + 0.25 * b * b;
  a = f0 - 2.0 * fp1 + fp2;
  b = 3.0 * f0 - 4.0 * fp1 + fp2;
  const double beta2 = kThirteenTwelfths * a * a + 0.25 * b * b;

  double t = kEpsilon + beta0;
  const double alpha0 = kLinear0 / (t * t);
  t = kEpsilon + beta1;
  const double alpha1 = kLinear1 / (t * t);
  t = kEpsilon + beta2;
  const double alpha2 = kLinear2 / (t * t);
  return (alpha0 * q0 + alpha1 * q1 + alpha2 * q2) / (alpha0 + alpha1 + alpha2);
}

}  // namespace detail

const VectorKernels& scalar_vector_kernels() noexcept { return kScalarVector; }
const WenoKernels& scalar_weno_kernels() noexcept { return kScalarWeno; }

}  // namespace mrflow::simd
