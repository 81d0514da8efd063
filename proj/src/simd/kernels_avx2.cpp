// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

// Compiled with -mavx2 only (no FMA) so every lane performs the same
// rounding sequence as the scalar reference.

#include <immintrin.h>

#include <cmath>

#include "mrflow/simd.hpp"
#include "weno_constants.hpp"

namespace mrflow::simd {
namespace {

inline __m256d abs4(__m256d x) { return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x); }

void linear_sum(double a, const double* x, double b, const double* y, double* z,
                std::size_t n) {
  const __m256d va = _mm256_set1_pd(a);
  const __m256d vb = _mm256_set1_pd(b);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_mul_pd(va, _mm256_loadu_pd(x + i)),
                                    _mm256_mul_pd(vb, _mm256_loadu_pd(y + i)));
    _mm256_storeu_pd(z + i, r);
  }
  for (; i < n; ++i) z[i] = a * x[i] + b * y[i];
}

void scale(double c, const double* x, double* z, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(z + i, _mm256_mul_pd(vc, _mm256_loadu_pd(x + i)));
  for (; i < n; ++i) z[i] = c * x[i];
}

void accumulate(double c, const double* x, double* z, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d r = _mm256_add_pd(_mm256_loadu_pd(z + i), _mm256_mul_pd(vc, _mm256_loadu_pd(x + i)));
    _mm256_storeu_pd(z + i, r);
  }
  for (; i < n; ++i) z[i] = z[i] + c * x[i];
}

void error_weights(const double* y, double rtol, double atol, double* w, std::size_t n) {
  const __m256d vr = _mm256_set1_pd(rtol);
  const __m256d va = _mm256_set1_pd(atol);
  const __m256d one = _mm256_set1_pd(1.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_add_pd(_mm256_mul_pd(vr, abs4(_mm256_loadu_pd(y + i))), va);
    _mm256_storeu_pd(w + i, _mm256_div_pd(one, d));
  }
  for (; i < n; ++i) w[i] = 1.0 / (rtol * std::fabs(y[i]) + atol);
}

void weighted_squares(const double* x, const double* w, std::size_t n, ExactSum& acc) {
  alignas(32) double buf[4];
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const __m256d t = _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(w + i));
    _mm256_store_pd(buf, _mm256_mul_pd(t, t));
    acc.add(buf[0]);
    acc.add(buf[1]);
    acc.add(buf[2]);
    acc.add(buf[3]);
  }
  for (; i < n; ++i) {
    const double t = x[i] * w[i];
    acc.add(t * t);
  }
}

void dot(const double* x, const double* y, std::size_t n, ExactSum& acc) {
  alignas(32) double buf[4];
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_store_pd(buf, _mm256_mul_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    acc.add(buf[0]);
    acc.add(buf[1]);
    acc.add(buf[2]);
    acc.add(buf[3]);
  }
  for (; i < n; ++i) acc.add(x[i] * y[i]);
}

double max_abs(const double* x, std::size_t n, double init) {
  __m256d m = _mm256_set1_pd(init);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) m = _mm256_max_pd(abs4(_mm256_loadu_pd(x + i)), m);
  alignas(32) double buf[4];
  _mm256_store_pd(buf, m);
  double r = init;
  for (double b : buf) r = b > r ? b : r;
  for (; i < n; ++i) {
    const double a = std::fabs(x[i]);
    r = a > r ? a : r;
  }
  return r;
}

inline __m256d upwind4(__m256d fm2, __m256d fm1, __m256d f0, __m256d fp1, __m256d fp2) {
  using namespace weno;
  const __m256d third = _mm256_set1_pd(kThird);
  const __m256d five6 = _mm256_set1_pd(kFiveSixths);
  const __m256d two = _mm256_set1_pd(2.0);
  const __m256d three = _mm256_set1_pd(3.0);
  const __m256d four = _mm256_set1_pd(4.0);
  const __m256d quarter = _mm256_set1_pd(0.25);
  const __m256d c1312 = _mm256_set1_pd(kThirteenTwelfths);
  const __m256d eps = _mm256_set1_pd(kEpsilon);

  const __m256d q0 = _mm256_add_pd(
      _mm256_sub_pd(_mm256_mul_pd(third, fm2), _mm256_mul_pd(_mm256_set1_pd(kSevenSixths), fm1)),
      _mm256_mul_pd(_mm256_set1_pd(kElevenSixths), f0));
  const __m256d q1 = _mm256_add_pd(
      _mm256_add_pd(_mm256_mul_pd(_mm256_set1_pd(kMinusSixth), fm1), _mm256_mul_pd(five6, f0)),
      _mm256_mul_pd(third, fp1));
  const __m256d q2 = _mm256_sub_pd(_mm256_add_pd(_mm256_mul_pd(third, f0), _mm256_mul_pd(five6, fp1)),
                                   _mm256_mul_pd(_mm256_set1_pd(kSixth), fp2));

  auto beta = [&](__m256d a, __m256d b) {
    return _mm256_add_pd(_mm256_mul_pd(_mm256_mul_pd(c1312, a), a),
                         _mm256_mul_pd(_mm256_mul_pd(quarter, b), b));
  };
  const __m256d beta0 =
      beta(_mm256_add_pd(_mm256_sub_pd(fm2, _mm256_mul_pd(two, fm1)), f0),
           _mm256_add_pd(_mm256_sub_pd(fm2, _mm256_mul_pd(four, fm1)), _mm256_mul_pd(three, f0)));
  const __m256d beta1 =
      beta(_mm256_add_pd(_mm256_sub_pd(fm1, _mm256_mul_pd(two, f0)), fp1), _mm256_sub_pd(fm1, fp1));
  const __m256d beta2 =
      beta(_mm256_add_pd(_mm256_sub_pd(f0, _mm256_mul_pd(two, fp1)), fp2),
           _mm256_add_pd(_mm256_sub_pd(_mm256_mul_pd(three, f0), _mm256_mul_pd(four, fp1)), fp2));

  __m256d t = _mm256_add_pd(eps, beta0);
  const __m256d a0 = _mm256_div_pd(_mm256_set1_pd(kLinear0), _mm256_mul_pd(t, t));
  t = _mm256_add_pd(eps, beta1);
  const __m256d a1 = _mm256_div_pd(_mm256_set1_pd(kLinear1), _mm256_mul_pd(t, t));
  t = _mm256_add_pd(eps, beta2);
  const __m256d a2 = _mm256_div_pd(_mm256_set1_pd(kLinear2), _mm256_mul_pd(t, t));
  const __m256d num = _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(a0, q0), _mm256_mul_pd(a1, q1)),
                                    _mm256_mul_pd(a2, q2));
  return _mm256_div_pd(num, _mm256_add_pd(_mm256_add_pd(a0, a1), a2));
}

void face_flux(const double* w, const double* f, double lambda, std::size_t nv, double* out) {
  const __m256d half = _mm256_set1_pd(0.5);
  const __m256d lam = _mm256_set1_pd(lambda);
  std::size_t v = 0;
  for (; v + 4 <= nv; v += 4) {
    __m256d fp[6];
    __m256d fm[6];
    for (std::size_t k = 0; k < 6; ++k) {
      const __m256d fk = _mm256_loadu_pd(f + k * nv + v);
      const __m256d lw = _mm256_mul_pd(lam, _mm256_loadu_pd(w + k * nv + v));
      fp[k] = _mm256_mul_pd(half, _mm256_add_pd(fk, lw));
      fm[k] = _mm256_mul_pd(half, _mm256_sub_pd(fk, lw));
    }
    _mm256_storeu_pd(out + v, _mm256_add_pd(upwind4(fp[0], fp[1], fp[2], fp[3], fp[4]),
                                            upwind4(fm[5], fm[4], fm[3], fm[2], fm[1])));
  }
  detail::face_flux_components(w, f, lambda, nv, v, nv, out);
}

constexpr VectorKernels kAvx2Vector{Level::avx2,  linear_sum,       scale, accumulate,
                                    error_weights, weighted_squares, dot,   max_abs};
constexpr WenoKernels kAvx2Weno{Level::avx2, face_flux};

}  // namespace

namespace detail {
const VectorKernels& avx2_vector_kernels() noexcept { return kAvx2Vector; }
const WenoKernels& avx2_weno_kernels() noexcept { return kAvx2Weno; }
}  // namespace detail

}  // namespace mrflow::simd
