// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string_view>

#include "mrflow/exact_sum.hpp"

namespace mrflow::simd {

enum class Level { scalar, avx2 };

std::string_view to_string(Level level) noexcept;

/// Elementwise kernels behind the vector operations. Every variant performs
/// the same IEEE operations in the same order per element (no FMA
/// contraction), so all variants are bit-identical to the scalar reference.
struct VectorKernels {
  Level level;
  // z = a*x + b*y
  void (*linear_sum)(double a, const double* x, double b, const double* y, double* z,
                     std::size_t n);
  // z = c*x
  void (*scale)(double c, const double* x, double* z, std::size_t n);
  // z = z + c*x
  void (*accumulate)(double c, const double* x, double* z, std::size_t n);
  // w = 1 / (rtol*|y| + atol)
  void (*error_weights)(const double* y, double rtol, double atol, double* w, std::size_t n);
  // acc += sum (x*w)^2
  void (*weighted_squares)(const double* x, const double* w, std::size_t n, ExactSum& acc);
  // acc += sum x*y
  void (*dot)(const double* x, const double* y, std::size_t n, ExactSum& acc);
  // max |x|, starting from `init`
  double (*max_abs)(const double* x, std::size_t n, double init);
};

/// Component-wise WENO5 face reconstruction with Lax-Friedrichs splitting.
/// `w` and `f` hold 6 stencil positions of `nv` values each (position
/// major); out[v] receives the face flux between positions 2 and 3.
struct WenoKernels {
  Level level;
  void (*face_flux)(const double* w, const double* f, double lambda, std::size_t nv,
                    double* out);
};

const VectorKernels& scalar_vector_kernels() noexcept;
const WenoKernels& scalar_weno_kernels() noexcept;

/// True when this binary carries AVX2 variants and the CPU supports them.
bool avx2_available() noexcept;

/// Kernels for the active level. The level defaults to the best supported
/// one; the MRFLOW_SIMD environment variable (scalar|avx2) overrides it.
const VectorKernels& vector_kernels() noexcept;
const WenoKernels& weno_kernels() noexcept;

Level active_level() noexcept;

/// Forces a level for the whole process. Throws ConfigError if the level is
/// not available on this machine.
void set_level(Level level);

/// Kernels for a specific level, for equivalence tests.
const VectorKernels& vector_kernels(Level level);
const WenoKernels& weno_kernels(Level level);

namespace detail {
double weno5_upwind(double fm2, double fm1, double f0, double fp1, double fp2) noexcept;
// Scalar face flux for components [begin, end) of a stencil with nv fields.
void face_flux_components(const double* w, const double* f, double lambda, std::size_t nv,
                          std::size_t begin, std::size_t end, double* out) noexcept;
#if defined(MRFLOW_HAVE_AVX2)
const VectorKernels& avx2_vector_kernels() noexcept;
const WenoKernels& avx2_weno_kernels() noexcept;
#endif
}  // namespace detail

}  // namespace mrflow::simd
