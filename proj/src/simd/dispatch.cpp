// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include <atomic>
#include <cstdlib>
#include <string>

#include "mrflow/error.hpp"
#include "mrflow/simd.hpp"

namespace mrflow::simd {
namespace {

Level detect_default() noexcept {
  if (const char* env = std::getenv("MRFLOW_SIMD")) {
    const std::string_view want(env);
    if (want == "scalar") return Level::scalar;
    if (want == "avx2" && avx2_available()) return Level::avx2;
  }
  return avx2_available() ? Level::avx2 : Level::scalar;
}

std::atomic<Level>& level_slot() noexcept {
  static std::atomic<Level> level{detect_default()};
  return level;
}

}  // namespace

std::string_view to_string(Level level) noexcept {
  return level == Level::avx2 ? "avx2" : "scalar";
}

bool avx2_available() noexcept {
#if defined(MRFLOW_HAVE_AVX2)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Level active_level() noexcept { return level_slot().load(std::memory_order_relaxed); }

void set_level(Level level) {
  if (level == Level::avx2 && !avx2_available()) {
    throw ConfigError("avx2 kernels are not available on this machine");
  }
  level_slot().store(level, std::memory_order_relaxed);
}

const VectorKernels& vector_kernels(Level level) {
#if defined(MRFLOW_HAVE_AVX2)
  if (level == Level::avx2) {
    if (!avx2_available()) throw ConfigError("avx2 kernels are not available on this machine");
    return detail::avx2_vector_kernels();
  }
#else
  if (level == Level::avx2) throw ConfigError("built without avx2 kernels");
#endif
  return scalar_vector_kernels();
}

const WenoKernels& weno_kernels(Level level) {
#if defined(MRFLOW_HAVE_AVX2)
  if (level == Level::avx2) {
    if (!avx2_available()) throw ConfigError("avx2 kernels are not available on this machine");
    return detail::avx2_weno_kernels();
  }
#else
  if (level == Level::avx2) throw ConfigError("built without avx2 kernels");
#endif
  return scalar_weno_kernels();
}

const VectorKernels& vector_kernels() noexcept {
#if defined(MRFLOW_HAVE_AVX2)
  if (active_level() == Level::avx2) return detail::avx2_vector_kernels();
#endif
  return scalar_vector_kernels();
}

const WenoKernels& weno_kernels() noexcept {
#if defined(MRFLOW_HAVE_AVX2)
  if (active_level() == Level::avx2) return detail::avx2_weno_kernels();
#endif
  return scalar_weno_kernels();
}

}  // namespace mrflow::simd
