// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/vectors.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "mrflow/error.hpp"
#include "mrflow/simd.hpp"

namespace mrflow {
namespace {

constexpr std::size_t kChunk = 512;

void require_conformant(const ManyVector& a, const ManyVector& b) {
  if (!a.valid() || !b.valid() || !a.layout().conforms(b.layout())) {
    throw ConformanceError("vector layouts do not conform");
  }
}

double wrms_from_sum(const ExactSum& sum, std::size_t n) {
  return std::sqrt(sum.value() / static_cast<double>(n));
}

}  // namespace

std::shared_ptr<const VectorLayout> VectorLayout::create(Collective& comm,
                                                         std::span<const SubvectorRequest> subvectors,
                                                         VectorOptions options) {
  if (subvectors.empty()) throw ConformanceError("a many-vector needs at least one subvector");
  std::vector<ExactSum> totals(subvectors.size());
  for (std::size_t i = 0; i < subvectors.size(); ++i) {
    totals[i].add(static_cast<double>(subvectors[i].local_length));
  }
  comm.allreduce(totals);

  auto layout = std::shared_ptr<VectorLayout>(new VectorLayout());
  layout->comm_ = &comm;
  layout->options_ = options;
  for (std::size_t i = 0; i < subvectors.size(); ++i) {
    const auto global = static_cast<std::size_t>(totals[i].value());
    layout->specs_.push_back({subvectors[i].kind, subvectors[i].local_length, global});
    layout->local_length_ += subvectors[i].local_length;
    layout->global_length_ += global;
  }
  if (layout->global_length_ == 0) throw ConformanceError("a many-vector needs a nonzero length");
  return layout;
}

ManyVector::ManyVector(std::shared_ptr<const VectorLayout> layout) : layout_(std::move(layout)) {
  data_.reserve(layout_->subvector_count());
  for (const auto& s : layout_->specs()) data_.emplace_back(s.local_length, 0.0);
}

ManyVector ManyVector::create(Collective& comm, std::span<const SubvectorRequest> subvectors,
                              VectorOptions options) {
  return ManyVector(VectorLayout::create(comm, subvectors, options));
}

ManyVector ManyVector::serial(Collective& comm, std::size_t length, VectorOptions options) {
  const SubvectorRequest req{VectorKind::task_local_block, length};
  return create(comm, std::span<const SubvectorRequest>(&req, 1), options);
}

double& ManyVector::at(std::size_t flat) {
  for (auto& d : data_) {
    if (flat < d.size()) return d[flat];
    flat -= d.size();
  }
  throw ConformanceError("flat index out of range");
}

double ManyVector::at(std::size_t flat) const {
  for (const auto& d : data_) {
    if (flat < d.size()) return d[flat];
    flat -= d.size();
  }
  throw ConformanceError("flat index out of range");
}

void linear_sum(double a, const ManyVector& x, double b, const ManyVector& y, ManyVector& z) {
  require_conformant(x, y);
  require_conformant(x, z);
  const auto& k = simd::vector_kernels();
  for (std::size_t s = 0; s < x.subvector_count(); ++s) {
    k.linear_sum(a, x.sub(s).data(), b, y.sub(s).data(), z.sub(s).data(), x.sub(s).size());
  }
}

void scale(double c, const ManyVector& x, ManyVector& z) {
  require_conformant(x, z);
  const auto& k = simd::vector_kernels();
  for (std::size_t s = 0; s < x.subvector_count(); ++s) {
    k.scale(c, x.sub(s).data(), z.sub(s).data(), x.sub(s).size());
  }
}

void fill(double c, ManyVector& z) {
  for (std::size_t s = 0; s < z.subvector_count(); ++s) std::ranges::fill(z.sub(s), c);
}

void copy(const ManyVector& x, ManyVector& z) {
  require_conformant(x, z);
  if (&x == &z) return;
  for (std::size_t s = 0; s < x.subvector_count(); ++s) std::ranges::copy(x.sub(s), z.sub(s).begin());
}

void linear_combination(std::span<const double> coeffs, std::span<const ManyVector* const> vecs,
                        ManyVector& z) {
  if (coeffs.empty() || vecs.empty()) throw ConformanceError("empty linear combination");
  if (coeffs.size() != vecs.size()) throw ConformanceError("coefficient/vector count mismatch");
  for (const auto* v : vecs) require_conformant(*v, z);
  const auto& k = simd::vector_kernels();

  if (z.layout().options().fused_ops) {
    std::array<double, kChunk> acc;
    for (std::size_t s = 0; s < z.subvector_count(); ++s) {
      const std::size_t n = z.sub(s).size();
      for (std::size_t lo = 0; lo < n; lo += kChunk) {
        const std::size_t len = std::min(kChunk, n - lo);
        k.scale(coeffs[0], vecs[0]->sub(s).data() + lo, acc.data(), len);
        for (std::size_t j = 1; j < vecs.size(); ++j) {
          k.accumulate(coeffs[j], vecs[j]->sub(s).data() + lo, acc.data(), len);
        }
        std::copy_n(acc.data(), len, z.sub(s).data() + lo);
      }
    }
    return;
  }

  // Unfused: the same accumulation as a sequence of whole-vector operations.
  const bool aliased = std::any_of(vecs.begin() + 1, vecs.end(), [&](const ManyVector* v) { return v == &z; });
  ManyVector scratch;
  ManyVector& out = aliased ? (scratch = z.clone_empty()) : z;
  scale(coeffs[0], *vecs[0], out);
  for (std::size_t j = 1; j < vecs.size(); ++j) linear_sum(1.0, out, coeffs[j], *vecs[j], out);
  if (aliased) copy(out, z);
}

void linear_combination(std::initializer_list<double> coeffs,
                        std::initializer_list<const ManyVector*> vecs, ManyVector& z) {
  linear_combination(std::span<const double>(coeffs.begin(), coeffs.size()),
                     std::span<const ManyVector* const>(vecs.begin(), vecs.size()), z);
}

void error_weights(const ManyVector& y, double rtol, double atol, ManyVector& w) {
  require_conformant(y, w);
  const auto& k = simd::vector_kernels();
  for (std::size_t s = 0; s < y.subvector_count(); ++s) {
    k.error_weights(y.sub(s).data(), rtol, atol, w.sub(s).data(), y.sub(s).size());
  }
}

ExactSum local_weighted_squares(const ManyVector& x, const ManyVector& w) {
  require_conformant(x, w);
  const auto& k = simd::vector_kernels();
  ExactSum acc;
  for (std::size_t s = 0; s < x.subvector_count(); ++s) {
    k.weighted_squares(x.sub(s).data(), w.sub(s).data(), x.sub(s).size(), acc);
  }
  return acc;
}

ExactSum local_dot(const ManyVector& x, const ManyVector& y) {
  require_conformant(x, y);
  const auto& k = simd::vector_kernels();
  ExactSum acc;
  for (std::size_t s = 0; s < x.subvector_count(); ++s) {
    k.dot(x.sub(s).data(), y.sub(s).data(), x.sub(s).size(), acc);
  }
  return acc;
}

namespace {

// Sums `count` partial families across tasks. partial(s, j, acc) adds
// family j's contribution from subvector s. Batched: one round
// for everything; otherwise one round per subvector.
template <typename Partial>
void reduce_families(const ManyVector& ref, std::size_t count, Partial&& partial,
                     std::span<ExactSum> totals) {
  const std::size_t m = ref.subvector_count();
  if (ref.layout().options().batched_reductions) {
    for (std::size_t s = 0; s < m; ++s) {
      for (std::size_t j = 0; j < count; ++j) partial(s, j, totals[j]);
    }
    ref.comm().allreduce(totals);
    return;
  }
  std::vector<ExactSum> round(count);
  for (std::size_t s = 0; s < m; ++s) {
    for (auto& r : round) r.clear();
    for (std::size_t j = 0; j < count; ++j) partial(s, j, round[j]);
    ref.comm().allreduce(round);
    for (std::size_t j = 0; j < count; ++j) totals[j].merge(round[j]);
  }
}

}  // namespace

void wrms_norms(std::span<const ManyVector* const> xs, const ManyVector& w, std::span<double> out) {
  if (xs.size() != out.size()) throw ConformanceError("norm output size mismatch");
  for (const auto* x : xs) require_conformant(*x, w);
  if (xs.empty()) return;
  if (!w.layout().options().fused_ops) {
    for (std::size_t j = 0; j < xs.size(); ++j) out[j] = wrms_norm(*xs[j], w);
    return;
  }
  const auto& k = simd::vector_kernels();
  std::vector<ExactSum> totals(xs.size());
  reduce_families(
      w, xs.size(),
      [&](std::size_t s, std::size_t j, ExactSum& acc) {
        k.weighted_squares(xs[j]->sub(s).data(), w.sub(s).data(), w.sub(s).size(), acc);
      },
      totals);
  for (std::size_t j = 0; j < xs.size(); ++j) out[j] = wrms_from_sum(totals[j], w.layout().global_length());
}

double wrms_norm(const ManyVector& x, const ManyVector& w) {
  require_conformant(x, w);
  const auto& k = simd::vector_kernels();
  ExactSum total;
  reduce_families(
      x, 1,
      [&](std::size_t s, std::size_t, ExactSum& acc) {
        k.weighted_squares(x.sub(s).data(), w.sub(s).data(), x.sub(s).size(), acc);
      },
      std::span<ExactSum>(&total, 1));
  return wrms_from_sum(total, x.layout().global_length());
}

double dot(const ManyVector& x, const ManyVector& y) {
  require_conformant(x, y);
  const auto& k = simd::vector_kernels();
  ExactSum total;
  reduce_families(
      x, 1,
      [&](std::size_t s, std::size_t, ExactSum& acc) { k.dot(x.sub(s).data(), y.sub(s).data(), x.sub(s).size(), acc); },
      std::span<ExactSum>(&total, 1));
  return total.value();
}

void multi_dot(const ManyVector& x, std::span<const ManyVector* const> ys, std::span<double> out) {
  if (ys.size() != out.size()) throw ConformanceError("dot output size mismatch");
  for (const auto* y : ys) require_conformant(x, *y);
  if (ys.empty()) return;
  if (!x.layout().options().fused_ops) {
    for (std::size_t j = 0; j < ys.size(); ++j) out[j] = dot(x, *ys[j]);
    return;
  }
  const auto& k = simd::vector_kernels();
  std::vector<ExactSum> totals(ys.size());
  reduce_families(
      x, ys.size(),
      [&](std::size_t s, std::size_t j, ExactSum& acc) {
        k.dot(x.sub(s).data(), ys[j]->sub(s).data(), x.sub(s).size(), acc);
      },
      totals);
  for (std::size_t j = 0; j < ys.size(); ++j) out[j] = totals[j].value();
}

double max_norm(const ManyVector& x) {
  const auto& k = simd::vector_kernels();
  if (x.layout().options().batched_reductions) {
    double m = 0.0;
    for (std::size_t s = 0; s < x.subvector_count(); ++s) m = k.max_abs(x.sub(s).data(), x.sub(s).size(), m);
    return x.comm().allreduce_max(m);
  }
  double m = 0.0;
  for (std::size_t s = 0; s < x.subvector_count(); ++s) {
    m = std::max(m, x.comm().allreduce_max(k.max_abs(x.sub(s).data(), x.sub(s).size(), 0.0)));
  }
  return m;
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::array<char, 8> kSnapshotMagic{'M', 'R', 'F', 'S', 'N', 'A', 'P', '1'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::endian::native == std::endian::little, "little-endian host required");
  out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T get_le(std::istream& in) {
  T value{};
  in.read(reinterpret_cast<char*>(&value), sizeof(T));
  if (!in) throw IoError("truncated snapshot");
  return value;
}

}  // namespace

void write_snapshot(std::ostream& out, std::span<const std::span<const double>> subvectors) {
  out.write(kSnapshotMagic.data(), kSnapshotMagic.size());
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(subvectors.size()));
  for (const auto& s : subvectors) put_le<std::uint64_t>(out, s.size());
  put_le<std::uint32_t>(out, 8);
  for (const auto& s : subvectors) {
    out.write(reinterpret_cast<const char*>(s.data()), static_cast<std::streamsize>(s.size_bytes()));
  }
  if (!out) throw IoError("failed to write snapshot");
}

std::vector<std::vector<double>> read_snapshot(std::istream& in) {
  std::array<char, 8> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kSnapshotMagic) throw IoError("not a vector snapshot");
  const auto count = get_le<std::uint32_t>(in);
  std::vector<std::uint64_t> lengths(count);
  for (auto& l : lengths) l = get_le<std::uint64_t>(in);
  if (get_le<std::uint32_t>(in) != 8) throw IoError("unsupported snapshot element width");
  std::vector<std::vector<double>> result;
  result.reserve(count);
  for (auto l : lengths) {
    std::vector<double> v(l);
    in.read(reinterpret_cast<char*>(v.data()), static_cast<std::streamsize>(l * sizeof(double)));
    if (!in) throw IoError("truncated snapshot payload");
    result.push_back(std::move(v));
  }
  return result;
}

}  // namespace mrflow
