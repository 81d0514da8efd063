// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include "mrflow/collective.hpp"
#include "mrflow/exact_sum.hpp"

namespace mrflow {

enum class VectorKind { distributed_field, task_local_block };

struct VectorSpec {
  VectorKind kind = VectorKind::distributed_field;
  std::size_t local_length = 0;
  std::size_t global_length = 0;

  friend bool operator==(const VectorSpec&, const VectorSpec&) = default;
};

/// Feature toggles for vector operations. Both default to on; the
/// "unfused" configuration turns both off.
struct VectorOptions {
  bool fused_ops = true;           // fused linear combination / multi-dot / multi-norm
  bool batched_reductions = true;  // one round per reduction instead of one per subvector

  friend bool operator==(const VectorOptions&, const VectorOptions&) = default;
};

struct SubvectorRequest {
  VectorKind kind;
  std::size_t local_length;
};

/// Immutable description of a many-vector shared by all vectors with that
/// shape on one task.
class VectorLayout {
 public:
  /// Collective: computes global lengths in one reduction round.
  static std::shared_ptr<const VectorLayout> create(Collective& comm,
                                                    std::span<const SubvectorRequest> subvectors,
                                                    VectorOptions options = {});

  Collective& comm() const noexcept { return *comm_; }
  const std::vector<VectorSpec>& specs() const noexcept { return specs_; }
  std::size_t subvector_count() const noexcept { return specs_.size(); }
  std::size_t local_length() const noexcept { return local_length_; }
  std::size_t global_length() const noexcept { return global_length_; }
  const VectorOptions& options() const noexcept { return options_; }

  bool conforms(const VectorLayout& other) const noexcept {
    return this == &other || specs_ == other.specs_;
  }

 private:
  VectorLayout() = default;
  Collective* comm_ = nullptr;
  std::vector<VectorSpec> specs_;
  std::size_t local_length_ = 0;
  std::size_t global_length_ = 0;
  VectorOptions options_;
};

/// Ordered composition of subvectors presented as one vector. Element order
/// is subvector-major, then local index.
class ManyVector {
 public:
  ManyVector() = default;
  explicit ManyVector(std::shared_ptr<const VectorLayout> layout);

  static ManyVector create(Collective& comm, std::span<const SubvectorRequest> subvectors,
                           VectorOptions options = {});
  /// One task-local subvector of `length` entries; convenient for ODE work.
  static ManyVector serial(Collective& comm, std::size_t length, VectorOptions options = {});

  /// A zero vector with the same layout (no communication).
  ManyVector clone_empty() const { return ManyVector(layout_); }

  bool valid() const noexcept { return layout_ != nullptr; }
  const VectorLayout& layout() const noexcept { return *layout_; }
  const std::shared_ptr<const VectorLayout>& layout_ptr() const noexcept { return layout_; }
  Collective& comm() const noexcept { return layout_->comm(); }

  std::size_t subvector_count() const noexcept { return data_.size(); }
  std::span<double> sub(std::size_t i) noexcept { return data_[i]; }
  std::span<const double> sub(std::size_t i) const noexcept { return data_[i]; }

  /// Flat local index across subvectors (subvector-major).
  double& at(std::size_t flat);
  double at(std::size_t flat) const;
  std::size_t local_length() const noexcept { return layout_ ? layout_->local_length() : 0; }

 private:
  std::shared_ptr<const VectorLayout> layout_;
  std::vector<std::vector<double>> data_;
};

// Elementwise operations. Outputs may alias inputs.
void linear_sum(double a, const ManyVector& x, double b, const ManyVector& y, ManyVector& z);
void scale(double c, const ManyVector& x, ManyVector& z);
void fill(double c, ManyVector& z);
void copy(const ManyVector& x, ManyVector& z);

/// z = sum_j c_j v_j accumulated left to right in j. The fused and unfused
/// paths produce bit-identical results.
void linear_combination(std::span<const double> coeffs, std::span<const ManyVector* const> vecs,
                        ManyVector& z);
void linear_combination(std::initializer_list<double> coeffs,
                        std::initializer_list<const ManyVector*> vecs, ManyVector& z);

/// w_i = 1 / (rtol |y_i| + atol)
void error_weights(const ManyVector& y, double rtol, double atol, ManyVector& w);

// Collective reductions.
double wrms_norm(const ManyVector& x, const ManyVector& w);
/// k WRMS norms sharing the weight vector; one round when fused.
void wrms_norms(std::span<const ManyVector* const> xs, const ManyVector& w, std::span<double> out);
double dot(const ManyVector& x, const ManyVector& y);
void multi_dot(const ManyVector& x, std::span<const ManyVector* const> ys, std::span<double> out);
double max_norm(const ManyVector& x);

// Task-local partials (no communication).
ExactSum local_weighted_squares(const ManyVector& x, const ManyVector& w);
ExactSum local_dot(const ManyVector& x, const ManyVector& y);

/// Binary snapshot: magic, subvector count, lengths, element width (8),
/// then each subvector's raw little-endian payload.
void write_snapshot(std::ostream& out, std::span<const std::span<const double>> subvectors);
std::vector<std::vector<double>> read_snapshot(std::istream& in);

}  // namespace mrflow
