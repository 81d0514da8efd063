// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace mrflow {

/// Compressed sparse row matrix. Rows are grouped into square diagonal
/// blocks of `block_size`; entries never leave their block.
struct CsrMatrix {
  long rows = 0;
  int block_size = 1;
  std::vector<long> row_offsets{0};
  std::vector<long> columns;
  std::vector<double> values;

  long blocks() const noexcept { return block_size > 0 ? rows / block_size : 0; }
  long nonzeros() const noexcept { return static_cast<long>(columns.size()); }

  /// Throws ConformanceError unless offsets are consistent, columns strictly
  /// increase within each row, and every entry sits in its diagonal block.
  void validate() const;
};

/// Block-diagonal pattern with `blocks` copies of the in-block (row, col)
/// pattern. Values are zero.
CsrMatrix block_diagonal_pattern(long blocks, int block_size,
                                 std::span<const std::array<int, 2>> pattern,
                                 bool include_diagonal = false);

/// A = I - shift J with J's pattern plus the full diagonal.
CsrMatrix assemble_newton_matrix(const CsrMatrix& jacobian, double shift);

/// Overwrites A's values with I - shift J when A came from
/// assemble_newton_matrix(J, ...) (pattern reuse, no allocation).
void update_newton_matrix(const CsrMatrix& jacobian, double shift, CsrMatrix& a);

/// y = A x
void csr_multiply(const CsrMatrix& a, std::span<const double> x, std::span<double> y);

/// Dense partial-pivoting LU of every diagonal block. Factoring and solving
/// are task-local and never communicate.
class BlockLu {
 public:
  /// Throws FactorizationError naming the first singular block.
  void factor(const CsrMatrix& a);
  /// Solves in place; b has rows() entries ordered block-major.
  void solve(std::span<double> b) const;

  bool factored() const noexcept { return blocks_ > 0; }
  long blocks() const noexcept { return blocks_; }
  int block_size() const noexcept { return bs_; }

 private:
  // Factors are kept compressed: only nonzero multipliers and nonzero
  // strictly-upper entries, since chemistry blocks are mostly identity.
  struct Entry {
    int row;
    int col;
    double value;
  };

  long blocks_ = 0;
  int bs_ = 0;
  std::vector<double> dense_;               // factoring workspace, bs*bs
  std::vector<int> pivot_;                  // bs per block
  std::vector<double> inv_diag_;            // bs per block
  std::vector<Entry> lower_;                // per block sorted by column
  std::vector<Entry> upper_;                // per block sorted by row, descending
  std::vector<std::size_t> lower_offsets_;  // blocks + 1
  std::vector<std::size_t> upper_offsets_;  // blocks + 1
};

}  // namespace mrflow
