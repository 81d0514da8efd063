// Copyright 2026 The mrflow Authors
// SPDX-License-Identifier: Apache-2.0

#include "mrflow/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mrflow/error.hpp"

namespace mrflow {

void CsrMatrix::validate() const {
  if (block_size < 1 || rows < 0 || rows % block_size != 0) {
    throw ConformanceError("rows must be a multiple of the block size");
  }
  if (row_offsets.size() != static_cast<std::size_t>(rows) + 1 || row_offsets.front() != 0 ||
      row_offsets.back() != nonzeros() || values.size() != columns.size()) {
    throw ConformanceError("inconsistent CSR offsets");
  }
  for (long r = 0; r < rows; ++r) {
    const long lo = (r / block_size) * block_size;
    long prev = -1;
    for (long p = row_offsets[r]; p < row_offsets[r + 1]; ++p) {
      const long c = columns[p];
      if (c <= prev) throw ConformanceError("CSR columns must increase within a row");
      if (c < lo || c >= lo + block_size) throw ConformanceError("CSR entry outside its block");
      prev = c;
    }
  }
}

CsrMatrix block_diagonal_pattern(long blocks, int block_size,
                                 std::span<const std::array<int, 2>> pattern,
                                 bool include_diagonal) {
  std::vector<std::vector<int>> cols(static_cast<std::size_t>(block_size));
  for (const auto& [r, c] : pattern) {
    if (r < 0 || c < 0 || r >= block_size || c >= block_size) {
      throw ConformanceError("pattern entry outside the block");
    }
    cols[r].push_back(c);
  }
  for (int r = 0; r < block_size; ++r) {
    if (include_diagonal) cols[r].push_back(r);
    std::sort(cols[r].begin(), cols[r].end());
    cols[r].erase(std::unique(cols[r].begin(), cols[r].end()), cols[r].end());
  }
  CsrMatrix m;
  m.rows = blocks * block_size;
  m.block_size = block_size;
  m.row_offsets.assign(static_cast<std::size_t>(m.rows) + 1, 0);
  for (long b = 0; b < blocks; ++b) {
    for (int r = 0; r < block_size; ++r) {
      const long row = b * block_size + r;
      for (int c : cols[r]) m.columns.push_back(b * block_size + c);
      m.row_offsets[row + 1] = static_cast<long>(m.columns.size());
    }
  }
  m.values.assign(m.columns.size(), 0.0);
  return m;
}

CsrMatrix assemble_newton_matrix(const CsrMatrix& jacobian, double shift) {
  CsrMatrix a;
  a.rows = jacobian.rows;
  a.block_size = jacobian.block_size;
  a.row_offsets.assign(static_cast<std::size_t>(a.rows) + 1, 0);
  for (long r = 0; r < jacobian.rows; ++r) {
    bool diagonal = false;
    for (long p = jacobian.row_offsets[r]; p < jacobian.row_offsets[r + 1]; ++p) {
      const long c = jacobian.columns[p];
      if (!diagonal && c > r) {
        a.columns.push_back(r);
        diagonal = true;
      }
      if (c == r) diagonal = true;
      a.columns.push_back(c);
    }
    if (!diagonal) a.columns.push_back(r);
    a.row_offsets[r + 1] = static_cast<long>(a.columns.size());
  }
  a.values.assign(a.columns.size(), 0.0);
  update_newton_matrix(jacobian, shift, a);
  return a;
}

void update_newton_matrix(const CsrMatrix& jacobian, double shift, CsrMatrix& a) {
  if (a.rows != jacobian.rows) throw ConformanceError("Newton matrix does not match the Jacobian");
  for (long r = 0; r < a.rows; ++r) {
    long q = jacobian.row_offsets[r];
    const long qend = jacobian.row_offsets[r + 1];
    for (long p = a.row_offsets[r]; p < a.row_offsets[r + 1]; ++p) {
      const long c = a.columns[p];
      double v = c == r ? 1.0 : 0.0;
      if (q < qend && jacobian.columns[q] == c) {
        v -= shift * jacobian.values[q];
        ++q;
      }
      a.values[p] = v;
    }
    if (q != qend) throw ConformanceError("Newton matrix pattern misses Jacobian entries");
  }
}

void csr_multiply(const CsrMatrix& a, std::span<const double> x, std::span<double> y) {
  if (x.size() != static_cast<std::size_t>(a.rows) || y.size() != x.size()) {
    throw ConformanceError("vector length does not match the matrix");
  }
  for (long r = 0; r < a.rows; ++r) {
    double s = 0.0;
    for (long p = a.row_offsets[r]; p < a.row_offsets[r + 1]; ++p) s += a.values[p] * x[a.columns[p]];
    y[r] = s;
  }
}

void BlockLu::factor(const CsrMatrix& a) {
  const int bs = a.block_size;
  const long nb = a.blocks();
  dense_.assign(static_cast<std::size_t>(bs) * bs, 0.0);
  pivot_.assign(static_cast<std::size_t>(nb) * bs, 0);
  inv_diag_.assign(static_cast<std::size_t>(nb) * bs, 0.0);
  lower_.clear();
  upper_.clear();
  lower_offsets_.assign(1, 0);
  upper_offsets_.assign(1, 0);
  blocks_ = 0;
  bs_ = bs;
  double* m = dense_.data();
  for (long b = 0; b < nb; ++b) {
    int* piv = pivot_.data() + b * bs;
    std::fill(dense_.begin(), dense_.end(), 0.0);
    for (int r = 0; r < bs; ++r) {
      const long row = b * bs + r;
      for (long p = a.row_offsets[row]; p < a.row_offsets[row + 1]; ++p) {
        m[r * bs + (a.columns[p] - b * bs)] = a.values[p];
      }
    }
    for (int k = 0; k < bs; ++k) {
      int best = k;
      for (int r = k + 1; r < bs; ++r) {
        if (std::fabs(m[r * bs + k]) > std::fabs(m[best * bs + k])) best = r;
      }
      piv[k] = best;
      if (m[best * bs + k] == 0.0 || !std::isfinite(m[best * bs + k])) {
        throw FactorizationError("singular Jacobian block at cell " + std::to_string(b), b);
      }
      if (best != k) {
        for (int c = 0; c < bs; ++c) std::swap(m[k * bs + c], m[best * bs + c]);
      }
      const double inv = 1.0 / m[k * bs + k];
      for (int r = k + 1; r < bs; ++r) {
        const double l = m[r * bs + k] * inv;
        m[r * bs + k] = l;
        if (l == 0.0) continue;  // most rows of a chemistry block are identity rows
        for (int c = k + 1; c < bs; ++c) m[r * bs + c] -= l * m[k * bs + c];
      }
    }
    for (int k = 0; k < bs; ++k) {
      inv_diag_[b * bs + k] = 1.0 / m[k * bs + k];
      for (int r = k + 1; r < bs; ++r) {
        if (m[r * bs + k] != 0.0) lower_.push_back({r, k, m[r * bs + k]});
      }
    }
    for (int r = bs - 1; r >= 0; --r) {
      for (int c = r + 1; c < bs; ++c) {
        if (m[r * bs + c] != 0.0) upper_.push_back({r, c, m[r * bs + c]});
      }
    }
    lower_offsets_.push_back(lower_.size());
    upper_offsets_.push_back(upper_.size());
  }
  blocks_ = nb;
}

void BlockLu::solve(std::span<double> b) const {
  if (!factored()) throw ProtocolError("solve before factor");
  if (b.size() != static_cast<std::size_t>(blocks_) * bs_) {
    throw ConformanceError("right-hand side does not match the factorization");
  }
  const int bs = bs_;
  for (long blk = 0; blk < blocks_; ++blk) {
    const int* piv = pivot_.data() + blk * bs;
    const double* inv = inv_diag_.data() + blk * bs;
    double* x = b.data() + blk * bs;
    // Rows were swapped whole during factoring, so apply every swap first.
    for (int k = 0; k < bs; ++k) {
      if (piv[k] != k) std::swap(x[k], x[piv[k]]);
    }
    for (std::size_t e = lower_offsets_[blk]; e < lower_offsets_[blk + 1]; ++e) {
      x[lower_[e].row] -= lower_[e].value * x[lower_[e].col];
    }
    // Upper entries run by descending row, so every x[col] is final when used.
    std::size_t e = upper_offsets_[blk];
    const std::size_t end = upper_offsets_[blk + 1];
    for (int k = bs - 1; k >= 0; --k) {
      double s = x[k];
      for (; e < end && upper_[e].row == k; ++e) s -= upper_[e].value * x[upper_[e].col];
      x[k] = s * inv[k];
    }
  }
}

}  // namespace mrflow
