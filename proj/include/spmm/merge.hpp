#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "spmm/error.hpp"
#include "spmm/exec.hpp"
#include "spmm/matrix.hpp"
#include "spmm/report.hpp"

namespace spmm {

/// Start rows of equal-nonzero blocks. Block i owns nonzeros
/// [i * G, min((i + 1) * G, nnz)) and touches rows limits[i]..limits[i+1]
/// (inclusive, clamped to the last row).
struct BlockLimits {
  std::vector<Index> limits;
  std::size_t items_per_block = 1;
  Index nnz = 0;

  std::size_t num_blocks() const noexcept { return limits.size() - 1; }
  Index block_begin(std::size_t i) const noexcept {
    return std::min(nnz, static_cast<Index>(i * items_per_block));
  }
  Index block_end(std::size_t i) const noexcept {
    return std::min(nnz, static_cast<Index>((i + 1) * items_per_block));
  }
};

/// limits[0] = 0, limits[num_blocks] = m, and for interior i the largest r
/// with row_offsets[r] <= i * G (one binary search per boundary, run over
/// `workers` threads). There are max(1, ceil(nnz / G)) blocks.
BlockLimits partition_spmm(std::span<const Index> row_offsets, std::size_t items_per_block,
                           std::size_t workers = 1);

template <typename T>
struct RowPartial {
  Index row = -1;
  std::vector<T> values;

  friend bool operator==(const RowPartial&, const RowPartial&) = default;
};

/// Streaming segmented sum over (row, value-vector) pairs whose rows never
/// decrease. A row's sum is handed to the callback once a larger row id
/// arrives; whatever is open at finish() is the carry.
template <typename T>
class SegmentedReducer {
 public:
  explicit SegmentedReducer(std::size_t width = 1) : partial_(width, T{0}) {}

  void reset(std::size_t width) {
    partial_.assign(width, T{0});
    row_ = -1;
  }

  template <typename OnComplete>
  void push(Index row, std::span<const T> values, OnComplete&& on_complete) {
    if (row < row_)
      throw ContractViolation("segmented reduce: row id " + std::to_string(row) +
                              " after " + std::to_string(row_));
    if (row != row_) {
      if (row_ >= 0) on_complete(row_, std::span<const T>(partial_));
      std::fill(partial_.begin(), partial_.end(), T{0});
      row_ = row;
    }
    for (std::size_t l = 0; l < partial_.size(); ++l) partial_[l] += values[l];
  }

  Index open_row() const noexcept { return row_; }
  std::span<const T> open_partial() const noexcept { return partial_; }

 private:
  std::vector<T> partial_;
  Index row_ = -1;
};

template <typename T>
struct SegmentedReduceResult {
  std::vector<RowPartial<T>> completed;
  RowPartial<T> carry;
};

/// values holds row_ids.size() vectors of `width` entries, back to back.
/// Every distinct row but the last is completed; the last is the carry
/// (row -1 when there are no values). Decreasing row ids raise
/// ContractViolation.
template <typename T>
SegmentedReduceResult<T> segmented_reduce(std::span<const T> values,
                                          std::span<const Index> row_ids, std::size_t width = 1);

/// Carry-outs of every block: the block's last row if it continues into the
/// next block (-1 otherwise) and its partial sums for all n columns.
template <typename T>
struct CarryOut {
  std::vector<Index> rows;
  std::vector<T> partials;  ///< num_blocks x n, row-major
  Index width = 0;

  CarryOut() = default;
  CarryOut(std::size_t num_blocks, Index n)
      : rows(num_blocks, -1), partials(num_blocks * static_cast<std::size_t>(n), T{0}), width(n) {}

  std::span<T> partial(std::size_t block) {
    return std::span<T>(partials).subspan(block * static_cast<std::size_t>(width),
                                          static_cast<std::size_t>(width));
  }
  std::span<const T> partial(std::size_t block) const {
    return std::span<const T>(partials).subspan(block * static_cast<std::size_t>(width),
                                                static_cast<std::size_t>(width));
  }
};

/// Adds every block's carry into C in ascending block order. Throws
/// ArgumentError if a carry row lies outside C or outside its block's rows.
template <typename T>
void fix_carryout(DenseMatrix<T>& c, const BlockLimits& limits, const CarryOut<T>& carry);

/// Merge-based SpMM: equal nonzeros per block, then per block and per
/// lane_width-column tile: coalesced (col, val) loads, broadcast-driven
/// loads of B rows, flattening of the block's row offsets to per-nonzero
/// row ids, segmented reduction into C with one carry-out slot per block,
/// and a final sequential carry-out fix-up. B must be row-major.
template <typename T>
KernelResult<T> spmm_merge(const CsrMatrix<T>& a, const DenseMatrix<T>& b,
                           const ExecConfig& cfg = {}, TraceMode mode = TraceMode::Off);

}  // namespace spmm
