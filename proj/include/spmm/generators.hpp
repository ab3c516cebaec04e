#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "spmm/matrix.hpp"

namespace spmm {

struct RngSeed {
  std::uint64_t seed = 0;
};

/// Portable generator: the engine is fully specified by the standard and the
/// draws below avoid implementation-defined distributions, so a seed yields
/// the same stream with any standard library.
class Rng {
 public:
  explicit Rng(RngSeed seed) : engine_(seed.seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform in [0, bound).
  std::uint64_t below(std::uint64_t bound);

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1].
  double unit_open_closed() { return 1.0 - unit(); }

 private:
  std::mt19937_64 engine_;
};

/// Dense rows stored as CSR: num_rows x (total_nnz / num_rows), every entry
/// present. Values depend only on the row index.
template <typename T>
CsrMatrix<T> gen_aspect_matrix(Index total_nnz, Index num_rows);

/// rows x cols with exactly round(fill_fraction * cols) distinct, uniformly
/// sampled columns per row and values uniform in (0, 1].
template <typename T>
CsrMatrix<T> gen_uniform_random(Index rows, Index cols, double fill_fraction, RngSeed seed);

/// Row r gets row_lengths[r] distinct random columns out of `cols`;
/// values uniform in [-1, 1).
template <typename T>
CsrMatrix<T> gen_row_lengths(std::span<const Index> row_lengths, Index cols, RngSeed seed);

/// Values uniform in [-1, 1).
template <typename T>
DenseMatrix<T> random_dense(Index rows, Index cols, Layout layout, RngSeed seed);

}  // namespace spmm
