#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "spmm/matrix.hpp"

namespace spmm {

template <typename T>
struct MatrixMarketData {
  Index num_rows = 0;
  Index num_cols = 0;
  std::vector<CooTriple<T>> triples;
};

/// Reads a "%%MatrixMarket matrix coordinate" stream. Indices become
/// 0-based, symmetric and skew-symmetric storage is expanded to both
/// triangles, pattern entries get value 1. Fields real, double, integer
/// and pattern are accepted; complex, hermitian and array storage are
/// rejected. Errors are reported as ParseError with the offending line.
template <typename T>
MatrixMarketData<T> read_matrix_market(std::istream& in);

template <typename T>
CsrMatrix<T> load_matrix_market(const std::filesystem::path& path);

/// Writes "real general" coordinate format with 1-based indices.
template <typename T>
void write_matrix_market(std::ostream& out, const CsrMatrix<T>& a);

template <typename T>
void save_matrix_market(const std::filesystem::path& path, const CsrMatrix<T>& a);

}  // namespace spmm
