#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "sgnn/matrix.hpp"

namespace sgnn {

// Compressed-row sparse real matrix. Column indices sorted within each row.
struct CsrMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::size_t> row_ptr{0};
  std::vector<std::uint32_t> col;
  std::vector<double> val;

  std::size_t nnz() const noexcept { return col.size(); }
  double at(std::size_t r, std::size_t c) const;  // 0 when not stored
  Matrix to_dense() const;

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;
};

// y = a * x. Each output row is reduced in stored column order, so the
// result is bit-reproducible.
Matrix spmm(const CsrMatrix& a, const Matrix& x);
// y = a^T * x, scattered in row order of `a`.
Matrix spmm_transposed(const CsrMatrix& a, const Matrix& x);

}  // namespace sgnn
