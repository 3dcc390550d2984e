#include "sgnn/sparse.hpp"

#include <algorithm>

#include "sgnn/errors.hpp"

namespace sgnn {

double CsrMatrix::at(std::size_t r, std::size_t c) const {
  const auto first = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r]);
  const auto last = col.begin() + static_cast<std::ptrdiff_t>(row_ptr[r + 1]);
  const auto it = std::lower_bound(first, last, static_cast<std::uint32_t>(c));
  if (it == last || *it != c) return 0.0;
  return val[static_cast<std::size_t>(it - col.begin())];
}

Matrix CsrMatrix::to_dense() const {
  Matrix out(rows, cols);
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t k = row_ptr[r]; k < row_ptr[r + 1]; ++k) out(r, col[k]) = val[k];
  return out;
}

Matrix spmm(const CsrMatrix& a, const Matrix& x) {
  if (a.cols != x.rows()) throw ShapeError("spmm: operator columns != feature rows");
  Matrix out(a.rows, x.cols());
  for (std::size_t r = 0; r < a.rows; ++r) {
    auto out_row = out.row(r);
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const double w = a.val[k];
      const auto x_row = x.row(a.col[k]);
      for (std::size_t j = 0; j < x.cols(); ++j) out_row[j] += w * x_row[j];
    }
  }
  return out;
}

Matrix spmm_transposed(const CsrMatrix& a, const Matrix& x) {
  if (a.rows != x.rows()) throw ShapeError("spmm_transposed: operator rows != input rows");
  Matrix out(a.cols, x.cols());
  for (std::size_t r = 0; r < a.rows; ++r) {
    const auto x_row = x.row(r);
    for (std::size_t k = a.row_ptr[r]; k < a.row_ptr[r + 1]; ++k) {
      const double w = a.val[k];
      auto out_row = out.row(a.col[k]);
      for (std::size_t j = 0; j < x.cols(); ++j) out_row[j] += w * x_row[j];
    }
  }
  return out;
}

}  // namespace sgnn
