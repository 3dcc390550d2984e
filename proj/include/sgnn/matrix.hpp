#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sgnn {

// Dense row-major matrix of doubles.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }
  bool same_shape(const Matrix& other) const noexcept {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }

  void fill(double v);

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix identity(std::size_t n);

// a * b. Zero entries of `a` are skipped, which matters for bag-of-words input.
Matrix matmul(const Matrix& a, const Matrix& b);
// a^T * b
Matrix matmul_at_b(const Matrix& a, const Matrix& b);
// a * b^T
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

bool all_finite(const Matrix& m);
double max_abs_diff(const Matrix& a, const Matrix& b);

}  // namespace sgnn
