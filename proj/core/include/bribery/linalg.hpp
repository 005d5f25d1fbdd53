#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace bribery {

// Small dense row-major matrix. Chains here have at most a few dozen states,
// so nothing fancier is warranted.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

// Infinity norm (max absolute row sum).
double norm_inf(const Matrix& a);

// LU factorization with partial pivoting of a square matrix.
class LuDecomposition {
 public:
  // Throws Error(kSingularMatrix) when a pivot falls below `pivot_tolerance`
  // relative to the largest entry of the input.
  explicit LuDecomposition(Matrix a, double pivot_tolerance = 1e-13);

  std::vector<double> solve(std::span<const double> b) const;
  Matrix inverse() const;

 private:
  Matrix lu_;
  std::vector<std::size_t> perm_;
};

}  // namespace bribery
