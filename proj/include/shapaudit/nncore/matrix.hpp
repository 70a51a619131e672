#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace shapaudit {

/// Dense row-major matrix of doubles.
///
/// All kernels below use a fixed loop order so that identical inputs give
/// bit-identical outputs; nothing here is multithreaded.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix row_vector(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  const std::vector<double>& values() const { return data_; }

  void fill(double value);
  bool all_finite() const;
  std::string shape_string() const;

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Throws std::invalid_argument when shapes differ.
void require_same_shape(const Matrix& a, const Matrix& b, const char* what);

Matrix transpose(const Matrix& a);

// a (n x k) * b (k x m)
Matrix matmul(const Matrix& a, const Matrix& b);
// a^T * b for a (n x k), b (n x m) -> k x m
Matrix matmul_at_b(const Matrix& a, const Matrix& b);
// a * b^T for a (n x k), b (m x k) -> n x m
Matrix matmul_a_bt(const Matrix& a, const Matrix& b);

void add_row_broadcast(Matrix& a, const Matrix& row);
Matrix column_sums(const Matrix& a);
void add_inplace(Matrix& a, const Matrix& b);
void scale_inplace(Matrix& a, double factor);
void hadamard_inplace(Matrix& a, const Matrix& b);

Matrix select_rows(const Matrix& a, std::span<const std::size_t> rows);
Matrix select_cols(const Matrix& a, std::span<const std::size_t> cols);
Matrix hconcat(std::span<const Matrix> blocks);

}  // namespace shapaudit
