#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace agesvd {

/// Dense row-major matrix of doubles.
///
/// Zero-sized matrices are representable (a rank-0 factorization has K x 0
/// factors); operations that need data validate shape themselves.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  Matrix(std::initializer_list<std::initializer_list<double>> rows);

  static Matrix identity(std::size_t n);
  /// Builds a matrix whose columns are the given equal-length vectors.
  static Matrix from_columns(const std::vector<std::vector<double>>& columns);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

  double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
    return {values_.data() + r * cols_, cols_};
  }
  [[nodiscard]] std::span<double> row(std::size_t r) noexcept { return {values_.data() + r * cols_, cols_}; }

  [[nodiscard]] std::vector<double> column(std::size_t c) const;
  void set_column(std::size_t c, std::span<const double> values);

  [[nodiscard]] Matrix transpose() const;
  /// Keeps the first `n` columns.
  [[nodiscard]] Matrix leading_columns(std::size_t n) const;
  [[nodiscard]] bool all_finite() const noexcept;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> values_;
};

Matrix operator*(const Matrix& a, const Matrix& b);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(double scalar, const Matrix& a);

[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double norm2(std::span<const double> a);
/// sqrt of the sum of squared entries.
[[nodiscard]] double frobenius_norm(const Matrix& a);

}  // namespace agesvd
