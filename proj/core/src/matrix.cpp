#include "agesvd/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agesvd/error.hpp"

namespace agesvd {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
  if (values_.size() != rows * cols) {
    throw DataError("matrix value count does not equal rows x cols");
  }
}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  values_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DataError("ragged matrix literal");
    values_.insert(values_.end(), r.begin(), r.end());
  }
}

Matrix Matrix::identity(std::size_t n) {
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Matrix Matrix::from_columns(const std::vector<std::vector<double>>& columns) {
  if (columns.empty()) return {};
  const std::size_t rows = columns.front().size();
  Matrix m(rows, columns.size());
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows) throw DataError("columns differ in length");
    m.set_column(c, columns[c]);
  }
  return m;
}

std::vector<double> Matrix::column(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

void Matrix::set_column(std::size_t c, std::span<const double> values) {
  if (values.size() != rows_) throw DataError("column length does not match matrix rows");
  for (std::size_t r = 0; r < rows_; ++r) (*this)(r, c) = values[r];
}

Matrix Matrix::transpose() const {
  Matrix t(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
  return t;
}

Matrix Matrix::leading_columns(std::size_t n) const {
  n = std::min(n, cols_);
  Matrix out(rows_, n);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < n; ++c) out(r, c) = (*this)(r, c);
  return out;
}

bool Matrix::all_finite() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw DataError("matrix product shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      const auto brow = b.row(k);
      auto orow = out.row(i);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += aik * brow[j];
    }
  }
  return out;
}

namespace {
template <typename Op>
Matrix elementwise(const Matrix& a, const Matrix& b, Op op) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DataError("matrix shape mismatch");
  Matrix out(a.rows(), a.cols());
  std::transform(a.values().begin(), a.values().end(), b.values().begin(), out.values().begin(), op);
  return out;
}
}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) { return elementwise(a, b, std::plus<>{}); }
Matrix operator-(const Matrix& a, const Matrix& b) { return elementwise(a, b, std::minus<>{}); }

Matrix operator*(double scalar, const Matrix& a) {
  Matrix out = a;
  for (double& v : out.values()) v *= scalar;
  return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

double frobenius_norm(const Matrix& a) { return norm2(a.values()); }

}  // namespace agesvd
