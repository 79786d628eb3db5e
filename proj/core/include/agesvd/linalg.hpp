#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "agesvd/matrix.hpp"

namespace agesvd {

/// Thin singular value decomposition x = u * diag(s) * v^T.
///
/// `s` is strictly positive and non-increasing; values below the numerical
/// rank threshold max(K, L) * s_1 * 1e-12 are dropped together with their
/// singular vectors, so u is K x rank and v is L x rank.
struct SvdFactorization {
  Matrix u;
  std::vector<double> s;
  Matrix v;

  [[nodiscard]] std::size_t rank() const noexcept { return s.size(); }
};

/// Relative cut-off applied to s_i / (max(K, L) * s_1) when counting rank.
inline constexpr double kRankTolerance = 1e-12;

/// One-sided Jacobi SVD. The result is sign-canonicalized, so equal inputs
/// give bit-identical factorizations.
///
/// Throws DataError for an empty matrix or non-finite entries.
[[nodiscard]] SvdFactorization svd(const Matrix& x);

/// Negates (u_i, v_i) jointly so that sum_j v_ji > 0. When that sum is zero
/// to rounding, the first non-negligible entry of v_i is made positive.
[[nodiscard]] SvdFactorization canonicalize_signs(SvdFactorization f);

/// sum_{i<=k} s_i u_i v_i^T. Throws UsageError unless 1 <= k <= rank.
[[nodiscard]] Matrix reconstruct_rank(const SvdFactorization& f, std::size_t k);

/// s_i^2 / sum s^2. Throws DataError for a rank-0 factorization.
[[nodiscard]] std::vector<double> explained_share(const SvdFactorization& f);

/// Subtracts each column mean. With `normalize`, every column is further
/// scaled by 1/sqrt(N-1) and divided by its norm, so x^T x becomes the
/// correlation matrix.
///
/// Throws DataError for fewer than two rows, or a zero-variance column
/// when normalizing.
[[nodiscard]] Matrix center_columns(const Matrix& x, bool normalize);

/// Frobenius norm of a - b. Throws DataError on shape mismatch.
[[nodiscard]] double frobenius_residual(const Matrix& a, const Matrix& b);

/// Numerical rank under the same rule svd() uses.
[[nodiscard]] std::size_t numerical_rank(const Matrix& x);

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // columns, matching `values`
};

/// Cyclic Jacobi eigen-decomposition of a small symmetric matrix.
[[nodiscard]] SymmetricEigen symmetric_eigen(const Matrix& a);

/// Householder QR of a tall design matrix, used for least squares.
class QrDecomposition {
 public:
  /// Throws NumericalError when the columns are not linearly independent.
  explicit QrDecomposition(const Matrix& x);

  [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
  [[nodiscard]] std::size_t cols() const noexcept { return cols_; }

  /// argmin_b ||x b - y||.
  [[nodiscard]] std::vector<double> solve(std::span<const double> y) const;
  /// (x^T x)^{-1} computed as R^{-1} R^{-T}.
  [[nodiscard]] Matrix gram_inverse() const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  Matrix qr_;                    // R in the upper triangle, reflectors below
  std::vector<double> r_diag_;
};

}  // namespace agesvd
