#include "agesvd/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "agesvd/error.hpp"

namespace agesvd {

namespace {

constexpr int kMaxSweeps = 80;

void validate_input(const Matrix& x) {
  if (x.rows() == 0 || x.cols() == 0) throw DataError("svd: empty matrix");
  if (!x.all_finite()) throw DataError("svd: matrix has non-finite entries");
}

// Hestenes one-sided Jacobi on the columns of a tall matrix (rows >= cols).
// On return the columns of `a` are mutually orthogonal and `v` holds the
// accumulated rotations.
void orthogonalize_columns(std::vector<std::vector<double>>& a, std::vector<std::vector<double>>& v) {
  const std::size_t n = a.size();
  const double eps = std::numeric_limits<double>::epsilon();
  // Orthogonality is judged to the accuracy a dot product of this length can
  // deliver; columns already at rounding level of the whole matrix are zero.
  const double tol = eps * std::sqrt(static_cast<double>(a.empty() ? 1 : a.front().size()));
  double total = 0.0;
  for (const auto& col : a) total += dot(col, col);
  const double negligible = eps * eps * total;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t i = 0; i + 1 < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        auto& ai = a[i];
        auto& aj = a[j];
        const double alpha = dot(ai, ai);
        const double beta = dot(aj, aj);
        const double gamma = dot(ai, aj);
        if (alpha <= negligible || beta <= negligible) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t k = 0; k < ai.size(); ++k) {
          const double x = ai[k];
          const double y = aj[k];
          ai[k] = c * x - s * y;
          aj[k] = s * x + c * y;
        }
        auto& vi = v[i];
        auto& vj = v[j];
        for (std::size_t k = 0; k < vi.size(); ++k) {
          const double x = vi[k];
          const double y = vj[k];
          vi[k] = c * x - s * y;
          vj[k] = s * x + c * y;
        }
      }
    }
    if (!rotated) return;
  }
  throw NumericalError("svd: Jacobi sweeps did not converge");
}

}  // namespace

SvdFactorization svd(const Matrix& x) {
  validate_input(x);
  // Work on whichever orientation is tall so the column space is the small one.
  const bool transposed = x.rows() < x.cols();
  const Matrix work = transposed ? x.transpose() : x;
  const std::size_t m = work.rows();
  const std::size_t n = work.cols();

  std::vector<std::vector<double>> a(n);
  std::vector<std::vector<double>> v(n, std::vector<double>(n, 0.0));
  for (std::size_t j = 0; j < n; ++j) {
    a[j] = work.column(j);
    v[j][j] = 1.0;
  }
  orthogonalize_columns(a, v);

  std::vector<double> norms(n);
  for (std::size_t j = 0; j < n; ++j) norms[j] = norm2(a[j]);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return norms[l] > norms[r]; });

  const double s_max = norms[order.front()];
  const double cutoff = static_cast<double>(std::max(m, n)) * s_max * kRankTolerance;
  std::size_t rank = 0;
  while (rank < n && norms[order[rank]] > cutoff && norms[order[rank]] > 0.0) ++rank;

  SvdFactorization f;
  f.s.resize(rank);
  Matrix left(m, rank);
  Matrix right(n, rank);
  for (std::size_t i = 0; i < rank; ++i) {
    const std::size_t j = order[i];
    f.s[i] = norms[j];
    for (std::size_t r = 0; r < m; ++r) left(r, i) = a[j][r] / norms[j];
    for (std::size_t r = 0; r < n; ++r) right(r, i) = v[j][r];
  }
  if (transposed) {
    f.u = std::move(right);
    f.v = std::move(left);
  } else {
    f.u = std::move(left);
    f.v = std::move(right);
  }
  return canonicalize_signs(std::move(f));
}

SvdFactorization canonicalize_signs(SvdFactorization f) {
  for (std::size_t i = 0; i < f.rank(); ++i) {
    double sum = 0.0;
    double abs_sum = 0.0;
    for (std::size_t r = 0; r < f.v.rows(); ++r) {
      sum += f.v(r, i);
      abs_sum += std::abs(f.v(r, i));
    }
    bool flip = false;
    if (std::abs(sum) > 1e-12 * abs_sum) {
      flip = sum < 0.0;
    } else {
      for (std::size_t r = 0; r < f.v.rows(); ++r) {
        if (std::abs(f.v(r, i)) > 1e-12 * abs_sum) {
          flip = f.v(r, i) < 0.0;
          break;
        }
      }
    }
    if (!flip) continue;
    for (std::size_t r = 0; r < f.v.rows(); ++r) f.v(r, i) = -f.v(r, i);
    for (std::size_t r = 0; r < f.u.rows(); ++r) f.u(r, i) = -f.u(r, i);
  }
  return f;
}

Matrix reconstruct_rank(const SvdFactorization& f, std::size_t k) {
  if (k < 1 || k > f.rank()) throw UsageError("reconstruct_rank: k must lie in [1, rank]");
  Matrix out(f.u.rows(), f.v.rows());
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t r = 0; r < out.rows(); ++r) {
      const double scaled = f.s[i] * f.u(r, i);
      auto row = out.row(r);
      for (std::size_t c = 0; c < out.cols(); ++c) row[c] += scaled * f.v(c, i);
    }
  }
  return out;
}

std::vector<double> explained_share(const SvdFactorization& f) {
  if (f.rank() == 0) throw DataError("explained_share: rank-0 factorization");
  const double total = std::inner_product(f.s.begin(), f.s.end(), f.s.begin(), 0.0);
  std::vector<double> share(f.rank());
  std::transform(f.s.begin(), f.s.end(), share.begin(), [total](double s) { return s * s / total; });
  return share;
}

Matrix center_columns(const Matrix& x, bool normalize) {
  if (x.rows() < 2) throw DataError("center_columns: need at least two rows");
  Matrix out = x;
  const double n = static_cast<double>(x.rows());
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) mean += x(r, c);
    mean /= n;
    double sq = 0.0;
    for (std::size_t r = 0; r < x.rows(); ++r) {
      out(r, c) -= mean;
      sq += out(r, c) * out(r, c);
    }
    if (!normalize) continue;
    if (sq == 0.0) throw DataError("center_columns: zero-variance column cannot be normalized");
    // 1/sqrt(N-1) followed by division by the column norm; the product is
    // the same unit-norm column but keep both steps explicit.
    const double scale = 1.0 / std::sqrt(n - 1.0);
    const double scaled_norm = std::sqrt(sq) * scale;
    for (std::size_t r = 0; r < x.rows(); ++r) out(r, c) = out(r, c) * scale / scaled_norm;
  }
  return out;
}

double frobenius_residual(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw DataError("frobenius_residual: shape mismatch");
  double sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a.values()[i] - b.values()[i];
    sq += d * d;
  }
  return std::sqrt(sq);
}

std::size_t numerical_rank(const Matrix& x) { return svd(x).rank(); }

QrDecomposition::QrDecomposition(const Matrix& x) : rows_(x.rows()), cols_(x.cols()), qr_(x), r_diag_(x.cols()) {
  if (rows_ < cols_) throw NumericalError("least squares: fewer observations than parameters");
  if (!x.all_finite()) throw DataError("least squares: non-finite design entries");
  double max_col_norm = 0.0;
  for (std::size_t c = 0; c < cols_; ++c) max_col_norm = std::max(max_col_norm, norm2(x.column(c)));
  for (std::size_t k = 0; k < cols_; ++k) {
    double nrm = 0.0;
    for (std::size_t i = k; i < rows_; ++i) nrm = std::hypot(nrm, qr_(i, k));
    if (nrm != 0.0) {
      if (qr_(k, k) < 0.0) nrm = -nrm;
      for (std::size_t i = k; i < rows_; ++i) qr_(i, k) /= nrm;
      qr_(k, k) += 1.0;
      for (std::size_t j = k + 1; j < cols_; ++j) {
        double s = 0.0;
        for (std::size_t i = k; i < rows_; ++i) s += qr_(i, k) * qr_(i, j);
        s = -s / qr_(k, k);
        for (std::size_t i = k; i < rows_; ++i) qr_(i, j) += s * qr_(i, k);
      }
    }
    r_diag_[k] = -nrm;
    if (std::abs(r_diag_[k]) <= 1e-12 * std::max(max_col_norm, 1.0) * static_cast<double>(rows_)) {
      throw NumericalError("least squares: design matrix is rank deficient");
    }
  }
}

std::vector<double> QrDecomposition::solve(std::span<const double> y) const {
  if (y.size() != rows_) throw DataError("least squares: response length does not match design rows");
  std::vector<double> b(y.begin(), y.end());
  for (std::size_t k = 0; k < cols_; ++k) {
    double s = 0.0;
    for (std::size_t i = k; i < rows_; ++i) s += qr_(i, k) * b[i];
    s = -s / qr_(k, k);
    for (std::size_t i = k; i < rows_; ++i) b[i] += s * qr_(i, k);
  }
  std::vector<double> coef(cols_);
  for (std::size_t k = cols_; k-- > 0;) {
    double s = b[k];
    for (std::size_t j = k + 1; j < cols_; ++j) s -= qr_(k, j) * coef[j];
    coef[k] = s / r_diag_[k];
  }
  return coef;
}

Matrix QrDecomposition::gram_inverse() const {
  // R^{-1} by back substitution, then R^{-1} R^{-T}.
  Matrix r_inv(cols_, cols_);
  for (std::size_t c = 0; c < cols_; ++c) {
    for (std::size_t k = c + 1; k-- > 0;) {
      double s = (k == c) ? 1.0 : 0.0;
      for (std::size_t j = k + 1; j <= c; ++j) s -= qr_(k, j) * r_inv(j, c);
      r_inv(k, c) = s / r_diag_[k];
    }
  }
  return r_inv * r_inv.transpose();
}

}  // namespace agesvd

namespace agesvd {

SymmetricEigen symmetric_eigen(const Matrix& a) {
  if (a.rows() != a.cols()) throw DataError("symmetric_eigen: matrix is not square");
  if (!a.all_finite()) throw DataError("symmetric_eigen: non-finite entries");
  const std::size_t n = a.rows();
  Matrix m = a;
  Matrix vec = Matrix::identity(n);
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    double diag = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      diag += m(i, i) * m(i, i);
      for (std::size_t j = i + 1; j < n; ++j) off += m(i, j) * m(i, j);
    }
    if (off <= 1e-32 * std::max(diag, std::numeric_limits<double>::min())) break;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        if (m(p, q) == 0.0) continue;
        const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double mkp = m(k, p);
          const double mkq = m(k, q);
          m(k, p) = c * mkp - s * mkq;
          m(k, q) = s * mkp + c * mkq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double mpk = m(p, k);
          const double mqk = m(q, k);
          m(p, k) = c * mpk - s * mqk;
          m(q, k) = s * mpk + c * mqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = vec(k, p);
          const double vkq = vec(k, q);
          vec(k, p) = c * vkp - s * vkq;
          vec(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return m(l, l) > m(r, r); });
  SymmetricEigen out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t i = 0; i < n; ++i) {
    out.values[i] = m(order[i], order[i]);
    for (std::size_t k = 0; k < n; ++k) out.vectors(k, i) = vec(k, order[i]);
  }
  return out;
}

}  // namespace agesvd
