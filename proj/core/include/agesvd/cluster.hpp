#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "agesvd/matrix.hpp"
#include "agesvd/schedule.hpp"

namespace agesvd {

/// Per-cluster covariance structure. Every family lets the volume vary
/// between clusters.
enum class CovarianceFamily { spherical, diagonal, full };

[[nodiscard]] const char* to_string(CovarianceFamily family) noexcept;
/// Throws UsageError for anything but "spherical", "diagonal" or "full".
[[nodiscard]] CovarianceFamily parse_family(std::string_view text);

inline constexpr std::size_t kEmMaxIterations = 500;
inline constexpr double kEmTolerance = 1e-8;
inline constexpr std::size_t kEmRestarts = 5;
/// Covariance eigenvalues are kept at or above this fraction of the mean
/// per-coordinate data variance.
inline constexpr double kVarianceFloorFraction = 1e-8;

struct GmmModel {
  std::size_t k = 0;
  CovarianceFamily family = CovarianceFamily::full;
  std::vector<double> mixing_weights;
  Matrix means;                     // k x d
  std::vector<Matrix> covariances;  // k matrices, d x d
  double log_likelihood = 0.0;
  double bic = 0.0;
  std::size_t n = 0;
  std::size_t iterations = 0;
  /// Log-likelihood after every E-step of the winning restart.
  std::vector<double> log_likelihood_trace;
  /// True when some covariance eigenvalue sits on the variance floor or a
  /// component owns no observation outright.
  bool degenerate = false;

  [[nodiscard]] std::size_t dimension() const noexcept { return means.cols(); }
  [[nodiscard]] std::size_t parameter_count() const noexcept;
};

struct ClusterAssignment {
  std::size_t k = 0;
  /// 1-based cluster label per observation, the argmax responsibility.
  std::vector<int> labels;
  /// n x k posterior probabilities; rows sum to 1.
  Matrix responsibilities;
};

/// EM for a Gaussian mixture, seeded by k-means++ style D^2 sampling from a
/// deterministic generator, best of kEmRestarts restarts.
///
/// Components are numbered by the first observation they claim, so labels
/// of time-ordered data come out chronological. Throws UsageError when
/// n < k or k == 0, NumericalError if a covariance stays singular.
[[nodiscard]] GmmModel fit_gmm_em(const Matrix& points, std::size_t k, CovarianceFamily family,
                                  std::uint64_t seed = 0);

/// Fits every (k, family) pair and returns the lowest-BIC model; ties go to
/// smaller k, then the simpler family. Degenerate fits are skipped unless
/// every candidate is degenerate.
[[nodiscard]] GmmModel select_by_bic(const Matrix& points, std::size_t k_min, std::size_t k_max,
                                     std::span<const CovarianceFamily> families, std::uint64_t seed = 0);

/// All fits evaluated by select_by_bic, in grid order.
[[nodiscard]] std::vector<GmmModel> fit_bic_grid(const Matrix& points, std::size_t k_min, std::size_t k_max,
                                                 std::span<const CovarianceFamily> families,
                                                 std::uint64_t seed = 0);

[[nodiscard]] ClusterAssignment assign(const GmmModel& model, const Matrix& points);

/// Per cluster, the component-wise median weight vector pushed through the
/// basis. Throws DataError for an empty cluster or mismatched sizes.
[[nodiscard]] std::vector<AgeSchedule> characteristic_schedules(const ClusterAssignment& assignment,
                                                                const Matrix& weights,
                                                                const ComponentBasis& basis);

/// True when every label occupies one unbroken run of positions.
[[nodiscard]] bool labels_contiguous(std::span<const int> labels);

}  // namespace agesvd
