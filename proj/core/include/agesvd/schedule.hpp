#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "agesvd/linalg.hpp"
#include "agesvd/matrix.hpp"

namespace agesvd {

enum class Scale { natural, log };

[[nodiscard]] const char* to_string(Scale scale) noexcept;
/// Parses "natural" or "log"; throws DataError otherwise.
[[nodiscard]] Scale parse_scale(std::string_view text);

/// One age schedule: a value per age group.
struct AgeSchedule {
  std::vector<std::string> group_labels;
  std::vector<double> values;
  Scale scale = Scale::natural;
};

/// Age groups in rows, schedules (typically calendar years) in columns.
struct ScheduleMatrix {
  std::vector<std::string> group_labels;
  std::vector<std::string> schedule_labels;
  Matrix data;
  Scale scale = Scale::natural;

  [[nodiscard]] std::size_t groups() const noexcept { return data.rows(); }
  [[nodiscard]] std::size_t schedules() const noexcept { return data.cols(); }
  [[nodiscard]] AgeSchedule column(std::size_t h) const;
  /// Throws DataError when labels and data disagree or an entry is non-finite.
  void validate() const;
};

/// Natural log of every entry. Zero or negative rates are a DataError.
[[nodiscard]] ScheduleMatrix log_transform(const ScheduleMatrix& a);
[[nodiscard]] ScheduleMatrix exp_transform(const ScheduleMatrix& a);

/// Fixed age-shaped components Lambda_i = s_i u_i taken from the
/// sign-canonical SVD of a schedule matrix.
struct ComponentBasis {
  std::vector<std::vector<double>> components;
  std::vector<double> singular_values;
  std::vector<std::string> group_labels;
  std::string source_id;
  Scale scale = Scale::natural;

  [[nodiscard]] std::size_t count() const noexcept { return components.size(); }
  [[nodiscard]] std::size_t groups() const noexcept { return group_labels.size(); }
};

/// Everything one SVD of a schedule matrix yields for a c-component model.
struct Decomposition {
  ComponentBasis basis;
  /// H x c; row h holds the weights (v_h1 .. v_hc) of schedule h.
  Matrix weights;
  std::vector<std::string> schedule_labels;
  /// All retained singular values of the source, not only the first c.
  std::vector<double> singular_values;
  std::vector<double> explained_share;
};

/// Throws UsageError if c is zero or exceeds the numerical rank.
[[nodiscard]] Decomposition decompose(const ScheduleMatrix& a, std::size_t c, std::string source_id = {});

[[nodiscard]] ComponentBasis build_basis(const ScheduleMatrix& a, std::size_t c, std::string source_id = {});
[[nodiscard]] Matrix svd_weights(const ScheduleMatrix& a, std::size_t c);

struct FittedSchedule {
  std::vector<double> betas;
  AgeSchedule predicted;
  double residual_norm = 0.0;
};

/// Least-squares weights through the origin. The components are orthogonal,
/// so beta_i = (Lambda_i . x) / (Lambda_i . Lambda_i).
[[nodiscard]] FittedSchedule fit_weights(const AgeSchedule& observed, const ComponentBasis& basis);

/// Same fit through a general QR least-squares solve; agrees with
/// fit_weights to rounding and stays valid for non-orthogonal components.
[[nodiscard]] FittedSchedule fit_weights_least_squares(const AgeSchedule& observed, const ComponentBasis& basis);

/// sum_i betas[i] * Lambda_i.
[[nodiscard]] AgeSchedule reconstruct(const ComponentBasis& basis, std::span<const double> betas);

/// Rebuilds a whole matrix from per-schedule weight rows (H x c).
[[nodiscard]] ScheduleMatrix reconstruct_matrix(const ComponentBasis& basis, const Matrix& weights,
                                                std::vector<std::string> schedule_labels);

/// Every column replaced by its c-component reconstruction.
[[nodiscard]] ScheduleMatrix smooth_matrix(const ScheduleMatrix& a, std::size_t c);

inline constexpr std::array<double, 5> kErrorQuantileProbs{0.01, 0.25, 0.50, 0.75, 0.99};

struct ErrorMetrics {
  double mae = 0.0;
  /// |predicted - observed| at kErrorQuantileProbs.
  std::array<double, 5> quantiles{};
};

[[nodiscard]] ErrorMetrics error_metrics(const ScheduleMatrix& predicted, const ScheduleMatrix& observed);

/// Sample quantile by linear interpolation between order statistics
/// (h = (n - 1) p). Throws DataError on empty input or p outside [0, 1].
[[nodiscard]] double quantile(std::vector<double> values, double p);

inline constexpr std::string_view kFemalePrefix = "F_";
inline constexpr std::string_view kMalePrefix = "M_";

/// Stacks female rows above male rows, prefixing labels with F_ / M_.
[[nodiscard]] ScheduleMatrix concat_sexes(const ScheduleMatrix& female, const ScheduleMatrix& male);
/// Inverse of concat_sexes.
[[nodiscard]] std::pair<ScheduleMatrix, ScheduleMatrix> split_sexes(const ScheduleMatrix& combined);

/// Pearson correlation of every pair of columns.
[[nodiscard]] Matrix column_correlations(const Matrix& x);

}  // namespace agesvd
