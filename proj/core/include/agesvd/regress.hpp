#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agesvd/matrix.hpp"
#include "agesvd/schedule.hpp"

namespace agesvd {

/// Regularized incomplete beta I_x(a, b) by Lentz's continued fraction.
[[nodiscard]] double regularized_incomplete_beta(double a, double b, double x);
/// CDF of Student's t with `dof` degrees of freedom.
[[nodiscard]] double student_t_cdf(double t, double dof);

/// Covariates keyed by schedule label. Cells may be missing; a missing cell
/// only becomes an error when a regression asks for that column.
class CovariateTable {
 public:
  using Row = std::map<std::string, std::optional<double>, std::less<>>;

  CovariateTable() = default;
  explicit CovariateTable(std::vector<std::string> labels);

  /// Adds or replaces a column. Throws DataError on length mismatch.
  void set_column(const std::string& name, std::vector<std::optional<double>> values);

  [[nodiscard]] const std::vector<std::string>& labels() const noexcept { return labels_; }
  [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }
  [[nodiscard]] bool has(std::string_view name) const;
  /// Complete column in label order; DataError if absent or any cell empty.
  [[nodiscard]] std::vector<double> column(std::string_view name) const;
  /// Column reordered to follow `labels`; DataError for unknown labels.
  [[nodiscard]] std::vector<double> column_for(std::string_view name, std::span<const std::string> labels) const;
  [[nodiscard]] Row row(std::string_view label) const;
  [[nodiscard]] std::size_t index_of(std::string_view label) const;

  /// Checks the documented ranges (fractions and probabilities in [0, 1],
  /// e0 > 0, tfr >= 0) and unique labels.
  void validate() const;

 private:
  std::vector<std::string> labels_;
  std::vector<std::string> names_;
  std::map<std::string, std::vector<std::optional<double>>, std::less<>> columns_;
};

/// Adds `delta` = hiv_prev - art_cov (fraction) and `delta_pct` = 100 * delta
/// whenever both source columns are present and complete for a row.
[[nodiscard]] CovariateTable with_derived_delta(CovariateTable table);

struct NamedColumn {
  std::string name;
  std::vector<double> values;
};

/// Ordinary least squares fit with classical inference.
struct LinearModel {
  std::string response_name;
  std::vector<std::string> predictor_names;
  bool has_intercept = true;
  /// Intercept first when present, then one entry per predictor.
  std::vector<double> coefficients;
  std::vector<double> standard_errors;
  std::vector<double> t_values;
  std::vector<double> p_values;
  double r_squared = 0.0;
  std::size_t n = 0;
  std::vector<double> residuals;
  std::vector<double> fitted;

  [[nodiscard]] double intercept() const noexcept { return has_intercept ? coefficients.front() : 0.0; }
  [[nodiscard]] double slope(std::string_view predictor) const;
  /// intercept + sum beta_j x_j with x looked up by predictor name.
  [[nodiscard]] double predict(const CovariateTable::Row& row) const;
};

/// Throws NumericalError for a rank-deficient design or n <= p.
[[nodiscard]] LinearModel ols_fit(std::span<const double> y, const std::vector<NamedColumn>& predictors,
                                  bool with_intercept = true, std::string response_name = {});

/// One prediction per model from a single covariate row.
[[nodiscard]] std::vector<double> predict_weights(const std::vector<LinearModel>& models,
                                                  const CovariateTable::Row& row);

/// reconstruct(basis, predict_weights(models, row)).
[[nodiscard]] AgeSchedule predict_schedule(const ComponentBasis& basis, const std::vector<LinearModel>& models,
                                           const CovariateTable::Row& row);

/// Regresses each column of `weights` (rows labelled by `labels`) on the
/// named covariates; model i is named "v<i+1>".
[[nodiscard]] std::vector<LinearModel> fit_weight_models(const Matrix& weights, std::span<const std::string> labels,
                                                         const CovariateTable& covariates,
                                                         const std::vector<std::string>& predictors);

/// Predicted schedules for every label, one column each.
[[nodiscard]] ScheduleMatrix predict_matrix(const ComponentBasis& basis, const std::vector<LinearModel>& models,
                                            const CovariateTable& covariates, std::vector<std::string> labels);

}  // namespace agesvd
