#include "agesvd/regress.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "agesvd/error.hpp"
#include "agesvd/linalg.hpp"
#include "agesvd/measures.hpp"

namespace agesvd {

namespace {

// Continued fraction for I_x(a, b), modified Lentz. Converges quickly for
// x < (a + 1) / (a + b + 2); callers use the symmetry relation otherwise.
double beta_continued_fraction(double a, double b, double x) {
  constexpr int kMaxIterations = 1000;
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIterations; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw UsageError("incomplete beta: shape parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw UsageError("incomplete beta: x outside [0, 1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_continued_fraction(a, b, x) / a;
  return 1.0 - front * beta_continued_fraction(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw UsageError("student_t_cdf: degrees of freedom must be positive");
  if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double x = dof / (dof + t * t);
  const double tail = 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, x);
  return t > 0.0 ? 1.0 - tail : tail;
}

CovariateTable::CovariateTable(std::vector<std::string> labels) : labels_(std::move(labels)) {}

void CovariateTable::set_column(const std::string& name, std::vector<std::optional<double>> values) {
  if (values.size() != labels_.size()) throw DataError("covariate column '" + name + "' has the wrong length");
  if (!columns_.contains(name)) names_.push_back(name);
  columns_[name] = std::move(values);
}

bool CovariateTable::has(std::string_view name) const { return columns_.find(name) != columns_.end(); }

std::vector<double> CovariateTable::column(std::string_view name) const {
  return column_for(name, labels_);
}

std::vector<double> CovariateTable::column_for(std::string_view name, std::span<const std::string> labels) const {
  const auto it = columns_.find(name);
  if (it == columns_.end()) throw DataError("missing covariate '" + std::string(name) + "'");
  std::vector<double> out;
  out.reserve(labels.size());
  for (const auto& label : labels) {
    const auto& cell = it->second[index_of(label)];
    if (!cell) throw DataError("covariate '" + std::string(name) + "' is empty for '" + label + "'");
    out.push_back(*cell);
  }
  return out;
}

std::size_t CovariateTable::index_of(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw DataError("no covariate row labelled '" + std::string(label) + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

CovariateTable::Row CovariateTable::row(std::string_view label) const {
  const std::size_t i = index_of(label);
  Row r;
  for (const auto& [name, values] : columns_) r.emplace(name, values[i]);
  return r;
}

void CovariateTable::validate() const {
  if (std::set<std::string>(labels_.begin(), labels_.end()).size() != labels_.size()) {
    throw DataError("covariate row labels are not unique");
  }
  static const std::set<std::string, std::less<>> unit_interval{"hiv_prev", "art_cov", "q45_15", "q5_0", "delta"};
  for (const auto& [name, values] : columns_) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!values[i]) continue;
      const double v = *values[i];
      const auto where = "covariate '" + name + "' at '" + labels_[i] + "'";
      if (!std::isfinite(v)) throw DataError(where + " is not finite");
      if (unit_interval.contains(name) && (v < 0.0 || v > 1.0)) throw DataError(where + " is outside [0, 1]");
      if (name == "e0" && !(v > 0.0)) throw DataError(where + " must be positive");
      if (name == "tfr" && v < 0.0) throw DataError(where + " must be non-negative");
    }
  }
}

CovariateTable with_derived_delta(CovariateTable table) {
  if (!table.has("hiv_prev") || !table.has("art_cov")) return table;
  std::vector<std::optional<double>> delta(table.labels().size());
  std::vector<std::optional<double>> delta_pct(table.labels().size());
  for (std::size_t i = 0; i < table.labels().size(); ++i) {
    const auto row = table.row(table.labels()[i]);
    const auto hiv = row.at("hiv_prev");
    const auto art = row.at("art_cov");
    if (!hiv || !art) continue;
    delta[i] = derive_delta(*hiv, *art);
    delta_pct[i] = 100.0 * *delta[i];
  }
  table.set_column("delta", std::move(delta));
  table.set_column("delta_pct", std::move(delta_pct));
  return table;
}

double LinearModel::slope(std::string_view predictor) const {
  const auto it = std::find(predictor_names.begin(), predictor_names.end(), predictor);
  if (it == predictor_names.end()) throw DataError("model has no predictor '" + std::string(predictor) + "'");
  return coefficients[static_cast<std::size_t>(it - predictor_names.begin()) + (has_intercept ? 1 : 0)];
}

double LinearModel::predict(const CovariateTable::Row& row) const {
  double y = intercept();
  for (std::size_t j = 0; j < predictor_names.size(); ++j) {
    const auto it = row.find(predictor_names[j]);
    if (it == row.end() || !it->second) throw DataError("missing covariate '" + predictor_names[j] + "'");
    y += coefficients[j + (has_intercept ? 1 : 0)] * *it->second;
  }
  return y;
}

LinearModel ols_fit(std::span<const double> y, const std::vector<NamedColumn>& predictors, bool with_intercept,
                    std::string response_name) {
  const std::size_t n = y.size();
  const std::size_t p = predictors.size() + (with_intercept ? 1 : 0);
  if (p == 0) throw UsageError("ols_fit: no parameters to estimate");
  if (n <= p) throw NumericalError("ols_fit: need more observations than parameters for inference");
  Matrix design(n, p);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t col = 0;
    if (with_intercept) design(i, col++) = 1.0;
    for (const auto& pred : predictors) {
      if (pred.values.size() != n) throw DataError("predictor '" + pred.name + "' length does not match response");
      design(i, col++) = pred.values[i];
    }
  }
  const QrDecomposition qr(design);

  LinearModel m;
  m.response_name = std::move(response_name);
  m.has_intercept = with_intercept;
  for (const auto& pred : predictors) m.predictor_names.push_back(pred.name);
  m.n = n;
  m.coefficients = qr.solve(y);
  m.fitted.resize(n);
  m.residuals.resize(n);
  double rss = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    m.fitted[i] = dot(design.row(i), m.coefficients);
    m.residuals[i] = y[i] - m.fitted[i];
    rss += m.residuals[i] * m.residuals[i];
  }
  const double y_mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
  double tss = 0.0;
  for (const double v : y) {
    // Models through the origin use the uncentred total sum of squares.
    const double d = with_intercept ? v - y_mean : v;
    tss += d * d;
  }
  m.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 1.0;

  const double dof = static_cast<double>(n - p);
  const double sigma2 = rss / dof;
  const Matrix cov = qr.gram_inverse();
  m.standard_errors.resize(p);
  m.t_values.resize(p);
  m.p_values.resize(p);
  for (std::size_t j = 0; j < p; ++j) {
    m.standard_errors[j] = std::sqrt(sigma2 * cov(j, j));
    if (m.standard_errors[j] > 0.0) {
      m.t_values[j] = m.coefficients[j] / m.standard_errors[j];
      m.p_values[j] = 2.0 * student_t_cdf(-std::abs(m.t_values[j]), dof);
    } else {
      // Exact fit: the estimate carries no sampling error.
      m.t_values[j] = m.coefficients[j] == 0.0 ? 0.0 : std::copysign(std::numeric_limits<double>::infinity(),
                                                                        m.coefficients[j]);
      m.p_values[j] = m.coefficients[j] == 0.0 ? 1.0 : 0.0;
    }
  }
  return m;
}

std::vector<double> predict_weights(const std::vector<LinearModel>& models, const CovariateTable::Row& row) {
  std::vector<double> out;
  out.reserve(models.size());
  for (const auto& m : models) out.push_back(m.predict(row));
  return out;
}

AgeSchedule predict_schedule(const ComponentBasis& basis, const std::vector<LinearModel>& models,
                             const CovariateTable::Row& row) {
  if (models.size() != basis.count()) throw DataError("need exactly one weight model per basis component");
  return reconstruct(basis, predict_weights(models, row));
}

std::vector<LinearModel> fit_weight_models(const Matrix& weights, std::span<const std::string> labels,
                                           const CovariateTable& covariates,
                                           const std::vector<std::string>& predictors) {
  if (labels.size() != weights.rows()) throw DataError("weight label count does not match weight rows");
  std::vector<NamedColumn> columns;
  for (const auto& name : predictors) columns.push_back({name, covariates.column_for(name, labels)});
  std::vector<LinearModel> models;
  for (std::size_t i = 0; i < weights.cols(); ++i) {
    models.push_back(ols_fit(weights.column(i), columns, true, "v" + std::to_string(i + 1)));
  }
  return models;
}

ScheduleMatrix predict_matrix(const ComponentBasis& basis, const std::vector<LinearModel>& models,
                              const CovariateTable& covariates, std::vector<std::string> labels) {
  ScheduleMatrix out{basis.group_labels, {}, Matrix(basis.groups(), labels.size()), basis.scale};
  for (std::size_t h = 0; h < labels.size(); ++h) {
    out.data.set_column(h, predict_schedule(basis, models, covariates.row(labels[h])).values);
  }
  out.schedule_labels = std::move(labels);
  return out;
}

}  // namespace agesvd
