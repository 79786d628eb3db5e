#include "agesvd/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "agesvd/error.hpp"

namespace agesvd {

const char* to_string(Scale scale) noexcept { return scale == Scale::log ? "log" : "natural"; }

Scale parse_scale(std::string_view text) {
  if (text == "log") return Scale::log;
  if (text == "natural") return Scale::natural;
  throw DataError("unknown scale '" + std::string(text) + "'");
}

AgeSchedule ScheduleMatrix::column(std::size_t h) const {
  if (h >= schedules()) throw UsageError("schedule index out of range");
  return AgeSchedule{group_labels, data.column(h), scale};
}

void ScheduleMatrix::validate() const {
  if (data.rows() == 0 || data.cols() == 0) throw DataError("schedule matrix is empty");
  if (group_labels.size() != data.rows()) throw DataError("group label count does not match rows");
  if (schedule_labels.size() != data.cols()) throw DataError("schedule label count does not match columns");
  if (!data.all_finite()) throw DataError("schedule matrix has non-finite entries");
}

ScheduleMatrix log_transform(const ScheduleMatrix& a) {
  a.validate();
  if (a.scale == Scale::log) throw DataError("schedule matrix is already on the log scale");
  ScheduleMatrix out = a;
  for (std::size_t r = 0; r < a.groups(); ++r) {
    for (std::size_t c = 0; c < a.schedules(); ++c) {
      const double v = a.data(r, c);
      if (!(v > 0.0)) {
        throw DataError("cannot take log of non-positive rate at group '" + a.group_labels[r] + "', schedule '" +
                        a.schedule_labels[c] + "'");
      }
      out.data(r, c) = std::log(v);
    }
  }
  out.scale = Scale::log;
  return out;
}

ScheduleMatrix exp_transform(const ScheduleMatrix& a) {
  a.validate();
  if (a.scale != Scale::log) throw DataError("schedule matrix is not on the log scale");
  ScheduleMatrix out = a;
  for (auto& v : out.data.values()) v = std::exp(v);
  out.scale = Scale::natural;
  return out;
}

Decomposition decompose(const ScheduleMatrix& a, std::size_t c, std::string source_id) {
  a.validate();
  const SvdFactorization f = svd(a.data);
  if (c < 1 || c > f.rank()) {
    throw UsageError("component count " + std::to_string(c) + " outside [1, " + std::to_string(f.rank()) + "]");
  }
  Decomposition d;
  d.basis.group_labels = a.group_labels;
  d.basis.source_id = std::move(source_id);
  d.basis.scale = a.scale;
  d.basis.singular_values.assign(f.s.begin(), f.s.begin() + static_cast<std::ptrdiff_t>(c));
  for (std::size_t i = 0; i < c; ++i) {
    std::vector<double> lambda = f.u.column(i);
    for (double& x : lambda) x *= f.s[i];
    d.basis.components.push_back(std::move(lambda));
  }
  d.weights = f.v.leading_columns(c);
  d.schedule_labels = a.schedule_labels;
  d.singular_values = f.s;
  d.explained_share = explained_share(f);
  return d;
}

ComponentBasis build_basis(const ScheduleMatrix& a, std::size_t c, std::string source_id) {
  return decompose(a, c, std::move(source_id)).basis;
}

Matrix svd_weights(const ScheduleMatrix& a, std::size_t c) { return decompose(a, c).weights; }

namespace {

void check_compatible(const AgeSchedule& observed, const ComponentBasis& basis) {
  if (basis.count() == 0) throw DataError("component basis is empty");
  if (observed.values.size() != basis.groups()) throw DataError("schedule length does not match basis age groups");
  if (observed.scale != basis.scale) throw DataError("schedule scale does not match basis scale");
  if (!std::all_of(observed.values.begin(), observed.values.end(), [](double v) { return std::isfinite(v); })) {
    throw DataError("schedule has non-finite values");
  }
}

FittedSchedule finish_fit(const AgeSchedule& observed, const ComponentBasis& basis, std::vector<double> betas) {
  FittedSchedule fit;
  fit.predicted = reconstruct(basis, betas);
  fit.betas = std::move(betas);
  double sq = 0.0;
  for (std::size_t g = 0; g < observed.values.size(); ++g) {
    const double d = observed.values[g] - fit.predicted.values[g];
    sq += d * d;
  }
  fit.residual_norm = std::sqrt(sq);
  return fit;
}

}  // namespace

FittedSchedule fit_weights(const AgeSchedule& observed, const ComponentBasis& basis) {
  check_compatible(observed, basis);
  std::vector<double> betas(basis.count());
  for (std::size_t i = 0; i < basis.count(); ++i) {
    const auto& lambda = basis.components[i];
    betas[i] = dot(lambda, observed.values) / dot(lambda, lambda);
  }
  return finish_fit(observed, basis, std::move(betas));
}

FittedSchedule fit_weights_least_squares(const AgeSchedule& observed, const ComponentBasis& basis) {
  check_compatible(observed, basis);
  const QrDecomposition qr(Matrix::from_columns(basis.components));
  return finish_fit(observed, basis, qr.solve(observed.values));
}

AgeSchedule reconstruct(const ComponentBasis& basis, std::span<const double> betas) {
  if (betas.size() != basis.count()) throw DataError("weight count does not match component count");
  AgeSchedule out{basis.group_labels, std::vector<double>(basis.groups(), 0.0), basis.scale};
  for (std::size_t i = 0; i < basis.count(); ++i) {
    const auto& lambda = basis.components[i];
    for (std::size_t g = 0; g < out.values.size(); ++g) out.values[g] += betas[i] * lambda[g];
  }
  return out;
}

ScheduleMatrix reconstruct_matrix(const ComponentBasis& basis, const Matrix& weights,
                                  std::vector<std::string> schedule_labels) {
  if (weights.cols() != basis.count()) throw DataError("weight matrix columns do not match component count");
  if (schedule_labels.size() != weights.rows()) throw DataError("schedule label count does not match weight rows");
  ScheduleMatrix out{basis.group_labels, std::move(schedule_labels), Matrix(basis.groups(), weights.rows()),
                     basis.scale};
  for (std::size_t h = 0; h < weights.rows(); ++h) out.data.set_column(h, reconstruct(basis, weights.row(h)).values);
  return out;
}

ScheduleMatrix smooth_matrix(const ScheduleMatrix& a, std::size_t c) {
  const Decomposition d = decompose(a, c);
  return reconstruct_matrix(d.basis, d.weights, a.schedule_labels);
}

double quantile(std::vector<double> values, double p) {
  if (values.empty()) throw DataError("quantile of empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw DataError("quantile probability outside [0, 1]");
  std::sort(values.begin(), values.end());
  const double h = static_cast<double>(values.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

ErrorMetrics error_metrics(const ScheduleMatrix& predicted, const ScheduleMatrix& observed) {
  if (predicted.data.rows() != observed.data.rows() || predicted.data.cols() != observed.data.cols()) {
    throw DataError("error_metrics: shape mismatch");
  }
  if (predicted.scale != observed.scale) throw DataError("error_metrics: scale mismatch");
  if (observed.data.empty()) throw DataError("error_metrics: empty matrices");
  std::vector<double> abs_err(observed.data.size());
  for (std::size_t i = 0; i < abs_err.size(); ++i) {
    abs_err[i] = std::abs(predicted.data.values()[i] - observed.data.values()[i]);
  }
  ErrorMetrics m;
  m.mae = std::accumulate(abs_err.begin(), abs_err.end(), 0.0) / static_cast<double>(abs_err.size());
  std::sort(abs_err.begin(), abs_err.end());
  for (std::size_t q = 0; q < kErrorQuantileProbs.size(); ++q) m.quantiles[q] = quantile(abs_err, kErrorQuantileProbs[q]);
  return m;
}

ScheduleMatrix concat_sexes(const ScheduleMatrix& female, const ScheduleMatrix& male) {
  female.validate();
  male.validate();
  if (female.schedule_labels != male.schedule_labels) throw DataError("female and male schedule labels differ");
  if (female.group_labels != male.group_labels) throw DataError("female and male age groups differ");
  if (female.scale != male.scale) throw DataError("female and male scales differ");
  ScheduleMatrix out;
  out.schedule_labels = female.schedule_labels;
  out.scale = female.scale;
  for (const auto& g : female.group_labels) out.group_labels.push_back(std::string(kFemalePrefix) + g);
  for (const auto& g : male.group_labels) out.group_labels.push_back(std::string(kMalePrefix) + g);
  out.data = Matrix(female.groups() + male.groups(), female.schedules());
  for (std::size_t r = 0; r < female.groups(); ++r)
    for (std::size_t c = 0; c < out.schedules(); ++c) out.data(r, c) = female.data(r, c);
  for (std::size_t r = 0; r < male.groups(); ++r)
    for (std::size_t c = 0; c < out.schedules(); ++c) out.data(female.groups() + r, c) = male.data(r, c);
  return out;
}

std::pair<ScheduleMatrix, ScheduleMatrix> split_sexes(const ScheduleMatrix& combined) {
  combined.validate();
  ScheduleMatrix parts[2];
  const std::string_view prefixes[2] = {kFemalePrefix, kMalePrefix};
  for (int s = 0; s < 2; ++s) {
    parts[s].schedule_labels = combined.schedule_labels;
    parts[s].scale = combined.scale;
    std::vector<std::size_t> rows;
    for (std::size_t r = 0; r < combined.groups(); ++r) {
      if (combined.group_labels[r].starts_with(prefixes[s])) {
        rows.push_back(r);
        parts[s].group_labels.push_back(combined.group_labels[r].substr(prefixes[s].size()));
      }
    }
    parts[s].data = Matrix(rows.size(), combined.schedules());
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t c = 0; c < combined.schedules(); ++c) parts[s].data(i, c) = combined.data(rows[i], c);
  }
  if (parts[0].groups() + parts[1].groups() != combined.groups() || parts[0].groups() == 0 || parts[1].groups() == 0) {
    throw DataError("split_sexes: every row label must carry an F_ or M_ prefix, with both present");
  }
  return {std::move(parts[0]), std::move(parts[1])};
}

Matrix column_correlations(const Matrix& x) {
  const Matrix centered = center_columns(x, false);
  const std::size_t n = x.cols();
  std::vector<std::vector<double>> cols(n);
  std::vector<double> norms(n);
  for (std::size_t c = 0; c < n; ++c) {
    cols[c] = centered.column(c);
    norms[c] = norm2(cols[c]);
  }
  Matrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = dot(cols[i], cols[j]) / (norms[i] * norms[j]);
  return r;
}

}  // namespace agesvd
