#include "agesvd/cluster.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>

#include "agesvd/error.hpp"
#include "agesvd/linalg.hpp"

namespace agesvd {

const char* to_string(CovarianceFamily family) noexcept {
  switch (family) {
    case CovarianceFamily::spherical:
      return "spherical";
    case CovarianceFamily::diagonal:
      return "diagonal";
    case CovarianceFamily::full:
      return "full";
  }
  return "full";
}

CovarianceFamily parse_family(std::string_view text) {
  if (text == "spherical") return CovarianceFamily::spherical;
  if (text == "diagonal") return CovarianceFamily::diagonal;
  if (text == "full") return CovarianceFamily::full;
  throw UsageError("unknown covariance family '" + std::string(text) + "'");
}

std::size_t GmmModel::parameter_count() const noexcept {
  const std::size_t d = dimension();
  std::size_t per_cluster = 0;
  switch (family) {
    case CovarianceFamily::spherical:
      per_cluster = 1;
      break;
    case CovarianceFamily::diagonal:
      per_cluster = d;
      break;
    case CovarianceFamily::full:
      per_cluster = d * (d + 1) / 2;
      break;
  }
  return k * d + (k - 1) + k * per_cluster;
}

namespace {

// Uniform [0, 1) from the raw 64-bit stream; std distributions are not
// guaranteed to produce the same sequence across standard libraries.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct Cholesky {
  Matrix lower;
  double log_det = 0.0;
};

Cholesky cholesky(const Matrix& a) {
  const std::size_t d = a.rows();
  Cholesky c{Matrix(d, d), 0.0};
  for (std::size_t j = 0; j < d; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= c.lower(j, k) * c.lower(j, k);
    if (!(diag > 0.0) || !std::isfinite(diag)) throw NumericalError("gmm: covariance is singular after flooring");
    c.lower(j, j) = std::sqrt(diag);
    c.log_det += 2.0 * std::log(c.lower(j, j));
    for (std::size_t i = j + 1; i < d; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= c.lower(i, k) * c.lower(j, k);
      c.lower(i, j) = s / c.lower(j, j);
    }
  }
  return c;
}

double log_gaussian(std::span<const double> x, std::span<const double> mean, const Cholesky& chol) {
  const std::size_t d = x.size();
  std::vector<double> z(d);
  for (std::size_t i = 0; i < d; ++i) {
    double s = x[i] - mean[i];
    for (std::size_t k = 0; k < i; ++k) s -= chol.lower(i, k) * z[k];
    z[i] = s / chol.lower(i, i);
  }
  return -0.5 * (static_cast<double>(d) * std::log(2.0 * std::numbers::pi) + chol.log_det + dot(z, z));
}

double mean_coordinate_variance(const Matrix& x) {
  const std::size_t n = x.rows();
  double total = 0.0;
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double mean = 0.0;
    for (std::size_t r = 0; r < n; ++r) mean += x(r, c);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t r = 0; r < n; ++r) ss += (x(r, c) - mean) * (x(r, c) - mean);
    total += ss / static_cast<double>(n);
  }
  return total / static_cast<double>(x.cols());
}

// Projects a weighted sample covariance onto the family with eigenvalues >= floor.
// Returns whether the floor was active.
bool constrain_covariance(Matrix& cov, CovarianceFamily family, double floor) {
  const std::size_t d = cov.rows();
  bool floored = false;
  switch (family) {
    case CovarianceFamily::spherical: {
      double var = 0.0;
      for (std::size_t i = 0; i < d; ++i) var += cov(i, i);
      var /= static_cast<double>(d);
      if (var <= floor) {
        var = floor;
        floored = true;
      }
      cov = var * Matrix::identity(d);
      break;
    }
    case CovarianceFamily::diagonal: {
      Matrix diag(d, d);
      for (std::size_t i = 0; i < d; ++i) {
        diag(i, i) = cov(i, i);
        if (diag(i, i) <= floor) {
          diag(i, i) = floor;
          floored = true;
        }
      }
      cov = std::move(diag);
      break;
    }
    case CovarianceFamily::full: {
      const SymmetricEigen eig = symmetric_eigen(cov);
      Matrix rebuilt(d, d);
      for (std::size_t e = 0; e < d; ++e) {
        double lambda = eig.values[e];
        if (lambda <= floor) {
          lambda = floor;
          floored = true;
        }
        for (std::size_t i = 0; i < d; ++i)
          for (std::size_t j = 0; j < d; ++j) rebuilt(i, j) += lambda * eig.vectors(i, e) * eig.vectors(j, e);
      }
      for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) rebuilt(j, i) = rebuilt(i, j);
      cov = std::move(rebuilt);
      break;
    }
  }
  return floored;
}

struct EmState {
  std::vector<double> weights;
  Matrix means;
  std::vector<Matrix> covariances;
  bool floored = false;
};

// M-step from responsibilities; false when a component has lost all mass.
bool maximize(const Matrix& x, const Matrix& resp, CovarianceFamily family, double floor, EmState& state) {
  const std::size_t n = x.rows();
  const std::size_t d = x.cols();
  const std::size_t k = resp.cols();
  state.weights.assign(k, 0.0);
  state.means = Matrix(k, d);
  state.covariances.assign(k, Matrix(d, d));
  state.floored = false;
  for (std::size_t j = 0; j < k; ++j) {
    double nk = 0.0;
    for (std::size_t i = 0; i < n; ++i) nk += resp(i, j);
    if (!(nk > 1e-10)) return false;
    state.weights[j] = nk / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < d; ++c) state.means(j, c) += resp(i, j) * x(i, c);
    for (std::size_t c = 0; c < d; ++c) state.means(j, c) /= nk;
    Matrix& cov = state.covariances[j];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t a = 0; a < d; ++a) {
        const double da = x(i, a) - state.means(j, a);
        for (std::size_t b = a; b < d; ++b) cov(a, b) += resp(i, j) * da * (x(i, b) - state.means(j, b));
      }
    }
    for (std::size_t a = 0; a < d; ++a)
      for (std::size_t b = a; b < d; ++b) {
        cov(a, b) /= nk;
        cov(b, a) = cov(a, b);
      }
    state.floored = constrain_covariance(cov, family, floor) || state.floored;
  }
  return true;
}

// E-step: fills responsibilities and returns the log-likelihood.
double expect(const Matrix& x, const EmState& state, Matrix& resp) {
  const std::size_t n = x.rows();
  const std::size_t k = state.weights.size();
  std::vector<Cholesky> chols;
  chols.reserve(k);
  for (const auto& cov : state.covariances) chols.push_back(cholesky(cov));
  resp = Matrix(n, k);
  double ll = 0.0;
  std::vector<double> logp(k);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      logp[j] = std::log(state.weights[j]) + log_gaussian(x.row(i), state.means.row(j), chols[j]);
    }
    const double top = *std::max_element(logp.begin(), logp.end());
    double sum = 0.0;
    for (std::size_t j = 0; j < k; ++j) sum += std::exp(logp[j] - top);
    const double lse = top + std::log(sum);
    ll += lse;
    for (std::size_t j = 0; j < k; ++j) resp(i, j) = std::exp(logp[j] - lse);
  }
  return ll;
}

std::vector<std::size_t> seed_centres(const Matrix& x, std::size_t k, std::mt19937_64& rng) {
  const std::size_t n = x.rows();
  std::vector<std::size_t> centres;
  centres.push_back(std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n))));
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  while (centres.size() < k) {
    const auto last = x.row(centres.back());
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) d2 += (x(i, c) - last[c]) * (x(i, c) - last[c]);
      dist[i] = std::min(dist[i], d2);
      total += dist[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += dist[i];
        if (acc > target && dist[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      // Every point coincides with a centre already; fall back to the next index.
      pick = centres.size() % n;
    }
    centres.push_back(pick);
  }
  return centres;
}

Matrix hard_assignment(const Matrix& x, const std::vector<std::size_t>& centres) {
  Matrix resp(x.rows(), centres.size());
  for (std::size_t i = 0; i < x.rows(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < centres.size(); ++j) {
      double d2 = 0.0;
      for (std::size_t c = 0; c < x.cols(); ++c) d2 += (x(i, c) - x(centres[j], c)) * (x(i, c) - x(centres[j], c));
      if (d2 < best_d) {
        best_d = d2;
        best = j;
      }
    }
    resp(i, best) = 1.0;
  }
  // Keep every component alive: an empty one takes a small uniform share.
  for (std::size_t j = 0; j < centres.size(); ++j) {
    double mass = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) mass += resp(i, j);
    if (mass > 0.0) continue;
    for (std::size_t i = 0; i < x.rows(); ++i) {
      for (std::size_t l = 0; l < centres.size(); ++l) resp(i, l) *= 0.9;
      resp(i, j) += 0.1;
    }
  }
  return resp;
}

struct RunResult {
  EmState state;
  double ll = -std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  std::size_t iterations = 0;
  bool ok = false;
};

RunResult run_em(const Matrix& x, Matrix resp, CovarianceFamily family, double floor) {
  RunResult run;
  double previous = -std::numeric_limits<double>::infinity();
  for (std::size_t it = 0; it < kEmMaxIterations; ++it) {
    if (!maximize(x, resp, family, floor, run.state)) return run;
    const double ll = expect(x, run.state, resp);
    run.trace.push_back(ll);
    run.iterations = it + 1;
    run.ll = ll;
    if (ll - previous < kEmTolerance) break;
    previous = ll;
  }
  run.ok = true;
  return run;
}

void order_components(GmmModel& model, const Matrix& resp) {
  const std::size_t k = model.k;
  std::vector<std::size_t> first_claim(k, std::numeric_limits<std::size_t>::max());
  for (std::size_t i = 0; i < resp.rows(); ++i) {
    const auto row = resp.row(i);
    const auto j = static_cast<std::size_t>(std::max_element(row.begin(), row.end()) - row.begin());
    first_claim[j] = std::min(first_claim[j], i);
  }
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return first_claim[a] < first_claim[b]; });
  GmmModel sorted = model;
  for (std::size_t j = 0; j < k; ++j) {
    sorted.mixing_weights[j] = model.mixing_weights[order[j]];
    sorted.covariances[j] = model.covariances[order[j]];
    for (std::size_t c = 0; c < model.dimension(); ++c) sorted.means(j, c) = model.means(order[j], c);
  }
  if (std::any_of(first_claim.begin(), first_claim.end(),
                  [](std::size_t v) { return v == std::numeric_limits<std::size_t>::max(); })) {
    sorted.degenerate = true;
  }
  model = std::move(sorted);
}

void validate_points(const Matrix& points, std::size_t k) {
  if (points.rows() == 0 || points.cols() == 0) throw DataError("gmm: no points to cluster");
  if (!points.all_finite()) throw DataError("gmm: points have non-finite coordinates");
  if (k == 0) throw UsageError("gmm: k must be at least 1");
  if (points.rows() < k) throw UsageError("gmm: fewer points than clusters");
}

}  // namespace

GmmModel fit_gmm_em(const Matrix& points, std::size_t k, CovarianceFamily family, std::uint64_t seed) {
  validate_points(points, k);
  // Constant data has no variance to scale by; fall back to the squared
  // magnitude of the coordinates so rounding noise stays far below the floor.
  double scale = mean_coordinate_variance(points);
  if (!(scale > 0.0)) {
    double sq = 0.0;
    for (const double v : points.values()) sq += v * v;
    scale = std::max(1.0, sq / static_cast<double>(points.size()));
  }
  const double floor = kVarianceFloorFraction * scale;
  RunResult best;
  for (std::size_t restart = 0; restart < kEmRestarts; ++restart) {
    std::mt19937_64 rng(seed * 1000003ULL + restart);
    const auto centres = seed_centres(points, k, rng);
    RunResult run = run_em(points, hard_assignment(points, centres), family, floor);
    if (run.ok && (!best.ok || run.ll > best.ll)) best = std::move(run);
    if (k == 1) break;  // k = 1 has a closed form; restarts add nothing
  }
  if (!best.ok) throw NumericalError("gmm: every EM restart lost a component");

  GmmModel model;
  model.k = k;
  model.family = family;
  model.n = points.rows();
  model.mixing_weights = best.state.weights;
  model.means = best.state.means;
  model.covariances = best.state.covariances;
  model.log_likelihood = best.ll;
  model.iterations = best.iterations;
  model.log_likelihood_trace = best.trace;
  model.degenerate = best.state.floored;
  Matrix resp;
  expect(points, best.state, resp);
  order_components(model, resp);
  model.bic = -2.0 * model.log_likelihood +
              static_cast<double>(model.parameter_count()) * std::log(static_cast<double>(model.n));
  return model;
}

std::vector<GmmModel> fit_bic_grid(const Matrix& points, std::size_t k_min, std::size_t k_max,
                                   std::span<const CovarianceFamily> families, std::uint64_t seed) {
  if (k_min == 0 || k_min > k_max) throw UsageError("gmm: k range must satisfy 1 <= k_min <= k_max");
  if (families.empty()) throw UsageError("gmm: no covariance families to evaluate");
  std::vector<GmmModel> fits;
  for (std::size_t k = k_min; k <= k_max && k <= points.rows(); ++k) {
    for (const auto family : families) fits.push_back(fit_gmm_em(points, k, family, seed));
  }
  if (fits.empty()) throw UsageError("gmm: k range exceeds the number of points");
  return fits;
}

GmmModel select_by_bic(const Matrix& points, std::size_t k_min, std::size_t k_max,
                       std::span<const CovarianceFamily> families, std::uint64_t seed) {
  const auto fits = fit_bic_grid(points, k_min, k_max, families, seed);
  const bool any_regular = std::any_of(fits.begin(), fits.end(), [](const GmmModel& m) { return !m.degenerate; });
  const GmmModel* best = nullptr;
  for (const auto& m : fits) {
    if (any_regular && m.degenerate) continue;
    // Grid order is k ascending then family simplest-first, so a strict
    // improvement is required to displace an earlier candidate.
    if (best == nullptr || m.bic < best->bic - 1e-9 * std::max(1.0, std::abs(best->bic))) best = &m;
  }
  return *best;
}

ClusterAssignment assign(const GmmModel& model, const Matrix& points) {
  if (points.cols() != model.dimension()) throw DataError("gmm: point dimension does not match model");
  EmState state{model.mixing_weights, model.means, model.covariances, false};
  ClusterAssignment out;
  out.k = model.k;
  expect(points, state, out.responsibilities);
  out.labels.resize(points.rows());
  for (std::size_t i = 0; i < points.rows(); ++i) {
    const auto row = out.responsibilities.row(i);
    out.labels[i] = static_cast<int>(std::max_element(row.begin(), row.end()) - row.begin()) + 1;
  }
  return out;
}

std::vector<AgeSchedule> characteristic_schedules(const ClusterAssignment& assignment, const Matrix& weights,
                                                  const ComponentBasis& basis) {
  if (assignment.labels.size() != weights.rows()) throw DataError("cluster labels do not match weight rows");
  if (weights.cols() != basis.count()) throw DataError("weight columns do not match basis components");
  std::vector<AgeSchedule> out;
  for (std::size_t cluster = 1; cluster <= assignment.k; ++cluster) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
      if (assignment.labels[i] == static_cast<int>(cluster)) members.push_back(i);
    }
    if (members.empty()) throw DataError("cluster " + std::to_string(cluster) + " has no members");
    std::vector<double> median(weights.cols());
    for (std::size_t c = 0; c < weights.cols(); ++c) {
      std::vector<double> column;
      for (const auto i : members) column.push_back(weights(i, c));
      median[c] = quantile(std::move(column), 0.5);
    }
    out.push_back(reconstruct(basis, median));
  }
  return out;
}

bool labels_contiguous(std::span<const int> labels) {
  std::vector<int> seen;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (i > 0 && labels[i] == labels[i - 1]) continue;
    if (std::find(seen.begin(), seen.end(), labels[i]) != seen.end()) return false;
    seen.push_back(labels[i]);
  }
  return true;
}

}  // namespace agesvd
