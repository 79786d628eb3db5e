#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <CLI/CLI.hpp>
#include <nlohmann/json.hpp>

#include "agesvd/cluster.hpp"
#include "agesvd/error.hpp"
#include "agesvd/io/csv.hpp"
#include "agesvd/io/json.hpp"
#include "agesvd/io/ppm.hpp"
#include "agesvd/io/svg.hpp"
#include "agesvd/measures.hpp"
#include "agesvd/regress.hpp"
#include "agesvd/schedule.hpp"

namespace agesvd::cli {

namespace {

namespace fs = std::filesystem;
using io::format_number;
using io::LabeledTable;

struct ScheduleInputs {
  std::vector<std::string> files;
  bool log = false;
  bool concat = false;
};

void add_schedule_inputs(CLI::App* cmd, ScheduleInputs& in, const std::string& name = "inputs") {
  cmd->add_option(name, in.files, "schedule CSV file(s); female then male with --concat-sexes")->required();
  cmd->add_flag("--log", in.log, "take the natural log of every cell on load");
  cmd->add_flag("--concat-sexes", in.concat, "stack two files (female, male) into one matrix");
}

ScheduleMatrix load_inputs(const std::vector<std::string>& files, bool log, bool concat) {
  if (concat) {
    if (files.size() != 2) throw UsageError("--concat-sexes needs exactly two input files (female, male)");
    return concat_sexes(io::load_schedule_csv(files[0], log), io::load_schedule_csv(files[1], log));
  }
  if (files.size() != 1) throw UsageError("expected one input file (use --concat-sexes for two)");
  return io::load_schedule_csv(files[0], log);
}

ScheduleMatrix load_inputs(const ScheduleInputs& in) { return load_inputs(in.files, in.log, in.concat); }

std::string source_id(const std::vector<std::string>& files) {
  std::string id;
  for (const auto& f : files) id += (id.empty() ? "" : "+") + fs::path(f).filename().string();
  return id;
}

void emit(const std::string& text, const std::string& path, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
  } else {
    io::write_text(path, text);
  }
}

std::string schedule_csv(const ScheduleMatrix& a) {
  std::ostringstream ss;
  io::write_schedule_csv(ss, a);
  return ss.str();
}

std::string table_csv(const LabeledTable& t) {
  std::ostringstream ss;
  io::write_labeled_csv(ss, t);
  return ss.str();
}

LabeledTable weights_table(const Matrix& weights, const std::vector<std::string>& labels) {
  LabeledTable t;
  t.corner = "schedule";
  for (std::size_t c = 0; c < weights.cols(); ++c) t.column_labels.push_back("v" + std::to_string(c + 1));
  t.row_labels = labels;
  t.values = weights;
  return t;
}

ScheduleMatrix to_natural(ScheduleMatrix a, bool keep_log) {
  if (keep_log || a.scale == Scale::natural) return a;
  return exp_transform(a);
}

void check_format(const std::string& format) {
  if (format != "csv" && format != "json") throw UsageError("--format must be csv or json");
}

// ---- decompose -------------------------------------------------------------

struct DecomposeOpts {
  ScheduleInputs in;
  std::size_t components = 2;
  bool full = false;
  std::string out, weights, summary, format = "json";
};

void run_decompose(const DecomposeOpts& o, std::ostream& out) {
  check_format(o.format);
  const ScheduleMatrix a = load_inputs(o.in);
  std::size_t c = o.components;
  if (o.full) c = numerical_rank(a.data);
  const Decomposition d = decompose(a, c, source_id(o.in.files));
  if (o.format == "json") {
    emit(io::basis_to_json(d.basis), o.out, out);
  } else {
    LabeledTable t;
    t.corner = "age";
    t.row_labels = d.basis.group_labels;
    for (std::size_t i = 0; i < d.basis.count(); ++i) t.column_labels.push_back("L" + std::to_string(i + 1));
    t.values = Matrix::from_columns(d.basis.components);
    emit(table_csv(t), o.out, out);
  }
  if (!o.weights.empty()) io::write_text(o.weights, table_csv(weights_table(d.weights, d.schedule_labels)));
  if (!o.summary.empty()) {
    LabeledTable t;
    t.corner = "component";
    t.column_labels = {"singular_value", "explained_share"};
    t.values = Matrix(d.singular_values.size(), 2);
    for (std::size_t i = 0; i < d.singular_values.size(); ++i) {
      t.row_labels.push_back(std::to_string(i + 1));
      t.values(i, 0) = d.singular_values[i];
      t.values(i, 1) = d.explained_share[i];
    }
    io::write_text(o.summary, table_csv(t));
  }
}

// ---- reconstruct -----------------------------------------------------------

struct ReconstructOpts {
  std::string basis, weights, out;
  std::size_t components = 0;
  bool full = false;
  bool keep_log = false;
};

ComponentBasis truncate_basis(ComponentBasis b, std::size_t c) {
  if (c == 0 || c == b.count()) return b;
  if (c > b.count()) throw UsageError("basis holds only " + std::to_string(b.count()) + " components");
  b.components.resize(c);
  b.singular_values.resize(c);
  return b;
}

void run_reconstruct(const ReconstructOpts& o, std::ostream& out) {
  if (o.full && o.components != 0) throw UsageError("--full and --components are mutually exclusive");
  const ComponentBasis basis = truncate_basis(io::basis_from_json(io::read_text(o.basis)), o.components);
  const LabeledTable w = io::load_labeled_csv(o.weights);
  if (w.values.cols() < basis.count()) throw DataError(o.weights + ": fewer weight columns than components");
  const ScheduleMatrix a = reconstruct_matrix(basis, w.values.leading_columns(basis.count()), w.row_labels);
  emit(schedule_csv(to_natural(a, o.keep_log)), o.out, out);
}

// ---- smooth ----------------------------------------------------------------

struct SmoothOpts {
  ScheduleInputs in;
  std::size_t components = 2;
  bool keep_log = false;
  std::string out;
};

void run_smooth(const SmoothOpts& o, std::ostream& out) {
  const ScheduleMatrix a = load_inputs(o.in);
  emit(schedule_csv(to_natural(smooth_matrix(a, o.components), o.keep_log)), o.out, out);
}

// ---- fit -------------------------------------------------------------------

struct FitOpts {
  std::vector<std::string> files;
  bool concat = false;
  std::string basis, out;
  bool least_squares = false;
};

void run_fit(const FitOpts& o, std::ostream& out) {
  const ComponentBasis basis = io::basis_from_json(io::read_text(o.basis));
  const ScheduleMatrix a = load_inputs(o.files, basis.scale == Scale::log, o.concat);
  if (a.group_labels != basis.group_labels) throw DataError("input age groups do not match the basis age groups");
  Matrix weights(a.schedules(), basis.count());
  for (std::size_t h = 0; h < a.schedules(); ++h) {
    const auto fit = o.least_squares ? fit_weights_least_squares(a.column(h), basis) : fit_weights(a.column(h), basis);
    for (std::size_t i = 0; i < basis.count(); ++i) weights(h, i) = fit.betas[i];
  }
  emit(table_csv(weights_table(weights, a.schedule_labels)), o.out, out);
}

// ---- regress ---------------------------------------------------------------

struct RegressOpts {
  std::string weights, covariates, out, format = "json";
  std::vector<std::string> predictors;
  bool no_intercept = false;
};

std::vector<LinearModel> fit_models(const LabeledTable& w, const CovariateTable& cov,
                                    const std::vector<std::string>& predictors, bool intercept) {
  std::vector<LinearModel> models;
  std::vector<NamedColumn> columns;
  for (const auto& p : predictors) columns.push_back({p, cov.column_for(p, w.row_labels)});
  for (std::size_t c = 0; c < w.values.cols(); ++c) {
    models.push_back(ols_fit(w.values.column(c), columns, intercept, w.column_labels[c]));
  }
  return models;
}

void run_regress(const RegressOpts& o, std::ostream& out) {
  check_format(o.format);
  if (o.predictors.empty()) throw UsageError("--predictors is required");
  const LabeledTable w = io::load_labeled_csv(o.weights);
  const CovariateTable cov = with_derived_delta(io::load_covariates_csv(o.covariates));
  const auto models = fit_models(w, cov, o.predictors, !o.no_intercept);
  if (o.format == "json") {
    emit(io::models_to_json(models), o.out, out);
    return;
  }
  std::ostringstream ss;
  ss << "response,term,estimate,std_error,t_value,p_value,r_squared,n\n";
  for (const auto& m : models) {
    std::vector<std::string> terms;
    if (m.has_intercept) terms.push_back("(intercept)");
    terms.insert(terms.end(), m.predictor_names.begin(), m.predictor_names.end());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      ss << m.response_name << ',' << terms[i] << ',' << format_number(m.coefficients[i]) << ','
         << format_number(m.standard_errors[i]) << ',' << format_number(m.t_values[i]) << ','
         << format_number(m.p_values[i]) << ',' << format_number(m.r_squared) << ',' << m.n << '\n';
    }
  }
  emit(ss.str(), o.out, out);
}

// ---- predict ---------------------------------------------------------------

struct PredictOpts {
  std::string basis, models, covariates, out;
  std::vector<std::string> labels;
  bool keep_log = false;
};

void run_predict(const PredictOpts& o, std::ostream& out) {
  const ComponentBasis basis = io::basis_from_json(io::read_text(o.basis));
  const auto models = io::models_from_json(io::read_text(o.models));
  const CovariateTable cov = with_derived_delta(io::load_covariates_csv(o.covariates));
  const auto labels = o.labels.empty() ? cov.labels() : o.labels;
  emit(schedule_csv(to_natural(predict_matrix(basis, models, cov, labels), o.keep_log)), o.out, out);
}

// ---- metrics ---------------------------------------------------------------

struct MetricsOpts {
  std::string predicted;
  std::vector<std::string> observed;
  bool log = false;
  bool concat = false;
  std::string out, format = "csv";
};

void run_metrics(const MetricsOpts& o, std::ostream& out) {
  check_format(o.format);
  const ScheduleMatrix pred = io::load_schedule_csv(o.predicted, o.log);
  const ScheduleMatrix obs = load_inputs(o.observed, o.log, o.concat);
  if (pred.group_labels != obs.group_labels || pred.schedule_labels != obs.schedule_labels) {
    throw DataError("predicted and observed labels differ");
  }
  const ErrorMetrics m = error_metrics(pred, obs);
  static constexpr std::array<const char*, 5> names{"q01", "q25", "q50", "q75", "q99"};
  if (o.format == "json") {
    nlohmann::json j;
    j["mae"] = format_number(m.mae);
    for (std::size_t i = 0; i < names.size(); ++i) j[names[i]] = format_number(m.quantiles[i]);
    emit(j.dump(2) + "\n", o.out, out);
    return;
  }
  std::ostringstream ss;
  ss << "mae";
  for (const auto* n : names) ss << ',' << n;
  ss << '\n' << format_number(m.mae);
  for (const double q : m.quantiles) ss << ',' << format_number(q);
  ss << '\n';
  emit(ss.str(), o.out, out);
}

// ---- cluster ---------------------------------------------------------------

struct ClusterOpts {
  std::string weights, k_range = "1:6", out, format = "json", basis, schedules_out;
  std::vector<std::string> families{"all"};
  std::size_t components = 0;
  std::uint64_t seed = 0;
  bool keep_log = false;
};

std::pair<std::size_t, std::size_t> parse_k_range(const std::string& text) {
  const auto sep = text.find_first_of(":-");
  try {
    std::size_t used = 0;
    if (sep == std::string::npos) {
      const auto k = std::stoul(text, &used);
      if (used != text.size()) throw std::invalid_argument(text);
      return {k, k};
    }
    const auto lo = std::stoul(text.substr(0, sep), &used);
    if (used != sep) throw std::invalid_argument(text);
    const auto rest = text.substr(sep + 1);
    const auto hi = std::stoul(rest, &used);
    if (used != rest.size()) throw std::invalid_argument(text);
    return {lo, hi};
  } catch (const std::logic_error&) {
    throw UsageError("--k-range must look like 1:6, got '" + text + "'");
  }
}

void run_cluster(const ClusterOpts& o, std::ostream& out) {
  check_format(o.format);
  const LabeledTable w = io::load_labeled_csv(o.weights);
  const std::size_t d = o.components == 0 ? w.values.cols() : o.components;
  if (d > w.values.cols()) throw UsageError("--components exceeds the weight columns");
  const Matrix points = w.values.leading_columns(d);
  std::vector<CovarianceFamily> families;
  for (const auto& f : o.families) {
    if (f == "all") {
      families = {CovarianceFamily::spherical, CovarianceFamily::diagonal, CovarianceFamily::full};
      break;
    }
    families.push_back(parse_family(f));
  }
  const auto [k_min, k_max] = parse_k_range(o.k_range);
  const GmmModel model = select_by_bic(points, k_min, k_max, families, o.seed);
  const ClusterAssignment assignment = assign(model, points);
  if (o.format == "json") {
    emit(io::gmm_to_json(model, assignment, w.row_labels), o.out, out);
  } else {
    std::ostringstream ss;
    ss << "schedule,cluster\n";
    for (std::size_t i = 0; i < w.row_labels.size(); ++i) ss << w.row_labels[i] << ',' << assignment.labels[i] << '\n';
    emit(ss.str(), o.out, out);
  }
  if (!o.schedules_out.empty()) {
    if (o.basis.empty()) throw UsageError("--schedules-out needs --basis");
    const ComponentBasis basis = truncate_basis(io::basis_from_json(io::read_text(o.basis)), d);
    const auto patterns = characteristic_schedules(assignment, points, basis);
    ScheduleMatrix a;
    a.group_labels = basis.group_labels;
    a.scale = basis.scale;
    a.data = Matrix(basis.groups(), patterns.size());
    for (std::size_t k = 0; k < patterns.size(); ++k) {
      a.schedule_labels.push_back("cluster" + std::to_string(k + 1));
      a.data.set_column(k, patterns[k].values);
    }
    io::write_text(o.schedules_out, schedule_csv(to_natural(a, o.keep_log)));
  }
}

// ---- image -----------------------------------------------------------------

struct ImageOpts {
  std::string input, out;
  std::size_t rank = 1;
  bool ascii = false;
};

void run_image(const ImageOpts& o) {
  const auto img = io::rank_approx(io::load_ppm(o.input), o.rank);
  io::save_ppm(o.out, img, o.ascii ? io::PpmEncoding::ascii : io::PpmEncoding::binary);
}

// ---- lifetable -------------------------------------------------------------

struct LifetableOpts {
  std::string input, column, out, format = "csv";
};

void run_lifetable(const LifetableOpts& o, std::ostream& out) {
  check_format(o.format);
  const ScheduleMatrix a = io::load_schedule_csv(o.input);
  if (!o.column.empty()) {
    const auto it = std::find(a.schedule_labels.begin(), a.schedule_labels.end(), o.column);
    if (it == a.schedule_labels.end()) throw UsageError("no schedule column '" + o.column + "'");
    const LifeTable t =
        life_table_from_mx(a.column(static_cast<std::size_t>(it - a.schedule_labels.begin())));
    LabeledTable tab;
    tab.corner = "age";
    tab.column_labels = {"mx", "ax", "qx", "lx", "dx", "Lx", "Tx", "ex"};
    tab.row_labels = a.group_labels;
    tab.values = Matrix::from_columns({t.mx, t.ax, t.qx, t.lx, t.dx, t.Lx, t.Tx, t.ex});
    if (o.format == "csv") {
      emit(table_csv(tab), o.out, out);
    } else {
      nlohmann::json j;
      j["schedule"] = o.column;
      j["age"] = tab.row_labels;
      for (std::size_t c = 0; c < tab.column_labels.size(); ++c) {
        nlohmann::json col = nlohmann::json::array();
        for (const double v : tab.values.column(c)) col.push_back(format_number(v));
        j[tab.column_labels[c]] = std::move(col);
      }
      emit(j.dump(2) + "\n", o.out, out);
    }
    return;
  }
  LabeledTable tab;
  tab.corner = "schedule";
  tab.column_labels = {"e0", "q5_0", "q45_15"};
  tab.values = Matrix(a.schedules(), 3);
  for (std::size_t h = 0; h < a.schedules(); ++h) {
    const LifeTable t = life_table_from_mx(a.column(h));
    tab.row_labels.push_back(a.schedule_labels[h]);
    tab.values(h, 0) = t.e0();
    tab.values(h, 1) = interval_death_prob(t, 0, 5);
    tab.values(h, 2) = interval_death_prob(t, 15, 45);
  }
  if (o.format == "csv") {
    emit(table_csv(tab), o.out, out);
  } else {
    nlohmann::json j = nlohmann::json::array();
    for (std::size_t h = 0; h < a.schedules(); ++h) {
      j.push_back({{"schedule", tab.row_labels[h]},
                   {"e0", format_number(tab.values(h, 0))},
                   {"q5_0", format_number(tab.values(h, 1))},
                   {"q45_15", format_number(tab.values(h, 2))}});
    }
    emit(j.dump(2) + "\n", o.out, out);
  }
}

// ---- plot ------------------------------------------------------------------

struct PlotOpts {
  std::string schedules, weights, predicted, out, title;
  std::vector<std::string> observed, columns;
  bool log = false;
  bool concat = false;
};

double label_position(const std::string& label, std::size_t index) {
  try {
    std::size_t used = 0;
    const double v = std::stod(label, &used);
    if (used == label.size()) return v;
  } catch (const std::logic_error&) {
  }
  return static_cast<double>(index + 1);
}

void run_plot(const PlotOpts& o, std::ostream& out) {
  const int modes = !o.schedules.empty() + !o.weights.empty() + !o.predicted.empty();
  if (modes != 1) throw UsageError("plot needs exactly one of --schedules, --weights, --predicted");
  std::vector<io::PlotSeries> series;
  io::PlotOptions opts;
  opts.title = o.title;
  if (!o.schedules.empty()) {
    const ScheduleMatrix a = io::load_schedule_csv(o.schedules, o.log);
    std::vector<double> x;
    for (std::size_t g = 0; g < a.groups(); ++g) {
      try {
        x.push_back(parse_age_group(a.group_labels[g]).start);
      } catch (const Error&) {
        x.push_back(static_cast<double>(g));
      }
    }
    for (std::size_t h = 0; h < a.schedules(); ++h) {
      if (!o.columns.empty() &&
          std::find(o.columns.begin(), o.columns.end(), a.schedule_labels[h]) == o.columns.end()) {
        continue;
      }
      series.push_back({a.schedule_labels[h], x, a.data.column(h), io::SeriesStyle::line_and_markers});
    }
    opts.x_label = "age";
    opts.y_label = o.log ? "log rate" : "rate";
  } else if (!o.weights.empty()) {
    const LabeledTable w = io::load_labeled_csv(o.weights);
    std::vector<double> x;
    for (std::size_t i = 0; i < w.row_labels.size(); ++i) x.push_back(label_position(w.row_labels[i], i));
    for (std::size_t c = 0; c < w.values.cols(); ++c) {
      series.push_back({w.column_labels[c], x, w.values.column(c), io::SeriesStyle::line_and_markers});
    }
    opts.x_label = w.corner;
    opts.y_label = "weight";
  } else {
    if (o.observed.empty()) throw UsageError("--predicted needs --observed");
    const ScheduleMatrix pred = io::load_schedule_csv(o.predicted, o.log);
    const ScheduleMatrix obs = load_inputs(o.observed, o.log, o.concat);
    if (pred.data.rows() != obs.data.rows() || pred.data.cols() != obs.data.cols()) {
      throw DataError("predicted and observed shapes differ");
    }
    const auto v = obs.data.values();
    const auto p = pred.data.values();
    series.push_back({"schedules", {v.begin(), v.end()}, {p.begin(), p.end()}, io::SeriesStyle::scatter});
    opts.x_label = "observed";
    opts.y_label = "predicted";
    opts.identity_line = true;
  }
  if (series.empty()) throw UsageError("plot: no columns selected");
  emit(io::render_svg(series, opts), o.out, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Age-schedule decomposition, prediction and clustering", "agesvd"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "agesvd 0.1.0");

  DecomposeOpts dec;
  auto* c_dec = app.add_subcommand("decompose", "SVD component basis and weights of a schedule matrix");
  add_schedule_inputs(c_dec, dec.in);
  c_dec->add_option("-c,--components", dec.components, "number of components")->check(CLI::PositiveNumber);
  c_dec->add_flag("--full", dec.full, "keep every component up to the numerical rank");
  c_dec->add_option("--out", dec.out, "basis output (default stdout)");
  c_dec->add_option("--weights", dec.weights, "write per-schedule weights CSV here");
  c_dec->add_option("--summary", dec.summary, "write singular values and explained shares CSV here");
  c_dec->add_option("--format", dec.format, "json basis or csv components");

  ReconstructOpts rec;
  auto* c_rec = app.add_subcommand("reconstruct", "rebuild schedules from a basis and weights");
  c_rec->add_option("--basis", rec.basis)->required();
  c_rec->add_option("--weights", rec.weights)->required();
  c_rec->add_option("-c,--components", rec.components, "use only the leading components");
  c_rec->add_flag("--full", rec.full, "use every component in the basis");
  c_rec->add_flag("--log", rec.keep_log, "keep log-scale output instead of exponentiating");
  c_rec->add_option("--out", rec.out);

  SmoothOpts smo;
  auto* c_smo = app.add_subcommand("smooth", "rank-c reconstruction of every schedule");
  add_schedule_inputs(c_smo, smo.in);
  c_smo->add_option("-c,--components", smo.components)->check(CLI::PositiveNumber);
  c_smo->add_flag("--keep-log", smo.keep_log, "leave log-scale output unexponentiated");
  c_smo->add_option("--out", smo.out);

  FitOpts fit;
  auto* c_fit = app.add_subcommand("fit", "fit component weights of new schedules against a basis");
  c_fit->add_option("inputs", fit.files)->required();
  c_fit->add_flag("--concat-sexes", fit.concat);
  c_fit->add_option("--basis", fit.basis)->required();
  c_fit->add_flag("--least-squares", fit.least_squares, "QR least squares instead of projection");
  c_fit->add_option("--out", fit.out);

  RegressOpts reg;
  auto* c_reg = app.add_subcommand("regress", "OLS of each weight column on covariates");
  c_reg->add_option("--weights", reg.weights)->required();
  c_reg->add_option("--covariates", reg.covariates)->required();
  c_reg->add_option("--predictors", reg.predictors)->delimiter(',')->required();
  c_reg->add_flag("--no-intercept", reg.no_intercept);
  c_reg->add_option("--out", reg.out);
  c_reg->add_option("--format", reg.format);

  PredictOpts pre;
  auto* c_pre = app.add_subcommand("predict", "predict schedules from covariates");
  c_pre->add_option("--basis", pre.basis)->required();
  c_pre->add_option("--models", pre.models)->required();
  c_pre->add_option("--covariates", pre.covariates)->required();
  c_pre->add_option("--labels", pre.labels, "covariate rows to predict (default all)")->delimiter(',');
  c_pre->add_flag("--log", pre.keep_log, "keep log-scale output");
  c_pre->add_option("--out", pre.out);

  MetricsOpts met;
  auto* c_met = app.add_subcommand("metrics", "mean and quantiles of absolute prediction error");
  c_met->add_option("--predicted", met.predicted)->required();
  c_met->add_option("--observed", met.observed)->required();
  c_met->add_flag("--log", met.log, "compare on the log scale");
  c_met->add_flag("--concat-sexes", met.concat);
  c_met->add_option("--out", met.out);
  c_met->add_option("--format", met.format);

  ClusterOpts clu;
  auto* c_clu = app.add_subcommand("cluster", "Gaussian mixture clustering of weight rows");
  c_clu->add_option("--weights", clu.weights)->required();
  c_clu->add_option("--k-range", clu.k_range, "e.g. 1:6");
  c_clu->add_option("--family", clu.families, "spherical, diagonal, full or all")->delimiter(',');
  c_clu->add_option("-c,--components", clu.components, "use the leading weight columns (default all)");
  c_clu->add_option("--seed", clu.seed);
  c_clu->add_option("--basis", clu.basis, "basis for characteristic schedules");
  c_clu->add_option("--schedules-out", clu.schedules_out, "write median-weight schedules per cluster");
  c_clu->add_flag("--log", clu.keep_log, "keep log-scale characteristic schedules");
  c_clu->add_option("--out", clu.out);
  c_clu->add_option("--format", clu.format);

  ImageOpts img;
  auto* c_img = app.add_subcommand("image", "per-channel rank-k approximation of a PPM image");
  c_img->add_option("input", img.input)->required();
  c_img->add_option("-k,--rank", img.rank)->check(CLI::PositiveNumber);
  c_img->add_option("--out", img.out)->required();
  c_img->add_flag("--ascii", img.ascii, "write P3 instead of P6");

  LifetableOpts lt;
  auto* c_lt = app.add_subcommand("lifetable", "abridged life tables from mortality rates");
  c_lt->add_option("input", lt.input)->required();
  c_lt->add_option("--column", lt.column, "full table for one schedule");
  c_lt->add_option("--out", lt.out);
  c_lt->add_option("--format", lt.format);

  PlotOpts plt;
  auto* c_plt = app.add_subcommand("plot", "SVG line or scatter plot");
  c_plt->add_option("--schedules", plt.schedules);
  c_plt->add_option("--columns", plt.columns)->delimiter(',');
  c_plt->add_option("--weights", plt.weights);
  c_plt->add_option("--predicted", plt.predicted);
  c_plt->add_option("--observed", plt.observed);
  c_plt->add_flag("--log", plt.log);
  c_plt->add_flag("--concat-sexes", plt.concat);
  c_plt->add_option("--title", plt.title);
  c_plt->add_option("--out", plt.out);

  std::vector<std::string> rest(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rest);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "agesvd: " << e.what() << '\n';
    return static_cast<int>(ExitCode::usage);
  }

  try {
    if (*c_dec) run_decompose(dec, out);
    else if (*c_rec) run_reconstruct(rec, out);
    else if (*c_smo) run_smooth(smo, out);
    else if (*c_fit) run_fit(fit, out);
    else if (*c_reg) run_regress(reg, out);
    else if (*c_pre) run_predict(pre, out);
    else if (*c_met) run_metrics(met, out);
    else if (*c_clu) run_cluster(clu, out);
    else if (*c_img) run_image(img);
    else if (*c_lt) run_lifetable(lt, out);
    else if (*c_plt) run_plot(plt, out);
  } catch (const Error& e) {
    err << "agesvd: " << e.what() << '\n';
    return static_cast<int>(e.code());
  } catch (const std::exception& e) {
    err << "agesvd: internal error: " << e.what() << '\n';
    return static_cast<int>(ExitCode::numerical);
  }
  return 0;
}

}  // namespace agesvd::cli
