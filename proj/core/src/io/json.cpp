#include "agesvd/io/json.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "agesvd/error.hpp"
#include "agesvd/io/csv.hpp"

namespace agesvd::io {

namespace {

using nlohmann::json;

json number(double v) { return format_number(v); }

json numbers(const std::vector<double>& values) {
  json out = json::array();
  for (const double v : values) out.push_back(number(v));
  return out;
}

double read_number(const json& j, const char* field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) return parse_number(j.get<std::string>(), field);
  throw DataError(std::string("json: field '") + field + "' is not a number");
}

std::vector<double> read_numbers(const json& j, const char* field) {
  if (!j.is_array()) throw DataError(std::string("json: field '") + field + "' is not an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const auto& v : j) out.push_back(read_number(v, field));
  return out;
}

const json& require(const json& j, const char* field) {
  if (!j.is_object() || !j.contains(field)) throw DataError(std::string("json: missing field '") + field + "'");
  return j.at(field);
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("json: ") + e.what());
  }
}

}  // namespace

std::string basis_to_json(const ComponentBasis& basis) {
  json j;
  j["group_labels"] = basis.group_labels;
  j["singular_values"] = numbers(basis.singular_values);
  json comps = json::array();
  for (const auto& c : basis.components) comps.push_back(numbers(c));
  j["components"] = std::move(comps);
  j["c"] = basis.count();
  j["scale"] = to_string(basis.scale);
  j["source_id"] = basis.source_id;
  return j.dump(2) + "\n";
}

ComponentBasis basis_from_json(const std::string& text) {
  const json j = parse(text);
  try {
    ComponentBasis b;
    b.group_labels = require(j, "group_labels").get<std::vector<std::string>>();
    b.singular_values = read_numbers(require(j, "singular_values"), "singular_values");
    for (const auto& c : require(j, "components")) b.components.push_back(read_numbers(c, "components"));
    b.scale = parse_scale(require(j, "scale").get<std::string>());
    b.source_id = j.value("source_id", std::string{});
    const auto c = require(j, "c").get<std::size_t>();
    if (c != b.components.size() || c != b.singular_values.size() || c == 0) {
      throw DataError("json: basis component count is inconsistent");
    }
    for (const auto& comp : b.components) {
      if (comp.size() != b.group_labels.size()) throw DataError("json: component length differs from group labels");
    }
    return b;
  } catch (const json::exception& e) {
    throw DataError(std::string("json: ") + e.what());
  }
}

std::string models_to_json(const std::vector<LinearModel>& models) {
  json arr = json::array();
  for (const auto& m : models) {
    json j;
    j["response"] = m.response_name;
    j["predictors"] = m.predictor_names;
    j["intercept"] = m.has_intercept;
    j["coefficients"] = numbers(m.coefficients);
    j["standard_errors"] = numbers(m.standard_errors);
    j["t_values"] = numbers(m.t_values);
    j["p_values"] = numbers(m.p_values);
    j["r_squared"] = number(m.r_squared);
    j["n"] = m.n;
    arr.push_back(std::move(j));
  }
  json root;
  root["models"] = std::move(arr);
  return root.dump(2) + "\n";
}

std::vector<LinearModel> models_from_json(const std::string& text) {
  const json root = parse(text);
  try {
    std::vector<LinearModel> out;
    for (const auto& j : require(root, "models")) {
      LinearModel m;
      m.response_name = j.value("response", std::string{});
      m.predictor_names = require(j, "predictors").get<std::vector<std::string>>();
      m.has_intercept = require(j, "intercept").get<bool>();
      m.coefficients = read_numbers(require(j, "coefficients"), "coefficients");
      if (j.contains("standard_errors")) m.standard_errors = read_numbers(j.at("standard_errors"), "standard_errors");
      if (j.contains("t_values")) m.t_values = read_numbers(j.at("t_values"), "t_values");
      if (j.contains("p_values")) m.p_values = read_numbers(j.at("p_values"), "p_values");
      if (j.contains("r_squared")) m.r_squared = read_number(j.at("r_squared"), "r_squared");
      m.n = j.value("n", std::size_t{0});
      const std::size_t expected = m.predictor_names.size() + (m.has_intercept ? 1 : 0);
      if (m.coefficients.size() != expected) throw DataError("json: model coefficient count does not match predictors");
      out.push_back(std::move(m));
    }
    return out;
  } catch (const json::exception& e) {
    throw DataError(std::string("json: ") + e.what());
  }
}

std::string gmm_to_json(const GmmModel& model, const ClusterAssignment& assignment,
                        const std::vector<std::string>& labels) {
  json j;
  j["k"] = model.k;
  j["family"] = to_string(model.family);
  j["log_likelihood"] = number(model.log_likelihood);
  j["bic"] = number(model.bic);
  j["iterations"] = model.iterations;
  j["mixing_weights"] = numbers(model.mixing_weights);
  json means = json::array();
  for (std::size_t r = 0; r < model.means.rows(); ++r) {
    const auto row = model.means.row(r);
    means.push_back(numbers({row.begin(), row.end()}));
  }
  j["means"] = std::move(means);
  json covs = json::array();
  for (const auto& cov : model.covariances) {
    json rows = json::array();
    for (std::size_t r = 0; r < cov.rows(); ++r) {
      const auto row = cov.row(r);
      rows.push_back(numbers({row.begin(), row.end()}));
    }
    covs.push_back(std::move(rows));
  }
  j["covariances"] = std::move(covs);
  json members = json::array();
  for (std::size_t i = 0; i < assignment.labels.size(); ++i) {
    members.push_back({{"label", i < labels.size() ? labels[i] : std::to_string(i + 1)},
                       {"cluster", assignment.labels[i]}});
  }
  j["assignments"] = std::move(members);
  return j.dump(2) + "\n";
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw DataError("failed writing '" + path.string() + "'");
}

}  // namespace agesvd::io
