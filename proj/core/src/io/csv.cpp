#include "agesvd/io/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <system_error>

#include "agesvd/error.hpp"

namespace agesvd::io {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

struct Records {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;
};

Records read_records(std::istream& in) {
  Records out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (trim(line).empty()) continue;
    out.rows.push_back(split_csv_line(line));
    out.line_numbers.push_back(line_no);
  }
  return out;
}

std::string where(std::string_view source, std::size_t line, std::size_t column) {
  return std::string(source) + ":" + std::to_string(line) + ": column " + std::to_string(column + 1);
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

LabeledTable parse_table(std::istream& in, std::string_view source) {
  const Records records = read_records(in);
  if (records.rows.empty()) throw DataError(std::string(source) + ": empty file");
  const auto& header = records.rows.front();
  if (header.size() < 2) throw DataError(std::string(source) + ": header needs a label column and at least one data column");
  LabeledTable table;
  table.corner = header.front();
  table.column_labels.assign(header.begin() + 1, header.end());
  const std::size_t cols = table.column_labels.size();
  const std::size_t rows = records.rows.size() - 1;
  if (rows == 0) throw DataError(std::string(source) + ": no data rows");
  std::vector<double> body;
  body.reserve(rows * cols);
  for (std::size_t r = 1; r < records.rows.size(); ++r) {
    const auto& rec = records.rows[r];
    const std::size_t line = records.line_numbers[r];
    if (rec.size() != header.size()) {
      throw DataError(std::string(source) + ":" + std::to_string(line) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(rec.size()));
    }
    table.row_labels.push_back(rec.front());
    for (std::size_t c = 1; c < rec.size(); ++c) {
      body.push_back(parse_number(rec[c], where(source, line, c)));
    }
  }
  table.values = Matrix(rows, cols, std::move(body));
  return table;
}

void write_row(std::ostream& out, const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out << ',';
    const auto& f = fields[i];
    if (f.find_first_of(",\"\n") != std::string::npos) {
      out << '"';
      for (char ch : f) {
        if (ch == '"') out << '"';
        out << ch;
      }
      out << '"';
    } else {
      out << f;
    }
  }
  out << '\n';
}

}  // namespace

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        current.push_back('"');
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        current.push_back(ch);
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(trim(current));
      current.clear();
    } else {
      current.push_back(ch);
    }
  }
  fields.push_back(trim(current));
  return fields;
}

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

double parse_number(std::string_view text, std::string_view context) {
  const std::string cell = trim(text);
  double value = 0.0;
  const char* begin = cell.data();
  const char* end = begin + cell.size();
  if (!cell.empty() && *begin == '+') ++begin;
  const auto res = std::from_chars(begin, end, value);
  if (cell.empty() || res.ec != std::errc{} || res.ptr != end || !std::isfinite(value)) {
    throw DataError(std::string(context) + ": non-numeric cell '" + cell + "'");
  }
  return value;
}

ScheduleMatrix parse_schedule_csv(std::istream& in, std::string_view source, bool log_scale) {
  LabeledTable table = parse_table(in, source);
  if (table.corner != "age") {
    throw DataError(std::string(source) + ": first header cell must be 'age', found '" + table.corner + "'");
  }
  ScheduleMatrix a;
  a.group_labels = std::move(table.row_labels);
  a.schedule_labels = std::move(table.column_labels);
  a.data = std::move(table.values);
  a.scale = Scale::natural;
  if (!log_scale) return a;
  try {
    return log_transform(a);
  } catch (const DataError& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
}

ScheduleMatrix load_schedule_csv(const std::filesystem::path& path, bool log_scale) {
  auto in = open_input(path);
  return parse_schedule_csv(in, path.string(), log_scale);
}

void write_schedule_csv(std::ostream& out, const ScheduleMatrix& a) {
  LabeledTable table{"age", a.schedule_labels, a.group_labels, a.data};
  write_labeled_csv(out, table);
}

CovariateTable parse_covariates_csv(std::istream& in, std::string_view source) {
  const Records records = read_records(in);
  if (records.rows.size() < 2) throw DataError(std::string(source) + ": covariate file needs a header and rows");
  const auto& header = records.rows.front();
  std::vector<std::string> labels;
  std::vector<std::vector<std::optional<double>>> columns(header.size() - 1);
  for (std::size_t r = 1; r < records.rows.size(); ++r) {
    const auto& rec = records.rows[r];
    const std::size_t line = records.line_numbers[r];
    if (rec.size() != header.size()) {
      throw DataError(std::string(source) + ":" + std::to_string(line) + ": expected " + std::to_string(header.size()) +
                      " fields, found " + std::to_string(rec.size()));
    }
    labels.push_back(rec.front());
    for (std::size_t c = 1; c < rec.size(); ++c) {
      if (rec[c].empty() || rec[c] == "NA") {
        columns[c - 1].push_back(std::nullopt);
      } else {
        columns[c - 1].push_back(parse_number(rec[c], where(source, line, c)));
      }
    }
  }
  CovariateTable table(std::move(labels));
  for (std::size_t c = 1; c < header.size(); ++c) table.set_column(header[c], std::move(columns[c - 1]));
  try {
    table.validate();
  } catch (const DataError& e) {
    throw DataError(std::string(source) + ": " + e.what());
  }
  return table;
}

CovariateTable load_covariates_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_covariates_csv(in, path.string());
}

LabeledTable parse_labeled_csv(std::istream& in, std::string_view source) { return parse_table(in, source); }

LabeledTable load_labeled_csv(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_table(in, path.string());
}

void write_labeled_csv(std::ostream& out, const LabeledTable& table) {
  if (table.row_labels.size() != table.values.rows() || table.column_labels.size() != table.values.cols()) {
    throw DataError("table labels do not match its shape");
  }
  std::vector<std::string> header{table.corner};
  header.insert(header.end(), table.column_labels.begin(), table.column_labels.end());
  write_row(out, header);
  for (std::size_t r = 0; r < table.values.rows(); ++r) {
    std::vector<std::string> fields{table.row_labels[r]};
    for (std::size_t c = 0; c < table.values.cols(); ++c) fields.push_back(format_number(table.values(r, c)));
    write_row(out, fields);
  }
}

}  // namespace agesvd::io
