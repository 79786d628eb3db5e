#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "agesvd/matrix.hpp"
#include "agesvd/regress.hpp"
#include "agesvd/schedule.hpp"

namespace agesvd::io {

struct LabeledTable {
  std::string corner;
  std::vector<std::string> column_labels;
  std::vector<std::string> row_labels;
  Matrix values;
};

// Splits one CSV record. Double-quoted fields may contain commas; "" is a literal quote.
[[nodiscard]] std::vector<std::string> split_csv_line(std::string_view line);

// Full-precision shortest round-trip formatting.
[[nodiscard]] std::string format_number(double value);
[[nodiscard]] double parse_number(std::string_view text, std::string_view context);

[[nodiscard]] ScheduleMatrix parse_schedule_csv(std::istream& in, std::string_view source, bool log_scale = false);
[[nodiscard]] ScheduleMatrix load_schedule_csv(const std::filesystem::path& path, bool log_scale = false);
void write_schedule_csv(std::ostream& out, const ScheduleMatrix& a);

[[nodiscard]] CovariateTable parse_covariates_csv(std::istream& in, std::string_view source);
[[nodiscard]] CovariateTable load_covariates_csv(const std::filesystem::path& path);

[[nodiscard]] LabeledTable parse_labeled_csv(std::istream& in, std::string_view source);
[[nodiscard]] LabeledTable load_labeled_csv(const std::filesystem::path& path);
void write_labeled_csv(std::ostream& out, const LabeledTable& table);

}  // namespace agesvd::io
