#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace agesvd::io {

enum class SeriesStyle { line, scatter, line_and_markers };

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  SeriesStyle style = SeriesStyle::line;
};

struct PlotOptions {
  std::string title;
  std::string x_label;
  std::string y_label;
  double width = 640.0;
  double height = 420.0;
  bool identity_line = false;  // draws y = x, for predicted-vs-observed plots
};

[[nodiscard]] std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options = {});
void emit_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path,
               const PlotOptions& options = {});

}  // namespace agesvd::io
