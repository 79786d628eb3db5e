#include "agesvd/io/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "agesvd/error.hpp"
#include "agesvd/io/json.hpp"

namespace agesvd::io {

namespace {

constexpr std::array<const char*, 8> kPalette{"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += ch;
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream ss;
  ss.precision(6);
  ss << v;
  return ss.str();
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void pad() {
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      lo -= 0.5;
      hi += 0.5;
    } else {
      const double m = 0.04 * (hi - lo);
      lo -= m;
      hi += m;
    }
  }
};

}  // namespace

std::string render_svg(const std::vector<PlotSeries>& series, const PlotOptions& options) {
  if (series.empty()) throw UsageError("plot: no series to draw");
  Range xr;
  Range yr;
  for (const auto& s : series) {
    if (s.x.empty()) throw DataError("plot: series '" + s.label + "' is empty");
    if (s.x.size() != s.y.size()) throw DataError("plot: series '" + s.label + "' has unequal x and y lengths");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        throw DataError("plot: series '" + s.label + "' has a non-finite point");
      }
      xr.add(s.x[i]);
      yr.add(s.y[i]);
    }
  }
  if (options.identity_line) {
    xr.add(yr.lo);
    xr.add(yr.hi);
    yr.add(xr.lo);
    yr.add(xr.hi);
  }
  xr.pad();
  yr.pad();

  const double left = 70, right = 150, top = 40, bottom = 55;
  const double pw = options.width - left - right;
  const double ph = options.height - top - bottom;
  const auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  const auto py = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(options.width) << "\" height=\""
      << fmt(options.height) << "\" viewBox=\"0 0 " << fmt(options.width) << ' ' << fmt(options.height) << "\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!options.title.empty()) {
    svg << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
        << escape(options.title) << "</text>\n";
  }

  svg << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n"
      << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top + ph) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
      << fmt(top + ph) << "\"/>\n"
      << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(top) << "\" x2=\"" << fmt(left) << "\" y2=\"" << fmt(top + ph)
      << "\"/>\n</g>\n<g class=\"ticks\" font-size=\"11\">\n";
  for (int t = 0; t <= 5; ++t) {
    const double xv = xr.lo + (xr.hi - xr.lo) * t / 5.0;
    const double yv = yr.lo + (yr.hi - yr.lo) * t / 5.0;
    svg << "<text x=\"" << fmt(px(xv)) << "\" y=\"" << fmt(top + ph + 16) << "\" text-anchor=\"middle\">" << fmt(xv)
        << "</text>\n"
        << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(yv) + 4) << "\" text-anchor=\"end\">" << fmt(yv)
        << "</text>\n";
  }
  svg << "</g>\n";
  if (!options.x_label.empty()) {
    svg << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(options.height - 12)
        << "\" text-anchor=\"middle\" font-size=\"13\">" << escape(options.x_label) << "</text>\n";
  }
  if (!options.y_label.empty()) {
    svg << "<text transform=\"translate(16," << fmt(top + ph / 2)
        << ") rotate(-90)\" text-anchor=\"middle\" font-size=\"13\">" << escape(options.y_label) << "</text>\n";
  }
  if (options.identity_line) {
    const double lo = std::max(xr.lo, yr.lo);
    const double hi = std::min(xr.hi, yr.hi);
    svg << "<line class=\"identity\" x1=\"" << fmt(px(lo)) << "\" y1=\"" << fmt(py(lo)) << "\" x2=\"" << fmt(px(hi))
        << "\" y2=\"" << fmt(py(hi)) << "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* colour = kPalette[s % kPalette.size()];
    svg << "<g class=\"series\" data-label=\"" << escape(ser.label) << "\">\n";
    if (ser.style != SeriesStyle::scatter && ser.x.size() > 1) {
      svg << "<polyline fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < ser.x.size(); ++i) svg << (i ? " " : "") << fmt(px(ser.x[i])) << ',' << fmt(py(ser.y[i]));
      svg << "\"/>\n";
    }
    if (ser.style != SeriesStyle::line || ser.x.size() == 1) {
      for (std::size_t i = 0; i < ser.x.size(); ++i) {
        svg << "<circle class=\"marker\" cx=\"" << fmt(px(ser.x[i])) << "\" cy=\"" << fmt(py(ser.y[i]))
            << "\" r=\"2.5\" fill=\"" << colour << "\"/>\n";
      }
    }
    svg << "</g>\n";
  }

  svg << "<g class=\"legend\" font-size=\"12\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = top + 10 + 18.0 * static_cast<double>(s);
    svg << "<g class=\"legend-entry\"><rect x=\"" << fmt(left + pw + 14) << "\" y=\"" << fmt(y - 9)
        << "\" width=\"12\" height=\"12\" fill=\"" << kPalette[s % kPalette.size()] << "\"/><text x=\""
        << fmt(left + pw + 32) << "\" y=\"" << fmt(y + 1) << "\">" << escape(series[s].label) << "</text></g>\n";
  }
  svg << "</g>\n</svg>\n";
  return svg.str();
}

void emit_plot(const std::vector<PlotSeries>& series, const std::filesystem::path& path, const PlotOptions& options) {
  write_text(path, render_svg(series, options));
}

}  // namespace agesvd::io
