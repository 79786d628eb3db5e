#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <random>
#include <sstream>

#include "agesvd/error.hpp"
#include "agesvd/io/csv.hpp"
#include "agesvd/io/json.hpp"
#include "agesvd/io/ppm.hpp"
#include "agesvd/io/svg.hpp"
#include "agesvd/regress.hpp"
#include "test_support.hpp"

namespace agesvd::io {
namespace {

std::size_t count(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
  return n;
}

TEST(Csv, ParsesScheduleWithLog) {
  std::istringstream in("\xEF\xBB\xBF" "age,2000,2001\r\n0,0.05,0.04\r\n1-4,0.01,0.02\r\n");
  const ScheduleMatrix a = parse_schedule_csv(in, "mem", true);
  EXPECT_EQ(a.group_labels, (std::vector<std::string>{"0", "1-4"}));
  EXPECT_EQ(a.schedule_labels, (std::vector<std::string>{"2000", "2001"}));
  EXPECT_EQ(a.scale, Scale::log);
  EXPECT_DOUBLE_EQ(a.data(1, 1), std::log(0.02));
}

TEST(Csv, OneColumnFile) {
  std::istringstream in("age,only\n0,1\n1,2\n");
  EXPECT_EQ(parse_schedule_csv(in, "mem").schedules(), 1u);
}

TEST(Csv, ReportsBadCellByRowAndColumn) {
  std::istringstream in("age,a,b\n0,1,2\n1,abc,3\n");
  try {
    (void)parse_schedule_csv(in, "rates.csv");
    FAIL();
  } catch (const DataError& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("rates.csv:3"), std::string::npos) << msg;
    EXPECT_NE(msg.find("column 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("'abc'"), std::string::npos) << msg;
  }
}

TEST(Csv, RejectsRaggedRowsBadHeaderAndLogOfZero) {
  std::istringstream ragged("age,a,b\n0,1\n");
  EXPECT_THROW((void)parse_schedule_csv(ragged, "m"), DataError);
  std::istringstream header("year,a\n0,1\n");
  EXPECT_THROW((void)parse_schedule_csv(header, "m"), DataError);
  std::istringstream zero("age,a\n0,0\n");
  EXPECT_THROW((void)parse_schedule_csv(zero, "m", true), DataError);
  std::istringstream empty("");
  EXPECT_THROW((void)parse_schedule_csv(empty, "m"), DataError);
}

TEST(Csv, QuotedFields) {
  EXPECT_EQ(split_csv_line(R"(a,"b,c","d ""q""")"), (std::vector<std::string>{"a", "b,c", "d \"q\""}));
}

TEST(Csv, NumbersRoundTripExactly) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> dist(-1e3, 1e3);
  for (int i = 0; i < 1000; ++i) {
    const double v = dist(rng) * std::pow(10.0, i % 20 - 10);
    EXPECT_EQ(parse_number(format_number(v), "t"), v);
  }
}

TEST(Csv, ScheduleWriteReadRoundTrip) {
  const ScheduleMatrix a = load_schedule_csv(test::data_path("mx_male.csv"));
  std::stringstream ss;
  write_schedule_csv(ss, a);
  const ScheduleMatrix b = parse_schedule_csv(ss, "mem");
  EXPECT_EQ(a.data, b.data);
  EXPECT_EQ(a.group_labels, b.group_labels);
}

TEST(Csv, CovariatesAllowEmptyCells) {
  std::istringstream in("year,hiv_prev,art_cov,e0\n2000,0.1,,60\n2001,0.2,0.05,59\n");
  const CovariateTable t = parse_covariates_csv(in, "cov");
  EXPECT_FALSE(t.row("2000").at("art_cov").has_value());
  EXPECT_DOUBLE_EQ(t.column("e0")[1], 59.0);
  EXPECT_THROW((void)t.column("art_cov"), DataError);
  std::istringstream bad("year,e0\n2000,-1\n");
  EXPECT_THROW((void)parse_covariates_csv(bad, "cov"), DataError);
}

TEST(Json, BasisRoundTripsBitForBit) {
  ComponentBasis b;
  b.group_labels = {"F_0", "F_1-4", "M_85+"};
  b.components = {{0.1, -2.0 / 3.0, 1e-300}, {std::sqrt(2.0), 5.0, -7.25}};
  b.singular_values = {123.80342948207438, 5.064553671838821};
  b.scale = Scale::log;
  b.source_id = "mx";
  const ComponentBasis c = basis_from_json(basis_to_json(b));
  EXPECT_EQ(c.components, b.components);
  EXPECT_EQ(c.singular_values, b.singular_values);
  EXPECT_EQ(c.group_labels, b.group_labels);
  EXPECT_EQ(c.scale, Scale::log);
  EXPECT_EQ(c.source_id, "mx");
  EXPECT_NE(basis_to_json(b).find("\"c\": 2"), std::string::npos);
}

TEST(Json, RejectsMalformedBasis) {
  EXPECT_THROW((void)basis_from_json("{"), DataError);
  EXPECT_THROW((void)basis_from_json(R"({"group_labels":["a"],"singular_values":[1],"components":[[1,2]],"c":1,"scale":"log"})"),
               DataError);
  EXPECT_THROW((void)basis_from_json(R"({"group_labels":["a"],"singular_values":[1],"components":[[1]],"c":2,"scale":"log"})"),
               DataError);
}

TEST(Json, ModelsRoundTrip) {
  const LinearModel m = ols_fit(std::vector<double>{1, 3, 4, 4.5}, {{"x", {0, 1, 2, 3}}}, true, "v1");
  const auto back = models_from_json(models_to_json({m}));
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].coefficients, m.coefficients);
  EXPECT_EQ(back[0].predictor_names, m.predictor_names);
  EXPECT_EQ(back[0].response_name, "v1");
  EXPECT_EQ(back[0].r_squared, m.r_squared);
}

RgbImage gradient(std::size_t w, std::size_t h) {
  RgbImage img{w, h, std::vector<std::uint8_t>(w * h * 3)};
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < w; ++x) {
      const std::size_t i = (y * w + x) * 3;
      img.pixels[i] = static_cast<std::uint8_t>((x * 255) / (w - 1));
      img.pixels[i + 1] = static_cast<std::uint8_t>(((x * y) % 97) * 2);
      img.pixels[i + 2] = static_cast<std::uint8_t>(std::lround(127.5 + 127.5 * std::sin(0.2 * x + 0.13 * y * y / 8.0)));
    }
  }
  return img;
}

TEST(Ppm, AsciiAndBinaryRoundTrip) {
  const RgbImage img = gradient(7, 5);
  for (const auto enc : {PpmEncoding::ascii, PpmEncoding::binary}) {
    std::stringstream ss;
    write_ppm(ss, img, enc);
    EXPECT_EQ(read_ppm(ss), img);
  }
}

TEST(Ppm, HeaderCommentsAndUnsupportedFormats) {
  std::istringstream commented("P3\n# made by hand\n2 1\n255\n1 2 3 4 5 6\n");
  const RgbImage img = read_ppm(commented);
  EXPECT_EQ(img.pixels, (std::vector<std::uint8_t>{1, 2, 3, 4, 5, 6}));
  std::istringstream pgm("P5\n2 2\n255\n");
  EXPECT_THROW((void)read_ppm(pgm), DataError);
  std::istringstream deep("P3\n1 1\n65535\n1 2 3\n");
  EXPECT_THROW((void)read_ppm(deep), DataError);
  std::istringstream truncated("P6\n4 4\n255\nabc");
  EXPECT_THROW((void)read_ppm(truncated), DataError);
}

TEST(Ppm, SolidColourRankOneIsExact) {
  RgbImage img{9, 6, {}};
  for (std::size_t i = 0; i < 54; ++i) {
    img.pixels.push_back(200);
    img.pixels.push_back(17);
    img.pixels.push_back(0);
  }
  EXPECT_EQ(rank_approx(img, 1), img);
}

TEST(Ppm, FullRankWithinOneByteAndErrorMonotoneInRank) {
  const RgbImage img = gradient(64, 64);
  const RgbImage full = rank_approx(img, 64);
  for (std::size_t i = 0; i < img.pixels.size(); ++i) {
    EXPECT_LE(std::abs(int(full.pixels[i]) - int(img.pixels[i])), 1);
  }
  for (std::size_t c = 0; c < 3; ++c) {
    double previous = std::numeric_limits<double>::infinity();
    for (const std::size_t k : {1, 2, 4, 8}) {
      const double err = channel_error(img, rank_approx(img, k), c);
      EXPECT_LE(err, previous) << "channel " << c << " k " << k;
      previous = err;
    }
  }
  EXPECT_THROW((void)rank_approx(img, 0), UsageError);
}

boost::property_tree::ptree parse_xml(const std::string& svg) {
  std::istringstream in(svg);
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(in, tree);
  return tree;
}

TEST(Svg, SinglePointHasOneMarker) {
  const std::string svg = render_svg({{"one", {1.0}, {2.0}, SeriesStyle::line}});
  EXPECT_EQ(count(svg, "class=\"marker\""), 1u);
  EXPECT_NO_THROW(parse_xml(svg));
}

TEST(Svg, TwoSeriesTwoLegendEntries) {
  const std::string svg = render_svg({{"a & b", {1, 2, 3}, {1, 4, 9}, SeriesStyle::line},
                                      {"c", {1, 2, 3}, {2, 3, 4}, SeriesStyle::scatter}},
                                     {"title", "x", "y"});
  EXPECT_EQ(count(svg, "class=\"legend-entry\""), 2u);
  EXPECT_NE(svg.find("a &amp; b"), std::string::npos);
  EXPECT_NO_THROW(parse_xml(svg));
}

TEST(Svg, Errors) {
  EXPECT_THROW((void)render_svg({}), UsageError);
  EXPECT_THROW((void)render_svg({{"e", {}, {}, SeriesStyle::line}}), DataError);
  EXPECT_THROW((void)render_svg({{"u", {1, 2}, {1}, SeriesStyle::line}}), DataError);
}

}  // namespace
}  // namespace agesvd::io
