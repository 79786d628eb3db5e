#include "cli.hpp"

#include <gtest/gtest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <filesystem>
#include <sstream>

#include "agesvd/io/csv.hpp"
#include "agesvd/io/json.hpp"
#include "test_support.hpp"

namespace agesvd::cli {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "agesvd");
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("agesvd_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

const std::string kFemale = test::data_path("mx_female.csv");
const std::string kMale = test::data_path("mx_male.csv");
const std::string kCov = test::data_path("mx_covariates.csv");

TEST_F(CliTest, DecomposeThenReconstructFullRoundTrips) {
  ASSERT_EQ(invoke({"decompose", kFemale, "--full", "--out", path("b.json"), "--weights", path("w.csv")}).code, 0);
  const Result r = invoke({"reconstruct", "--basis", path("b.json"), "--weights", path("w.csv"), "--full"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const ScheduleMatrix back = io::parse_schedule_csv(in, "out");
  const ScheduleMatrix orig = io::load_schedule_csv(kFemale);
  ASSERT_EQ(back.group_labels, orig.group_labels);
  EXPECT_LT(test::max_abs_diff(back.data, orig.data), 1e-8);
}

TEST_F(CliTest, LogScaleRoundTripBackTransforms) {
  ASSERT_EQ(invoke({"decompose", kFemale, kMale, "--log", "--concat-sexes", "--full", "--out", path("b.json"),
                    "--weights", path("w.csv")})
                .code,
            0);
  const Result r = invoke({"reconstruct", "--basis", path("b.json"), "--weights", path("w.csv")});
  ASSERT_EQ(r.code, 0) << r.err;
  std::istringstream in(r.out);
  const ScheduleMatrix back = io::parse_schedule_csv(in, "out");
  EXPECT_EQ(back.groups(), 38u);
  const ScheduleMatrix f = io::load_schedule_csv(kFemale);
  for (std::size_t g = 0; g < 19; ++g)
    for (std::size_t h = 0; h < 19; ++h) EXPECT_NEAR(back.data(g, h) / f.data(g, h), 1.0, 1e-8);
}

TEST_F(CliTest, PipelineIsByteIdenticalAcrossRuns) {
  std::vector<std::string> outputs;
  for (int run = 0; run < 2; ++run) {
    const std::string tag = std::to_string(run);
    ASSERT_EQ(invoke({"decompose", kFemale, kMale, "--log", "--concat-sexes", "-c", "2", "--out",
                      path("b" + tag + ".json"), "--weights", path("w" + tag + ".csv")})
                  .code,
              0);
    const Result reg = invoke({"regress", "--weights", path("w" + tag + ".csv"), "--covariates", kCov,
                               "--predictors", "e0,delta_pct", "--out", path("m" + tag + ".json")});
    ASSERT_EQ(reg.code, 0) << reg.err;
    const Result pred = invoke({"predict", "--basis", path("b" + tag + ".json"), "--models", path("m" + tag + ".json"),
                                "--covariates", kCov});
    ASSERT_EQ(pred.code, 0) << pred.err;
    const Result clu = invoke({"cluster", "--weights", path("w" + tag + ".csv"), "--seed", "3"});
    ASSERT_EQ(clu.code, 0) << clu.err;
    outputs.push_back(io::read_text(path("b" + tag + ".json")) + io::read_text(path("m" + tag + ".json")) + pred.out +
                      clu.out);
  }
  EXPECT_EQ(outputs[0], outputs[1]);
}

TEST_F(CliTest, PredictedVersusObservedScatterHas722Markers) {
  ASSERT_EQ(invoke({"smooth", kFemale, kMale, "--log", "--concat-sexes", "-c", "2", "--out", path("s.csv")}).code, 0);
  const Result r = invoke({"plot", "--predicted", path("s.csv"), "--observed", kFemale, kMale, "--concat-sexes",
                           "--log", "--out", path("p.svg")});
  ASSERT_EQ(r.code, 0) << r.err;
  const std::string svg = io::read_text(path("p.svg"));
  std::size_t markers = 0;
  for (auto pos = svg.find("class=\"marker\""); pos != std::string::npos; pos = svg.find("class=\"marker\"", pos + 1)) {
    ++markers;
  }
  EXPECT_EQ(markers, 722u);
  std::istringstream in(svg);
  boost::property_tree::ptree tree;
  EXPECT_NO_THROW(boost::property_tree::read_xml(in, tree));
}

TEST_F(CliTest, MetricsAndLifetableOutputs) {
  ASSERT_EQ(invoke({"smooth", kFemale, "--log", "-c", "19", "--out", path("s.csv")}).code, 0);
  const Result m = invoke({"metrics", "--predicted", path("s.csv"), "--observed", kFemale, "--log", "--format", "json"});
  ASSERT_EQ(m.code, 0) << m.err;
  EXPECT_NE(m.out.find("\"mae\""), std::string::npos);
  const Result lt = invoke({"lifetable", kFemale, "--column", "2011"});
  ASSERT_EQ(lt.code, 0) << lt.err;
  EXPECT_EQ(lt.out.substr(0, 24), "age,mx,ax,qx,lx,dx,Lx,Tx");
}

TEST_F(CliTest, ImageSubcommand) {
  io::write_text(path("in.ppm"), "P3\n2 2\n255\n10 20 30 10 20 30 10 20 30 10 20 30\n");
  const Result r = invoke({"image", path("in.ppm"), "-k", "1", "--out", path("out.ppm")});
  ASSERT_EQ(r.code, 0) << r.err;
  io::write_text(path("bad.ppm"), "P2\n1 1\n255\n0\n");
  EXPECT_EQ(invoke({"image", path("bad.ppm"), "-k", "1", "--out", path("o.ppm")}).code, 2);
}

TEST_F(CliTest, ExitCodesAndDiagnostics) {
  EXPECT_EQ(invoke({}).code, 1);
  EXPECT_EQ(invoke({"decompose", kFemale, "--bogus"}).code, 1);
  EXPECT_EQ(invoke({"decompose", kFemale, "-c", "40"}).code, 1);
  EXPECT_EQ(invoke({"cluster", "--weights", kFemale, "--k-range", "x"}).code, 1);

  const Result missing = invoke({"decompose", path("nope.csv")});
  EXPECT_EQ(missing.code, 2);
  EXPECT_NE(missing.err.find("nope.csv"), std::string::npos);
  EXPECT_TRUE(missing.out.empty());

  io::write_text(path("bad.csv"), "age,a\n0,1\n1,x\n");
  const Result bad = invoke({"decompose", path("bad.csv")});
  EXPECT_EQ(bad.code, 2);
  EXPECT_NE(bad.err.find("bad.csv:3"), std::string::npos) << bad.err;

  ASSERT_EQ(invoke({"decompose", kFemale, "--log", "--weights", path("w.csv"), "--out", path("b.json")}).code, 0);
  const Result collinear =
      invoke({"regress", "--weights", path("w.csv"), "--covariates", kCov, "--predictors", "e0,e0"});
  EXPECT_EQ(collinear.code, 3);
  EXPECT_NE(collinear.err.find("rank deficient"), std::string::npos) << collinear.err;

  EXPECT_EQ(invoke({"decompose", "--help"}).code, 0);
}

}  // namespace
}  // namespace agesvd::cli
