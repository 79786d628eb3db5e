#include "agesvd/schedule.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "agesvd/error.hpp"
#include "agesvd/io/csv.hpp"
#include "test_support.hpp"

namespace agesvd {
namespace {

ScheduleMatrix small_matrix() {
  ScheduleMatrix a;
  a.group_labels = {"0", "1-4", "5-9"};
  a.schedule_labels = {"a", "b"};
  a.data = Matrix{{2, 1}, {1, 1}, {1, 2}};
  return a;
}

ScheduleMatrix am() {
  return concat_sexes(io::load_schedule_csv(test::data_path("mx_female.csv"), true),
                      io::load_schedule_csv(test::data_path("mx_male.csv"), true));
}

TEST(Schedule, LogTransformAndBack) {
  ScheduleMatrix a = small_matrix();
  const ScheduleMatrix l = log_transform(a);
  EXPECT_EQ(l.scale, Scale::log);
  EXPECT_NEAR(l.data(0, 0), std::log(2.0), 1e-15);
  EXPECT_THROW((void)log_transform(l), DataError);
  EXPECT_LT(test::max_abs_diff(exp_transform(l).data, a.data), 1e-14);
  a.data(1, 1) = 0.0;
  try {
    (void)log_transform(a);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find("'1-4'"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("'b'"), std::string::npos);
  }
}

TEST(Schedule, DecomposeShapesAndComponentScaling) {
  const Decomposition d = decompose(small_matrix(), 1, "example");
  ASSERT_EQ(d.basis.count(), 1u);
  EXPECT_EQ(d.basis.source_id, "example");
  EXPECT_NEAR(d.basis.singular_values[0], std::sqrt(11.0), 1e-12);
  // Lambda_1 = s_1 u_1, and the first column's weight reproduces (1.5, 1, 1.5)
  const AgeSchedule x1 = reconstruct(d.basis, d.weights.row(0));
  EXPECT_NEAR(x1.values[0], 1.5, 1e-12);
  EXPECT_NEAR(x1.values[1], 1.0, 1e-12);
  EXPECT_NEAR(x1.values[2], 1.5, 1e-12);
  EXPECT_EQ(d.singular_values.size(), 2u);
  EXPECT_THROW((void)decompose(small_matrix(), 0), UsageError);
  EXPECT_THROW((void)decompose(small_matrix(), 3), UsageError);
}

TEST(Schedule, MortalityFixtureIs38By19) {
  const ScheduleMatrix a = am();
  EXPECT_EQ(a.groups(), 38u);
  EXPECT_EQ(a.schedules(), 19u);
  EXPECT_EQ(a.group_labels.front(), "F_0");
  EXPECT_EQ(a.group_labels.back(), "M_85+");
}

TEST(Schedule, ProjectionRecoversInSampleWeights) {
  const ScheduleMatrix a = am();
  const Decomposition d = decompose(a, 3);
  for (std::size_t h = 0; h < a.schedules(); ++h) {
    const auto p = fit_weights(a.column(h), d.basis);
    const auto q = fit_weights_least_squares(a.column(h), d.basis);
    for (std::size_t i = 0; i < 3; ++i) {
      EXPECT_NEAR(p.betas[i], d.weights(h, i), 1e-10);
      EXPECT_NEAR(q.betas[i], d.weights(h, i), 1e-10);
    }
  }
}

TEST(Schedule, FitRejectsMismatchedSchedules) {
  const Decomposition d = decompose(small_matrix(), 2);
  AgeSchedule wrong{{"0", "1"}, {1.0, 2.0}, Scale::natural};
  EXPECT_THROW((void)fit_weights(wrong, d.basis), DataError);
  AgeSchedule logged{{"0", "1-4", "5-9"}, {1.0, 2.0, 3.0}, Scale::log};
  EXPECT_THROW((void)fit_weights(logged, d.basis), DataError);
}

TEST(Schedule, FullRankSmoothingIsIdentity) {
  std::mt19937_64 rng(1);
  ScheduleMatrix a;
  a.data = test::random_matrix(6, 4, rng);
  a.group_labels = {"0", "1", "2", "3", "4", "5+"};
  a.schedule_labels = {"w", "x", "y", "z"};
  EXPECT_LT(test::max_abs_diff(smooth_matrix(a, 4).data, a.data), 1e-12);
}

TEST(Schedule, QuantileIsLinearInterpolation) {
  EXPECT_DOUBLE_EQ(quantile({1, 2, 3, 4}, 0.25), 1.75);
  EXPECT_DOUBLE_EQ(quantile({4, 1, 3, 2}, 0.5), 2.5);
  EXPECT_DOUBLE_EQ(quantile({7}, 0.99), 7.0);
  EXPECT_DOUBLE_EQ(quantile({0, 10}, 0.01), 0.1);
  EXPECT_THROW((void)quantile({}, 0.5), DataError);
  EXPECT_THROW((void)quantile({1}, 1.5), DataError);
}

TEST(Schedule, ErrorMetricsOfKnownDifferences) {
  ScheduleMatrix p = small_matrix();
  ScheduleMatrix o = small_matrix();
  o.data = Matrix{{2, 1.5}, {1, 1}, {0, 2}};  // |errors| 0, .5, 0, 0, 1, 0
  const ErrorMetrics m = error_metrics(p, o);
  EXPECT_DOUBLE_EQ(m.mae, 0.25);
  EXPECT_DOUBLE_EQ(m.quantiles[2], 0.0);
  EXPECT_DOUBLE_EQ(m.quantiles[3], 0.375);
  EXPECT_NEAR(m.quantiles[4], 0.975, 1e-15);
  o.scale = Scale::log;
  EXPECT_THROW((void)error_metrics(p, o), DataError);
}

TEST(Schedule, ConcatAndSplitRoundTrip) {
  const ScheduleMatrix f = io::load_schedule_csv(test::data_path("mx_female.csv"));
  const ScheduleMatrix m = io::load_schedule_csv(test::data_path("mx_male.csv"));
  const auto [f2, m2] = split_sexes(concat_sexes(f, m));
  EXPECT_EQ(f2.data, f.data);
  EXPECT_EQ(m2.data, m.data);
  EXPECT_EQ(f2.group_labels, f.group_labels);
  ScheduleMatrix shifted = m;
  shifted.schedule_labels[0] = "1900";
  EXPECT_THROW((void)concat_sexes(f, shifted), DataError);
}

TEST(Schedule, ColumnCorrelationsMatchPearson) {
  const Matrix x{{1, 2, 0}, {2, 4, 1}, {3, 7, 0}, {4, 8, 1}};
  const Matrix r = column_correlations(x);
  const Eigen::MatrixXd e = test::to_eigen(x);
  const Eigen::MatrixXd c = e.rowwise() - e.colwise().mean();
  const Eigen::MatrixXd cov = c.transpose() * c;
  for (Eigen::Index i = 0; i < 3; ++i)
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(r(i, j), cov(i, j) / std::sqrt(cov(i, i) * cov(j, j)), 1e-14);
}

}  // namespace
}  // namespace agesvd
