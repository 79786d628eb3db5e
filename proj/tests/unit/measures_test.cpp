#include "agesvd/measures.hpp"

#include <gtest/gtest.h>

#include <random>

#include "agesvd/error.hpp"
#include "agesvd/io/csv.hpp"
#include "test_support.hpp"

namespace agesvd {
namespace {

std::vector<AgeGroup> standard_grid() {
  std::vector<std::string> labels{"0", "1-4"};
  for (int a = 5; a < 85; a += 5) labels.push_back(std::to_string(a) + "-" + std::to_string(a + 4));
  labels.push_back("85+");
  return parse_age_grid(labels);
}

// Spreadsheet-style oracle: explicit widths and separation factors, survivors
// carried forward one row at a time.
struct OracleRow {
  double l, q, big_l;
};

std::vector<OracleRow> oracle_table(const std::vector<double>& m) {
  const double widths[] = {1, 4, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5, 5};
  const double sep[] = {0.3, 1.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5, 2.5};
  std::vector<OracleRow> rows(m.size());
  double l = 1.0;
  for (std::size_t i = 0; i + 1 < m.size(); ++i) {
    const double q = widths[i] * m[i] / (1.0 + (widths[i] - sep[i]) * m[i]);
    const double next = l * (1.0 - q);
    rows[i] = {l, q, widths[i] * next + sep[i] * (l - next)};
    l = next;
  }
  rows.back() = {l, 1.0, l / m.back()};
  return rows;
}

TEST(AgeGroups, ParsesLabels) {
  EXPECT_EQ(parse_age_group("0"), (AgeGroup{0, 1}));
  EXPECT_EQ(parse_age_group("1-4"), (AgeGroup{1, 4}));
  EXPECT_EQ(parse_age_group("F_15-19"), (AgeGroup{15, 5}));
  EXPECT_TRUE(parse_age_group("85+").open());
  EXPECT_THROW((void)parse_age_group("old"), DataError);
}

TEST(LifeTable, SingleOpenGroupGivesReciprocalRate) {
  const std::vector<AgeGroup> grid{{0, std::nullopt}};
  const LifeTable t = life_table_from_mx(std::vector<double>{0.02}, grid);
  EXPECT_NEAR(t.e0(), 50.0, 1e-12);
  EXPECT_DOUBLE_EQ(t.qx[0], 1.0);
}

TEST(LifeTable, ZeroRateMeansNoDeaths) {
  const auto grid = parse_age_grid(std::vector<std::string>{"0-14", "15-59", "60+"});
  const LifeTable t = life_table_from_mx(std::vector<double>{0.01, 0.0, 0.1}, grid);
  EXPECT_DOUBLE_EQ(t.qx[1], 0.0);
  EXPECT_DOUBLE_EQ(t.dx[1], 0.0);
  EXPECT_DOUBLE_EQ(interval_death_prob(t, 15, 45), 0.0);
}

TEST(LifeTable, Female2011MatchesOracle) {
  const ScheduleMatrix f = io::load_schedule_csv(test::data_path("mx_female.csv"));
  const AgeSchedule col = f.column(f.schedules() - 1);
  ASSERT_EQ(f.schedule_labels.back(), "2011");
  const LifeTable t = life_table_from_mx(col);
  const auto oracle = oracle_table(col.values);
  double e0 = 0.0;
  for (const auto& r : oracle) e0 += r.big_l;
  EXPECT_NEAR(t.e0(), e0, 0.01);
  const double l15 = oracle[4].l;   // 15-19 is the fifth row
  const double l60 = oracle[13].l;  // 60-64
  EXPECT_NEAR(interval_death_prob(t, 15, 45), 1.0 - l60 / l15, 1e-6);
  EXPECT_NEAR(interval_death_prob(t, 0, 5), 1.0 - oracle[2].l, 1e-12);
}

TEST(LifeTable, StructuralInvariants) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> rate(1e-4, 0.3);
  const auto grid = standard_grid();
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> m(grid.size());
    for (auto& v : m) v = rate(rng);
    const LifeTable t = life_table_from_mx(m, grid);
    EXPECT_DOUBLE_EQ(t.lx[0], 1.0);
    EXPECT_DOUBLE_EQ(t.qx.back(), 1.0);
    for (std::size_t i = 0; i < m.size(); ++i) {
      EXPECT_GE(t.qx[i], 0.0);
      EXPECT_LE(t.qx[i], 1.0);
      if (i > 0) {
        EXPECT_LE(t.lx[i], t.lx[i - 1]);
        EXPECT_LT(t.Tx[i], t.Tx[i - 1]);
      }
      double tail = 0.0;
      for (std::size_t j = i; j < m.size(); ++j) tail += t.Lx[j];
      EXPECT_NEAR(t.Tx[i], tail, 1e-12 * tail);
      EXPECT_NEAR(t.ex[i], t.Tx[i] / t.lx[i], 1e-12 * t.ex[i]);
      EXPECT_GT(t.ex[i], 0.0);
    }
    // raising any single rate lowers e0
    const std::size_t probe = static_cast<std::size_t>(trial) % m.size();
    auto higher = m;
    higher[probe] *= 1.5;
    EXPECT_LT(life_table_from_mx(higher, grid).e0(), t.e0());
  }
}

TEST(LifeTable, Errors) {
  const auto grid = standard_grid();
  std::vector<double> m(grid.size(), 0.01);
  m[3] = -0.1;
  EXPECT_THROW((void)life_table_from_mx(m, grid), DataError);
  m[3] = 0.01;
  m.back() = 0.0;
  EXPECT_THROW((void)life_table_from_mx(m, grid), DataError);
  const auto gap = parse_age_grid(std::vector<std::string>{"0", "5-9", "10+"});
  EXPECT_THROW((void)life_table_from_mx(std::vector<double>{0.1, 0.1, 0.1}, gap), DataError);
  const auto closed = parse_age_grid(std::vector<std::string>{"0", "1-4"});
  EXPECT_THROW((void)life_table_from_mx(std::vector<double>{0.1, 0.1}, closed), DataError);
  m.back() = 0.2;
  const LifeTable t = life_table_from_mx(m, grid);
  EXPECT_THROW((void)interval_death_prob(t, 12, 45), UsageError);
  AgeSchedule logged{{"0+"}, {-3.0}, Scale::log};
  EXPECT_THROW((void)life_table_from_mx(logged), DataError);
}

TEST(Tfr, SumsTimesWidth) {
  EXPECT_NEAR(tfr(std::vector<double>(7, 0.1)), 3.5, 1e-12);
  EXPECT_DOUBLE_EQ(tfr(std::vector<double>(7, 0.0)), 0.0);
  EXPECT_THROW((void)tfr(std::vector<double>{0.1, -0.1}), DataError);
  const ScheduleMatrix fx = io::load_schedule_csv(test::data_path("fx.csv"));
  ASSERT_EQ(fx.schedule_labels.front(), "1993");
  EXPECT_NEAR(tfr(fx.column(0)), 2.985, 0.001);
  const std::vector<double> a{0.1, 0.2, 0.05};
  const std::vector<double> b{0.3, 0.0, 0.01};
  EXPECT_NEAR(tfr(std::vector<double>{0.4, 0.2, 0.06}), tfr(a) + tfr(b), 1e-14);
}

TEST(Delta, SubtractsAndClamps) {
  EXPECT_DOUBLE_EQ(derive_delta(0.03243, 0.0), 0.03243);
  EXPECT_NEAR(derive_delta(0.17586, 0.02192), 0.15394, 1e-12);
  EXPECT_DOUBLE_EQ(derive_delta(0.2, 0.2), 0.0);
  EXPECT_DOUBLE_EQ(derive_delta(0.1, 0.3), 0.0);
  EXPECT_THROW((void)derive_delta(1.2, 0.1), DataError);
}

}  // namespace
}  // namespace agesvd
