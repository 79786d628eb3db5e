#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "agesvd/schedule.hpp"

namespace agesvd {

/// Age interval [start, start + width); an open-ended last group has no width.
struct AgeGroup {
  double start = 0.0;
  std::optional<double> width;

  [[nodiscard]] bool open() const noexcept { return !width.has_value(); }
  friend bool operator==(const AgeGroup&, const AgeGroup&) = default;
};

/// Parses "0", "1-4", "85+" (and sex-prefixed "F_1-4") style labels.
/// A single age "x" is the one-year group [x, x + 1).
[[nodiscard]] AgeGroup parse_age_group(std::string_view label);
/// Parses a full grid and checks it is contiguous with only the last group open.
[[nodiscard]] std::vector<AgeGroup> parse_age_grid(std::span<const std::string> labels);

/// Abridged period life table with radix l_0 = 1.
struct LifeTable {
  std::vector<AgeGroup> groups;
  std::vector<double> mx;
  std::vector<double> ax;
  std::vector<double> qx;
  std::vector<double> lx;
  std::vector<double> dx;
  std::vector<double> Lx;
  std::vector<double> Tx;
  std::vector<double> ex;

  [[nodiscard]] double e0() const { return ex.front(); }
  /// Survivors at an exact age lying on a group boundary.
  [[nodiscard]] double survivors_at(double age) const;
};

/// Average years lived in the interval by those dying in it: 0.3 for the
/// infant year, 1.5 for ages 1-4, half the width otherwise.
[[nodiscard]] double default_ax(const AgeGroup& group);

/// Builds the table from rates on the natural scale.
///
/// Closed intervals use q = n m / (1 + (n - a) m); the open interval has
/// q = 1 and L = l / m. Throws DataError for negative or non-finite rates,
/// a zero rate in the open interval, or a malformed grid.
[[nodiscard]] LifeTable life_table_from_mx(std::span<const double> mx, std::span<const AgeGroup> grid);
[[nodiscard]] LifeTable life_table_from_mx(const AgeSchedule& mx);

/// n_q_x = 1 - l(x + n) / l(x). Throws UsageError when either bound is off the grid.
[[nodiscard]] double interval_death_prob(const LifeTable& table, double x, double n);

/// width * sum of age-specific rates. Negative rates are a DataError.
[[nodiscard]] double tfr(std::span<const double> asfr, double width = 5.0);
[[nodiscard]] double tfr(const AgeSchedule& asfr, double width = 5.0);

/// hiv_prev - art_cov, clamped at zero (with a warning on stderr) when ART
/// coverage exceeds prevalence. Inputs outside [0, 1] are a DataError.
[[nodiscard]] double derive_delta(double hiv_prev, double art_cov);

}  // namespace agesvd
