#include "agesvd/measures.hpp"

#include <charconv>
#include <cmath>
#include <iostream>
#include <numeric>

#include "agesvd/error.hpp"

namespace agesvd {

namespace {

double parse_age_number(std::string_view text, std::string_view label) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end || text.empty()) {
    throw DataError("cannot parse age group label '" + std::string(label) + "'");
  }
  return value;
}

}  // namespace

AgeGroup parse_age_group(std::string_view label) {
  std::string_view text = label;
  if (text.starts_with(kFemalePrefix) || text.starts_with(kMalePrefix)) text.remove_prefix(2);
  if (text.ends_with('+')) return AgeGroup{parse_age_number(text.substr(0, text.size() - 1), label), std::nullopt};
  if (const auto dash = text.find('-'); dash != std::string_view::npos) {
    const double lo = parse_age_number(text.substr(0, dash), label);
    const double hi = parse_age_number(text.substr(dash + 1), label);
    if (hi < lo) throw DataError("age group '" + std::string(label) + "' has upper bound below lower bound");
    // "1-4" covers exact ages [1, 5).
    return AgeGroup{lo, hi - lo + 1.0};
  }
  return AgeGroup{parse_age_number(text, label), 1.0};
}

std::vector<AgeGroup> parse_age_grid(std::span<const std::string> labels) {
  std::vector<AgeGroup> grid;
  grid.reserve(labels.size());
  for (const auto& l : labels) grid.push_back(parse_age_group(l));
  return grid;
}

double LifeTable::survivors_at(double age) const {
  for (std::size_t i = 0; i < groups.size(); ++i) {
    if (groups[i].start == age) return lx[i];
  }
  // The exact end of the last closed group doubles as the open group's start,
  // so anything left is off the grid.
  throw UsageError("age " + std::to_string(age) + " is not a group boundary of the life table");
}

double default_ax(const AgeGroup& group) {
  if (group.open()) return 0.0;
  if (group.start == 0.0 && *group.width == 1.0) return 0.3;
  if (group.start == 1.0 && *group.width == 4.0) return 1.5;
  return *group.width / 2.0;
}

LifeTable life_table_from_mx(std::span<const double> mx, std::span<const AgeGroup> grid) {
  if (mx.empty() || mx.size() != grid.size()) throw DataError("life table: rates and age grid differ in length");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const bool last = i + 1 == grid.size();
    if (grid[i].open() != last) throw DataError("life table: exactly the last age group must be open-ended");
    if (!last && grid[i].start + *grid[i].width != grid[i + 1].start) {
      throw DataError("life table: age groups are not contiguous");
    }
    if (!std::isfinite(mx[i]) || mx[i] < 0.0) throw DataError("life table: rates must be finite and non-negative");
    if (last && !(mx[i] > 0.0)) throw DataError("life table: open-ended group needs a positive rate");
  }
  const std::size_t n = grid.size();
  LifeTable t;
  t.groups.assign(grid.begin(), grid.end());
  t.mx.assign(mx.begin(), mx.end());
  t.ax.resize(n);
  t.qx.resize(n);
  t.lx.resize(n);
  t.dx.resize(n);
  t.Lx.resize(n);
  t.Tx.resize(n);
  t.ex.resize(n);
  double l = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    t.lx[i] = l;
    t.ax[i] = default_ax(grid[i]);
    if (grid[i].open()) {
      t.qx[i] = 1.0;
      t.dx[i] = l;
      t.Lx[i] = l / mx[i];
      t.ax[i] = 1.0 / mx[i];
      break;
    }
    const double width = *grid[i].width;
    t.qx[i] = std::min(1.0, width * mx[i] / (1.0 + (width - t.ax[i]) * mx[i]));
    t.dx[i] = l * t.qx[i];
    const double next = l - t.dx[i];
    t.Lx[i] = width * next + t.ax[i] * t.dx[i];
    l = next;
  }
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    acc += t.Lx[i];
    t.Tx[i] = acc;
    t.ex[i] = t.lx[i] > 0.0 ? t.Tx[i] / t.lx[i] : 0.0;
  }
  return t;
}

LifeTable life_table_from_mx(const AgeSchedule& mx) {
  if (mx.scale != Scale::natural) throw DataError("life table needs rates on the natural scale");
  const auto grid = parse_age_grid(mx.group_labels);
  return life_table_from_mx(mx.values, grid);
}

double interval_death_prob(const LifeTable& table, double x, double n) {
  if (!(n > 0.0)) throw UsageError("interval width must be positive");
  const double start = table.survivors_at(x);
  const double end = table.survivors_at(x + n);
  if (start <= 0.0) return 1.0;
  return 1.0 - end / start;
}

double tfr(std::span<const double> asfr, double width) {
  if (!(width > 0.0)) throw UsageError("tfr: age-group width must be positive");
  for (const double r : asfr) {
    if (!std::isfinite(r) || r < 0.0) throw DataError("tfr: fertility rates must be finite and non-negative");
  }
  return width * std::accumulate(asfr.begin(), asfr.end(), 0.0);
}

double tfr(const AgeSchedule& asfr, double width) {
  if (asfr.scale != Scale::natural) throw DataError("tfr needs rates on the natural scale");
  return tfr(asfr.values, width);
}

double derive_delta(double hiv_prev, double art_cov) {
  if (!(hiv_prev >= 0.0 && hiv_prev <= 1.0) || !(art_cov >= 0.0 && art_cov <= 1.0)) {
    throw DataError("derive_delta: HIV prevalence and ART coverage must lie in [0, 1]");
  }
  const double delta = hiv_prev - art_cov;
  if (delta < 0.0) {
    std::clog << "warning: ART coverage " << art_cov << " exceeds HIV prevalence " << hiv_prev
              << "; clamping delta to 0\n";
    return 0.0;
  }
  return delta;
}

}  // namespace agesvd
