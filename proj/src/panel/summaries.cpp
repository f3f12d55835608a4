#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <set>

#include "colourrisk/csv.hpp"
#include "colourrisk/errors.hpp"
#include "colourrisk/panel.hpp"
#include "colourrisk/simd/kernels.hpp"

namespace colourrisk {

CorrelationMatrix correlation_matrix(const Matrix& rows) {
  const std::size_t n = rows.rows();
  const std::size_t k = rows.cols();
  if (n < 3) throw InputError("correlation matrix needs at least 3 rows, got " + std::to_string(n));
  const auto& kern = simd::kernels();

  Matrix centered(n, k);
  std::vector<double> norms(k);
  CorrelationMatrix out{Matrix(k, k), std::vector<bool>(k, false)};
  for (std::size_t j = 0; j < k; ++j) {
    const auto col = rows.col(j);
    const double mean = kern.sum(col.data(), n) / static_cast<double>(n);
    kern.affine(col.data(), centered.col(j).data(), n, mean, 1.0);
    norms[j] = std::sqrt(kern.dot(centered.col(j).data(), centered.col(j).data(), n));
    const double scale = std::max(1.0, std::fabs(mean));
    out.constant_column[j] = !(norms[j] > 1e-12 * scale * std::sqrt(static_cast<double>(n)));
  }
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = i; j < k; ++j) {
      double v = nan;
      if (out.defined(i, j)) {
        v = i == j ? 1.0
                   : kern.dot(centered.col(i).data(), centered.col(j).data(), n) / (norms[i] * norms[j]);
        v = std::clamp(v, -1.0, 1.0);
      }
      out.values(i, j) = v;
      out.values(j, i) = v;
    }
  }
  return out;
}

Matrix national_daily_totals(const DailyPanel& daily) {
  if (daily.regions.empty()) return {};
  std::set<Date> common(daily.regions.front().dates.begin(), daily.regions.front().dates.end());
  for (const auto& r : daily.regions) {
    std::set<Date> present(r.dates.begin(), r.dates.end());
    std::erase_if(common, [&](Date d) { return !present.contains(d); });
  }
  const std::vector<Date> dates(common.begin(), common.end());
  Matrix totals(dates.size(), kIndicatorCount);
  for (const auto& r : daily.regions) {
    std::size_t cursor = 0;
    for (std::size_t d = 0; d < r.dates.size(); ++d) {
      if (cursor < dates.size() && r.dates[d] == dates[cursor]) {
        for (std::size_t i = 0; i < kIndicatorCount; ++i) totals(cursor, i) += r.values[d][i];
        ++cursor;
      }
    }
  }
  return totals;
}

std::vector<WeeklyShare> population_share_by_colour(
    const LabelSeries& labels, const std::map<std::string, std::int64_t>& populations) {
  double total = 0.0;
  for (const auto& [region, pop] : populations) {
    if (pop <= 0) throw InputError("population for '" + region + "' must be positive");
    total += static_cast<double>(pop);
  }
  for (const auto& region : labels.regions()) {
    if (!populations.contains(region)) throw InputError("no population entry for '" + region + "'");
  }

  std::set<Date> grid;
  for (const auto& e : labels.entries) grid.insert(e.week_start);

  std::vector<WeeklyShare> out;
  for (const Date week : grid) {
    std::array<std::int64_t, 3> pop_by_level{};
    for (const auto& e : labels.entries) {
      if (e.week_start <= week && week <= e.week_end)
        pop_by_level[static_cast<std::size_t>(level_index(e.level))] += populations.at(e.region);
    }
    WeeklyShare share;
    share.week_start = week;
    std::int64_t covered = 0;
    for (std::size_t l = 0; l < 3; ++l) {
      share.share[l] = static_cast<double>(pop_by_level[l]) / total;
      covered += pop_by_level[l];
    }
    share.covered = static_cast<double>(covered) / total;
    out.push_back(share);
  }
  return out;
}

std::map<std::string, std::int64_t> parse_populations_csv(std::istream& in,
                                                          const RegionCatalogue* regions,
                                                          std::string source) {
  const CsvTable table = read_csv(in, std::move(source));
  if (table.header.size() < 2) throw InputError(table.source + ": expected columns region,population");
  std::map<std::string, std::int64_t> out;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string region = normalize_region(row[0], regions, nullptr);
    const auto pop = parse_integer(row[1]);
    if (!pop || *pop <= 0) throw InputError(table.location(r) + ": population must be a positive integer");
    if (!out.emplace(region, *pop).second)
      throw InputError(table.location(r) + ": duplicate population for '" + region + "'");
  }
  return out;
}

}  // namespace colourrisk
