#include <algorithm>
#include <istream>
#include <map>
#include <ostream>

#include "colourrisk/csv.hpp"
#include "colourrisk/errors.hpp"
#include "colourrisk/panel.hpp"

namespace colourrisk {

Matrix WeeklyPanel::design() const {
  Matrix m(weeks.size(), kIndicatorCount);
  for (std::size_t w = 0; w < weeks.size(); ++w)
    for (std::size_t i = 0; i < kIndicatorCount; ++i) m(w, i) = weeks[w].x[i];
  return m;
}

std::vector<RiskLevel> WeeklyPanel::levels() const {
  std::vector<RiskLevel> y;
  y.reserve(weeks.size());
  for (const auto& w : weeks) y.push_back(w.y);
  return y;
}

WeeklyAggregation aggregate_weekly(const DailyPanel& daily, const LabelSeries& labels,
                                   const AggregateOptions& options) {
  WeeklyAggregation result;
  for (const auto& region : labels.regions()) {
    const RegionSeries* series = daily.find(region);
    if (!series) throw InputError("region '" + region + "' has labels but no daily data");

    WeeklyPanel panel;
    panel.region = region;
    panel.statistic = options.statistic;
    for (const LabelEntry* entry : labels.for_region(region)) {
      const auto first = std::ranges::lower_bound(series->dates, entry->week_start);
      const auto last = std::ranges::upper_bound(series->dates, entry->week_end);
      const auto days = static_cast<int>(last - first);
      if (days == 0) {
        throw InputError("label window " + entry->week_start.iso() + ".." + entry->week_end.iso() +
                         " for '" + region + "' has no daily data");
      }
      if (days < options.min_days) {
        result.rejected.push_back({region, entry->week_start, entry->week_end, days});
        continue;
      }
      WeekRow row;
      row.week_start = entry->week_start;
      row.week_end = entry->week_end;
      row.days = days;
      row.y = entry->level;
      const auto offset = static_cast<std::size_t>(first - series->dates.begin());
      for (std::size_t i = 0; i < kIndicatorCount; ++i) {
        double s = 0.0;
        for (int d = 0; d < days; ++d) s += series->values[offset + static_cast<std::size_t>(d)][i];
        row.x[i] = options.statistic == Statistic::mean ? s / days : s;
      }
      panel.weeks.push_back(row);
    }
    result.panels.push_back(std::move(panel));
  }
  return result;
}

void write_weekly_panel(std::ostream& out, const WeeklyPanel& panel) {
  out << "region,week_start,week_end,days,level,statistic";
  for (std::size_t i = 0; i < kIndicatorCount; ++i) out << ",X" << (i + 1);
  out << '\n';
  for (const auto& w : panel.weeks) {
    out << csv_escape(panel.region) << ',' << w.week_start.iso() << ',' << w.week_end.iso() << ','
        << w.days << ',' << level_code(w.y) << ',' << statistic_name(panel.statistic);
    for (double v : w.x) out << ',' << format_double(v);
    out << '\n';
  }
}

WeeklyPanel read_weekly_panel(std::istream& in, std::string source) {
  const CsvTable table = read_csv(in, std::move(source));
  const auto region_col = table.require_column("region");
  const auto start_col = table.require_column("week_start");
  const auto end_col = table.require_column("week_end");
  const auto days_col = table.require_column("days");
  const auto level_col = table.require_column("level");
  const auto stat_col = table.require_column("statistic");
  std::array<std::size_t, kIndicatorCount> cols{};
  for (std::size_t i = 0; i < kIndicatorCount; ++i)
    cols[i] = table.require_column("X" + std::to_string(i + 1));

  WeeklyPanel panel;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    if (r == 0) {
      panel.region = row[region_col];
      const auto stat = parse_statistic(row[stat_col]);
      if (!stat) throw InputError(table.location(r) + ": unknown statistic");
      panel.statistic = *stat;
    } else if (row[region_col] != panel.region) {
      throw InputError(table.location(r) + ": mixed regions in one weekly panel file");
    }
    WeekRow w;
    const auto start = Date::parse(row[start_col]);
    const auto end = Date::parse(row[end_col]);
    const auto days = parse_integer(row[days_col]);
    const auto level = parse_level_code(trim(row[level_col]));
    if (!start || !end || !days || !level) throw InputError(table.location(r) + ": malformed week row");
    w.week_start = *start;
    w.week_end = *end;
    w.days = static_cast<int>(*days);
    w.y = *level;
    for (std::size_t i = 0; i < kIndicatorCount; ++i) {
      const auto v = parse_double(row[cols[i]]);
      if (!v) throw InputError(table.location(r) + ": bad value in X" + std::to_string(i + 1));
      w.x[i] = *v;
    }
    panel.weeks.push_back(w);
  }
  return panel;
}

}  // namespace colourrisk
