#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <set>
#include <sstream>

#include "colourrisk/csv.hpp"
#include "colourrisk/errors.hpp"
#include "colourrisk/panel.hpp"

namespace colourrisk {

const RegionSeries* DailyPanel::find(std::string_view region) const {
  for (const auto& r : regions)
    if (r.region == region) return &r;
  return nullptr;
}

std::size_t DailyPanel::day_count() const {
  std::size_t n = 0;
  for (const auto& r : regions) n += r.dates.size();
  return n;
}

ColumnMap ColumnMap::from_json_text(std::string_view text) {
  ColumnMap map;
  std::array<bool, kIndicatorCount> seen{};
  try {
    const auto doc = nlohmann::json::parse(text);
    if (doc.contains("date_column")) map.date_column = doc.at("date_column").get<std::string>();
    if (doc.contains("region_column")) map.region_column = doc.at("region_column").get<std::string>();
    for (const auto& [key, rule] : doc.at("indicators").items()) {
      const auto id = IndicatorId::parse(key);
      if (!id) throw InputError("column map: unknown indicator '" + key + "'");
      ColumnRule r;
      if (rule.is_string()) {
        r.column = rule.get<std::string>();
      } else if (rule.contains("difference_of")) {
        r.column = rule.at("difference_of").get<std::string>();
        r.difference = true;
      } else {
        r.column = rule.at("column").get<std::string>();
      }
      map.rules[id->zero_based()] = r;
      seen[id->zero_based()] = true;
    }
  } catch (const nlohmann::json::exception& e) {
    throw InputError(std::string("column map: ") + e.what());
  }
  for (std::size_t i = 0; i < kIndicatorCount; ++i) {
    if (!seen[i])
      throw InputError("column map: no source for indicator " + IndicatorId::from_zero_based(i).code());
  }
  return map;
}

ColumnMap ColumnMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open column map '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

namespace {

struct RawRow {
  Date date;
  std::size_t row;
};

// Increment indicators and the cumulative series they are derived from.
constexpr std::array<std::pair<std::size_t, std::size_t>, 2> kIncrementPairs{{{10, 9}, {15, 14}}};

}  // namespace

DailyIngest parse_daily_csv(std::istream& in, const ColumnMap& mapping, const DateWindow& window,
                            const RegionCatalogue* regions, std::string source) {
  const CsvTable table = read_csv(in, std::move(source));
  const std::size_t date_col = table.require_column(mapping.date_column);
  const std::size_t region_col = table.require_column(mapping.region_column);
  std::array<std::size_t, kIndicatorCount> cols{};
  for (std::size_t i = 0; i < kIndicatorCount; ++i) {
    const auto& rule = mapping.rules[i];
    auto idx = table.column(rule.column);
    if (!idx) {
      throw InputError(table.source + ": missing mapped column '" + rule.column + "' (source of " +
                       IndicatorId::from_zero_based(i).code() + ")");
    }
    cols[i] = *idx;
  }

  DailyIngest result;
  result.rows_read = table.rows.size();

  std::set<std::string> unknown_regions;
  std::map<std::string, std::vector<RawRow>> by_region;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto date = Date::parse(row[date_col]);
    if (!date) throw InputError(table.location(r) + ": unparseable date '" + row[date_col] + "'");
    std::vector<std::string> w;
    const std::string region = normalize_region(row[region_col], regions, &w);
    if (!w.empty()) unknown_regions.insert(region);
    by_region[region].push_back({*date, r});
  }
  for (const auto& name : unknown_regions)
    result.warnings.push_back("region '" + name + "' is not in the region catalogue");

  auto cell_value = [&](std::size_t r, std::size_t indicator, bool allow_negative) -> std::optional<double> {
    const std::string& text = table.rows[r][cols[indicator]];
    if (trim(text).empty()) return std::nullopt;
    const auto v = parse_double(text);
    if (!v) {
      throw InputError(table.location(r) + ": unparseable number '" + text + "' in column '" +
                       mapping.rules[indicator].column + "'");
    }
    if (!allow_negative && *v < 0.0) {
      throw InputError(table.location(r) + ": negative value " + text + " in count column '" +
                       mapping.rules[indicator].column + "'");
    }
    return v;
  };

  for (auto& [region, rows] : by_region) {
    std::ranges::sort(rows, {}, &RawRow::date);
    for (std::size_t k = 1; k < rows.size(); ++k) {
      if (rows[k].date == rows[k - 1].date) {
        throw InputError(table.location(rows[k].row) + ": duplicate row for region '" + region +
                         "' on " + rows[k].date.iso());
      }
    }

    RegionSeries series;
    series.region = region;
    std::size_t negative_increments = 0;
    for (std::size_t k = 0; k < rows.size(); ++k) {
      const auto& raw = rows[k];
      if (!window.contains(raw.date)) {
        ++result.rows_outside_window;
        continue;
      }
      IndicatorVector x{};
      std::string drop_reason;
      for (std::size_t i = 0; i < kIndicatorCount; ++i) {
        const auto& rule = mapping.rules[i];
        const auto current = cell_value(raw.row, i, false);
        if (!current) {
          throw InputError(table.location(raw.row) + ": missing value in column '" + rule.column + "'");
        }
        if (!rule.difference) {
          x[i] = *current;
          continue;
        }
        if (k == 0) {
          drop_reason = "no previous day to difference '" + rule.column + "'";
          break;
        }
        const auto previous = cell_value(rows[k - 1].row, i, false);
        if (!previous) {
          drop_reason = "previous day lacks '" + rule.column + "'";
          break;
        }
        x[i] = *current - *previous;
        if (x[i] < 0.0) ++negative_increments;
      }
      if (!drop_reason.empty()) {
        result.dropped.push_back({region, raw.date, drop_reason});
        continue;
      }
      series.dates.push_back(raw.date);
      series.values.push_back(x);
    }
    if (negative_increments > 0) {
      result.warnings.push_back(region + ": " + std::to_string(negative_increments) +
                                " negative day-over-day increments (source corrections)");
    }

    // Directly mapped increments should agree with their cumulative source.
    for (const auto& [inc, cum] : kIncrementPairs) {
      if (mapping.rules[inc].difference || mapping.rules[cum].difference) continue;
      std::size_t mismatches = 0;
      for (std::size_t k = 1; k < series.dates.size(); ++k) {
        if (series.dates[k] - series.dates[k - 1] != 1) continue;
        const double expected = series.values[k][cum] - series.values[k - 1][cum];
        if (std::fabs(series.values[k][inc] - expected) > 1e-9 * std::max(1.0, std::fabs(expected)))
          ++mismatches;
      }
      if (mismatches > 0) {
        result.warnings.push_back(region + ": " + IndicatorId::from_zero_based(inc).code() +
                                  " differs from the daily change of " +
                                  IndicatorId::from_zero_based(cum).code() + " on " +
                                  std::to_string(mismatches) + " days");
      }
    }
    if (!series.dates.empty()) result.panel.regions.push_back(std::move(series));
  }
  if (result.panel.regions.empty()) {
    throw InputError(table.source + ": no rows inside the window " + window.first.iso() + ".." +
                     window.last.iso());
  }
  return result;
}

void write_daily_panel(std::ostream& out, const DailyPanel& panel) {
  out << "region,date";
  for (std::size_t i = 0; i < kIndicatorCount; ++i) out << ",X" << (i + 1);
  out << '\n';
  for (const auto& series : panel.regions) {
    for (std::size_t d = 0; d < series.dates.size(); ++d) {
      out << csv_escape(series.region) << ',' << series.dates[d].iso();
      for (double v : series.values[d]) out << ',' << format_double(v);
      out << '\n';
    }
  }
}

DailyPanel read_daily_panel(std::istream& in, std::string source) {
  const CsvTable table = read_csv(in, std::move(source));
  const std::size_t region_col = table.require_column("region");
  const std::size_t date_col = table.require_column("date");
  std::array<std::size_t, kIndicatorCount> cols{};
  for (std::size_t i = 0; i < kIndicatorCount; ++i)
    cols[i] = table.require_column("X" + std::to_string(i + 1));

  std::map<std::string, std::map<Date, std::pair<IndicatorVector, std::size_t>>> by_region;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const auto date = Date::parse(row[date_col]);
    if (!date) throw InputError(table.location(r) + ": unparseable date");
    IndicatorVector x{};
    for (std::size_t i = 0; i < kIndicatorCount; ++i) {
      const auto v = parse_double(row[cols[i]]);
      if (!v) throw InputError(table.location(r) + ": bad value in X" + std::to_string(i + 1));
      x[i] = *v;
    }
    auto [it, fresh] = by_region[row[region_col]].try_emplace(*date, x, r);
    if (!fresh)
      throw InputError(table.location(r) + ": duplicate date " + row[date_col] + " (first seen at " +
                       table.location(it->second.second) + ")");
  }
  DailyPanel panel;
  for (auto& [name, days] : by_region) {
    RegionSeries series;
    series.region = name;
    for (const auto& [date, entry] : days) {
      series.dates.push_back(date);
      series.values.push_back(entry.first);
    }
    panel.regions.push_back(std::move(series));
  }
  return panel;
}

}  // namespace colourrisk
